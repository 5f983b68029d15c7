#pragma once

#include <complex>
#include <vector>

namespace ragnet::fft {

using cvec = std::vector<std::complex<double>>;

// In-place radix-2 decimation-in-time transform; size must be a power of
// two.  forward() computes sum_j a_j e^{-2πi jk/N} (no normalization);
// inverse() applies the conjugate transform and divides by N.
void forward(cvec& a);
void inverse(cvec& a);

bool is_power_of_two(std::size_t n);

}  // namespace ragnet::fft
