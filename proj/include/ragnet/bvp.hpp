#pragma once

#include <complex>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragnet/meanvalue.hpp"
#include "ragnet/model.hpp"

namespace ragnet {

using complex_d = std::complex<double>;

// Generating-function kernel of the symmetric system: phi1/phi2 encode the
// one-busy-queue slot laws, phi3 the both-busy law, H the arrival pgf factor,
// and Z(x,y) = xy − phi3(x,y) the kernel whose zero set carries the boundary
// value problem.
struct KernelFuncs {
    explicit KernelFuncs(const SymmetricParams& params);

    complex_d H(complex_d x, complex_d y) const;
    complex_d phi1(complex_d x, complex_d y) const;
    complex_d phi2(complex_d x, complex_d y) const;
    complex_d phi3(complex_d x, complex_d y) const;
    complex_d Z(complex_d x, complex_d y) const;

    double lambda, alpha, s, l_plus, l_minus;
};

struct KernelValues {
    complex_d phi1, phi2, phi3, Z;
};

KernelValues kernel_eval(complex_d x, complex_d y,
                         const SymmetricParams& params);

// The radial part of the kernel zero tuple (x,y) = (g·r, g/r) for |r| = 1:
// the root of g² = phi3(gr, g/r) in (0,1], on the branch continuous in r
// anchored at g(1) = 1.  Solved by marching a Newton-polished quartic root
// from r = 1, with companion-matrix roots as a fallback.
double kernel_root_g(complex_d r, const SymmetricParams& params);

// Discretization of the unit circle carrying the conformal boundary data:
// node j is z_j = exp(2πij/M); the zero-set point above it is
// x(z_j) = g_j·exp(i·angle_j), y(z_j) = conj(x(z_j)).  G and S are the
// boundary-condition coefficient and right-hand side, gamma_plus the interior
// boundary values of the logarithmic factorization.
struct CircleGrid {
    int M = 0;
    std::vector<complex_d> z;
    std::vector<double> angle;
    std::vector<double> g;
    std::vector<complex_d> x, y;
    std::vector<complex_d> G, S;
    std::vector<complex_d> gamma_plus;
    int iterations = 0;
    double final_diff = 0.0;
    double max_kernel_residual = 0.0;
};

// Solves the angle integral equation by damped fixed-point iteration with
// the conjugation operator applied spectrally; M must be a power of two
// ≥ 256.  The step is accepted at tolerance 1e-12 (max 500 iterations; an
// unconverged run with final step below 1e-9 is accepted as stalled at
// rounding level).
CircleGrid solve_theodorsen(const SymmetricParams& params, int M);

// Fills grid.G and grid.S from the kernel values on the zero set.
void boundary_functions(CircleGrid& grid, const SymmetricParams& params);

// Index of the factorized boundary coefficient: 1 + winding of z⁻¹G(z),
// computed by accumulated argument increments (must be an integer winding
// within 1e-6).
int compute_index(const CircleGrid& grid);

struct BvpSolution {
    CircleGrid grid;
    int chi = 0;
    complex_d c0{};
    complex_d c1{};
    double pi00 = 0.0;
    double pi10 = 0.0;
    double pi1_10 = 0.0;
    double L_exact = 0.0;
    double L_second_moment = 0.0;  // cross-check route for L_exact
    double bc_residual = 0.0;      // max boundary-condition residual on nodes

    // Truncated power-series coefficients (positive frequencies) of the
    // interior factorization exponent, the particular part, and log(x(z)/z);
    // the full spectra back the independent exterior evaluation.
    std::vector<complex_d> gamma_coeffs, psi_coeffs, logx_coeffs;
    std::vector<complex_d> gamma_spectrum, psi_spectrum;

    complex_d phi1_interior(complex_d z) const;  // Φ1(z), |z| < 1
    complex_d phi2_exterior(complex_d z) const;  // Φ2(z), |z| > 1
    complex_d x_of(complex_d z) const;           // conformal map, |z| ≤ 1

    // Joint queue-length pgf Π(x,y) for real x, y in [0,1), evaluated via
    // the functional equation; refuses points too close to the kernel zero
    // set.  Convenience evaluator; the load-bearing outputs are pi00, pi10,
    // pi1_10, L_exact.
    double joint_pgf(double x, double y) const;

    PiEstimates pi() const;
    nlohmann::json to_json() const;

private:
    friend BvpSolution solve_riemann(const SymmetricParams&, int);
    SymmetricParams params_{};
};

// End-to-end solution of the boundary value problem: conformal grid,
// factorization, constants (c1 is forced to 0 by the side conditions, c0 by
// Φ1(0) = 0), empty-state probabilities, the boundary occupancy derivative
// (one-sided composite differencing with Richardson extrapolation), and the
// exact expected queue length.
BvpSolution solve_riemann(const SymmetricParams& params, int M);

}  // namespace ragnet
