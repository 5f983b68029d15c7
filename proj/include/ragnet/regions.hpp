#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "ragnet/chain.hpp"
#include "ragnet/model.hpp"

namespace ragnet {

enum class SubRegion { R1, R2, both, none };
enum class Which { stability, throughput };

const char* to_string(SubRegion v);
const char* to_string(Which v);

// Membership verdict for one arrival-rate pair.  margins[0..1] are the two
// signed slacks (left side minus right side, negative = satisfied) of the
// first sub-region's conditions, margins[2..3] those of the second.
// Inequalities are strict: a margin within 1e-12 of zero counts as a
// boundary point, reported as a non-member with boundary=true.
struct RegionVerdict {
    bool member = false;
    SubRegion via = SubRegion::none;
    std::array<double, 4> margins{};
    bool boundary = false;
};

RegionVerdict in_stability_region(double lambda1, double lambda2,
                                  const ModelParams& params);
RegionVerdict in_throughput_region(double lambda1, double lambda2,
                                   const ModelParams& params);

// Saturated-system rates seen by the non-dominant queue; all probabilities.
// lambda(k)_int is the internal (signal-transfer) arrival probability into
// queue k, p_empty_other the stationary empty probability of the companion
// queue, m_k = mu_k + s_k·l_k_minus the total removal probability.
struct DominantRates {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double lambda1_int = 0.0;
    double lambda2_int = 0.0;
    double p_empty_other = 0.0;
};

DominantRates dominant_rates(const ModelParams& params, Dominant dominant);

enum class DriftVerdict { positive_recurrent, null_recurrent, transient };

const char* to_string(DriftVerdict v);

// Mean-drift classification of the quarter-plane walk.  mu3/nu3 are the
// interior drift generating-function derivatives, (mu1d, nu1d) those of the
// horizontal-boundary law and (mu2d, nu2d) of the vertical one.  r1 and r2
// are the boundary drift discriminants; an r that is not needed for the
// verdict and whose denominator vanishes is left at 0.
struct DriftClassification {
    double mu3 = 0.0, nu3 = 0.0;
    double mu1d = 0.0, nu1d = 0.0;
    double mu2d = 0.0, nu2d = 0.0;
    double r1 = 0.0, r2 = 0.0;
    DriftVerdict verdict = DriftVerdict::transient;
};

DriftClassification classify_drift(double lambda1, double lambda2,
                                   const ModelParams& params);

// Boundary polyline of the chosen region: `resolution` points, one bisection
// on lambda1 (to 1e-10) per lambda2 grid value, ordered by lambda2.
std::vector<std::pair<double, double>> trace_boundary(const ModelParams& params,
                                                      Which which,
                                                      int resolution);

// Union of the region over all transmission probabilities on the open
// uniform grid alpha = i/(G+1), i=1..G (both coordinates).  The arrival-rate
// grid uses the same convention with L = lambda_grid_resolution points per
// axis.  member is row-major with lambda1 as the slow index.
struct ClosureGrid {
    std::vector<double> alpha_grid;
    std::vector<double> lambda1;
    std::vector<double> lambda2;
    std::vector<std::uint8_t> member;

    bool at(int i, int j) const {
        return member[std::size_t(i) * lambda2.size() + j] != 0;
    }
};

ClosureGrid region_closure(const ModelParams& base, Which which,
                           int alpha_grid_resolution,
                           int lambda_grid_resolution);

}  // namespace ragnet
