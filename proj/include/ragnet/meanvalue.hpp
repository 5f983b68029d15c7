#pragma once

#include <array>
#include <string>
#include <vector>

#include "ragnet/chain.hpp"
#include "ragnet/model.hpp"

namespace ragnet {

// Shorthand probabilities of the symmetric system, used throughout the
// mean-value and boundary-value computations:
//   p = s·l⁺ (transfer), m = s·l⁻ (deletion), a = s̄α (clear transmission),
//   q = s̄²αᾱ (collision-free success against a busy peer),
//   D = s+q and B = s+a (removal probabilities), delta = D−λ−p (slack).
struct SymmetricRates {
    double lambda = 0.0, lambda_bar = 0.0;
    double p = 0.0, m = 0.0, a = 0.0, q = 0.0;
    double D = 0.0, B = 0.0, delta = 0.0;
    double alpha = 0.0, s = 0.0, s_bar = 0.0;

    explicit SymmetricRates(const SymmetricParams& params);
};

struct SymmetricStability {
    bool stable = false;
    // Signed slacks (left minus right, negative = satisfied) of the two
    // stability conditions of the symmetric system.
    std::array<double, 2> margins{};
};

SymmetricStability symmetric_stability(const SymmetricParams& params);

// Explicit expected-queue-length bounds for the stable symmetric system.
// W0 and W1 are the printed occupancy-derivative coefficients; they are
// reported for reference but do not enter the bounds.  warning is non-empty
// when the stability slack is below 1e-6 ("near-singular").
struct MeanValueBounds {
    double L_low = 0.0;
    double L_up = 0.0;
    double S_term = 0.0;
    double W0 = 0.0;
    double W1 = 0.0;
    bool stable = false;
    std::string warning;
};

MeanValueBounds queue_bounds(const SymmetricParams& params);

// Empty-state probabilities of the symmetric system, in the convention
// pi10 = P(queue 2 empty) = P(queue 1 empty), pi00 = P(both empty).
// pi1_10 is the boundary occupancy derivative sum_i i·P(q1=i, q2=0),
// p_both_busy = P(both queues nonempty).
struct PiEstimates {
    double pi00 = 0.0;
    double pi10 = 0.0;
    double pi1_10 = 0.0;
    double p_both_busy = 0.0;
};

// Exact estimates from a truncated stationary distribution (the occupancy
// derivative needs the full distribution, not just summary statistics).
// Symmetric pairs of quantities are averaged.
PiEstimates pi_from_solution(const StationarySolution& solution);

// Expected queue length per user computed by two independent exact routes
// from the empty-state probabilities: a transfer-flow balance identity and
// the second-moment relation.  The printed intermediate forms of both
// routes carry misprints; see verbatim_l_forms for those, and the unit
// tests for the arbitration between them.
struct LFromPi {
    double via_flow_balance = 0.0;
    double via_second_moment = 0.0;
};

LFromPi l_from_pi(const PiEstimates& pi, const SymmetricParams& params);

// The two queue-length formulas exactly as printed (occupancy-derivative
// form with the W0/W1 coefficients, and the balance form with the
// p(λ+p)/D transfer term), for consistency reporting.
LFromPi verbatim_l_forms(const PiEstimates& pi, const SymmetricParams& params);

// Signed residuals of the stationary flow relations evaluated on estimated
// statistics: [0] and [1] are the two per-queue conservation-of-flow
// equations (meaningful for general parameters); [2] is the empty-state
// balance and [3] the transfer-flow balance as printed, both of the
// symmetric system (evaluated with user-1 parameters).
std::array<double, 4> flow_residuals(const SimStats& stats,
                                     const ModelParams& params);

// One row of a swept bound curve; x is the swept parameter value.
struct BoundRow {
    double x = 0.0;
    bool stable = false;
    double L_low = 0.0;
    double L_up = 0.0;
    bool has_oracle = false;
    double L_oracle = 0.0;
};

// Plot-ready CSV for bound curves: header x,stable,L_low,L_up and an
// L_oracle column when requested; unstable rows keep the numeric cells
// empty.  Numbers are printed in shortest round-trip form.
std::string bounds_csv(const std::vector<BoundRow>& rows, bool oracle_column);

}  // namespace ragnet
