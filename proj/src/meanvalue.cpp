#include "ragnet/meanvalue.hpp"

#include <cmath>
#include <limits>

#include "ragnet/errors.hpp"

namespace ragnet {

SymmetricRates::SymmetricRates(const SymmetricParams& params) {
    params.validate();
    lambda = params.lambda;
    lambda_bar = 1.0 - lambda;
    alpha = params.alpha;
    s = params.s;
    s_bar = 1.0 - s;
    p = s * params.l_plus;
    m = s * params.l_minus;
    a = s_bar * alpha;
    q = s_bar * s_bar * alpha * (1.0 - alpha);
    D = s + q;
    B = s + a;
    delta = D - lambda - p;
}

SymmetricStability symmetric_stability(const SymmetricParams& params) {
    const SymmetricRates r(params);
    SymmetricStability out;
    out.margins[0] = (r.lambda + r.p) - r.D;
    if (r.D == 0.0) {
        // Degenerate no-service system; the load condition already fails
        // whenever anything arrives.
        out.margins[1] = out.margins[0];
        out.stable = false;
        return out;
    }
    // Load offered to a queue must stay below the service it receives, with
    // the busy fraction rho = (λ+p)/D splitting the two service regimes.
    const double rho = (r.lambda + r.p) / r.D;
    const double lhs = r.lambda + r.p * rho;
    const double rhs = (r.s + r.a) * (1.0 - rho) + rho * r.D;
    out.margins[1] = lhs - rhs;
    out.stable = out.margins[0] < 0.0 && out.margins[1] < 0.0;
    return out;
}

MeanValueBounds queue_bounds(const SymmetricParams& params) {
    const SymmetricStability st = symmetric_stability(params);
    if (!st.stable) {
        throw NumericError("unstable: queue-length bounds require a stable "
                           "symmetric system");
    }
    const SymmetricRates r(params);

    MeanValueBounds out;
    out.stable = true;
    if (r.delta < 1e-6) {
        out.warning = "near-singular: stability slack below 1e-6";
    }

    const double X = r.lambda * r.lambda_bar + r.p * (r.lambda + r.p) / r.D;
    const double C = 4.0 * r.lambda * (1.0 - r.m - r.q) + r.lambda * r.lambda -
                     2.0 * r.m - 2.0 * r.q + (4.0 * r.lambda + 2.0) * r.delta;
    const double lead = (r.p + r.a - r.q) / (2.0 * (r.B + r.p) * r.delta);
    out.S_term =
        lead * (C - 2.0 * (2.0 * r.q - r.a + r.m) * X / (r.q - r.p - r.a));
    out.L_low = out.S_term;
    out.L_up = out.S_term + r.m * r.m * lead;

    // Printed occupancy-derivative coefficients, reported for reference;
    // undefined when the system has no packet-removing signal outcome and no
    // collision-free success (m+q = 0).
    const double mq = r.m + r.q;
    if (mq > 0.0) {
        const double mq2 = mq * mq;
        out.W1 = (r.lambda * (2.0 * r.q - r.a - r.m) +
                  r.p * (r.q + r.m - r.s_bar * (r.s + r.a))) /
                 mq2;
        out.W0 = (r.lambda * (r.a - r.q) - r.p * mq -
                  r.s_bar * (r.s + r.a)) /
                 mq2;
    } else {
        out.W0 = out.W1 = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

PiEstimates pi_from_solution(const StationarySolution& sol) {
    PiEstimates pi;
    pi.pi00 = sol.stats.p_both_empty;
    pi.pi10 = 0.5 * (sol.stats.p_empty1 + sol.stats.p_empty2);
    pi.p_both_busy = sol.stats.p_both_busy;
    double d1 = 0.0, d2 = 0.0;
    for (int i = 0; i <= sol.N; ++i) {
        d1 += double(i) * sol.at(i, 0);
        d2 += double(i) * sol.at(0, i);
    }
    pi.pi1_10 = 0.5 * (d1 + d2);
    return pi;
}

LFromPi l_from_pi(const PiEstimates& pi, const SymmetricParams& params) {
    const SymmetricRates r(params);
    const double U = pi.pi10, V = pi.pi00, W = pi.p_both_busy;
    const double P110 = pi.pi1_10;

    LFromPi out;
    // Transfer-flow balance route: the exact per-queue balance replaces the
    // printed p(λ+p)/D transfer term by s̄pW + p(U−V).
    out.via_flow_balance =
        (r.lambda * r.lambda_bar + r.s_bar * r.p * W + r.p * (U - V) +
         (r.q - r.a - r.p) * P110) /
        r.delta;
    // Second-moment route, solved for L.
    out.via_second_moment =
        (4.0 * r.lambda * (1.0 - r.m - r.q) + r.lambda * r.lambda -
         2.0 * r.m - 2.0 * r.q + (4.0 * r.lambda + 2.0) * r.delta +
         2.0 * P110 * (2.0 * r.q - r.a + r.m) + r.m * r.m * W) /
        (4.0 * r.delta);
    return out;
}

LFromPi verbatim_l_forms(const PiEstimates& pi, const SymmetricParams& params) {
    const SymmetricRates r(params);
    const double U = pi.pi10, V = pi.pi00, P110 = pi.pi1_10;

    LFromPi out;
    const double mq = r.m + r.q;
    if (mq > 0.0) {
        const double mq2 = mq * mq;
        const double W1 = (r.lambda * (2.0 * r.q - r.a - r.m) +
                           r.p * (r.q + r.m - r.s_bar * (r.s + r.a))) /
                          mq2;
        const double W0 = (r.lambda * (r.a - r.q) - r.p * mq -
                           r.s_bar * (r.s + r.a)) /
                          mq2;
        out.via_flow_balance = ((r.q - r.a - r.p) / mq) * P110 + W1 * U + W0 * V;
    } else {
        out.via_flow_balance = std::numeric_limits<double>::quiet_NaN();
    }
    out.via_second_moment =
        (r.lambda * r.lambda_bar + r.p * (r.lambda + r.p) / r.D +
         (r.q - r.a - r.p) * P110) /
        r.delta;
    return out;
}

std::array<double, 4> flow_residuals(const SimStats& stats,
                                     const ModelParams& p) {
    p.validate();
    const double pi10 = stats.p_empty2;  // P(queue 2 empty)
    const double pi01 = stats.p_empty1;
    const double pi00 = stats.p_both_empty;
    const double both_busy = 1.0 - pi10 - pi01 + pi00;
    const double c1 = 1.0 - p.s1, c2 = 1.0 - p.s2;
    const double b1 = 1.0 - p.alpha1, b2 = 1.0 - p.alpha2;

    std::array<double, 4> res{};
    // Per-queue conservation of flow: arrivals (external + transfers in)
    // balance removals (signal or collision-free success, split by whether
    // the other queue is busy).
    res[0] = (p.lambda1 + p.s2 * p.l2_plus * (1.0 - pi10)) -
             ((p.s1 + c1 * c2 * p.alpha1 * b2) * both_busy +
              (p.s1 + c1 * p.alpha1) * (pi10 - pi00));
    res[1] = (p.lambda2 + p.s1 * p.l1_plus * (1.0 - pi01)) -
             ((p.s2 + c1 * c2 * p.alpha2 * b1) * both_busy +
              (p.s2 + c2 * p.alpha2) * (pi01 - pi00));

    // Symmetric-system relations, evaluated with user-1 parameters.
    SymmetricParams sym;
    sym.lambda = p.lambda1;
    sym.alpha = p.alpha1;
    sym.s = p.s1;
    sym.l_minus = p.l1_minus;
    sym.l_plus = p.l1_plus;
    const SymmetricRates r(sym);
    // Empty-state balance: letting the occupancy generating variable go to 1.
    res[2] = pi10 * (r.a - 2.0 * r.q - r.m) + pi00 * (r.q - r.a) + r.delta;
    // Transfer-flow balance as printed (left side p(λ+p)/D).
    const double W = stats.p_both_busy;
    res[3] = (r.D > 0.0 ? r.p * (r.lambda + r.p) / r.D : 0.0) -
             (r.s_bar * r.p * W + r.p * (pi10 - pi00));
    return res;
}

std::string bounds_csv(const std::vector<BoundRow>& rows, bool oracle_column) {
    const auto num = [](double v) { return nlohmann::json(v).dump(); };
    std::string out = "x,stable,L_low,L_up";
    if (oracle_column) out += ",L_oracle";
    out += '\n';
    for (const BoundRow& row : rows) {
        out += num(row.x);
        out += row.stable ? ",true," : ",false,";
        if (row.stable) {
            out += num(row.L_low) + ',' + num(row.L_up);
        } else {
            out += ',';
        }
        if (oracle_column) {
            out += ',';
            if (row.has_oracle) out += num(row.L_oracle);
        }
        out += '\n';
    }
    return out;
}

}  // namespace ragnet
