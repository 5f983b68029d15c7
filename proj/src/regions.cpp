#include "ragnet/regions.hpp"

#include <cmath>

#include "ragnet/errors.hpp"

namespace ragnet {

const char* to_string(SubRegion v) {
    switch (v) {
        case SubRegion::R1: return "R1";
        case SubRegion::R2: return "R2";
        case SubRegion::both: return "both";
        case SubRegion::none: return "none";
    }
    return "?";
}

const char* to_string(Which v) {
    return v == Which::stability ? "stability" : "throughput";
}

const char* to_string(DriftVerdict v) {
    switch (v) {
        case DriftVerdict::positive_recurrent: return "positive-recurrent";
        case DriftVerdict::null_recurrent: return "null-recurrent";
        case DriftVerdict::transient: return "transient";
    }
    return "?";
}

namespace {

constexpr double kBoundaryEps = 1e-12;

// Signed slacks of one sub-region's pair of conditions, with queue `a`
// playing the dominant role and queue `b` the saturated-environment one.
// The stable-throughput variant replaces both right-hand sides' own-signal
// terms s·1 by the transfer share s·l_plus.
struct UserView {
    double lambda, alpha, s, l_plus;
};

std::array<double, 2> sub_margins(const UserView& a, const UserView& b,
                                  bool throughput) {
    const double sa = 1.0 - a.s, sb = 1.0 - b.s;
    const double removal_b = b.alpha * sb * (1.0 - a.alpha) * sa + b.s;
    const double load_b = b.lambda + a.s * a.l_plus;
    const double feedback =
        b.s * b.l_plus + a.alpha * sa * (1.0 - (1.0 - b.alpha) * sb);
    const double lhs1 = a.lambda + load_b * feedback / removal_b;
    const double rhs1 = a.alpha * sa + (throughput ? a.s * a.l_plus : a.s);
    const double rhs2 =
        throughput ? b.alpha * sb * (1.0 - a.alpha) * sa + b.s * b.l_plus
                   : removal_b;
    return {lhs1 - rhs1, load_b - rhs2};
}

bool strictly_inside(const std::array<double, 2>& m) {
    return m[0] < 0.0 && m[1] < 0.0 && std::fabs(m[0]) >= kBoundaryEps &&
           std::fabs(m[1]) >= kBoundaryEps;
}

RegionVerdict region_verdict(double lambda1, double lambda2,
                             const ModelParams& p, bool throughput) {
    p.validate();
    const UserView u1{lambda1, p.alpha1, p.s1, p.l1_plus};
    const UserView u2{lambda2, p.alpha2, p.s2, p.l2_plus};
    const auto m1 = sub_margins(u1, u2, throughput);
    const auto m2 = sub_margins(u2, u1, throughput);

    RegionVerdict v;
    v.margins = {m1[0], m1[1], m2[0], m2[1]};
    const bool in1 = strictly_inside(m1);
    const bool in2 = strictly_inside(m2);
    v.member = in1 || in2;
    v.via = in1 && in2 ? SubRegion::both
            : in1      ? SubRegion::R1
            : in2      ? SubRegion::R2
                       : SubRegion::none;
    for (double m : v.margins) {
        if (std::fabs(m) < kBoundaryEps) {
            v.boundary = true;
        }
    }
    return v;
}

}  // namespace

RegionVerdict in_stability_region(double lambda1, double lambda2,
                                  const ModelParams& params) {
    return region_verdict(lambda1, lambda2, params, false);
}

RegionVerdict in_throughput_region(double lambda1, double lambda2,
                                   const ModelParams& params) {
    return region_verdict(lambda1, lambda2, params, true);
}

DominantRates dominant_rates(const ModelParams& p, Dominant dominant) {
    p.validate();
    // Views with queue `a` dominant (saturated) and queue `b` observed.
    const bool r1 = dominant == Dominant::R1;
    const double la_s = r1 ? p.s1 : p.s2;
    const double la_lp = r1 ? p.l1_plus : p.l2_plus;
    const double la_lm = r1 ? p.l1_minus : p.l2_minus;
    const double la_alpha = r1 ? p.alpha1 : p.alpha2;
    const double lb_lambda = r1 ? p.lambda2 : p.lambda1;
    const double lb_s = r1 ? p.s2 : p.s1;
    const double lb_lp = r1 ? p.l2_plus : p.l1_plus;
    const double lb_lm = r1 ? p.l2_minus : p.l1_minus;
    const double lb_alpha = r1 ? p.alpha2 : p.alpha1;

    const double sa = 1.0 - la_s, sb = 1.0 - lb_s;
    const double ab = 1.0 - lb_alpha, aa = 1.0 - la_alpha;

    // Removal probability of the observed queue against an always-busy
    // companion, and its total (external + transfer) arrival probability.
    const double mb = lb_alpha * sb * aa * sa + lb_s;
    const double load_b = lb_lambda + la_s * la_lp;
    if (load_b >= mb) {
        throw NumericError("saturated companion queue: the observed queue is "
                           "unstable in the dominant system");
    }
    const double p_empty = 1.0 - load_b / mb;

    // Removal probability of the dominant queue given the observed queue's
    // empty probability, and the transfer flow it receives back.
    const double ma = la_alpha * sa * (p_empty + (1.0 - p_empty) * ab * sb) + la_s;
    const double lam_a_int = lb_s * lb_lp * (1.0 - p_empty);

    DominantRates out;
    const double mu_a = ma - la_s * la_lm;
    const double mu_b = mb - lb_s * lb_lm;
    // Into the dominant queue flows the observed queue's transfer share; the
    // observed queue receives the dominant one's share unconditionally (a
    // saturated queue is never idle).
    if (r1) {
        out.m1 = ma;
        out.m2 = mb;
        out.mu1 = mu_a;
        out.mu2 = mu_b;
        out.lambda1_int = lam_a_int;
        out.lambda2_int = la_s * la_lp;
    } else {
        out.m2 = ma;
        out.m1 = mb;
        out.mu2 = mu_a;
        out.mu1 = mu_b;
        out.lambda2_int = lam_a_int;
        out.lambda1_int = la_s * la_lp;
    }
    out.p_empty_other = p_empty;
    return out;
}

DriftClassification classify_drift(double lambda1, double lambda2,
                                   const ModelParams& p) {
    p.validate();
    const double s1 = p.s1, s2 = p.s2, c1 = 1.0 - s1, c2 = 1.0 - s2;
    const double a1 = p.alpha1, a2 = p.alpha2, b1 = 1.0 - a1, b2 = 1.0 - a2;

    DriftClassification d;
    d.mu3 = lambda1 + s2 * p.l2_plus + 1.0 - (s1 + c1 * c2 * a1 * b2);
    d.nu3 = lambda2 + s1 * p.l1_plus + 1.0 - (s2 + c1 * c2 * a2 * b1);
    d.mu1d = lambda1 + c1 * b1;
    d.nu1d = lambda2 + s1 * p.l1_plus;
    d.mu2d = lambda1 + s2 * p.l2_plus;
    d.nu2d = lambda2 + c2 * b2;

    const double dx = 1.0 - d.mu3;  // -1 × interior drift of queue 1
    const double dy = 1.0 - d.nu3;

    auto verdict_from = [](double r1, double r2) {
        if (r1 < 0.0 && r2 < 0.0) return DriftVerdict::positive_recurrent;
        if (r1 > 0.0 || r2 > 0.0) return DriftVerdict::transient;
        return DriftVerdict::null_recurrent;
    };

    if (d.mu3 > 1.0 && d.nu3 > 1.0) {
        d.verdict = DriftVerdict::transient;
    } else if (dx > 0.0 && dy > 0.0) {
        d.r1 = d.mu1d - 1.0 - d.nu1d * dx / dy;
        d.r2 = d.nu2d - 1.0 - d.mu2d * dy / dx;
        d.verdict = verdict_from(d.r1, d.r2);
    } else if (dx > 0.0) {  // queue 2 drifts outward: verdict rests on r2
        d.r2 = d.nu2d - 1.0 - d.mu2d * dy / dx;
        d.verdict = d.r2 < 0.0   ? DriftVerdict::positive_recurrent
                    : d.r2 > 0.0 ? DriftVerdict::transient
                                 : DriftVerdict::null_recurrent;
    } else if (dy > 0.0) {
        d.r1 = d.mu1d - 1.0 - d.nu1d * dx / dy;
        d.verdict = d.r1 < 0.0   ? DriftVerdict::positive_recurrent
                    : d.r1 > 0.0 ? DriftVerdict::transient
                                 : DriftVerdict::null_recurrent;
    } else {
        throw NumericError("indeterminate: a boundary drift discriminant has "
                           "a vanishing denominator (1-mu3 or 1-nu3 is zero)");
    }
    return d;
}

std::vector<std::pair<double, double>> trace_boundary(const ModelParams& params,
                                                      Which which,
                                                      int resolution) {
    params.validate();
    if (resolution < 2) {
        throw ConfigError("trace resolution must be at least 2");
    }
    auto member = [&](double l1, double l2) {
        return which == Which::stability
                   ? in_stability_region(l1, l2, params).member
                   : in_throughput_region(l1, l2, params).member;
    };
    // The largest admissible lambda2 at lambda1 = 0, then one bisection on
    // lambda1 per grid value of lambda2.  Margins are increasing in the
    // arrival rates, so membership is monotone along both axes.
    auto bisect = [](auto&& inside) {
        double lo = 0.0, hi = 1.0;
        if (!inside(0.0)) {
            return 0.0;
        }
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (inside(mid) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double l2_max = bisect([&](double t) { return member(0.0, t); });

    std::vector<std::pair<double, double>> line;
    line.reserve(std::size_t(resolution));
    for (int j = 0; j < resolution; ++j) {
        const double l2 = l2_max * double(j) / double(resolution - 1);
        const double l1 = bisect([&](double t) { return member(t, l2); });
        line.emplace_back(l1, l2);
    }
    return line;
}

ClosureGrid region_closure(const ModelParams& base, Which which,
                           int alpha_grid_resolution,
                           int lambda_grid_resolution) {
    if (alpha_grid_resolution < 2 || lambda_grid_resolution < 2) {
        throw ConfigError("closure grid resolutions must be at least 2");
    }
    const int G = alpha_grid_resolution, L = lambda_grid_resolution;
    ClosureGrid grid;
    grid.alpha_grid.resize(G);
    for (int i = 0; i < G; ++i) {
        grid.alpha_grid[i] = double(i + 1) / double(G + 1);
    }
    grid.lambda1.resize(L);
    grid.lambda2.resize(L);
    for (int i = 0; i < L; ++i) {
        grid.lambda1[i] = grid.lambda2[i] = double(i + 1) / double(L + 1);
    }
    grid.member.assign(std::size_t(L) * L, 0);

    ModelParams p = base;
    for (int ia = 0; ia < G; ++ia) {
        for (int ja = 0; ja < G; ++ja) {
            p.alpha1 = grid.alpha_grid[ia];
            p.alpha2 = grid.alpha_grid[ja];
            for (int i = 0; i < L; ++i) {
                for (int j = 0; j < L; ++j) {
                    auto& cell = grid.member[std::size_t(i) * L + j];
                    if (cell) continue;
                    const RegionVerdict v =
                        which == Which::stability
                            ? in_stability_region(grid.lambda1[i],
                                                  grid.lambda2[j], p)
                            : in_throughput_region(grid.lambda1[i],
                                                   grid.lambda2[j], p);
                    cell = v.member ? 1 : 0;
                }
            }
        }
    }
    return grid;
}

}  // namespace ragnet
