#include "ragnet/chain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include <Eigen/Sparse>

#include "ragnet/errors.hpp"

namespace ragnet {

const char* to_string(SlotEvent e) {
    switch (e) {
        case SlotEvent::none: return "none";
        case SlotEvent::idle: return "idle";
        case SlotEvent::collision: return "collision";
        case SlotEvent::success1: return "success1";
        case SlotEvent::success2: return "success2";
        case SlotEvent::drop1: return "drop1";
        case SlotEvent::drop2: return "drop2";
        case SlotEvent::transfer1to2: return "transfer1to2";
        case SlotEvent::transfer2to1: return "transfer2to1";
        case SlotEvent::both_drop: return "both_drop";
        case SlotEvent::swap: return "swap";
    }
    return "?";
}

SlotDistribution step_kernel(const QueueState& state, const ModelParams& p,
                             bool global_malfunction) {
    const double s1 = p.s1, s2 = p.s2;
    const double c1 = 1.0 - s1, c2 = 1.0 - s2;  // no-signal probabilities
    const double a1 = p.alpha1, a2 = p.alpha2;
    const double b1 = 1.0 - a1, b2 = 1.0 - a2;

    SlotDistribution out;
    auto add = [&out](int d1, int d2, SlotEvent ev, double prob) {
        if (prob > 0.0) {
            out.push_back({d1, d2, ev, prob});
        }
    };

    if (state.q1 == 0 && state.q2 == 0) {
        out.push_back({0, 0, SlotEvent::idle, 1.0});
        return out;
    }

    if (state.q1 > 0 && state.q2 > 0) {
        // Both queues busy.  A signal suppresses all transmissions in its
        // slot; simultaneous signals act on both heads at once.
        add(0, 0, SlotEvent::idle, c1 * c2 * b1 * b2);
        add(0, 0, SlotEvent::collision, c1 * c2 * a1 * a2);
        add(-1, 0, SlotEvent::success1, c1 * c2 * a1 * b2);
        add(0, -1, SlotEvent::success2, c1 * c2 * a2 * b1);
        add(-1, 0, SlotEvent::drop1, s1 * c2 * p.l1_minus);
        add(-1, +1, SlotEvent::transfer1to2, s1 * c2 * p.l1_plus);
        add(0, -1, SlotEvent::drop2, s2 * c1 * p.l2_minus);
        add(+1, -1, SlotEvent::transfer2to1, s2 * c1 * p.l2_plus);
        add(-1, -1, SlotEvent::both_drop, s1 * s2 * p.l1_minus * p.l2_minus);
        add(-1, 0, SlotEvent::transfer1to2, s1 * s2 * p.l1_plus * p.l2_minus);
        add(0, -1, SlotEvent::transfer2to1, s1 * s2 * p.l2_plus * p.l1_minus);
        add(0, 0, SlotEvent::swap, s1 * s2 * p.l1_plus * p.l2_plus);
        return out;
    }

    if (state.q1 == 0) {
        // Only queue 2 is busy.  A signal at the empty queue is inert by
        // default; with global_malfunction it still silences transmitters.
        if (!global_malfunction) {
            add(+1, -1, SlotEvent::transfer2to1, s2 * p.l2_plus);
            add(0, -1, SlotEvent::drop2, s2 * p.l2_minus);
            add(0, -1, SlotEvent::success2, c2 * a2);
            add(0, 0, SlotEvent::idle, c2 * b2);
        } else {
            add(+1, -1, SlotEvent::transfer2to1, s2 * p.l2_plus);
            add(0, -1, SlotEvent::drop2, s2 * p.l2_minus);
            add(0, 0, SlotEvent::none, c2 * s1);
            add(0, -1, SlotEvent::success2, c2 * c1 * a2);
            add(0, 0, SlotEvent::idle, c2 * c1 * b2);
        }
        return out;
    }

    // Only queue 1 is busy (mirror of the case above).
    if (!global_malfunction) {
        add(-1, +1, SlotEvent::transfer1to2, s1 * p.l1_plus);
        add(-1, 0, SlotEvent::drop1, s1 * p.l1_minus);
        add(-1, 0, SlotEvent::success1, c1 * a1);
        add(0, 0, SlotEvent::idle, c1 * b1);
    } else {
        add(-1, +1, SlotEvent::transfer1to2, s1 * p.l1_plus);
        add(-1, 0, SlotEvent::drop1, s1 * p.l1_minus);
        add(0, 0, SlotEvent::none, c1 * s2);
        add(-1, 0, SlotEvent::success1, c1 * c2 * a1);
        add(0, 0, SlotEvent::idle, c1 * c2 * b1);
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Canonical 53-bit uniform in [0,1); deterministic across standard libraries.
double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

enum class DummyMode { off, queue1, queue2 };

struct SlotResult {
    int delta1 = 0;
    int delta2 = 0;
    SlotEvent event = SlotEvent::none;
};

// One slot of pre-arrival dynamics, consuming exactly six uniforms in a fixed
// order regardless of state.  Under DummyMode the chosen queue behaves as if
// it always held a packet: its signals fire (a transfer hands a packet to the
// other queue even when it is actually empty) and it transmits dummy packets,
// whose departures do not count as real events.
SlotResult slot_step(std::int64_t q1, std::int64_t q2, const ModelParams& p,
                     bool global_malfunction, DummyMode dummy,
                     std::mt19937_64& rng) {
    const bool sig1 = uniform01(rng) < p.s1;
    const bool plus1 = uniform01(rng) < p.l1_plus;
    const bool sig2 = uniform01(rng) < p.s2;
    const bool plus2 = uniform01(rng) < p.l2_plus;
    const bool tx1 = uniform01(rng) < p.alpha1;
    const bool tx2 = uniform01(rng) < p.alpha2;

    const bool real1 = q1 > 0;
    const bool real2 = q2 > 0;
    const bool present1 = real1 || dummy == DummyMode::queue1;
    const bool present2 = real2 || dummy == DummyMode::queue2;

    const bool eff1 = sig1 && present1;  // the signal found a head to act on
    const bool eff2 = sig2 && present2;
    const bool preempt1 = sig1 && (present1 || global_malfunction);
    const bool preempt2 = sig2 && (present2 || global_malfunction);

    SlotResult r;
    if (eff1 || eff2) {
        const bool t1 = eff1 && plus1;  // head of queue 1 moves to queue 2
        const bool t2 = eff2 && plus2;
        const bool d1 = eff1 && !plus1 && real1;  // real deletion at queue 1
        const bool d2 = eff2 && !plus2 && real2;
        if (t1) {
            r.delta2 += 1;
            if (real1) r.delta1 -= 1;
        } else if (d1) {
            r.delta1 -= 1;
        }
        if (t2) {
            r.delta1 += 1;
            if (real2) r.delta2 -= 1;
        } else if (d2) {
            r.delta2 -= 1;
        }
        if (t1 && t2) r.event = SlotEvent::swap;
        else if (t1) r.event = SlotEvent::transfer1to2;
        else if (t2) r.event = SlotEvent::transfer2to1;
        else if (d1 && d2) r.event = SlotEvent::both_drop;
        else if (d1) r.event = SlotEvent::drop1;
        else if (d2) r.event = SlotEvent::drop2;
        else r.event = SlotEvent::none;  // dummy deletion: nothing happened
    } else if (preempt1 || preempt2) {
        r.event = SlotEvent::none;  // malfunction at an empty queue
    } else {
        const bool x1 = present1 && tx1;
        const bool x2 = present2 && tx2;
        if (x1 && x2) {
            r.event = SlotEvent::collision;
        } else if (x1) {
            if (real1) {
                r.delta1 -= 1;
                r.event = SlotEvent::success1;
            }  // a lone dummy transmission succeeds but delivers nothing
        } else if (x2) {
            if (real2) {
                r.delta2 -= 1;
                r.event = SlotEvent::success2;
            }
        } else {
            r.event = SlotEvent::idle;
        }
    }
    return r;
}

// Indices of the twelve tracked statistics.
enum StatIndex {
    kMeanQ1,
    kMeanQ2,
    kEmpty1,
    kEmpty2,
    kBothEmpty,
    kBothBusy,
    kThr1,
    kThr2,
    kDrop1,
    kDrop2,
    kT12,
    kT21,
    kNumStats,
};

// Per-slot contribution of the event label to the rate statistics.  Both the
// simulator and the oracle count rates from the label alone, so the two
// estimates are directly comparable: composite signal slots count once, under
// the joint label (both_drop feeds both drop rates, swap feeds both transfer
// rates, a simultaneous transfer+deletion counts only as the transfer).
void add_event(std::array<double, kNumStats>& v, SlotEvent ev) {
    switch (ev) {
        case SlotEvent::success1: v[kThr1] += 1; break;
        case SlotEvent::success2: v[kThr2] += 1; break;
        case SlotEvent::drop1: v[kDrop1] += 1; break;
        case SlotEvent::drop2: v[kDrop2] += 1; break;
        case SlotEvent::both_drop:
            v[kDrop1] += 1;
            v[kDrop2] += 1;
            break;
        case SlotEvent::transfer1to2: v[kT12] += 1; break;
        case SlotEvent::transfer2to1: v[kT21] += 1; break;
        case SlotEvent::swap:
            v[kT12] += 1;
            v[kT21] += 1;
            break;
        default: break;
    }
}

SimStats pack_stats(const std::array<double, kNumStats>& mean,
                    const std::array<double, kNumStats>& se,
                    std::uint64_t slots, bool diverged) {
    SimStats st;
    st.mean_q1 = mean[kMeanQ1];
    st.mean_q2 = mean[kMeanQ2];
    st.p_empty1 = mean[kEmpty1];
    st.p_empty2 = mean[kEmpty2];
    st.p_both_empty = mean[kBothEmpty];
    st.p_both_busy = mean[kBothBusy];
    st.throughput1 = mean[kThr1];
    st.throughput2 = mean[kThr2];
    st.drop_rate1 = mean[kDrop1];
    st.drop_rate2 = mean[kDrop2];
    st.transfer_rate_1to2 = mean[kT12];
    st.transfer_rate_2to1 = mean[kT21];
    st.slots = slots;
    st.se_mean_q1 = se[kMeanQ1];
    st.se_mean_q2 = se[kMeanQ2];
    st.se_p_empty1 = se[kEmpty1];
    st.se_p_empty2 = se[kEmpty2];
    st.se_p_both_empty = se[kBothEmpty];
    st.se_p_both_busy = se[kBothBusy];
    st.se_throughput1 = se[kThr1];
    st.se_throughput2 = se[kThr2];
    st.se_drop_rate1 = se[kDrop1];
    st.se_drop_rate2 = se[kDrop2];
    st.se_transfer_rate_1to2 = se[kT12];
    st.se_transfer_rate_2to1 = se[kT21];
    st.diverged = diverged;
    return st;
}

SimStats run_chain(const ModelParams& params, std::uint64_t slots,
                   std::uint64_t burn_in, std::uint64_t seed,
                   bool global_malfunction, DummyMode dummy) {
    params.validate();
    if (slots <= burn_in) {
        throw ConfigError("slots must exceed burn_in");
    }
    const std::uint64_t n = slots - burn_in;
    const std::uint64_t nb = std::min<std::uint64_t>(100, n);
    std::vector<std::array<double, kNumStats>> batch(
        nb, std::array<double, kNumStats>{});
    std::vector<std::uint64_t> batch_len(nb, 0);
    std::array<double, kNumStats> total{};
    double head_load = 0.0;  // sum of q1+q2 over the first measured decile
    double tail_load = 0.0;  // same, over the final decile
    const std::uint64_t head_end = n / 10;
    const std::uint64_t tail_start = n - n / 10;

    std::mt19937_64 rng(splitmix64(seed));
    std::int64_t q1 = 0, q2 = 0;

    for (std::uint64_t t = 0; t < slots; ++t) {
        std::array<double, kNumStats> v{};
        const bool measured = t >= burn_in;
        if (measured) {
            v[kMeanQ1] = double(q1);
            v[kMeanQ2] = double(q2);
            v[kEmpty1] = q1 == 0 ? 1.0 : 0.0;
            v[kEmpty2] = q2 == 0 ? 1.0 : 0.0;
            v[kBothEmpty] = (q1 == 0 && q2 == 0) ? 1.0 : 0.0;
            v[kBothBusy] = (q1 > 0 && q2 > 0) ? 1.0 : 0.0;
        }

        const SlotResult r =
            slot_step(q1, q2, params, global_malfunction, dummy, rng);
        if (measured) {
            add_event(v, r.event);
        }
        q1 += r.delta1;
        q2 += r.delta2;
        // End-of-slot arrivals; both uniforms are always consumed so that a
        // trajectory that ignores one queue is unaffected by its rate.
        const bool a1 = uniform01(rng) < params.lambda1;
        const bool a2 = uniform01(rng) < params.lambda2;
        q1 += a1 ? 1 : 0;
        q2 += a2 ? 1 : 0;

        if (measured) {
            const std::uint64_t i = t - burn_in;
            const std::uint64_t b = i * nb / n;
            for (int k = 0; k < kNumStats; ++k) {
                batch[b][k] += v[k];
                total[k] += v[k];
            }
            batch_len[b] += 1;
            if (i < head_end) {
                head_load += v[kMeanQ1] + v[kMeanQ2];
            }
            if (i >= tail_start) {
                tail_load += v[kMeanQ1] + v[kMeanQ2];
            }
        }
    }

    std::array<double, kNumStats> mean{}, se{};
    for (int k = 0; k < kNumStats; ++k) {
        mean[k] = total[k] / double(n);
    }
    if (nb >= 2) {
        for (int k = 0; k < kNumStats; ++k) {
            double acc = 0.0;
            for (std::uint64_t b = 0; b < nb; ++b) {
                if (batch_len[b] == 0) continue;
                const double mb = batch[b][k] / double(batch_len[b]);
                acc += double(batch_len[b]) * (mb - mean[k]) * (mb - mean[k]);
            }
            se[k] = std::sqrt(acc / (double(nb - 1) * double(n)));
        }
    }

    // A run is flagged as diverged when the mean load of the final decile
    // dwarfs that of the first one: a stationary trajectory keeps the two
    // comparable, while sustained outward drift separates them linearly.
    bool diverged = false;
    if (n >= 10) {
        const double head = head_load / double(head_end);
        const double tail = tail_load / double(n - tail_start);
        diverged = tail > 2.0 * head && tail > 50.0;
    }
    return pack_stats(mean, se, n, diverged);
}

}  // namespace

QueueState apply_arrivals(const QueueState& state, int delta1, int delta2,
                          const ModelParams& params, std::mt19937_64& rng) {
    QueueState next;
    next.q1 = state.q1 + delta1;
    next.q2 = state.q2 + delta2;
    if (uniform01(rng) < params.lambda1) next.q1 += 1;
    if (uniform01(rng) < params.lambda2) next.q2 += 1;
    return next;
}

SimStats simulate(const ModelParams& params, std::uint64_t slots,
                  std::uint64_t burn_in, std::uint64_t seed,
                  bool global_malfunction) {
    return run_chain(params, slots, burn_in, seed, global_malfunction,
                     DummyMode::off);
}

SimStats simulate_dominant(const ModelParams& params, Dominant dominant,
                           std::uint64_t slots, std::uint64_t burn_in,
                           std::uint64_t seed) {
    return run_chain(params, slots, burn_in, seed, false,
                     dominant == Dominant::R1 ? DummyMode::queue1
                                              : DummyMode::queue2);
}

namespace {

// Derives the SimStats of an exact distribution: occupancy statistics from π
// itself, rates as π-weighted event-label probabilities (the same counting
// rule as the simulator).
SimStats stats_from_pi(const std::vector<double>& pi, int N,
                       const ModelParams& params, bool global_malfunction) {
    std::array<double, kNumStats> m{};
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            const double w = pi[std::size_t(i) * (N + 1) + j];
            if (w == 0.0) continue;
            m[kMeanQ1] += w * i;
            m[kMeanQ2] += w * j;
            if (i == 0) m[kEmpty1] += w;
            if (j == 0) m[kEmpty2] += w;
            if (i == 0 && j == 0) m[kBothEmpty] += w;
            if (i > 0 && j > 0) m[kBothBusy] += w;
            for (const SlotOutcome& o :
                 step_kernel({i, j}, params, global_malfunction)) {
                std::array<double, kNumStats> v{};
                add_event(v, o.event);
                for (int k = kThr1; k < kNumStats; ++k) {
                    m[k] += w * o.prob * v[k];
                }
            }
        }
    }
    return pack_stats(m, std::array<double, kNumStats>{}, 0, false);
}

StationarySolution solve_truncated(const ModelParams& params, int N,
                                   bool global_malfunction) {
    const int side = N + 1;
    const std::size_t states = std::size_t(side) * side;
    const double l1 = params.lambda1, l2 = params.lambda2;
    const double arr[2][2] = {
        {(1 - l1) * (1 - l2), (1 - l1) * l2},
        {l1 * (1 - l2), l1 * l2},
    };

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(states * 16);
    std::vector<double> clamp_prob(states, 0.0);
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            const std::size_t row = std::size_t(i) * side + j;
            for (const SlotOutcome& o :
                 step_kernel({i, j}, params, global_malfunction)) {
                const int pi1 = i + o.delta1;
                const int pj1 = j + o.delta2;
                for (int a1 = 0; a1 <= 1; ++a1) {
                    for (int a2 = 0; a2 <= 1; ++a2) {
                        const double pr = o.prob * arr[a1][a2];
                        if (pr == 0.0) continue;
                        int ti = pi1 + a1, tj = pj1 + a2;
                        bool clamped = false;
                        if (ti > N) { ti = N; clamped = true; }
                        if (tj > N) { tj = N; clamped = true; }
                        if (clamped) clamp_prob[row] += pr;
                        trips.emplace_back(int(row), ti * side + tj, pr);
                    }
                }
            }
        }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> P(static_cast<int>(states),
                                                   static_cast<int>(states));
    P.setFromTriplets(trips.begin(), trips.end());

    Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(
        Eigen::Index(states), 1.0 / double(states));
    const double tol = 1e-12;
    const long max_iter = 1000000;
    bool converged = false;
    for (long it = 0; it < max_iter; ++it) {
        Eigen::RowVectorXd next = x * P;
        next /= next.sum();
        const double resid = (next - x).cwiseAbs().sum();
        x.swap(next);
        if (resid < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericError(
            "power iteration did not converge to 1e-12 within 1e6 steps");
    }

    StationarySolution sol;
    sol.N = N;
    sol.pi.assign(x.data(), x.data() + states);
    double tail = 0.0;
    for (std::size_t k = 0; k < states; ++k) {
        tail += sol.pi[k] * clamp_prob[k];
    }
    sol.tail_mass = tail;
    sol.stats = stats_from_pi(sol.pi, N, params, global_malfunction);
    return sol;
}

}  // namespace

StationarySolution truncated_stationary(const ModelParams& params, int N,
                                        bool global_malfunction, int ceiling) {
    params.validate();
    if (N < 2) {
        throw ConfigError("truncation N must be at least 2");
    }
    for (int n = N;; n *= 2) {
        if (n > ceiling) {
            throw NumericError("truncation insufficient: tail mass above 1e-8 "
                               "at the truncation ceiling");
        }
        StationarySolution sol = solve_truncated(params, n, global_malfunction);
        if (sol.tail_mass <= 1e-8) {
            return sol;
        }
    }
}

nlohmann::json SimStats::to_json() const {
    return nlohmann::json{
        {"mean_q1", mean_q1},
        {"mean_q2", mean_q2},
        {"p_empty1", p_empty1},
        {"p_empty2", p_empty2},
        {"p_both_empty", p_both_empty},
        {"p_both_busy", p_both_busy},
        {"throughput1", throughput1},
        {"throughput2", throughput2},
        {"drop_rate1", drop_rate1},
        {"drop_rate2", drop_rate2},
        {"transfer_rate_1to2", transfer_rate_1to2},
        {"transfer_rate_2to1", transfer_rate_2to1},
        {"slots", slots},
        {"se_mean_q1", se_mean_q1},
        {"se_mean_q2", se_mean_q2},
        {"se_p_empty1", se_p_empty1},
        {"se_p_empty2", se_p_empty2},
        {"se_p_both_empty", se_p_both_empty},
        {"se_p_both_busy", se_p_both_busy},
        {"se_throughput1", se_throughput1},
        {"se_throughput2", se_throughput2},
        {"se_drop_rate1", se_drop_rate1},
        {"se_drop_rate2", se_drop_rate2},
        {"se_transfer_rate_1to2", se_transfer_rate_1to2},
        {"se_transfer_rate_2to1", se_transfer_rate_2to1},
        {"diverged", diverged},
    };
}

nlohmann::json StationarySolution::to_json() const {
    nlohmann::json j = stats.to_json();
    j["N"] = N;
    j["tail_mass"] = tail_mass;
    return j;
}

}  // namespace ragnet
