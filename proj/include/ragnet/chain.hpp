#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragnet/model.hpp"

namespace ragnet {

struct QueueState {
    std::int64_t q1 = 0;
    std::int64_t q2 = 0;
};

// Labels for what happened to the queues in one slot, before arrivals.
// "success" is reserved for collision-free transmissions; signal outcomes
// get their own labels.  Composite signal slots are labeled by the joint
// outcome (both_drop, swap) or by the net packet movement (a simultaneous
// transfer+deletion is labeled by the transfer).
enum class SlotEvent {
    none,
    idle,
    collision,
    success1,
    success2,
    drop1,
    drop2,
    transfer1to2,
    transfer2to1,
    both_drop,
    swap,
};

const char* to_string(SlotEvent e);

struct SlotOutcome {
    int delta1 = 0;
    int delta2 = 0;
    SlotEvent event = SlotEvent::none;
    double prob = 0.0;
};

using SlotDistribution = std::vector<SlotOutcome>;

// Exact joint law of the pre-arrival queue changes from `state`.
// The optional flag switches the treatment of a signal arriving at an empty
// queue: by default it is inert; with global_malfunction=true it still
// suppresses all transmissions in that slot.
SlotDistribution step_kernel(const QueueState& state, const ModelParams& params,
                             bool global_malfunction = false);

// End-of-slot Bernoulli arrivals added on top of the slot's queue changes.
QueueState apply_arrivals(const QueueState& state, int delta1, int delta2,
                          const ModelParams& params, std::mt19937_64& rng);

struct SimStats {
    double mean_q1 = 0.0;
    double mean_q2 = 0.0;
    double p_empty1 = 0.0;
    double p_empty2 = 0.0;
    double p_both_empty = 0.0;
    double p_both_busy = 0.0;
    double throughput1 = 0.0;
    double throughput2 = 0.0;
    double drop_rate1 = 0.0;
    double drop_rate2 = 0.0;
    double transfer_rate_1to2 = 0.0;
    double transfer_rate_2to1 = 0.0;
    std::uint64_t slots = 0;

    double se_mean_q1 = 0.0;
    double se_mean_q2 = 0.0;
    double se_p_empty1 = 0.0;
    double se_p_empty2 = 0.0;
    double se_p_both_empty = 0.0;
    double se_p_both_busy = 0.0;
    double se_throughput1 = 0.0;
    double se_throughput2 = 0.0;
    double se_drop_rate1 = 0.0;
    double se_drop_rate2 = 0.0;
    double se_transfer_rate_1to2 = 0.0;
    double se_transfer_rate_2to1 = 0.0;

    bool diverged = false;

    nlohmann::json to_json() const;
};

// Simulates the chain from (0,0); statistics are taken over the post-burn-in
// slots, with queue-length indicators sampled at slot starts and event rates
// counted per slot.  Deterministic for a fixed seed; distinct seeds give
// independent streams.
SimStats simulate(const ModelParams& params, std::uint64_t slots,
                  std::uint64_t burn_in, std::uint64_t seed,
                  bool global_malfunction = false);

enum class Dominant { R1, R2 };

// Simulates the dominant system in which the chosen queue transmits dummy
// packets when empty: its transmission, collision, and signaling behavior is
// that of a nonempty queue, but dummy departures are not counted as
// throughput and a dummy deletion removes nothing.  A transfer signal at the
// empty dominant queue still hands a packet to the other queue, so the other
// queue sees a constant environment independent of the dominant queue's load.
SimStats simulate_dominant(const ModelParams& params, Dominant dominant,
                           std::uint64_t slots, std::uint64_t burn_in,
                           std::uint64_t seed);

struct StationarySolution {
    int N = 0;                        // truncation: states {0..N} x {0..N}
    std::vector<double> pi;           // row-major, pi[i*(N+1)+j] = P(q1=i,q2=j)
    double tail_mass = 0.0;           // per-slot probability of a clamped arrival
    SimStats stats;                   // derived from pi; standard errors are 0

    double at(int i, int j) const { return pi[std::size_t(i) * (N + 1) + j]; }

    nlohmann::json to_json() const;
};

// Exact stationary distribution of the chain truncated to {0..N}²: arrival
// increments that would leave the box are clamped to N and the clamped
// probability mass is recorded in tail_mass.  Solves πP = π by power
// iteration to L1 residual < 1e-12.  If tail_mass > 1e-8 the truncation is
// doubled automatically up to `ceiling`; beyond that a NumericError
// ("truncation insufficient") is thrown.
StationarySolution truncated_stationary(const ModelParams& params, int N,
                                        bool global_malfunction = false,
                                        int ceiling = 512);

}  // namespace ragnet
