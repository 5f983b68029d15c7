#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace ragnet {

// Parameters of the two-user random-access network with signals.
//
// Per slot, user k receives a signal with probability s_k; a signal is a
// deletion (head packet removed) with probability l_k_minus or a transfer
// (head packet moved to the other queue) with probability l_k_plus, where
// l_k_minus + l_k_plus = 1.  Absent a signal, a nonempty user transmits with
// probability alpha_k over a collision channel.  Arrivals are Bernoulli
// (rate lambda_k) at the end of the slot.
//
// Complement quantities (1 - x) are always computed on demand; only the ten
// fields below are stored, and they are the exact ten keys accepted in JSON.
struct ModelParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double l1_minus = 0.0;
    double l1_plus = 0.0;
    double l2_minus = 0.0;
    double l2_plus = 0.0;

    // Throws ConfigError naming the first offending field.  Probabilities
    // must lie in [0,1] and each split must satisfy l_minus + l_plus = 1
    // (up to additive rounding of 1e-12).
    void validate() const;

    static ModelParams from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    // Joint probability generating function of one slot's arrivals,
    // (1 - lambda1 + lambda1 x)(1 - lambda2 + lambda2 y).
    double arrival_pgf(double x, double y) const;

    bool symmetric() const;
};

// Convenience wrapper for the symmetric system (both users identical).
struct SymmetricParams {
    double lambda = 0.0;
    double alpha = 0.0;
    double s = 0.0;
    double l_minus = 0.0;
    double l_plus = 0.0;

    void validate() const;
    ModelParams embed() const;  // the equivalent two-user parameter set

    // Accepts the five-field symmetric schema, or a ten-field parameter set
    // whose two users coincide.
    static SymmetricParams from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

}  // namespace ragnet
