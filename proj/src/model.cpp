#include "ragnet/model.hpp"

#include <cmath>

#include "ragnet/errors.hpp"

namespace ragnet {

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(name) + " out of [0,1]");
    }
}

void check_split(double minus, double plus, const char* minus_name,
                 const char* plus_name) {
    if (std::fabs(minus + plus - 1.0) > 1e-12) {
        throw ConfigError(std::string(minus_name) + "+" + plus_name + " ≠ 1");
    }
}

}  // namespace

void ModelParams::validate() const {
    check_unit_interval(lambda1, "lambda1");
    check_unit_interval(lambda2, "lambda2");
    check_unit_interval(alpha1, "alpha1");
    check_unit_interval(alpha2, "alpha2");
    check_unit_interval(s1, "s1");
    check_unit_interval(s2, "s2");
    check_unit_interval(l1_minus, "l1_minus");
    check_unit_interval(l1_plus, "l1_plus");
    check_unit_interval(l2_minus, "l2_minus");
    check_unit_interval(l2_plus, "l2_plus");
    check_split(l1_minus, l1_plus, "l1_minus", "l1_plus");
    check_split(l2_minus, l2_plus, "l2_minus", "l2_plus");
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("parameter document must be a JSON object");
    }
    static const char* const kFields[] = {
        "lambda1", "lambda2", "alpha1", "alpha2", "s1",
        "s2",      "l1_minus", "l1_plus", "l2_minus", "l2_plus",
    };
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* f : kFields) {
            if (item.key() == f) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown parameter field: " + item.key());
        }
    }
    ModelParams p;
    auto get = [&](const char* f) -> double {
        if (!j.contains(f)) {
            throw ConfigError(std::string("missing parameter field: ") + f);
        }
        const auto& v = j.at(f);
        if (!v.is_number()) {
            throw ConfigError(std::string("parameter field ") + f +
                              " must be a number");
        }
        return v.get<double>();
    };
    p.lambda1 = get("lambda1");
    p.lambda2 = get("lambda2");
    p.alpha1 = get("alpha1");
    p.alpha2 = get("alpha2");
    p.s1 = get("s1");
    p.s2 = get("s2");
    p.l1_minus = get("l1_minus");
    p.l1_plus = get("l1_plus");
    p.l2_minus = get("l2_minus");
    p.l2_plus = get("l2_plus");
    p.validate();
    return p;
}

nlohmann::json ModelParams::to_json() const {
    return nlohmann::json{
        {"lambda1", lambda1},   {"lambda2", lambda2}, {"alpha1", alpha1},
        {"alpha2", alpha2},     {"s1", s1},           {"s2", s2},
        {"l1_minus", l1_minus}, {"l1_plus", l1_plus}, {"l2_minus", l2_minus},
        {"l2_plus", l2_plus},
    };
}

double ModelParams::arrival_pgf(double x, double y) const {
    return (1.0 - lambda1 + lambda1 * x) * (1.0 - lambda2 + lambda2 * y);
}

bool ModelParams::symmetric() const {
    return lambda1 == lambda2 && alpha1 == alpha2 && s1 == s2 &&
           l1_minus == l2_minus && l1_plus == l2_plus;
}

void SymmetricParams::validate() const {
    embed().validate();
}

ModelParams SymmetricParams::embed() const {
    ModelParams p;
    p.lambda1 = p.lambda2 = lambda;
    p.alpha1 = p.alpha2 = alpha;
    p.s1 = p.s2 = s;
    p.l1_minus = p.l2_minus = l_minus;
    p.l1_plus = p.l2_plus = l_plus;
    return p;
}

SymmetricParams SymmetricParams::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("parameter document must be a JSON object");
    }
    if (j.contains("lambda1")) {
        const ModelParams full = ModelParams::from_json(j);
        if (!full.symmetric()) {
            throw ConfigError(
                "a symmetric parameter set is required (identical users, or "
                "the five-field lambda/alpha/s/l_minus/l_plus form)");
        }
        return SymmetricParams{full.lambda1, full.alpha1, full.s1,
                               full.l1_minus, full.l1_plus};
    }
    static const char* const kFields[] = {"lambda", "alpha", "s", "l_minus",
                                          "l_plus"};
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* f : kFields) {
            if (item.key() == f) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown parameter field: " + item.key());
        }
    }
    SymmetricParams p;
    auto get = [&](const char* f) -> double {
        if (!j.contains(f)) {
            throw ConfigError(std::string("missing parameter field: ") + f);
        }
        const auto& v = j.at(f);
        if (!v.is_number()) {
            throw ConfigError(std::string("parameter field ") + f +
                              " must be a number");
        }
        return v.get<double>();
    };
    p.lambda = get("lambda");
    p.alpha = get("alpha");
    p.s = get("s");
    p.l_minus = get("l_minus");
    p.l_plus = get("l_plus");
    p.validate();
    return p;
}

nlohmann::json SymmetricParams::to_json() const {
    return nlohmann::json{
        {"lambda", lambda},     {"alpha", alpha},     {"s", s},
        {"l_minus", l_minus},   {"l_plus", l_plus},
    };
}

}  // namespace ragnet
