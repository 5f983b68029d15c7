// Python bindings: dict-in/dict-out wrappers over the library's main
// operations, using the same JSON schemas as the CLI parameter files.

#include <pybind11/pybind11.h>

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "ragnet/bvp.hpp"
#include "ragnet/chain.hpp"
#include "ragnet/errors.hpp"
#include "ragnet/meanvalue.hpp"
#include "ragnet/model.hpp"
#include "ragnet/regions.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json to_json_value(const py::handle& obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<std::int64_t>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::dict>(obj)) {
        json j = json::object();
        for (const auto& item : obj.cast<py::dict>()) {
            j[py::str(item.first).cast<std::string>()] =
                to_json_value(item.second);
        }
        return j;
    }
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        json j = json::array();
        for (const auto& item : obj) j.push_back(to_json_value(item));
        return j;
    }
    throw ragnet::ConfigError("unsupported value type in parameter mapping");
}

py::object to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null:
            return py::none();
        case json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case json::value_t::number_float:
            return py::float_(j.get<double>());
        case json::value_t::string:
            return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& v : j) out.append(to_py(v));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (const auto& item : j.items()) {
                out[py::str(item.key())] = to_py(item.value());
            }
            return out;
        }
        default:
            return py::none();
    }
}

ragnet::ModelParams model_from(const py::dict& d) {
    return ragnet::ModelParams::from_json(to_json_value(d));
}

ragnet::SymmetricParams symmetric_from(const py::dict& d) {
    return ragnet::SymmetricParams::from_json(to_json_value(d));
}

py::dict verdict_to_py(const ragnet::RegionVerdict& v) {
    py::dict out;
    out["member"] = v.member;
    out["via"] = ragnet::to_string(v.via);
    py::list margins;
    for (double m : v.margins) margins.append(m);
    out["margins"] = margins;
    out["boundary"] = v.boundary;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Two-user random-access network with signals: exact chain "
        "simulation, stability/throughput regions, queue-length bounds, and "
        "the boundary-value solution of the symmetric system.";

    py::register_exception<ragnet::ConfigError>(m, "ConfigError",
                                                PyExc_ValueError);
    py::register_exception<ragnet::NumericError>(m, "NumericError",
                                                 PyExc_RuntimeError);

    m.def(
        "validate_params",
        [](const py::dict& params) {
            return to_py(model_from(params).to_json());
        },
        py::arg("params"),
        "Validate a ten-field parameter mapping; returns it normalized.");

    m.def(
        "step_kernel",
        [](std::int64_t q1, std::int64_t q2, const py::dict& params,
           bool global_malfunction) {
            const auto dist = ragnet::step_kernel(
                {q1, q2}, model_from(params), global_malfunction);
            py::list out;
            for (const auto& o : dist) {
                py::dict row;
                row["delta1"] = o.delta1;
                row["delta2"] = o.delta2;
                row["event"] = ragnet::to_string(o.event);
                row["prob"] = o.prob;
                out.append(row);
            }
            return out;
        },
        py::arg("q1"), py::arg("q2"), py::arg("params"),
        py::arg("global_malfunction") = false,
        "Exact pre-arrival slot law from the given queue state.");

    m.def(
        "simulate",
        [](const py::dict& params, std::uint64_t slots, std::uint64_t burn_in,
           std::uint64_t seed, bool global_malfunction) {
            return to_py(ragnet::simulate(model_from(params), slots, burn_in,
                                          seed, global_malfunction)
                             .to_json());
        },
        py::arg("params"), py::arg("slots") = 1000000,
        py::arg("burn_in") = 100000, py::arg("seed") = 1,
        py::arg("global_malfunction") = false,
        "Simulate the chain; returns long-run statistics with standard "
        "errors.");

    m.def(
        "simulate_dominant",
        [](const py::dict& params, const std::string& dominant,
           std::uint64_t slots, std::uint64_t burn_in, std::uint64_t seed) {
            if (dominant != "R1" && dominant != "R2") {
                throw ragnet::ConfigError("dominant must be R1 or R2");
            }
            const auto which = dominant == "R1" ? ragnet::Dominant::R1
                                                : ragnet::Dominant::R2;
            return to_py(ragnet::simulate_dominant(model_from(params), which,
                                                   slots, burn_in, seed)
                             .to_json());
        },
        py::arg("params"), py::arg("dominant"), py::arg("slots") = 1000000,
        py::arg("burn_in") = 100000, py::arg("seed") = 1,
        "Simulate the dominant system in which the chosen queue sends dummy "
        "packets when empty.");

    m.def(
        "truncated_stationary",
        [](const py::dict& params, int N, bool global_malfunction) {
            const auto sol = ragnet::truncated_stationary(
                model_from(params), N, global_malfunction);
            py::dict out;
            out["N"] = sol.N;
            out["tail_mass"] = sol.tail_mass;
            out["stats"] = to_py(sol.stats.to_json());
            return out;
        },
        py::arg("params"), py::arg("N") = 64,
        py::arg("global_malfunction") = false,
        "Stationary distribution of the truncated chain (adaptive "
        "truncation); returns exact long-run statistics.");

    m.def(
        "stability_region",
        [](double lambda1, double lambda2, const py::dict& params) {
            return verdict_to_py(
                ragnet::in_stability_region(lambda1, lambda2,
                                            model_from(params)));
        },
        py::arg("lambda1"), py::arg("lambda2"), py::arg("params"),
        "Closed-form stability region membership with signed margins.");

    m.def(
        "throughput_region",
        [](double lambda1, double lambda2, const py::dict& params) {
            return verdict_to_py(
                ragnet::in_throughput_region(lambda1, lambda2,
                                             model_from(params)));
        },
        py::arg("lambda1"), py::arg("lambda2"), py::arg("params"),
        "Closed-form stable-throughput region membership with signed "
        "margins.");

    m.def(
        "classify_drift",
        [](double lambda1, double lambda2, const py::dict& params) {
            const auto c =
                ragnet::classify_drift(lambda1, lambda2, model_from(params));
            py::dict out;
            out["mu3"] = c.mu3;
            out["nu3"] = c.nu3;
            out["mu1d"] = c.mu1d;
            out["nu1d"] = c.nu1d;
            out["mu2d"] = c.mu2d;
            out["nu2d"] = c.nu2d;
            out["r1"] = c.r1;
            out["r2"] = c.r2;
            out["verdict"] = ragnet::to_string(c.verdict);
            return out;
        },
        py::arg("lambda1"), py::arg("lambda2"), py::arg("params"),
        "Mean-drift classification of the quarter-plane walk.");

    m.def(
        "symmetric_stability",
        [](const py::dict& params) {
            const auto st = ragnet::symmetric_stability(symmetric_from(params));
            py::dict out;
            out["stable"] = st.stable;
            py::list margins;
            for (double v : st.margins) margins.append(v);
            out["margins"] = margins;
            return out;
        },
        py::arg("params"),
        "Stability of the symmetric system with signed margins.");

    m.def(
        "queue_bounds",
        [](const py::dict& params) {
            const auto b = ragnet::queue_bounds(symmetric_from(params));
            py::dict out;
            out["L_low"] = b.L_low;
            out["L_up"] = b.L_up;
            out["S_term"] = b.S_term;
            out["W0"] = b.W0;
            out["W1"] = b.W1;
            out["stable"] = b.stable;
            out["warning"] = b.warning;
            return out;
        },
        py::arg("params"),
        "Closed-form mean queue-length bounds for the stable symmetric "
        "system.");

    m.def(
        "solve_riemann",
        [](const py::dict& params, int M) {
            const auto sol = ragnet::solve_riemann(symmetric_from(params), M);
            json body = sol.to_json();
            body["L_second_moment"] = sol.L_second_moment;
            body["bc_residual"] = sol.bc_residual;
            return to_py(body);
        },
        py::arg("params"), py::arg("M") = 1024,
        "Numerical boundary-value solution of the stable symmetric system "
        "(empty-state probabilities and the exact mean queue length).");
}
