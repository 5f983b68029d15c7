// Command-line front end for the two-user random-access network library:
// chain simulation, stability/throughput regions, queue-length bounds, a
// signals-vs-baseline comparison, and the boundary-value solution of the
// symmetric system.  Every command is deterministic given its config (plus
// seed) and embeds the fully resolved config in its output.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numeric failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ragnet/bvp.hpp"
#include "ragnet/chain.hpp"
#include "ragnet/errors.hpp"
#include "ragnet/meanvalue.hpp"
#include "ragnet/model.hpp"
#include "ragnet/regions.hpp"

namespace {

using nlohmann::json;
using namespace ragnet;

// ---------------------------------------------------------------- plumbing

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open parameter file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return j;
}

struct SweepSpec {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int steps = 0;
};

SweepSpec parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = text.find(':', pos);
        parts.push_back(text.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (parts.size() != 4) {
        throw ConfigError("sweep must be NAME:START:STOP:STEPS, got: " + text);
    }
    SweepSpec sw;
    sw.name = parts[0];
    try {
        std::size_t used = 0;
        sw.start = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        sw.stop = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
        sw.steps = std::stoi(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("sweep must be NAME:START:STOP:STEPS, got: " + text);
    }
    if (sw.steps < 2) {
        throw ConfigError("sweep needs at least 2 steps: " + text);
    }
    return sw;
}

std::vector<double> sweep_values(const SweepSpec& sw) {
    std::vector<double> v(sw.steps);
    for (int i = 0; i < sw.steps; ++i) {
        v[i] = sw.start +
               (sw.stop - sw.start) * double(i) / double(sw.steps - 1);
    }
    return v;
}

json sweep_to_json(const SweepSpec& sw) {
    return json{{"name", sw.name},
                {"start", sw.start},
                {"stop", sw.stop},
                {"steps", sw.steps}};
}

// Setting a signal-split field keeps the split normalized by moving its
// complement, so sweeps over l_plus or l_minus stay valid parameter sets.
void set_model_field(ModelParams& p, const std::string& name, double v) {
    if (name == "lambda1") p.lambda1 = v;
    else if (name == "lambda2") p.lambda2 = v;
    else if (name == "alpha1") p.alpha1 = v;
    else if (name == "alpha2") p.alpha2 = v;
    else if (name == "s1") p.s1 = v;
    else if (name == "s2") p.s2 = v;
    else if (name == "l1_plus") { p.l1_plus = v; p.l1_minus = 1.0 - v; }
    else if (name == "l1_minus") { p.l1_minus = v; p.l1_plus = 1.0 - v; }
    else if (name == "l2_plus") { p.l2_plus = v; p.l2_minus = 1.0 - v; }
    else if (name == "l2_minus") { p.l2_minus = v; p.l2_plus = 1.0 - v; }
    else throw ConfigError("unknown sweep parameter: " + name);
}

void set_symmetric_field(SymmetricParams& p, const std::string& name,
                         double v) {
    if (name == "lambda") p.lambda = v;
    else if (name == "alpha") p.alpha = v;
    else if (name == "s") p.s = v;
    else if (name == "l_plus") { p.l_plus = v; p.l_minus = 1.0 - v; }
    else if (name == "l_minus") { p.l_minus = v; p.l_plus = 1.0 - v; }
    else throw ConfigError("unknown sweep parameter: " + name);
}

unsigned thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RAGNET_THREADS")) {
        long v = 0;
        try {
            std::size_t used = 0;
            v = std::stol(env, &used);
            if (used != std::string(env).size()) v = 0;
        } catch (const std::exception&) {
            v = 0;
        }
        if (v < 1) {
            throw ConfigError("RAGNET_THREADS must be a positive integer");
        }
        cap = unsigned(std::min<long>(v, 256));
    }
    return cap;
}

// Runs fn(0..n-1) on up to thread_cap() workers; results land in
// caller-owned slots so output order never depends on scheduling.
void parallel_rows(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(thread_cap(), n == 0 ? 1 : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::string num(double v) { return json(v).dump(); }

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file: " + out_path);
    }
    out << text;
}

std::string finish_json(const json& doc) { return doc.dump(2) + "\n"; }

std::string csv_document(const json& cfg, const std::string& header,
                         const std::vector<std::string>& rows) {
    std::string out = "# " + cfg.dump() + "\n" + header + "\n";
    for (const std::string& r : rows) {
        out += r;
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- commands

struct Options {
    std::string params_path;
    std::string out_path;
    std::string format;  // empty = command default
    double slots = 1e6;
    double burn_in = -1.0;  // < 0: resolved to slots/10
    std::uint64_t seed = 1;
    std::string dominant;
    bool global_malfunction = false;
    std::string mode = "point";
    std::string which = "stability";
    std::vector<std::string> sweeps;
    bool oracle = false;
    int N = 64;
    int M = 1024;
    int resolution = 0;  // 0: mode-specific default
    int alpha_grid = 101;
};

int run_simulate(const Options& opt) {
    const ModelParams p = ModelParams::from_json(read_json_file(opt.params_path));
    if (!(opt.slots >= 1.0 && opt.slots <= 9e15)) {
        throw ConfigError("slots out of range");
    }
    const auto slots = std::uint64_t(std::llround(opt.slots));
    const auto burn = opt.burn_in < 0.0
                          ? slots / 10
                          : std::uint64_t(std::llround(opt.burn_in));
    if (!opt.dominant.empty() && opt.global_malfunction) {
        throw ConfigError(
            "--global-malfunction is not available for the dominant system");
    }
    const std::string fmt = opt.format.empty() ? "json" : opt.format;

    const SimStats stats =
        opt.dominant.empty()
            ? simulate(p, slots, burn, opt.seed, opt.global_malfunction)
            : simulate_dominant(p,
                                opt.dominant == "R1" ? Dominant::R1
                                                     : Dominant::R2,
                                slots, burn, opt.seed);

    const json cfg{{"command", "simulate"},
                   {"params", p.to_json()},
                   {"slots", slots},
                   {"burn_in", burn},
                   {"seed", opt.seed},
                   {"dominant", opt.dominant.empty() ? "none" : opt.dominant},
                   {"global_malfunction", opt.global_malfunction},
                   {"format", fmt}};
    if (fmt == "json") {
        emit(finish_json(json{{"config", cfg}, {"stats", stats.to_json()}}),
             opt.out_path);
    } else {
        const json s = stats.to_json();
        std::string header, row;
        bool first = true;
        for (const auto& [key, value] : s.items()) {
            if (!first) {
                header += ',';
                row += ',';
            }
            first = false;
            header += key;
            row += value.dump();
        }
        emit(csv_document(cfg, header, {row}), opt.out_path);
    }
    return 0;
}

int run_region(const Options& opt) {
    const ModelParams base =
        ModelParams::from_json(read_json_file(opt.params_path));
    const std::string fmt = opt.format.empty() ? "csv" : opt.format;
    const Which which =
        opt.which == "stability" ? Which::stability : Which::throughput;
    json cfg{{"command", "region"},
             {"params", base.to_json()},
             {"mode", opt.mode},
             {"which", opt.which},
             {"format", fmt}};

    if (opt.mode != "point" && !opt.sweeps.empty()) {
        throw ConfigError("--sweep applies to point mode only");
    }

    std::vector<std::string> csv_rows;
    json json_rows = json::array();
    std::string header;

    if (opt.mode == "point") {
        std::vector<SweepSpec> sweeps;
        std::vector<std::vector<double>> values;
        json jsweeps = json::array();
        std::size_t total = 1;
        for (const std::string& text : opt.sweeps) {
            const SweepSpec sw = parse_sweep(text);
            ModelParams scratch = base;
            set_model_field(scratch, sw.name, sw.start);  // early name check
            values.push_back(sweep_values(sw));
            total *= values.back().size();
            jsweeps.push_back(sweep_to_json(sw));
            sweeps.push_back(sw);
        }
        cfg["sweeps"] = jsweeps;

        struct Row {
            double l1 = 0.0, l2 = 0.0;
            RegionVerdict v;
            std::string drift;
        };
        std::vector<Row> rows(total);
        parallel_rows(total, [&](std::size_t idx) {
            ModelParams p = base;
            std::size_t rem = idx;
            for (std::size_t k = sweeps.size(); k-- > 0;) {
                const std::size_t steps = values[k].size();
                set_model_field(p, sweeps[k].name, values[k][rem % steps]);
                rem /= steps;
            }
            p.validate();
            Row& r = rows[idx];
            r.l1 = p.lambda1;
            r.l2 = p.lambda2;
            r.v = which == Which::stability
                      ? in_stability_region(r.l1, r.l2, p)
                      : in_throughput_region(r.l1, r.l2, p);
            try {
                r.drift = to_string(classify_drift(r.l1, r.l2, p).verdict);
            } catch (const NumericError&) {
                r.drift = "indeterminate";
            }
        });

        header =
            "lambda1,lambda2,member,via,margin1,margin2,margin3,margin4,"
            "verdict";
        for (const Row& r : rows) {
            csv_rows.push_back(num(r.l1) + ',' + num(r.l2) + ',' +
                               (r.v.member ? "true" : "false") + ',' +
                               to_string(r.v.via) + ',' + num(r.v.margins[0]) +
                               ',' + num(r.v.margins[1]) + ',' +
                               num(r.v.margins[2]) + ',' +
                               num(r.v.margins[3]) + ',' + r.drift);
            json_rows.push_back(json{{"lambda1", r.l1},
                                     {"lambda2", r.l2},
                                     {"member", r.v.member},
                                     {"via", to_string(r.v.via)},
                                     {"margin1", r.v.margins[0]},
                                     {"margin2", r.v.margins[1]},
                                     {"margin3", r.v.margins[2]},
                                     {"margin4", r.v.margins[3]},
                                     {"verdict", r.drift}});
        }
    } else if (opt.mode == "boundary") {
        const int res = opt.resolution > 0 ? opt.resolution : 101;
        cfg["resolution"] = res;
        header = "lambda1,lambda2";
        for (const auto& [l1, l2] : trace_boundary(base, which, res)) {
            csv_rows.push_back(num(l1) + ',' + num(l2));
            json_rows.push_back(json{{"lambda1", l1}, {"lambda2", l2}});
        }
    } else {  // closure: the union over transmission probabilities, both
              // region types side by side as per-lambda1 envelopes
        const int L = opt.resolution > 0 ? opt.resolution : 49;
        cfg["lambda_grid"] = L;
        cfg["alpha_grid"] = opt.alpha_grid;
        const ClosureGrid stab =
            region_closure(base, Which::stability, opt.alpha_grid, L);
        const ClosureGrid thru =
            region_closure(base, Which::throughput, opt.alpha_grid, L);
        header = "lambda1,lambda2_stability,lambda2_throughput";
        for (std::size_t i = 0; i < stab.lambda1.size(); ++i) {
            double max_s = 0.0, max_t = 0.0;
            for (std::size_t j = 0; j < stab.lambda2.size(); ++j) {
                if (stab.at(int(i), int(j))) max_s = stab.lambda2[j];
                if (thru.at(int(i), int(j))) max_t = thru.lambda2[j];
            }
            csv_rows.push_back(num(stab.lambda1[i]) + ',' + num(max_s) + ',' +
                               num(max_t));
            json_rows.push_back(json{{"lambda1", stab.lambda1[i]},
                                     {"lambda2_stability", max_s},
                                     {"lambda2_throughput", max_t}});
        }
    }

    if (fmt == "csv") {
        emit(csv_document(cfg, header, csv_rows), opt.out_path);
    } else {
        emit(finish_json(json{{"config", cfg}, {"rows", json_rows}}),
             opt.out_path);
    }
    return 0;
}

BoundRow bound_row_at(const SymmetricParams& base, const std::string& field,
                      double x, bool oracle, int N,
                      std::string* warning = nullptr) {
    SymmetricParams sp = base;
    set_symmetric_field(sp, field, x);
    sp.validate();
    BoundRow row;
    row.x = x;
    row.stable = symmetric_stability(sp).stable;
    if (!row.stable) return row;
    const MeanValueBounds b = queue_bounds(sp);
    row.L_low = b.L_low;
    row.L_up = b.L_up;
    if (warning) *warning = b.warning;
    if (oracle) {
        const StationarySolution sol = truncated_stationary(sp.embed(), N);
        row.has_oracle = true;
        row.L_oracle = 0.5 * (sol.stats.mean_q1 + sol.stats.mean_q2);
    }
    return row;
}

int run_bounds(const Options& opt) {
    const SymmetricParams base =
        SymmetricParams::from_json(read_json_file(opt.params_path));
    if (opt.sweeps.size() != 1) {
        throw ConfigError("bounds needs exactly one --sweep NAME:START:STOP:STEPS");
    }
    const SweepSpec sw = parse_sweep(opt.sweeps[0]);
    {
        SymmetricParams scratch = base;
        set_symmetric_field(scratch, sw.name, sw.start);  // early name check
    }
    const std::string fmt = opt.format.empty() ? "csv" : opt.format;
    const std::vector<double> xs = sweep_values(sw);

    std::vector<BoundRow> rows(xs.size());
    std::vector<std::string> warnings(xs.size());
    parallel_rows(xs.size(), [&](std::size_t i) {
        rows[i] = bound_row_at(base, sw.name, xs[i], opt.oracle, opt.N,
                               &warnings[i]);
    });

    const json cfg{{"command", "bounds"},
                   {"params", base.to_json()},
                   {"sweep", sweep_to_json(sw)},
                   {"oracle", opt.oracle},
                   {"N", opt.N},
                   {"format", fmt}};
    if (fmt == "csv") {
        emit("# " + cfg.dump() + "\n" + bounds_csv(rows, opt.oracle),
             opt.out_path);
    } else {
        json jr = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            json r{{"x", rows[i].x}, {"stable", rows[i].stable}};
            if (rows[i].stable) {
                r["L_low"] = rows[i].L_low;
                r["L_up"] = rows[i].L_up;
                if (!warnings[i].empty()) r["warning"] = warnings[i];
            }
            if (rows[i].has_oracle) r["L_oracle"] = rows[i].L_oracle;
            jr.push_back(std::move(r));
        }
        emit(finish_json(json{{"config", cfg}, {"rows", jr}}), opt.out_path);
    }
    return 0;
}

int run_compare(const Options& opt) {
    // Defaults reproduce the signals-vs-baseline study: transfer-only
    // signals (s=0.1, l_plus=1) against the signal-free network, alpha=0.6.
    SymmetricParams ragn;
    ragn.lambda = 0.0;
    ragn.alpha = 0.6;
    ragn.s = 0.1;
    ragn.l_minus = 0.0;
    ragn.l_plus = 1.0;
    if (!opt.params_path.empty()) {
        ragn = SymmetricParams::from_json(read_json_file(opt.params_path));
    }
    if (opt.sweeps.size() > 1) {
        throw ConfigError("compare takes at most one --sweep");
    }
    const SweepSpec sw = opt.sweeps.empty()
                             ? SweepSpec{"lambda", 0.02, 0.18, 9}
                             : parse_sweep(opt.sweeps[0]);
    {
        SymmetricParams scratch = ragn;
        set_symmetric_field(scratch, sw.name, sw.start);  // early name check
    }
    SymmetricParams baseline = ragn;
    baseline.s = 0.0;
    const std::string fmt = opt.format.empty() ? "csv" : opt.format;
    const std::vector<double> xs = sweep_values(sw);

    std::vector<BoundRow> rows_r(xs.size()), rows_b(xs.size());
    parallel_rows(xs.size(), [&](std::size_t i) {
        rows_r[i] = bound_row_at(ragn, sw.name, xs[i], opt.oracle, opt.N);
        rows_b[i] = bound_row_at(baseline, sw.name, xs[i], opt.oracle, opt.N);
    });

    const json cfg{{"command", "compare"},
                   {"params_ragn", ragn.to_json()},
                   {"params_baseline", baseline.to_json()},
                   {"sweep", sweep_to_json(sw)},
                   {"oracle", opt.oracle},
                   {"N", opt.N},
                   {"format", fmt}};

    std::string header =
        "x,stable_ragn,L_low_ragn,L_up_ragn,stable_baseline,L_low_baseline,"
        "L_up_baseline";
    if (opt.oracle) header += ",L_oracle_ragn,L_oracle_baseline";
    header += ",difference";

    std::vector<std::string> csv_rows;
    json json_rows = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const BoundRow& r = rows_r[i];
        const BoundRow& b = rows_b[i];
        std::string line = num(xs[i]);
        line += r.stable ? ",true," + num(r.L_low) + ',' + num(r.L_up)
                         : ",false,,";
        line += b.stable ? ",true," + num(b.L_low) + ',' + num(b.L_up)
                         : ",false,,";
        if (opt.oracle) {
            line += ',';
            if (r.has_oracle) line += num(r.L_oracle);
            line += ',';
            if (b.has_oracle) line += num(b.L_oracle);
        }
        line += ',';
        if (r.stable && b.stable) line += num(r.L_up - b.L_up);
        csv_rows.push_back(line);

        json row{{"x", xs[i]},
                 {"stable_ragn", r.stable},
                 {"stable_baseline", b.stable}};
        if (r.stable) {
            row["L_low_ragn"] = r.L_low;
            row["L_up_ragn"] = r.L_up;
        }
        if (b.stable) {
            row["L_low_baseline"] = b.L_low;
            row["L_up_baseline"] = b.L_up;
        }
        if (r.has_oracle) row["L_oracle_ragn"] = r.L_oracle;
        if (b.has_oracle) row["L_oracle_baseline"] = b.L_oracle;
        if (r.stable && b.stable) row["difference"] = r.L_up - b.L_up;
        json_rows.push_back(std::move(row));
    }

    if (fmt == "csv") {
        emit(csv_document(cfg, header, csv_rows), opt.out_path);
    } else {
        emit(finish_json(json{{"config", cfg}, {"rows", json_rows}}),
             opt.out_path);
    }
    return 0;
}

int run_bvp(const Options& opt) {
    const SymmetricParams sp =
        SymmetricParams::from_json(read_json_file(opt.params_path));
    if (!opt.format.empty() && opt.format != "json") {
        throw ConfigError("bvp output is json only");
    }
    const BvpSolution sol = solve_riemann(sp, opt.M);
    json body = sol.to_json();
    body["L_second_moment"] = sol.L_second_moment;
    body["bc_residual"] = sol.bc_residual;
    body["final_diff"] = sol.grid.final_diff;
    const json cfg{{"command", "bvp"},
                   {"params", sp.to_json()},
                   {"M", opt.M},
                   {"format", "json"}};
    emit(finish_json(json{{"config", cfg}, {"solution", body}}), opt.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "two-user random-access network with signals: simulation, regions, "
        "queue-length bounds, comparison, boundary-value solution"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* sim = app.add_subcommand(
        "simulate", "simulate the slotted chain and report long-run statistics");
    sim->add_option("--params", opt.params_path,
                    "model parameter JSON file (ten fields)")
        ->required();
    sim->add_option("--slots", opt.slots, "slots to simulate (default 1e6)");
    sim->add_option("--burn-in", opt.burn_in,
                    "warm-up slots excluded from statistics (default slots/10)");
    sim->add_option("--seed", opt.seed, "RNG seed (default 1)");
    sim->add_option("--dominant", opt.dominant,
                    "simulate the dominant system in which this queue (R1|R2) "
                    "sends dummy packets when empty")
        ->check(CLI::IsMember({"R1", "R2"}));
    sim->add_flag("--global-malfunction", opt.global_malfunction,
                  "signals at an empty queue still suppress all transmissions");
    sim->add_option("--format", opt.format, "csv|json (default json)")
        ->check(CLI::IsMember({"csv", "json"}));
    sim->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* reg = app.add_subcommand(
        "region",
        "stability/throughput region membership, boundary, or closure");
    reg->add_option("--params", opt.params_path,
                    "model parameter JSON file (ten fields)")
        ->required();
    reg->add_option("--mode", opt.mode,
                    "point (membership rows), boundary (traced polyline), or "
                    "closure (union over transmission probabilities)")
        ->check(CLI::IsMember({"point", "boundary", "closure"}));
    reg->add_option("--which", opt.which, "stability|throughput")
        ->check(CLI::IsMember({"stability", "throughput"}));
    reg->add_option("--sweep", opt.sweeps,
                    "NAME:START:STOP:STEPS, repeatable; point mode evaluates "
                    "the cartesian product (sweeping a split field moves its "
                    "complement)");
    reg->add_option("--resolution", opt.resolution,
                    "boundary points or lambda grid size per axis "
                    "(defaults: boundary 101, closure 49)");
    reg->add_option("--alpha-grid", opt.alpha_grid,
                    "closure mode: alpha grid size per axis (default 101)");
    reg->add_option("--format", opt.format, "csv|json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    reg->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* bounds = app.add_subcommand(
        "bounds", "closed-form mean queue-length bounds over a sweep");
    bounds->add_option("--params", opt.params_path,
                       "symmetric parameter JSON file")
        ->required();
    bounds->add_option("--sweep", opt.sweeps,
                       "NAME:START:STOP:STEPS over lambda|alpha|s|l_plus|"
                       "l_minus (required; a split field moves its complement)");
    bounds->add_flag("--oracle", opt.oracle,
                     "add the truncated-chain stationary mean as L_oracle");
    bounds->add_option("--N", opt.N,
                       "initial oracle truncation (adaptive, default 64)");
    bounds->add_option("--format", opt.format, "csv|json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    bounds->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* compare = app.add_subcommand(
        "compare",
        "signals network vs. signal-free baseline over a sweep (defaults: "
        "s=0.1 transfer-only vs s=0, alpha=0.6, lambda 0.02..0.18)");
    compare->add_option("--params", opt.params_path,
                        "symmetric parameter JSON file for the signals side "
                        "(default s=0.1, l_plus=1, alpha=0.6)");
    compare->add_option("--sweep", opt.sweeps,
                        "NAME:START:STOP:STEPS (default lambda:0.02:0.18:9)");
    compare->add_flag("--oracle", opt.oracle,
                      "add truncated-chain stationary means");
    compare->add_option("--N", opt.N,
                        "initial oracle truncation (adaptive, default 64)");
    compare->add_option("--format", opt.format, "csv|json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    compare->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* bvp = app.add_subcommand(
        "bvp", "boundary-value solution of the stable symmetric system");
    bvp->add_option("--params", opt.params_path,
                    "symmetric parameter JSON file")
        ->required();
    bvp->add_option("--M", opt.M,
                    "contour nodes, power of two >= 256 (default 1024)");
    bvp->add_option("--format", opt.format, "json (the only bvp format)")
        ->check(CLI::IsMember({"csv", "json"}));
    bvp->add_option("--out", opt.out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(opt);
        if (reg->parsed()) return run_region(opt);
        if (bounds->parsed()) return run_bounds(opt);
        if (compare->parsed()) return run_compare(opt);
        if (bvp->parsed()) return run_bvp(opt);
        std::cerr << "no command selected\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
