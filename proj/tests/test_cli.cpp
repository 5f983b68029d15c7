#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout
};

const char* cli_binary() {
    const char* bin = std::getenv("RAGNET_CLI_BIN");
    REQUIRE_MESSAGE(bin != nullptr,
                    "RAGNET_CLI_BIN must point at the command-line binary");
    return bin;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("ragnet_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

RunResult run_cli(const std::string& args, const std::string& extra_env = "") {
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout_" + std::to_string(counter++));
    const std::string cmd = extra_env + std::string(cli_binary()) + " " + args +
                            " > " + out.string() + " 2> " + out.string() + ".err";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.output = slurp(out);
    return r;
}

// Ten-field parameter set: no signals, equal halves of the classical channel.
const char* kPlainAloha = R"({
  "lambda1": 0.2, "lambda2": 0.2, "alpha1": 0.5, "alpha2": 0.5,
  "s1": 0.0, "s2": 0.0,
  "l1_minus": 1.0, "l1_plus": 0.0, "l2_minus": 1.0, "l2_plus": 0.0
})";

// Five-field symmetric set with no signals (bounds collapse to equality).
const char* kPlainSymmetric =
    R"({"lambda": 0.1, "alpha": 0.5, "s": 0.0, "l_minus": 1.0, "l_plus": 0.0})";

// Symmetric set with both signal outcomes active.
const char* kSignalSymmetric =
    R"({"lambda": 0.1, "alpha": 0.5, "s": 0.5, "l_minus": 0.8, "l_plus": 0.2})";

std::vector<std::string> body_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(line);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate emits the resolved config and is byte-deterministic") {
    const fs::path params = write_file("aloha.json", kPlainAloha);
    const std::string args = "simulate --params " + params.string() +
                             " --slots 20000 --burn-in 2000 --seed 5";
    const RunResult a = run_cli(args);
    REQUIRE(a.exit_code == 0);
    const RunResult b = run_cli(args);
    CHECK(a.output == b.output);

    const json doc = json::parse(a.output);
    CHECK(doc["config"]["command"] == "simulate");
    CHECK(doc["config"]["slots"] == 20000);
    CHECK(doc["config"]["seed"] == 5);
    CHECK(doc["config"]["params"]["lambda1"] == 0.2);
    CHECK(doc["stats"]["slots"] == 20000 - 2000);
    CHECK(doc["stats"]["mean_q1"].get<double>() > 0.0);
    CHECK_FALSE(doc["stats"]["diverged"].get<bool>());

    // A different seed changes the sample path.
    const RunResult c = run_cli("simulate --params " + params.string() +
                                " --slots 20000 --burn-in 2000 --seed 6");
    REQUIRE(c.exit_code == 0);
    CHECK(c.output != a.output);
}

TEST_CASE("simulate renders CSV with a config comment line") {
    const fs::path params = write_file("aloha2.json", kPlainAloha);
    const RunResult r = run_cli("simulate --params " + params.string() +
                                " --slots 5000 --burn-in 500 --format csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = body_rows(r.output);
    REQUIRE(rows.size() == 3);  // config comment, header, one data row
    CHECK(rows[0].substr(0, 2) == "# ");
    CHECK(rows[1].find("mean_q1") != std::string::npos);
    CHECK(rows[1].find("se_mean_q1") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run_cli("simulate --params /nonexistent.json").exit_code == 2);
    const fs::path broken = write_file("broken.json", "{ not json");
    CHECK(run_cli("simulate --params " + broken.string()).exit_code == 2);
    const fs::path params = write_file("aloha3.json", kPlainAloha);
    CHECK(run_cli("simulate --params " + params.string() + " --bogus-flag")
              .exit_code == 2);
    CHECK(run_cli("nonsense-command").exit_code == 2);
    // Contradictory numeric configuration: burn-in at least as long as the run.
    CHECK(run_cli("simulate --params " + params.string() +
                  " --slots 100 --burn-in 100")
              .exit_code == 2);
    // Out-of-range parameter value caught by validation.
    const fs::path bad = write_file(
        "bad.json",
        R"({"lambda1": 1.5, "lambda2": 0.2, "alpha1": 0.5, "alpha2": 0.5,
            "s1": 0, "s2": 0, "l1_minus": 1, "l1_plus": 0,
            "l2_minus": 1, "l2_plus": 0})");
    CHECK(run_cli("simulate --params " + bad.string()).exit_code == 2);
}

TEST_CASE("region point mode reports membership with margins and drift") {
    const fs::path params = write_file("aloha4.json", kPlainAloha);
    const RunResult r = run_cli("region --params " + params.string() +
                                " --mode point --format csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = body_rows(r.output);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] ==
          "lambda1,lambda2,member,via,margin1,margin2,margin3,margin4,verdict");
    CHECK(rows[2].substr(0, 8) == "0.2,0.2,");
    CHECK(rows[2].find("true") != std::string::npos);
    CHECK(rows[2].find("positive-recurrent") != std::string::npos);
}

TEST_CASE("region sweeps form a cartesian product in deterministic order") {
    const fs::path params = write_file("aloha5.json", kPlainAloha);
    const std::string args = "region --params " + params.string() +
                             " --mode point --sweep lambda1:0.1:0.3:3" +
                             " --sweep lambda2:0.1:0.3:3 --format json";
    const RunResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["rows"].size() == 9);
    // First sweep is the slow index; the inner sweep advances first.
    CHECK(doc["rows"][0]["lambda1"] == 0.1);
    CHECK(doc["rows"][0]["lambda2"] == 0.1);
    CHECK(doc["rows"][1]["lambda1"] == 0.1);
    CHECK(doc["rows"][1]["lambda2"].get<double>() ==
          doctest::Approx(0.2).epsilon(1e-12));
    CHECK(doc["rows"][3]["lambda1"].get<double>() ==
          doctest::Approx(0.2).epsilon(1e-12));
    CHECK(doc["rows"][8]["lambda1"].get<double>() ==
          doctest::Approx(0.3).epsilon(1e-12));
    CHECK(doc["rows"][8]["member"] == false);
    CHECK(doc["rows"][0]["member"] == true);

    // Row-level parallelism must not change the output.
    const RunResult st = run_cli(args, "RAGNET_THREADS=1 ");
    CHECK(st.output == r.output);
    // An invalid thread cap is a configuration error.
    CHECK(run_cli(args, "RAGNET_THREADS=zero ").exit_code == 2);

    // Unknown sweep names are refused.
    CHECK(run_cli("region --params " + params.string() +
                  " --mode point --sweep bogus:0:1:3")
              .exit_code == 2);
    CHECK(run_cli("region --params " + params.string() +
                  " --mode boundary --sweep lambda1:0:1:3")
              .exit_code == 2);
}

TEST_CASE("region boundary mode traces the requested resolution") {
    const fs::path params = write_file("aloha6.json", kPlainAloha);
    const RunResult r = run_cli("region --params " + params.string() +
                                " --mode boundary --resolution 11 --format csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = body_rows(r.output);
    REQUIRE(rows.size() == 2 + 11);
    CHECK(rows[1] == "lambda1,lambda2");
    // First traced point: the single-user critical rate on the lambda1 axis.
    CHECK(rows[2].find("0.4999999") != std::string::npos);
    CHECK(rows[2].find(",0") != std::string::npos);
}

TEST_CASE("region closure envelopes keep throughput inside stability") {
    const fs::path params = write_file("sig.json", R"({
      "lambda1": 0, "lambda2": 0, "alpha1": 0.5, "alpha2": 0.5,
      "s1": 0.1, "s2": 0.1,
      "l1_minus": 0.8, "l1_plus": 0.2, "l2_minus": 0.8, "l2_plus": 0.2
    })");
    const RunResult r =
        run_cli("region --params " + params.string() +
                " --mode closure --resolution 9 --alpha-grid 7 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["rows"].size() == 9);
    CHECK(doc["config"]["alpha_grid"] == 7);
    for (const auto& row : doc["rows"]) {
        CHECK(row["lambda2_throughput"].get<double>() <=
              row["lambda2_stability"].get<double>() + 1e-15);
    }
}

TEST_CASE("bounds sweep brackets the oracle when the bounds are exact") {
    const fs::path params = write_file("sym0.json", kPlainSymmetric);
    const RunResult r = run_cli("bounds --params " + params.string() +
                                " --sweep lambda:0.05:0.2:4 --oracle" +
                                " --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["rows"].size() == 4);
    for (const auto& row : doc["rows"]) {
        REQUIRE(row["stable"] == true);
        const double low = row["L_low"], up = row["L_up"],
                     oracle = row["L_oracle"];
        CHECK(low == up);  // no deletions: the bounds pinch
        CHECK(oracle >= low - 1e-6);
        CHECK(oracle <= up + 1e-6);
    }

    // The CSV flavor of the same sweep.
    const RunResult c = run_cli("bounds --params " + params.string() +
                                " --sweep lambda:0.05:0.2:4 --format csv");
    REQUIRE(c.exit_code == 0);
    const auto rows = body_rows(c.output);
    REQUIRE(rows.size() == 2 + 4);
    CHECK(rows[1] == "x,stable,L_low,L_up");
    CHECK(rows[2].substr(0, 10) == "0.05,true,");
}

TEST_CASE("bounds marks rates beyond the stability region as unstable") {
    const fs::path params = write_file("sym1.json", kPlainSymmetric);
    const RunResult r = run_cli("bounds --params " + params.string() +
                                " --sweep lambda:0.1:0.4:4 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["rows"].size() == 4);
    CHECK(doc["rows"][0]["stable"] == true);
    CHECK(doc["rows"][3]["stable"] == false);
    CHECK_FALSE(doc["rows"][3].contains("L_low"));

    // Exactly one sweep is required.
    CHECK(run_cli("bounds --params " + params.string()).exit_code == 2);
    CHECK(run_cli("bounds --params " + params.string() +
                  " --sweep lambda:0.1:0.2:2 --sweep alpha:0.3:0.4:2")
              .exit_code == 2);
}

TEST_CASE("compare of a configuration against itself shows zero difference") {
    const fs::path params = write_file("sym2.json", kPlainSymmetric);
    const RunResult r = run_cli("compare --params " + params.string() +
                                " --sweep lambda:0.05:0.15:3 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["rows"].size() == 3);
    for (const auto& row : doc["rows"]) {
        CHECK(row["stable_ragn"] == true);
        CHECK(row["stable_baseline"] == true);
        CHECK(row["difference"].get<double>() == 0.0);
    }
}

TEST_CASE("compare defaults run the transfer-signals study sweep") {
    const RunResult r = run_cli("compare --format csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = body_rows(r.output);
    REQUIRE(rows.size() == 2 + 9);  // default sweep has nine points
    CHECK(rows[1] ==
          "x,stable_ragn,L_low_ragn,L_up_ragn,stable_baseline,"
          "L_low_baseline,L_up_baseline,difference");
    CHECK(rows[2].substr(0, 5) == "0.02,");
}

TEST_CASE("bvp solves the symmetric system and reports diagnostics") {
    const fs::path params = write_file("sym3.json", kSignalSymmetric);
    const RunResult r =
        run_cli("bvp --params " + params.string() + " --M 1024");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc["config"]["M"] == 1024);
    CHECK(doc["solution"]["chi"] == 1);
    CHECK(doc["solution"]["pi00"].get<double>() ==
          doctest::Approx(0.7043474233208783).epsilon(1e-9));
    CHECK(doc["solution"]["L_exact"].get<double>() ==
          doctest::Approx(0.17495252435496894).epsilon(1e-8));
    CHECK(doc["solution"]["max_kernel_residual"].get<double>() < 1e-8);
    CHECK(doc["solution"]["bc_residual"].get<double>() < 1e-10);

    // Numeric failures exit with code 3: an unstable load has no stationary
    // law to solve for (deletions push the critical load up to
    // s + (1-s)^2*alpha*(1-alpha) - s*l_plus = 0.4625 here, so exceed that).
    const fs::path unstable = write_file(
        "unst.json",
        R"({"lambda": 0.48, "alpha": 0.5, "s": 0.5, "l_minus": 0.8, "l_plus": 0.2})");
    CHECK(run_cli("bvp --params " + unstable.string()).exit_code == 3);

    // Degenerate factorization (no deletion outcome) is a numeric failure
    // too: the bounds are exact there and the solver refuses the contour.
    const fs::path pinch = write_file(
        "pinch.json",
        R"({"lambda": 0.1, "alpha": 0.5, "s": 0.0, "l_minus": 1.0, "l_plus": 0.0})");
    CHECK(run_cli("bvp --params " + pinch.string()).exit_code == 3);

    // Genuinely asymmetric input and non-JSON output are configuration
    // errors.  (A ten-field document with identical users is accepted.)
    const fs::path asym = write_file(
        "asym.json",
        R"({"lambda1": 0.1, "lambda2": 0.2, "alpha1": 0.5, "alpha2": 0.5,
            "s1": 0.3, "s2": 0.3, "l1_minus": 0.8, "l1_plus": 0.2,
            "l2_minus": 0.8, "l2_plus": 0.2})");
    CHECK(run_cli("bvp --params " + std::string(asym.string())).exit_code == 2);
    CHECK(run_cli("bvp --params " + params.string() + " --format csv")
              .exit_code == 2);
    CHECK(run_cli("bvp --params " + params.string() + " --M 300").exit_code == 2);
}

TEST_CASE("outputs write to a file when requested") {
    const fs::path params = write_file("aloha7.json", kPlainAloha);
    const fs::path out = work_dir() / "sim_out.json";
    const RunResult r = run_cli("simulate --params " + params.string() +
                                " --slots 5000 --burn-in 500 --out " +
                                out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.empty());
    const json doc = json::parse(slurp(out));
    CHECK(doc["config"]["command"] == "simulate");
}

TEST_CASE("simulate accepts the dominant and malfunction variants") {
    const fs::path params = write_file("sig2.json", R"({
      "lambda1": 0.05, "lambda2": 0.1, "alpha1": 0.5, "alpha2": 0.5,
      "s1": 0.1, "s2": 0.1,
      "l1_minus": 0.0, "l1_plus": 1.0, "l2_minus": 0.0, "l2_plus": 1.0
    })");
    const RunResult dom = run_cli("simulate --params " + params.string() +
                                  " --slots 20000 --burn-in 2000 --dominant R1");
    REQUIRE(dom.exit_code == 0);
    CHECK(json::parse(dom.output)["config"]["dominant"] == "R1");

    const RunResult gm = run_cli("simulate --params " + params.string() +
                                 " --slots 20000 --burn-in 2000" +
                                 " --global-malfunction");
    REQUIRE(gm.exit_code == 0);
    CHECK(json::parse(gm.output)["config"]["global_malfunction"] == true);

    // The two variants are mutually exclusive.
    CHECK(run_cli("simulate --params " + params.string() +
                  " --dominant R1 --global-malfunction")
              .exit_code == 2);
    // The dominant flag accepts only the two queue names.
    CHECK(run_cli("simulate --params " + params.string() + " --dominant R3")
              .exit_code == 2);
}

}  // TEST_SUITE
