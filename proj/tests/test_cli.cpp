#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "golden_values.hpp"
#include "json.hpp"
#include "testutil.hpp"

using testutil::rel;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int status = -1;
    std::string output;
};

CmdResult run_cmd(const std::string& cmd) {
    const std::string full = cmd + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.output += buf;
    const int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

const std::string sglab = SGLAB_PATH;

// Fresh scratch directory per test; removed up front so reruns start clean.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path("cli_tmp") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_json(const fs::path& path) {
    return nlohmann::json::parse(slurp(path));
}

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
    const CmdResult r = run_cmd(sglab + " --help");
    CHECK(r.status == 0);
    CHECK(r.output.find("optimize") != std::string::npos);
    CHECK(r.output.find("budget") != std::string::npos);
    CHECK(r.output.find("verify") != std::string::npos);
    CHECK(r.output.find("e2e") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cmd(sglab + " --no-such-flag").status == 2);
    CHECK(run_cmd(sglab).status == 2);
    CHECK(run_cmd(sglab + " bound t9").status == 2);
    CHECK(run_cmd(sglab + " budget t1").status == 2);  // missing --delta
}

TEST_CASE("configuration problems name every offending key") {
    const fs::path dir = scratch("badcfg");
    write_file(dir / "bad.cfg",
               "d = 1\nbogus_key = 3\nlambda = oops\nanother_bad = 1\n");
    const CmdResult r = run_cmd(sglab + " --config " + (dir / "bad.cfg").string() +
                                " bound t1");
    CHECK(r.status == 2);
    CHECK(r.output.find("bogus_key") != std::string::npos);
    CHECK(r.output.find("another_bad") != std::string::npos);
    CHECK(r.output.find("lambda") != std::string::npos);
}

TEST_CASE("budget rows match the frozen reference values") {
    const fs::path dir = scratch("budget");
    write_file(dir / "c.cfg", "d = 1\nmu = 0\n");
    const CmdResult r =
        run_cmd(sglab + " --config " + (dir / "c.cfg").string() + " --out " +
                dir.string() + " budget t1 --delta 0.1");
    CHECK(r.status == 0);
    const nlohmann::json j = load_json(dir / "budget_t1.json");
    CHECK(rel(j["T_delta"].get<double>(), golden::kT1TDeltaD1) < 1e-12);
    CHECK(rel(j["gamma_delta"].get<double>(), golden::kT1GammaDeltaD1) < 1e-12);
    CHECK(j["n_delta"].get<double>() == 0.0);  // theta0 = mu = 0 starts converged
    CHECK(j["delta"].get<double>() == 0.1);
}

TEST_CASE("the general budget reports its chosen horizon pair") {
    const fs::path dir = scratch("budget2");
    write_file(dir / "c.cfg", "d = 1\nmu = 0.5\nepsilon = 0\n");
    const CmdResult r =
        run_cmd(sglab + " --config " + (dir / "c.cfg").string() + " --out " +
                dir.string() + " budget t2 --delta 0.5");
    CHECK(r.status == 0);
    const nlohmann::json j = load_json(dir / "budget_t2.json");
    CHECK(j["chosen_epsilon"].get<double>() == 0.0);
    CHECK(j["chosen_T"].get<double>() > j["T_delta"].get<double>());
    CHECK(j["gamma_delta"].contains("log10"));
}

TEST_CASE("single-lemma verification passes and reports") {
    const fs::path dir = scratch("verify");
    write_file(dir / "c.cfg",
               "d = 1\nmu = 0.5\nn_replicas = 20\nn_iters = 60\nmc_samples = 20000\n");
    const CmdResult r =
        run_cmd(sglab + " --config " + (dir / "c.cfg").string() + " --out " +
                dir.string() + " verify B1");
    CHECK(r.status == 0);
    CHECK(r.output.find("B1") != std::string::npos);
    CHECK(r.output.find("pass") != std::string::npos);
    const nlohmann::json j = load_json(dir / "verify_report.json");
    CHECK(j["all_pass"].get<bool>());
    CHECK(j["checks"].size() == 1);
    CHECK(j["checks"][0]["lemma_id"].get<std::string>() == "B1");
}

TEST_CASE("optimizer runs are byte-identical across reruns") {
    const fs::path dir = scratch("optimize");
    write_file(dir / "c.cfg", "d = 1\nmu = 2\nn_iters = 200\nseed = 7\n");
    const std::string base = sglab + " --config " + (dir / "c.cfg").string();
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    CHECK(run_cmd(base + " --out " + (dir / "a").string() + " optimize").status == 0);
    CHECK(run_cmd(base + " --out " + (dir / "b").string() + " optimize").status == 0);
    CHECK(slurp(dir / "a" / "optimize_report.json") ==
          slurp(dir / "b" / "optimize_report.json"));
    CHECK(slurp(dir / "a" / "theta_trajectory.csv") ==
          slurp(dir / "b" / "theta_trajectory.csv"));
    const nlohmann::json j = load_json(dir / "a" / "optimize_report.json");
    CHECK(j["error_sq"].get<double>() < j["error_bound"].get<double>());
}

TEST_CASE("sampler runs are byte-identical across reruns") {
    const fs::path dir = scratch("sample");
    write_file(dir / "c.cfg", "d = 2\nmu = 0.5\nn_paths = 500\nseed = 11\n");
    const std::string base = sglab + " --config " + (dir / "c.cfg").string();
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    CHECK(run_cmd(base + " --out " + (dir / "a").string() + " sample").status == 0);
    CHECK(run_cmd(base + " --out " + (dir / "b").string() + " sample").status == 0);
    CHECK(slurp(dir / "a" / "samples.csv") == slurp(dir / "b" / "samples.csv"));
    CHECK(slurp(dir / "a" / "sample_report.json") ==
          slurp(dir / "b" / "sample_report.json"));
    CHECK(slurp(dir / "a" / "samples.csv").substr(0, 8) == "y_0,y_1\n");
    const nlohmann::json j = load_json(dir / "a" / "sample_report.json");
    CHECK(j["n_aborted"].get<int>() == 0);
    CHECK(j["n_samples"].get<int>() == 500);
}

TEST_CASE("bound reports carry every named term") {
    const fs::path dir = scratch("bound");
    write_file(dir / "c.cfg", "d = 1\nmu = 0.5\n");
    const std::string base = sglab + " --config " + (dir / "c.cfg").string() +
                             " --out " + dir.string();
    CHECK(run_cmd(base + " bound t1").status == 0);
    const nlohmann::json t1 = load_json(dir / "bound_t1.json");
    for (const char* k : {"init", "opt", "disc"})
        CHECK(t1["report"]["terms"].contains(k));
    CHECK(t1["report"]["total"]["value"].get<double>() > 0.0);
    CHECK(t1["params"].contains("e1"));

    CHECK(run_cmd(base + " bound t2").status == 0);
    const nlohmann::json t2 = load_json(dir / "bound_t2.json");
    for (const char* k : {"early_stop", "init", "score", "disc"})
        CHECK(t2["report"]["terms"].contains(k));
    CHECK(t2["params"].contains("big_factor"));
}

TEST_CASE("the end-to-end pipeline meets a loose target") {
    const fs::path dir = scratch("e2e");
    write_file(dir / "c.cfg", "d = 1\nmu = 0.5\nn_paths = 20000\nseed = 3\n");
    const CmdResult r =
        run_cmd(sglab + " --config " + (dir / "c.cfg").string() + " --out " +
                dir.string() + " e2e --delta 2.0");
    CHECK(r.status == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    const nlohmann::json j = load_json(dir / "e2e_report.json");
    CHECK(j["pass"].get<bool>());
    CHECK(j["within_delta"].get<bool>());
    CHECK(j["within_bound"].get<bool>());
    CHECK(j["total_w2"].get<double>() < 2.0);
    CHECK(j["n_aborted"].get<int>() == 0);
}
