#include <doctest.h>
#include <fstream>

#include "cokflag/experiments.hpp"

using namespace cokflag;

namespace {

ExperimentConfig small_simulate() {
    ExperimentConfig cfg;
    cfg.command = "simulate";
    cfg.primes = {2};
    cfg.n = 10;
    cfg.k = 2;
    cfg.samples = 64;
    cfg.dist = "uniform:0..3";
    cfg.seed = 5;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("simulate produces a deterministic report across thread counts") {
    ExperimentConfig cfg = small_simulate();
    RunResult r1 = run_simulate(cfg);
    cfg.threads = 4;
    RunResult r4 = run_simulate(cfg);
    cfg.threads = 8;
    RunResult r8 = run_simulate(cfg);
    CHECK(report_without_timing(r1.report) == report_without_timing(r4.report));
    CHECK(report_without_timing(r1.report) == report_without_timing(r8.report));
    CHECK(r1.report["histogram"]["total"] == 64);
    CHECK(r1.report.contains("config_hash"));
}

TEST_CASE("simulate with zero samples yields an empty, valid report") {
    ExperimentConfig cfg = small_simulate();
    cfg.samples = 0;
    RunResult r = run_simulate(cfg);
    CHECK(r.report["histogram"]["total"] == 0);
    CHECK(r.report["histogram"]["counts"].empty());
}

TEST_CASE("degenerate distribution is rejected") {
    ExperimentConfig cfg = small_simulate();
    cfg.dist = "const:0";
    CHECK_THROWS_AS(run_simulate(cfg), DegenerateDistribution);
}

TEST_CASE("config errors") {
    ExperimentConfig cfg = small_simulate();
    cfg.primes = {};
    CHECK_THROWS_AS(run_simulate(cfg), ConfigError);
    cfg = small_simulate();
    cfg.command = "compare";
    cfg.mode = "nonsense";
    CHECK_THROWS_AS(run_compare(cfg), ConfigError);
    cfg = small_simulate();
    cfg.mode = "cl";
    cfg.primes = {2, 3};
    CHECK_THROWS_AS(run_compare(cfg), ConfigError);
}

TEST_CASE("multi-prime simulate keys are composite group types") {
    ExperimentConfig cfg = small_simulate();
    cfg.primes = {2, 3};
    cfg.k = 1;
    cfg.samples = 20;
    RunResult r = run_simulate(cfg);
    CHECK(r.report["histogram"]["total"] == 20);
    bool saw_both = false;
    for (auto it = r.report["histogram"]["counts"].begin();
         it != r.report["histogram"]["counts"].end(); ++it)
        if (it.key().find("\"p\":2") != std::string::npos &&
            it.key().find("\"p\":3") != std::string::npos)
            saw_both = true;
    CHECK(saw_both);
}

TEST_CASE("compare cl mode on a small run") {
    ExperimentConfig cfg;
    cfg.command = "compare";
    cfg.mode = "cl";
    cfg.primes = {2};
    cfg.n = 40;
    cfg.k = 1;
    cfg.samples = 4000;
    cfg.dist = "uniform:0..3";
    cfg.seed = 9;
    cfg.threads = 2;
    cfg.tv_threshold = 0.05;
    cfg.abs_threshold = 0.03;
    RunResult r = run_compare(cfg);
    CHECK(r.pass);
    CHECK(r.report["verdict"]["pass"] == true);
}

TEST_CASE("compare vp mode recovers the finite-n law on tiny matrices") {
    ExperimentConfig cfg;
    cfg.command = "compare";
    cfg.mode = "vp";
    cfg.primes = {2};
    cfg.n = 2;
    cfg.k = 2;
    cfg.samples = 20000;
    cfg.dist = "haar:12";
    cfg.policy.start_N = 12;
    cfg.seed = 3;
    cfg.threads = 2;
    cfg.abs_threshold = 0.05;
    cfg.cond_H = Partition{1};
    cfg.cond_K = Partition{1};
    RunResult r = run_compare(cfg);
    CHECK(r.pass);
}

TEST_CASE("theory csv tables") {
    ExperimentConfig cfg;
    cfg.primes = {2};
    std::string conv = theory_csv("conv", cfg);
    CHECK(conv.find("query,exact,decimal") == 0);
    CHECK(conv.find("1/2") != std::string::npos);
    std::string corank = theory_csv("corank", cfg);
    CHECK(corank.find("corank[p=2;a=1;b=1;c=1],1/2,0.5") != std::string::npos);
    CHECK(theory_csv("", cfg) == "query,exact,decimal\n");
    CHECK_THROWS_AS(theory_csv("bogus", cfg), ConfigError);
}

TEST_CASE("hl csv table") {
    std::string csv = hl_csv(Partition{1}, Partition{1}, 2, 2);
    CHECK(csv.find("nu,c_hat_exact,c_hat_decimal") == 0);
    CHECK(csv.find("[1,1],1/3,") != std::string::npos);
    CHECK(csv.find("[2],2/3,") != std::string::npos);
}

TEST_CASE("emit samples writes one JSON line per sample") {
    ExperimentConfig cfg = small_simulate();
    cfg.samples = 10;
    cfg.emit_samples = true;
    cfg.samples_path = "/tmp/cokflag_test_samples.jsonl";
    run_simulate(cfg);
    std::ifstream f(cfg.samples_path);
    std::string line;
    int count = 0;
    while (std::getline(f, line)) {
        CHECK(nlohmann::json::parse(line).contains("stream"));
        ++count;
    }
    CHECK(count == 10);
}
