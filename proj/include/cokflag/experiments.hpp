#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cokflag/distribution.hpp"
#include "cokflag/group.hpp"
#include "cokflag/partition.hpp"
#include "cokflag/sampler.hpp"
#include "cokflag/stats.hpp"

namespace cokflag {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateDistribution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fully determines a run given the binary version; embedded in every report.
struct ExperimentConfig {
    std::string command = "simulate";
    std::string mode = "flag";  // compare: corank | cl | conv | flag | moment | vp
    std::vector<std::uint64_t> primes{2};
    std::size_t n = 60;
    std::uint32_t k = 2;
    std::uint64_t samples = 10000;
    std::string dist = "uniform:0..7";
    std::string dist2;  // optional second distribution (universality checks)
    std::uint64_t seed = 1;
    unsigned threads = 1;
    PrecisionPolicy policy;
    EnumerationBounds bounds;
    std::uint64_t max_top_order = 16;  // flag-class table cutoff
    double tv_threshold = 0.02;
    double abs_threshold = 0.02;
    Rat min_mass = Rat(1, 10000);     // k=1 table truncation
    Rat precision = Rat(1, 1000000);  // CL constant truncation
    Partition cond_H{1}, cond_K{1};   // conv/vp conditioning types
    std::vector<std::pair<std::uint32_t, std::uint32_t>> corank_cells{{1, 1}, {1, 2}};
    bool emit_samples = false;
    std::string samples_path;
    std::string out_path;

    nlohmann::json to_json() const;
    std::string hash() const;  // FNV-1a of the canonical config dump
};

struct RunResult {
    nlohmann::json report;
    bool pass = true;
};

/// Flag-class (or marginal) histogram for the configured pipeline.
RunResult run_simulate(const ExperimentConfig& cfg);
/// Simulate + theory + TV/chi-square/CI verdicts; pass reflects thresholds.
RunResult run_compare(const ExperimentConfig& cfg);

/// Rendering used by the `theory` and `hl` subcommands.
std::string theory_csv(const std::string& which, const ExperimentConfig& cfg);
std::string hl_csv(const Partition& lambda, const Partition& mu, std::uint64_t p,
                   std::size_t n_vars);

/// Canonical report dump with the timing subtree removed (determinism checks).
std::string report_without_timing(const nlohmann::json& report);

std::string type_key(const std::vector<std::uint64_t>& primes,
                     const std::vector<Partition>& per_prime);

}  // namespace cokflag
