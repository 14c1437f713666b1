#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cokflag/bitmat.hpp"
#include "cokflag/distribution.hpp"
#include "cokflag/group.hpp"
#include "cokflag/modmat.hpp"
#include "cokflag/partition.hpp"
#include "cokflag/rng.hpp"

namespace cokflag {

/// Working-precision escalation: start at start_N, double on saturation up to
/// max_N (clipped to the 63-bit entry guard for the prime in play). The same
/// integer entry draws are replayed at every precision.
struct PrecisionPolicy {
    std::uint32_t start_N = 8;
    std::uint32_t max_N = 64;
};

std::uint32_t max_feasible_N(std::uint64_t p);

MatrixMod sample_matrix(const EntryDistribution& dist, std::size_t n, const RingSpec& ring,
                        Rng& rng);
/// Entries reduced mod 2 directly into packed rows.
BitMatrix sample_bitmatrix(const EntryDistribution& dist, std::size_t n, Rng& rng);

struct SampleRecord {
    std::vector<Partition> types;         // cok(M_1...M_i), i = 1..k
    std::vector<Partition> factor_types;  // cok(M_i), i = 1..k
    std::optional<Partition> kernel_type; // k = 2: ker(cok(M1 M2) -> cok(M1))
    std::optional<FlagClass> flag;        // canonical class, when within bounds
    std::vector<Subgroup> chain;          // kernel chain inside G_nu, when kept
    bool saturated = false;               // persistent saturation at max_N
    bool marginal_only = false;           // canonicalization bounds exceeded
    std::uint32_t used_N = 0;
    std::uint64_t stream = 0;
};

struct SampleOptions {
    bool want_flag = false;    // canonicalize the chain into a FlagClass
    bool want_chain = false;   // keep the chain subgroups (moment estimation)
    bool want_factors = true;  // extract cok(M_i) per factor
    bool want_kernel = false;  // materialize the k=2 kernel type
};

/// End-to-end pipeline: k matrices -> partial products -> cokernel chain.
SampleRecord sample_flag(const EntryDistribution& dist, std::size_t n, std::uint32_t k,
                         std::uint64_t p, const PrecisionPolicy& policy,
                         std::uint64_t master_seed, std::uint64_t stream,
                         const SampleOptions& opts = {}, const EnumerationBounds& b = {});

struct MomentEstimate {
    double mean = 0;
    double stderr_ = 0;
    std::uint64_t samples = 0;
    std::uint64_t excluded = 0;
};

/// Monte Carlo mean of the flag-surjection count onto the target flag.
MomentEstimate estimate_moment(const EntryDistribution& dist, std::size_t n, std::uint32_t k,
                               std::uint64_t p, const Partition& target_nu,
                               const std::vector<Subgroup>& target_chain, std::uint64_t samples,
                               std::uint64_t master_seed, const PrecisionPolicy& policy,
                               const EnumerationBounds& b = {}, unsigned threads = 1);

/// Deterministic block-partitioned parallel loop; fn(begin, end, worker).
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn);

}  // namespace cokflag
