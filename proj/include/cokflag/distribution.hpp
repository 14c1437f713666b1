#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cokflag/rational.hpp"
#include "cokflag/rng.hpp"

namespace cokflag {

/// Integer entry distribution. Draws are plain integers, independent of the
/// working precision, so precision escalation can replay the same values.
class EntryDistribution {
public:
    enum class Kind { UniformRange, FiniteSupport, HaarProxy };

    static EntryDistribution uniform_range(std::int64_t lo, std::int64_t hi);
    static EntryDistribution finite_support(std::vector<std::int64_t> values,
                                            std::vector<Rat> weights);
    /// Uniform residues mod p^N; p is supplied by the run configuration.
    static EntryDistribution haar_proxy(std::uint32_t N);

    /// Spec strings: "uniform:LO..HI", "finite:v:w,v:w,...", "haar:N",
    /// "const:V" (single-point support).
    static EntryDistribution parse(const std::string& spec);

    Kind kind() const { return kind_; }
    std::uint32_t haar_N() const { return haar_N_; }
    std::string to_string() const;

    /// Residue-class masses mod p, exact.
    std::map<std::uint64_t, Rat> residue_masses(std::uint64_t p) const;

    std::int64_t sample(std::uint64_t p, Rng& rng) const;

    /// P(entry odd); drives the bit-packed mod-2 sampler.
    Rat odd_mass() const { return residue_masses(2).at(1); }

private:
    Kind kind_ = Kind::UniformRange;
    std::int64_t lo_ = 0, hi_ = 1;
    std::vector<std::int64_t> values_;
    std::vector<Rat> weights_;
    std::uint64_t weight_denom_ = 1;               // common denominator
    std::vector<std::uint64_t> cumulative_;        // numerators over weight_denom_
    std::uint32_t haar_N_ = 1;
};

struct Alpha {
    bool degenerate = false;
    Rat alpha;  // in [0, 1/2] when not degenerate
};

/// alpha = min(1/2, 1 - max residue mass mod p); Degenerate when the max is 1.
Alpha alpha_of(const EntryDistribution& dist, std::uint64_t p);

}  // namespace cokflag
