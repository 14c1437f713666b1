#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cokflag/rational.hpp"

namespace cokflag {

/// Weakly decreasing tuple of positive integers; the empty partition is the
/// type of the trivial group. Constructors normalize (sort, strip zeros) so
/// equal partitions compare equal and can serve as histogram keys.
class Partition {
public:
    Partition() = default;
    Partition(std::initializer_list<std::uint32_t> parts);
    explicit Partition(std::vector<std::uint32_t> parts);

    const std::vector<std::uint32_t>& parts() const { return parts_; }
    std::size_t length() const { return parts_.size(); }
    bool empty() const { return parts_.empty(); }
    std::uint32_t part(std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }
    std::uint64_t size() const;  // |lambda| = sum of parts

    /// Multiplicity of part value i (i >= 1).
    std::uint32_t multiplicity(std::uint32_t i) const;

    auto operator<=>(const Partition&) const = default;

    std::string to_string() const;  // "[3,1]", "[]"

private:
    std::vector<std::uint32_t> parts_;
};

/// lambda'_i = #{j : lambda_j >= i}.
Partition conjugate(const Partition& lambda);

/// Dominance order on partitions of equal size: lambda <= mu iff all prefix
/// sums of lambda are <= those of mu. Returns false when sizes differ.
bool dominates(const Partition& mu, const Partition& lambda);

/// All partitions of n (any length), descending lex order.
std::vector<Partition> partitions_of(std::uint64_t n);
/// All partitions of n with length <= max_len.
std::vector<Partition> partitions_of(std::uint64_t n, std::size_t max_len);

/// (p^-1; p^-1)_m = prod_{i=1}^m (1 - p^-i); exact.
Rat q_pochhammer(std::uint64_t p, std::int64_t m);

/// Gaussian binomial [k choose l] at q = p^-1; zero when l < 0 or l > k.
Rat gaussian_binomial(std::uint64_t p, std::int64_t k, std::int64_t l);

/// Truncation of prod_{i>=1}(1 - p^-i) with certified absolute error bound.
struct TruncatedProduct {
    Rat value;
    Rat error;  // |true - value| <= error
};
TruncatedProduct cohen_lenstra_constant(std::uint64_t p, const Rat& precision);

/// |G_lambda| = p^{|lambda|}.
Int group_order(const Partition& lambda, std::uint64_t p);

/// |Aut(G_lambda)| = p^{sum lambda'_i^2} * prod_i prod_{j=1}^{m_i} (1 - p^-j).
/// Cross-checked against explicit automorphism enumeration in the test suite.
Int aut_order(const Partition& lambda, std::uint64_t p);

/// |wedge^2 G_lambda| = p^{sum lambda'_i (lambda'_i - 1)/2}.
Int alt2_order(const Partition& lambda, std::uint64_t p);

/// Isomorphism class of a finite abelian P-group: one partition per prime.
/// Primes with empty partitions are dropped, so the trivial group is {}.
class GroupType {
public:
    GroupType() = default;
    explicit GroupType(std::map<std::uint64_t, Partition> per_prime);

    const std::map<std::uint64_t, Partition>& components() const { return per_prime_; }
    Partition at(std::uint64_t p) const;
    Int order() const;
    bool trivial() const { return per_prime_.empty(); }

    auto operator<=>(const GroupType&) const = default;
    std::string to_string() const;  // {"2":[3,1],"3":[1]}

private:
    std::map<std::uint64_t, Partition> per_prime_;
};

}  // namespace cokflag
