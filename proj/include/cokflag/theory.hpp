#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cokflag/group.hpp"
#include "cokflag/partition.hpp"
#include "cokflag/rational.hpp"

namespace cokflag {

/// One prime's worth of a surjective k-flag query: top type plus the kernel
/// chain H_1 <= ... <= H_{k-1} inside G_nu.
struct FlagQuery {
    std::uint64_t p = 2;
    Partition nu;
    std::vector<Subgroup> chain;
};

/// Limiting flag probability split into the exact automorphism part and the
/// truncated Cohen-Lenstra constant with a certified error bound.
struct FlagMeasure {
    Rat aut_part;        // exact 1 / prod_p |Aut_fl|
    Rat constant_value;  // truncation of (prod_p prod_i (1 - p^-i))^k
    Rat constant_error;  // |true - constant_value| <= constant_error

    Rat value() const { return aut_part * constant_value; }
};

FlagMeasure flag_measure(std::span<const FlagQuery> per_prime, std::uint32_t k,
                         const Rat& precision, const EnumerationBounds& b = {});

/// Limiting P(cok(M1 M2) iso G | cok(M1) iso H, cok(M2) iso K) for a single
/// prime: |Aut(K)||Aut(H)|/|Aut(G)| * #{N <= G : N iso K, G/N iso H}.
Rat conditional_convolution(std::uint64_t p, const Partition& G, const Partition& H,
                            const Partition& K, const EnumerationBounds& b = {});
/// Multi-prime version: product over primes.
Rat conditional_convolution(const GroupType& G, const GroupType& H, const GroupType& K,
                            const EnumerationBounds& b = {});

/// Cor. of the flag law for coranks over F_p:
/// p^{-(c-a)(c-b)} (q)_a (q)_b / ((q)_{c-b} (q)_{a+b-c} (q)_{c-a}) at q = p^-1,
/// zero outside a,b <= c <= a+b.
Rat corank_conditional(std::uint64_t p, std::int64_t a, std::int64_t b, std::int64_t c);

/// Finite-n law: P(rank(B') = r) for the upper (n-a) x (n-b) corner of a
/// uniformly full-column-rank n x (n-b) matrix over F_p. Converges to
/// corank_conditional(a, b, n-r) as n grows.
Rat corner_rank_law(std::uint64_t p, std::int64_t n, std::int64_t a, std::int64_t b,
                    std::int64_t r);

/// The limiting flag moment is identically 1.
inline int moment_prediction() { return 1; }

/// k = 1 table: type -> CL_p / |Aut(G_lambda)| for all types with theoretical
/// mass >= min_mass (plus every type of order <= min_order_kept).
struct TheoryTable {
    std::map<Partition, Rat> mass;  // truncated-constant values
    Rat constant_error;             // error bound inherited from the constant
};
TheoryTable cl_table_k1(std::uint64_t p, const Rat& min_mass, const Rat& precision);

/// k = 2 flag-class table for all classes with top order <= max_top_order.
struct FlagClassRow {
    FlagClass cls;
    Partition nu;
    Subgroup kernel_rep;  // orbit representative of the chain step
    Partition kernel_type;
    Partition quotient_type;
    Int stabilizer;
    Rat mass;  // (CL_p)^2 / stabilizer, truncated constant
};
std::vector<FlagClassRow> flag_class_table_k2(std::uint64_t p, std::uint64_t max_top_order,
                                              const Rat& precision,
                                              const EnumerationBounds& b = {});

}  // namespace cokflag
