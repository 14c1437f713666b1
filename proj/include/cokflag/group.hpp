#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cokflag/partition.hpp"
#include "cokflag/rational.hpp"

namespace cokflag {

/// Thrown when an enumeration would exceed a configured bound; the CLI maps
/// this to exit code 3, the sampler falls back to marginal records.
struct BoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnumerationBounds {
    std::uint64_t max_group_order = 4096;        // subgroup lattice enumeration
    std::uint64_t max_aut = 1'000'000;           // automorphism orbit work
    std::uint64_t max_hom_candidates = 1'000'000;  // surjection-with-flag counting
};

/// Element of G_lambda = (+)_i Z/p^{lambda_i}, coordinates in the fixed
/// descending-lambda order.
using Element = std::vector<std::uint64_t>;

class ExplicitGroup {
public:
    ExplicitGroup(std::uint64_t p, Partition lambda);

    std::uint64_t p() const { return p_; }
    const Partition& type() const { return lambda_; }
    std::size_t length() const { return moduli_.size(); }
    const std::vector<std::uint64_t>& moduli() const { return moduli_; }
    std::uint64_t order_u64() const { return order_; }  // guarded at construction

    Element zero() const { return Element(moduli_.size(), 0); }
    Element add(const Element& a, const Element& b) const;
    Element neg(const Element& a) const;
    Element scale(const Element& a, std::uint64_t k) const;
    bool is_zero(const Element& a) const;
    /// Exponent e of the element: smallest e with p^e * a = 0.
    std::uint32_t exponent_of(const Element& a) const;

    std::uint64_t index_of(const Element& a) const;  // mixed-radix
    Element element_at(std::uint64_t idx) const;

    bool operator==(const ExplicitGroup& o) const { return p_ == o.p_ && lambda_ == o.lambda_; }

private:
    std::uint64_t p_;
    Partition lambda_;
    std::vector<std::uint64_t> moduli_;
    std::uint64_t order_;
};

/// Subgroup with a canonical echelon basis: pivots left to right with
/// minimal valuation per coordinate, rows reduced against later pivots.
/// The canonical basis is recomputed from the sorted full element list, so
/// it is a function of the subgroup alone.
struct Subgroup {
    std::vector<Element> basis;   // canonical echelon rows
    std::uint64_t order = 1;
    std::string key() const;      // deterministic serialization of the basis

    bool operator==(const Subgroup& o) const { return basis == o.basis; }
};

/// Span of generators, with canonical basis.
Subgroup span(const ExplicitGroup& g, std::span<const Element> generators);
/// All elements of the subgroup, sorted lexicographically.
std::vector<Element> subgroup_elements(const ExplicitGroup& g, const Subgroup& h);
bool subgroup_contains(const ExplicitGroup& g, const Subgroup& h, const Element& x);

/// Isomorphism type of H itself, read off the orders of p^j H.
Partition subgroup_type(const ExplicitGroup& g, const Subgroup& h);
/// Isomorphism type of G/H (Smith form of the relation matrix).
Partition quotient_type(const ExplicitGroup& g, const Subgroup& h);

/// Subgroup lattice entry; mask bit i corresponds to element_at(i).
struct LatticeEntry {
    Subgroup subgroup;
    std::vector<std::uint64_t> mask;
    Partition type;
    Partition quotient;
};

/// Automorphisms as flat generator-image tuples (element indices), stride =
/// number of standard generators of G.
struct AutList {
    std::size_t stride = 0;
    std::vector<std::uint32_t> images;
    std::size_t size() const { return stride ? images.size() / stride : 1; }
};

/// Isomorphism class of a flag: top type plus the canonical representative of
/// the Aut-orbit of the subgroup chain.
struct FlagClass {
    std::uint64_t p = 2;
    Partition nu;
    std::string orbit;  // lexicographically minimal chain key over the orbit

    auto operator<=>(const FlagClass&) const = default;
    std::string to_string() const;
};

struct OrbitInfo {
    std::string orbit_id;
    std::uint64_t orbit_size = 1;
    Int stabilizer_order = 1;
};

/// Memoized per-(p, lambda) computations: element table, subgroup lattice,
/// automorphism list, and flag-orbit tables. Thread-safe: readers may share,
/// building is serialized internally.
class GroupCache {
public:
    static GroupCache& instance();

    const ExplicitGroup& group(std::uint64_t p, const Partition& lambda);
    const std::vector<LatticeEntry>& lattice(std::uint64_t p, const Partition& lambda,
                                             const EnumerationBounds& b = {});
    const AutList& automorphisms(std::uint64_t p, const Partition& lambda,
                                 const EnumerationBounds& b = {});
    /// Orbit lookup for a chain of nested subgroups; fills the whole orbit on miss.
    OrbitInfo flag_orbit(std::uint64_t p, const Partition& nu,
                         std::span<const Subgroup> chain, const EnumerationBounds& b = {});

    void clear();

private:
    struct Entry;
    std::mutex mu_;
    std::map<std::pair<std::uint64_t, Partition>, std::shared_ptr<Entry>> entries_;
    std::shared_ptr<Entry> entry(std::uint64_t p, const Partition& lambda);
};

std::vector<LatticeEntry> enumerate_subgroups(const ExplicitGroup& g,
                                              const EnumerationBounds& b = {});
AutList enumerate_automorphisms(const ExplicitGroup& g, const EnumerationBounds& b = {});

/// Image of x under the automorphism at index ai.
Element apply_automorphism(const ExplicitGroup& g, const AutList& auts, std::size_t ai,
                           const Element& x);

/// |{N <= G_nu : N iso G_mu, G_nu/N iso G_lambda}|.
Int hall_number(std::uint64_t p, const Partition& nu, const Partition& mu,
                const Partition& lambda, const EnumerationBounds& b = {});

/// Canonical Aut-orbit class of a nested chain H_1 <= ... <= H_{k-1} <= G.
FlagClass canonicalize_flag(const ExplicitGroup& g, std::span<const Subgroup> chain,
                            const EnumerationBounds& b = {});
/// |{alpha in Aut(G) : alpha(H_i) = H_i for all i}| (stabilizer of the chain).
Int flag_aut_order(const ExplicitGroup& g, std::span<const Subgroup> chain,
                   const EnumerationBounds& b = {});

/// Number of chains H_1 <= ... <= H_{k-1} <= G (injective k-flags).
Int count_injective_flags(const ExplicitGroup& g, std::uint32_t k,
                          const EnumerationBounds& b = {});

/// Surjective homomorphisms phi: src -> tgt with phi(srcChain_i) = tgtChain_i
/// for every step. Chains may be empty (plain surjection count).
Int count_surjections_with_flag(const ExplicitGroup& src, std::span<const Subgroup> src_chain,
                                const ExplicitGroup& tgt, std::span<const Subgroup> tgt_chain,
                                const EnumerationBounds& b = {});

/// |Sur(G_lambda, G_mu)| by Moebius inversion over the subgroup lattice of
/// the target; independent oracle for the enumeration-based counts.
Int count_surjections_mobius(std::uint64_t p, const Partition& lambda, const Partition& mu,
                             const EnumerationBounds& b = {});
/// |Aut(G_lambda)| as Sur(G, G) via the Moebius route (brute-force oracle that
/// avoids enumerating the automorphisms themselves).
Int aut_order_mobius(std::uint64_t p, const Partition& lambda, const EnumerationBounds& b = {});

}  // namespace cokflag
