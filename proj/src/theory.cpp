#include "cokflag/theory.hpp"

#include <algorithm>
#include <set>

namespace cokflag {

FlagMeasure flag_measure(std::span<const FlagQuery> per_prime, std::uint32_t k,
                         const Rat& precision, const EnumerationBounds& b) {
    FlagMeasure out;
    out.aut_part = 1;
    for (const FlagQuery& q : per_prime) {
        if (q.chain.size() + 1 != k)
            throw std::invalid_argument("flag_measure: chain length must be k-1");
        const ExplicitGroup& g = GroupCache::instance().group(q.p, q.nu);
        Int stab = flag_aut_order(g, q.chain, b);
        out.aut_part /= Rat(stab);
    }
    out.aut_part.canonicalize();
    // (prod_p CL_p)^k with interval propagation of the truncation error.
    Rat lo = 1, hi = 1, mid = 1;
    for (const FlagQuery& q : per_prime) {
        TruncatedProduct c = cohen_lenstra_constant(q.p, precision);
        for (std::uint32_t i = 0; i < k; ++i) {
            mid *= c.value;
            lo *= c.value - c.error;
            hi *= c.value + c.error;
        }
    }
    out.constant_value = mid;
    out.constant_error = std::max(hi - mid, mid - lo);
    out.constant_error.canonicalize();
    return out;
}

Rat conditional_convolution(std::uint64_t p, const Partition& G, const Partition& H,
                            const Partition& K, const EnumerationBounds& b) {
    if (G.size() != H.size() + K.size()) return 0;
    Int h = hall_number(p, G, K, H, b);
    if (h == 0) return 0;
    Rat v = Rat(aut_order(K, p) * aut_order(H, p) * h) / Rat(aut_order(G, p));
    v.canonicalize();
    return v;
}

Rat conditional_convolution(const GroupType& G, const GroupType& H, const GroupType& K,
                            const EnumerationBounds& b) {
    std::set<std::uint64_t> primes;
    for (const auto& [p, la] : G.components()) primes.insert(p);
    for (const auto& [p, la] : H.components()) primes.insert(p);
    for (const auto& [p, la] : K.components()) primes.insert(p);
    Rat v = 1;
    for (std::uint64_t p : primes) v *= conditional_convolution(p, G.at(p), H.at(p), K.at(p), b);
    v.canonicalize();
    return v;
}

Rat corank_conditional(std::uint64_t p, std::int64_t a, std::int64_t b, std::int64_t c) {
    if (a < 0 || b < 0 || c < 0) throw std::invalid_argument("corank_conditional: negative input");
    if (c < a || c < b || c > a + b) return 0;
    Rat num = q_pochhammer(p, a) * q_pochhammer(p, b);
    Rat den = q_pochhammer(p, c - b) * q_pochhammer(p, a + b - c) * q_pochhammer(p, c - a);
    Rat v = num / den;
    // p^{-(c-a)(c-b)}
    Rat pinv(1, static_cast<unsigned long>(p));
    v *= rat_pow(pinv, std::uint64_t((c - a) * (c - b)));
    v.canonicalize();
    return v;
}

Rat corner_rank_law(std::uint64_t p, std::int64_t n, std::int64_t a, std::int64_t b,
                    std::int64_t r) {
    if (n < 0 || a < 0 || b < 0 || a > n || b > n)
        throw std::invalid_argument("corner_rank_law: need 0 <= a,b <= n");
    std::int64_t c = n - r;
    Rat g1 = gaussian_binomial(p, a, c - b);
    Rat g2 = gaussian_binomial(p, n - a, n - c);
    if (g1 == 0 || g2 == 0) return 0;
    Rat v = g1 * g2 / gaussian_binomial(p, n, n - b);
    Rat pinv(1, static_cast<unsigned long>(p));
    v *= rat_pow(pinv, std::uint64_t((c - a) * (c - b)));
    v.canonicalize();
    return v;
}

TheoryTable cl_table_k1(std::uint64_t p, const Rat& min_mass, const Rat& precision) {
    TheoryTable out;
    TruncatedProduct cl = cohen_lenstra_constant(p, precision);
    out.constant_error = cl.error;
    // Masses decay like p^{-|lambda|}; scan sizes until every type of a given
    // size falls below the cutoff.
    for (std::uint64_t sz = 0; sz < 64; ++sz) {
        bool kept_any = false;
        for (const Partition& la : partitions_of(sz)) {
            Rat mass = cl.value / Rat(aut_order(la, p));
            mass.canonicalize();
            if (mass >= min_mass) {
                out.mass.emplace(la, mass);
                kept_any = true;
            }
        }
        if (!kept_any && sz > 0) break;
    }
    return out;
}

std::vector<FlagClassRow> flag_class_table_k2(std::uint64_t p, std::uint64_t max_top_order,
                                              const Rat& precision, const EnumerationBounds& b) {
    std::vector<FlagClassRow> out;
    TruncatedProduct cl = cohen_lenstra_constant(p, precision);
    Rat csq = cl.value * cl.value;
    auto& cache = GroupCache::instance();
    for (std::uint64_t sz = 0;; ++sz) {
        Int order = int_pow(p, static_cast<unsigned long>(sz));
        if (order > Int(static_cast<unsigned long>(max_top_order))) break;
        for (const Partition& nu : partitions_of(sz)) {
            const ExplicitGroup& g = cache.group(p, nu);
            const auto& lat = cache.lattice(p, nu, b);
            std::set<std::string> seen;
            for (const LatticeEntry& e : lat) {
                std::vector<Subgroup> chain{e.subgroup};
                OrbitInfo info = cache.flag_orbit(p, nu, chain, b);
                if (!seen.insert(info.orbit_id).second) continue;
                FlagClassRow row;
                row.cls = FlagClass{p, nu, info.orbit_id};
                row.nu = nu;
                row.kernel_rep = e.subgroup;
                row.kernel_type = e.type;
                row.quotient_type = e.quotient;
                row.stabilizer = flag_aut_order(g, chain, b);
                row.mass = csq / Rat(row.stabilizer);
                row.mass.canonicalize();
                out.push_back(std::move(row));
            }
        }
    }
    return out;
}

}  // namespace cokflag
