#include "cokflag/group.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cokflag/modmat.hpp"

namespace cokflag {

namespace {

std::uint32_t val_of(std::uint64_t x, std::uint64_t p, std::uint32_t cap) {
    if (x == 0) return cap;
    std::uint32_t v = 0;
    while (x % p == 0 && v < cap) {
        x /= p;
        ++v;
    }
    return v;
}

std::uint64_t unit_of(std::uint64_t x, std::uint64_t p) {
    while (x % p == 0) x /= p;
    return x;
}

std::uint64_t inv_mod(std::uint64_t u, std::uint64_t m) {
    std::int64_t a = std::int64_t(u % m), mm = std::int64_t(m);
    std::int64_t x0 = 1, x1 = 0, r0 = a, r1 = mm;
    while (r1) {
        std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
    }
    x0 %= mm;
    return std::uint64_t(x0 < 0 ? x0 + mm : x0);
}

std::uint64_t pow_u64(std::uint64_t b, std::uint32_t e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

}  // namespace

ExplicitGroup::ExplicitGroup(std::uint64_t p, Partition lambda) : p_(p), lambda_(std::move(lambda)) {
    order_ = 1;
    for (std::uint32_t part : lambda_.parts()) {
        std::uint64_t m = 1;
        for (std::uint32_t i = 0; i < part; ++i) {
            if (m > (std::uint64_t(1) << 62) / p_)
                throw std::invalid_argument("ExplicitGroup: component exceeds 63-bit guard");
            m *= p_;
        }
        if (order_ > (std::uint64_t(1) << 62) / m)
            throw std::invalid_argument("ExplicitGroup: group order exceeds 63-bit guard");
        order_ *= m;
        moduli_.push_back(m);
    }
}

Element ExplicitGroup::add(const Element& a, const Element& b) const {
    Element c(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        std::uint64_t s = a[i] + b[i];
        c[i] = s >= moduli_[i] ? s - moduli_[i] : s;
    }
    return c;
}

Element ExplicitGroup::neg(const Element& a) const {
    Element c(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) c[i] = a[i] ? moduli_[i] - a[i] : 0;
    return c;
}

Element ExplicitGroup::scale(const Element& a, std::uint64_t k) const {
    Element c(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i)
        c[i] = std::uint64_t((unsigned __int128)(a[i]) * (k % moduli_[i]) % moduli_[i]);
    return c;
}

bool ExplicitGroup::is_zero(const Element& a) const {
    return std::all_of(a.begin(), a.end(), [](std::uint64_t x) { return x == 0; });
}

std::uint32_t ExplicitGroup::exponent_of(const Element& a) const {
    std::uint32_t e = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        std::uint32_t part = lambda_.parts()[i];
        std::uint32_t v = val_of(a[i], p_, part);
        e = std::max(e, part - v);
    }
    return e;
}

std::uint64_t ExplicitGroup::index_of(const Element& a) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) idx = idx * moduli_[i] + a[i];
    return idx;
}

Element ExplicitGroup::element_at(std::uint64_t idx) const {
    Element a(moduli_.size());
    for (std::size_t i = moduli_.size(); i-- > 0;) {
        a[i] = idx % moduli_[i];
        idx /= moduli_[i];
    }
    return a;
}

// ---------------------------------------------------------------------------
// Echelon machinery
// ---------------------------------------------------------------------------

namespace {

struct Echelon {
    std::vector<Element> rows;           // pivot rows, in pivot-column order
    std::vector<std::size_t> pivot_col;
    std::vector<std::uint32_t> pivot_val;
    std::uint64_t order = 1;
};

// Row reduction with valuation pivots; deterministic for a fixed input order.
// Rows may be freely added to each other and scaled by units, so the span is
// preserved throughout.
Echelon echelonize(const ExplicitGroup& g, std::vector<Element> rows) {
    const auto& mod = g.moduli();
    const std::size_t m = mod.size();
    const std::uint64_t p = g.p();
    std::vector<bool> used(rows.size(), false);
    Echelon out;
    for (std::size_t col = 0; col < m; ++col) {
        const std::uint32_t cap = g.type().parts()[col];
        std::uint32_t best = cap;
        std::size_t bi = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r]) continue;
            std::uint32_t v = val_of(rows[r][col], p, cap);
            if (v < best) {
                best = v;
                bi = r;
            }
        }
        if (bi == rows.size()) continue;  // column has no pivot
        used[bi] = true;
        Element& piv = rows[bi];
        std::uint64_t u = unit_of(piv[col], p);
        // Invert the unit modulo the largest component; the inverse reduces
        // correctly to every smaller component.
        if (u != 1) piv = g.scale(piv, inv_mod(u, mod[0]));
        const std::uint64_t pv = pow_u64(p, best);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == bi) continue;
            std::uint64_t x = rows[r][col];
            if (!x) continue;
            // Unpivoted rows have valuation >= best here, so the quotient is
            // exact; earlier pivot rows are reduced mod p^best.
            std::uint64_t f = x / pv;
            if (f) rows[r] = g.add(rows[r], g.neg(g.scale(piv, f)));
        }
        out.rows.push_back(piv);
        out.pivot_col.push_back(col);
        out.pivot_val.push_back(best);
        out.order *= pow_u64(p, cap - best);
    }
    return out;
}

}  // namespace

Subgroup span(const ExplicitGroup& g, std::span<const Element> generators) {
    std::vector<Element> rows(generators.begin(), generators.end());
    Echelon e = echelonize(g, std::move(rows));
    Subgroup h;
    h.order = e.order;
    if (e.order > (std::uint64_t(1) << 22))
        throw BoundExceeded("span: subgroup too large to canonicalize");
    // Canonical basis: echelon of the sorted full element list, so the
    // result depends on the subgroup only, not the generators given.
    std::vector<Element> all;
    all.reserve(e.order);
    std::vector<std::uint64_t> coeff(e.rows.size(), 0);
    std::vector<std::uint64_t> coeff_mod(e.rows.size());
    for (std::size_t a = 0; a < e.rows.size(); ++a)
        coeff_mod[a] = pow_u64(g.p(), g.type().parts()[e.pivot_col[a]] - e.pivot_val[a]);
    // Odometer over coefficient tuples.
    while (true) {
        Element x = g.zero();
        for (std::size_t a = 0; a < e.rows.size(); ++a)
            if (coeff[a]) x = g.add(x, g.scale(e.rows[a], coeff[a]));
        all.push_back(std::move(x));
        std::size_t a = 0;
        while (a < coeff.size()) {
            if (++coeff[a] < coeff_mod[a]) break;
            coeff[a] = 0;
            ++a;
        }
        if (a == coeff.size()) break;
    }
    std::sort(all.begin(), all.end());
    Echelon canon = echelonize(g, std::move(all));
    h.basis = std::move(canon.rows);
    if (canon.order != e.order) throw std::logic_error("span: canonicalization changed order");
    return h;
}

std::vector<Element> subgroup_elements(const ExplicitGroup& g, const Subgroup& h) {
    Echelon e = echelonize(g, h.basis);
    std::vector<Element> all;
    all.reserve(h.order);
    std::vector<std::uint64_t> coeff(e.rows.size(), 0), coeff_mod(e.rows.size());
    for (std::size_t a = 0; a < e.rows.size(); ++a)
        coeff_mod[a] = pow_u64(g.p(), g.type().parts()[e.pivot_col[a]] - e.pivot_val[a]);
    while (true) {
        Element x = g.zero();
        for (std::size_t a = 0; a < e.rows.size(); ++a)
            if (coeff[a]) x = g.add(x, g.scale(e.rows[a], coeff[a]));
        all.push_back(std::move(x));
        std::size_t a = 0;
        while (a < coeff.size()) {
            if (++coeff[a] < coeff_mod[a]) break;
            coeff[a] = 0;
            ++a;
        }
        if (a == coeff.size()) break;
    }
    std::sort(all.begin(), all.end());
    return all;
}

bool subgroup_contains(const ExplicitGroup& g, const Subgroup& h, const Element& x) {
    // Reduce x against the echelon basis; contained iff it reduces to zero.
    Echelon e = echelonize(g, h.basis);
    Element r = x;
    const std::uint64_t p = g.p();
    for (std::size_t a = 0; a < e.rows.size(); ++a) {
        std::size_t col = e.pivot_col[a];
        std::uint64_t cur = r[col];
        if (!cur) continue;
        std::uint32_t v = val_of(cur, p, g.type().parts()[col]);
        if (v < e.pivot_val[a]) return false;
        std::uint64_t f = cur / pow_u64(p, e.pivot_val[a]);
        r = g.add(r, g.neg(g.scale(e.rows[a], f)));
    }
    return g.is_zero(r);
}

std::string Subgroup::key() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < basis.size(); ++r) {
        if (r) os << ';';
        for (std::size_t i = 0; i < basis[r].size(); ++i) {
            if (i) os << ',';
            os << basis[r][i];
        }
    }
    return os.str();
}

Partition subgroup_type(const ExplicitGroup& g, const Subgroup& h) {
    // lambda(H)'_j = log_p |p^{j-1} H| - log_p |p^j H|.
    std::vector<std::uint32_t> conj;
    std::vector<Element> rows = h.basis;
    std::uint64_t prev = h.order;
    while (prev > 1) {
        for (Element& r : rows) r = g.scale(r, g.p());
        Echelon e = echelonize(g, rows);
        std::uint64_t cur = e.order;
        std::uint32_t drop = 0;
        for (std::uint64_t q = prev / cur; q > 1; q /= g.p()) ++drop;
        conj.push_back(drop);
        prev = cur;
    }
    // conj is the conjugate partition; transpose back.
    return conjugate(Partition(std::move(conj)));
}

Partition quotient_type(const ExplicitGroup& g, const Subgroup& h) {
    const std::size_t m = g.length();
    if (m == 0) return Partition{};
    std::uint32_t top = g.type().parts()[0];
    RingSpec ring = RingSpec::make(g.p(), top + 1);
    // Relations of G/H: columns are the basis of H plus p^{lambda_i} e_i.
    MatrixMod rel(ring, m, h.basis.size() + m);
    for (std::size_t c = 0; c < h.basis.size(); ++c)
        for (std::size_t i = 0; i < m; ++i) rel.at(i, c) = h.basis[c][i] % ring.modulus;
    for (std::size_t i = 0; i < m; ++i)
        rel.at(i, h.basis.size() + i) = g.moduli()[i] % ring.modulus;
    std::vector<std::uint32_t> vals = snf_valuations(rel);
    std::vector<std::uint32_t> parts;
    for (std::uint32_t v : vals)
        if (v > 0 && v < ring.N) parts.push_back(v);
    return Partition(std::move(parts));
}

// ---------------------------------------------------------------------------
// Lattice enumeration
// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint64_t> mask_of(const ExplicitGroup& g, const Subgroup& h) {
    std::vector<std::uint64_t> mask((g.order_u64() + 63) / 64, 0);
    for (const Element& x : subgroup_elements(g, h)) {
        std::uint64_t idx = g.index_of(x);
        mask[idx / 64] |= std::uint64_t(1) << (idx % 64);
    }
    return mask;
}

bool mask_subset(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

bool mask_bit(const std::vector<std::uint64_t>& m, std::uint64_t i) {
    return (m[i / 64] >> (i % 64)) & 1;
}

}  // namespace

std::vector<LatticeEntry> enumerate_subgroups(const ExplicitGroup& g, const EnumerationBounds& b) {
    if (g.order_u64() > b.max_group_order)
        throw BoundExceeded("enumerate_subgroups: |G| exceeds bound");
    std::map<std::vector<std::uint64_t>, std::size_t> seen;
    std::vector<LatticeEntry> out;
    Subgroup triv = span(g, {});
    LatticeEntry first{triv, mask_of(g, triv), Partition{}, Partition{}};
    seen.emplace(first.mask, 0);
    out.push_back(std::move(first));
    const std::uint64_t n = g.order_u64();
    for (std::size_t head = 0; head < out.size(); ++head) {
        for (std::uint64_t idx = 0; idx < n; ++idx) {
            if (mask_bit(out[head].mask, idx)) continue;
            std::vector<Element> gens = out[head].subgroup.basis;
            gens.push_back(g.element_at(idx));
            Subgroup k = span(g, gens);
            auto mask = mask_of(g, k);
            if (seen.emplace(mask, out.size()).second)
                out.push_back(LatticeEntry{std::move(k), std::move(mask), Partition{}, Partition{}});
            if (out.size() > 5'000'000)
                throw BoundExceeded("enumerate_subgroups: lattice too large");
        }
    }
    for (LatticeEntry& e : out) {
        e.type = subgroup_type(g, e.subgroup);
        e.quotient = quotient_type(g, e.subgroup);
    }
    std::sort(out.begin(), out.end(), [](const LatticeEntry& a, const LatticeEntry& c) {
        if (a.subgroup.order != c.subgroup.order) return a.subgroup.order < c.subgroup.order;
        return a.mask < c.mask;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

namespace {

// Fast path: G = (Z/2)^m, elements are bit vectors equal to their indices.
AutList enumerate_aut_f2(const ExplicitGroup& g) {
    const std::size_t m = g.length();
    const std::uint32_t n = std::uint32_t(g.order_u64());
    AutList out;
    out.stride = m;
    std::vector<std::uint32_t> img(m, 0);
    std::vector<std::uint32_t> basis(m);
    while (true) {
        // Invertibility via bit Gaussian elimination.
        std::copy(img.begin(), img.end(), basis.begin());
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
            std::size_t piv = i;
            while (piv < m && basis[piv] == 0) ++piv;
            if (piv == m) {
                ok = false;
                break;
            }
            std::swap(basis[i], basis[piv]);
            std::uint32_t lead = std::uint32_t(1) << (31 - __builtin_clz(basis[i]));
            for (std::size_t j = 0; j < m; ++j)
                if (j != i && (basis[j] & lead)) basis[j] ^= basis[i];
        }
        if (ok) out.images.insert(out.images.end(), img.begin(), img.end());
        std::size_t a = 0;
        while (a < m) {
            if (++img[a] < n) break;
            img[a] = 0;
            ++a;
        }
        if (a == m) break;
    }
    return out;
}

}  // namespace

AutList enumerate_automorphisms(const ExplicitGroup& g, const EnumerationBounds& b) {
    Int predicted = aut_order(g.type(), g.p());
    if (predicted > Int(static_cast<unsigned long>(std::min<std::uint64_t>(
            b.max_aut, std::uint64_t(1) << 62))))
        throw BoundExceeded("enumerate_automorphisms: |Aut| exceeds bound");
    const std::size_t m = g.length();
    if (m == 0) return AutList{};
    bool elementary2 = g.p() == 2 && g.type().parts()[0] == 1;
    if (elementary2) return enumerate_aut_f2(g);

    // Candidate images of generator i are the elements killed by p^{lambda_i}.
    const std::uint64_t n = g.order_u64();
    std::vector<Element> elems(n);
    for (std::uint64_t i = 0; i < n; ++i) elems[i] = g.element_at(i);
    std::vector<std::vector<std::uint32_t>> torsion(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::uint32_t a = g.type().parts()[i];
        for (std::uint64_t j = 0; j < n; ++j)
            if (g.exponent_of(elems[j]) <= a) torsion[i].push_back(std::uint32_t(j));
    }
    AutList out;
    out.stride = m;
    std::vector<std::size_t> pos(m, 0);
    std::vector<Element> cand(m);
    for (std::size_t i = 0; i < m; ++i) cand[i] = elems[torsion[i][0]];
    while (true) {
        Echelon e = echelonize(g, cand);
        if (e.order == n)
            for (std::size_t i = 0; i < m; ++i) out.images.push_back(torsion[i][pos[i]]);
        std::size_t a = 0;
        while (a < m) {
            if (++pos[a] < torsion[a].size()) {
                cand[a] = elems[torsion[a][pos[a]]];
                break;
            }
            pos[a] = 0;
            cand[a] = elems[torsion[a][0]];
            ++a;
        }
        if (a == m) break;
    }
    return out;
}

Element apply_automorphism(const ExplicitGroup& g, const AutList& auts, std::size_t ai,
                           const Element& x) {
    Element y = g.zero();
    for (std::size_t i = 0; i < auts.stride; ++i) {
        if (!x[i]) continue;
        Element gi = g.element_at(auts.images[ai * auts.stride + i]);
        y = g.add(y, g.scale(gi, x[i]));
    }
    return y;
}

// ---------------------------------------------------------------------------
// GroupCache
// ---------------------------------------------------------------------------

struct GroupCache::Entry {
    std::unique_ptr<ExplicitGroup> group;
    std::optional<std::vector<LatticeEntry>> lattice;
    std::optional<AutList> auts;
    std::map<std::string, OrbitInfo> orbits;
    std::mutex mu;
};

GroupCache& GroupCache::instance() {
    static GroupCache cache;
    return cache;
}

std::shared_ptr<GroupCache::Entry> GroupCache::entry(std::uint64_t p, const Partition& lambda) {
    std::lock_guard lk(mu_);
    auto& e = entries_[{p, lambda}];
    if (!e) {
        e = std::make_shared<Entry>();
        e->group = std::make_unique<ExplicitGroup>(p, lambda);
    }
    return e;
}

const ExplicitGroup& GroupCache::group(std::uint64_t p, const Partition& lambda) {
    return *entry(p, lambda)->group;
}

const std::vector<LatticeEntry>& GroupCache::lattice(std::uint64_t p, const Partition& lambda,
                                                     const EnumerationBounds& b) {
    auto e = entry(p, lambda);
    std::lock_guard lk(e->mu);
    if (!e->lattice) e->lattice = enumerate_subgroups(*e->group, b);
    return *e->lattice;
}

const AutList& GroupCache::automorphisms(std::uint64_t p, const Partition& lambda,
                                         const EnumerationBounds& b) {
    auto e = entry(p, lambda);
    std::lock_guard lk(e->mu);
    if (!e->auts) e->auts = enumerate_automorphisms(*e->group, b);
    return *e->auts;
}

void GroupCache::clear() {
    std::lock_guard lk(mu_);
    entries_.clear();
}

namespace {

std::string chain_key(std::span<const Subgroup> chain) {
    std::ostringstream os;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i) os << '|';
        os << chain[i].key();
    }
    return os.str();
}

}  // namespace

OrbitInfo GroupCache::flag_orbit(std::uint64_t p, const Partition& nu,
                                 std::span<const Subgroup> chain, const EnumerationBounds& b) {
    auto e = entry(p, nu);
    std::string key = chain_key(chain);
    {
        std::lock_guard lk(e->mu);
        auto it = e->orbits.find(key);
        if (it != e->orbits.end()) return it->second;
        if (!e->auts) e->auts = enumerate_automorphisms(*e->group, b);
    }
    const ExplicitGroup& g = *e->group;
    const AutList& auts = *e->auts;
    // Orbit of the chain under Aut(G); all members share the class.
    std::map<std::string, std::uint64_t> images;  // image chain key -> fiber size
    const std::size_t count = auts.size();
    for (std::size_t ai = 0; ai < count; ++ai) {
        std::vector<Subgroup> img;
        img.reserve(chain.size());
        for (const Subgroup& h : chain) {
            std::vector<Element> gens;
            gens.reserve(h.basis.size());
            for (const Element& x : h.basis) gens.push_back(apply_automorphism(g, auts, ai, x));
            img.push_back(span(g, gens));
        }
        images[chain_key(img)]++;
    }
    auto self = images.find(key);
    if (self == images.end()) throw std::logic_error("flag_orbit: identity missing from orbit");
    OrbitInfo info;
    info.orbit_id = images.begin()->first;  // map is ordered: minimal key
    info.orbit_size = images.size();
    info.stabilizer_order = Int(static_cast<unsigned long>(self->second));
    std::lock_guard lk(e->mu);
    for (const auto& [k, fiber] : images) {
        OrbitInfo member = info;
        member.stabilizer_order = Int(static_cast<unsigned long>(fiber));
        e->orbits.emplace(k, member);
    }
    return e->orbits.at(key);
}

// ---------------------------------------------------------------------------
// Derived counts
// ---------------------------------------------------------------------------

Int hall_number(std::uint64_t p, const Partition& nu, const Partition& mu,
                const Partition& lambda, const EnumerationBounds& b) {
    if (mu.size() + lambda.size() != nu.size()) return 0;
    const auto& lat = GroupCache::instance().lattice(p, nu, b);
    Int count = 0;
    for (const LatticeEntry& e : lat)
        if (e.type == mu && e.quotient == lambda) ++count;
    return count;
}

FlagClass canonicalize_flag(const ExplicitGroup& g, std::span<const Subgroup> chain,
                            const EnumerationBounds& b) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        for (const Element& x : chain[i].basis)
            if (!subgroup_contains(g, chain[i + 1], x))
                throw std::invalid_argument("canonicalize_flag: chain not nested");
    OrbitInfo info = GroupCache::instance().flag_orbit(g.p(), g.type(), chain, b);
    return FlagClass{g.p(), g.type(), info.orbit_id};
}

Int flag_aut_order(const ExplicitGroup& g, std::span<const Subgroup> chain,
                   const EnumerationBounds& b) {
    const AutList& auts = GroupCache::instance().automorphisms(g.p(), g.type(), b);
    if (g.length() == 0) return 1;
    // alpha(H) = H iff alpha(basis) stays inside H (alpha is injective).
    std::vector<std::vector<std::uint64_t>> masks;
    for (const Subgroup& h : chain) masks.push_back(mask_of(g, h));
    Int count = 0;
    const std::size_t total = auts.size();
    for (std::size_t ai = 0; ai < total; ++ai) {
        bool ok = true;
        for (std::size_t c = 0; c < chain.size() && ok; ++c)
            for (const Element& x : chain[c].basis) {
                Element y = apply_automorphism(g, auts, ai, x);
                if (!mask_bit(masks[c], g.index_of(y))) {
                    ok = false;
                    break;
                }
            }
        if (ok) ++count;
    }
    return count;
}

Int count_injective_flags(const ExplicitGroup& g, std::uint32_t k, const EnumerationBounds& b) {
    if (k == 0) throw std::invalid_argument("count_injective_flags: k >= 1");
    const auto& lat = GroupCache::instance().lattice(g.p(), g.type(), b);
    // g_0 = 1, g_j(H) = sum_{K <= H} g_{j-1}(K); n_k(G) = g_{k-1}(G).
    std::vector<Int> cur(lat.size(), 1);
    for (std::uint32_t j = 1; j + 1 <= k; ++j) {
        std::vector<Int> next(lat.size(), 0);
        for (std::size_t h = 0; h < lat.size(); ++h)
            for (std::size_t kk = 0; kk < lat.size(); ++kk)
                if (mask_subset(lat[kk].mask, lat[h].mask)) next[h] += cur[kk];
        cur = std::move(next);
    }
    return cur.back();  // lattice is sorted by order; the last entry is G
}

namespace {

// Subgroup-closure mask of a list of element indices inside tgt.
std::vector<std::uint64_t> span_mask(const ExplicitGroup& tgt,
                                     std::span<const std::uint32_t> gens,
                                     std::vector<std::uint32_t>& scratch) {
    const std::uint64_t n = tgt.order_u64();
    std::vector<std::uint64_t> mask((n + 63) / 64, 0);
    mask[0] |= 1;  // zero element
    scratch.clear();
    scratch.push_back(0);
    for (std::uint32_t gidx : gens) {
        if (mask_bit(mask, gidx)) continue;
        Element ge = tgt.element_at(gidx);
        // Union of cosets: shift current members by multiples of the generator.
        std::size_t base_count = scratch.size();
        Element mult = ge;
        while (true) {
            std::uint64_t midx = tgt.index_of(mult);
            if (mask_bit(mask, midx)) break;
            for (std::size_t i = 0; i < base_count; ++i) {
                Element sum = tgt.add(tgt.element_at(scratch[i]), mult);
                std::uint64_t sidx = tgt.index_of(sum);
                if (!mask_bit(mask, sidx)) {
                    mask[sidx / 64] |= std::uint64_t(1) << (sidx % 64);
                    scratch.push_back(std::uint32_t(sidx));
                }
            }
            mult = tgt.add(mult, ge);
        }
    }
    return mask;
}

}  // namespace

Int count_surjections_with_flag(const ExplicitGroup& src, std::span<const Subgroup> src_chain,
                                const ExplicitGroup& tgt, std::span<const Subgroup> tgt_chain,
                                const EnumerationBounds& b) {
    if (src_chain.size() != tgt_chain.size())
        throw std::invalid_argument("count_surjections_with_flag: chain length mismatch");
    const std::size_t m = src.length();
    const std::uint64_t tn = tgt.order_u64();
    if (m == 0) return tn == 1 ? 1 : 0;

    std::vector<Element> telems(tn);
    for (std::uint64_t i = 0; i < tn; ++i) telems[i] = tgt.element_at(i);
    // Candidate images per source generator: elements killed by p^{lambda_i}.
    std::vector<std::vector<std::uint32_t>> torsion(m);
    double cand = 1;
    for (std::size_t i = 0; i < m; ++i) {
        std::uint32_t a = src.type().parts()[i];
        for (std::uint64_t j = 0; j < tn; ++j)
            if (tgt.exponent_of(telems[j]) <= a) torsion[i].push_back(std::uint32_t(j));
        cand *= double(torsion[i].size());
        if (cand > double(b.max_hom_candidates))
            throw BoundExceeded("count_surjections_with_flag: candidate budget exceeded");
    }

    std::vector<std::vector<std::uint64_t>> tgt_masks;
    for (const Subgroup& h : tgt_chain) tgt_masks.push_back(mask_of(tgt, h));
    std::vector<std::uint64_t> full_mask((tn + 63) / 64, 0);
    for (std::uint64_t i = 0; i < tn; ++i) full_mask[i / 64] |= std::uint64_t(1) << (i % 64);

    // Basis coordinates of the source chain steps, applied per candidate.
    std::vector<std::vector<Element>> src_bases;
    for (const Subgroup& h : src_chain) src_bases.push_back(h.basis);

    std::vector<std::size_t> pos(m, 0);
    std::vector<std::uint32_t> images(m);
    for (std::size_t i = 0; i < m; ++i) images[i] = torsion[i][0];
    std::vector<std::uint32_t> scratch;
    Int count = 0;
    while (true) {
        bool ok = true;
        // Map an element of src through the candidate: sum of coord * image.
        auto map_through = [&](const Element& x) {
            Element y = tgt.zero();
            for (std::size_t i = 0; i < m; ++i)
                if (x[i]) y = tgt.add(y, tgt.scale(telems[images[i]], x[i]));
            return y;
        };
        for (std::size_t c = 0; c < src_chain.size() && ok; ++c) {
            std::vector<std::uint32_t> img_gens;
            img_gens.reserve(src_bases[c].size());
            for (const Element& x : src_bases[c])
                img_gens.push_back(std::uint32_t(tgt.index_of(map_through(x))));
            ok = span_mask(tgt, img_gens, scratch) == tgt_masks[c];
        }
        if (ok) {
            ok = span_mask(tgt, images, scratch) == full_mask;
            if (ok) ++count;
        }
        std::size_t a = 0;
        while (a < m) {
            if (++pos[a] < torsion[a].size()) {
                images[a] = torsion[a][pos[a]];
                break;
            }
            pos[a] = 0;
            images[a] = torsion[a][0];
            ++a;
        }
        if (a == m) break;
    }
    return count;
}

namespace {

// Moebius function mu(K, top) over the subgroup lattice, by descending order.
std::vector<Int> mobius_to_top(const std::vector<LatticeEntry>& lat, std::size_t top) {
    std::vector<Int> mu(lat.size(), 0);
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < lat.size(); ++i)
        if (mask_subset(lat[i].mask, lat[top].mask)) inside.push_back(i);
    // Lattice is sorted ascending by order; walk inside in descending order.
    mu[top] = 1;
    for (auto it = inside.rbegin(); it != inside.rend(); ++it) {
        std::size_t k = *it;
        if (k == top) continue;
        Int s = 0;
        for (std::size_t l : inside)
            if (l != k && mask_subset(lat[k].mask, lat[l].mask)) s += mu[l];
        mu[k] = -s;
    }
    return mu;
}

}  // namespace

Int count_surjections_mobius(std::uint64_t p, const Partition& lambda, const Partition& mu_t,
                             const EnumerationBounds& b) {
    auto& cache = GroupCache::instance();
    const ExplicitGroup& tgt = cache.group(p, mu_t);
    const auto& lat = cache.lattice(p, mu_t, b);
    std::size_t top = lat.size() - 1;
    std::vector<Int> mob = mobius_to_top(lat, top);
    // #Hom(G_lambda, K) = prod_i #{x in K : p^{lambda_i} x = 0}.
    Int total = 0;
    for (std::size_t k = 0; k < lat.size(); ++k) {
        if (mob[k] == 0) continue;
        std::vector<std::uint64_t> kill_count;  // indexed by exponent a
        std::uint32_t max_a = lambda.empty() ? 0 : lambda.parts()[0];
        kill_count.assign(max_a + 1, 0);
        for (const Element& x : subgroup_elements(tgt, lat[k].subgroup)) {
            std::uint32_t e = tgt.exponent_of(x);
            if (e <= max_a) kill_count[e]++;
        }
        for (std::size_t a = 1; a < kill_count.size(); ++a) kill_count[a] += kill_count[a - 1];
        Int hom = 1;
        for (std::uint32_t part : lambda.parts())
            hom *= Int(static_cast<unsigned long>(kill_count[part]));
        total += mob[k] * hom;
    }
    return total;
}

Int aut_order_mobius(std::uint64_t p, const Partition& lambda, const EnumerationBounds& b) {
    if (lambda.empty()) return 1;
    return count_surjections_mobius(p, lambda, lambda, b);
}

std::string FlagClass::to_string() const {
    std::ostringstream os;
    os << "{\"p\":" << p << ",\"nu\":" << nu.to_string() << ",\"orbit\":\"" << orbit << "\"}";
    return os.str();
}

}  // namespace cokflag
