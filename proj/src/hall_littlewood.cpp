#include "cokflag/hall_littlewood.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>

#include "cokflag/group.hpp"

namespace cokflag {

// ---------------------------------------------------------------------------
// PolyQ
// ---------------------------------------------------------------------------

PolyQ PolyQ::constant(const Rat& r) {
    PolyQ p;
    if (r != 0) p.c = {r};
    return p;
}

PolyQ PolyQ::t() {
    PolyQ p;
    p.c = {Rat(0), Rat(1)};
    return p;
}

bool PolyQ::is_zero() const { return c.empty(); }

void PolyQ::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

PolyQ PolyQ::operator+(const PolyQ& o) const {
    PolyQ r = *this;
    r += o;
    return r;
}

PolyQ PolyQ::operator-(const PolyQ& o) const {
    PolyQ r = *this;
    r -= o;
    return r;
}

PolyQ& PolyQ::operator+=(const PolyQ& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), Rat(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    trim();
    return *this;
}

PolyQ& PolyQ::operator-=(const PolyQ& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), Rat(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
    trim();
    return *this;
}

PolyQ PolyQ::operator*(const PolyQ& o) const {
    PolyQ r;
    if (c.empty() || o.c.empty()) return r;
    r.c.assign(c.size() + o.c.size() - 1, Rat(0));
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
}

PolyQ PolyQ::exact_div(const PolyQ& d) const {
    if (d.is_zero()) throw std::domain_error("PolyQ: division by zero");
    PolyQ rem = *this;
    PolyQ q;
    if (rem.c.size() >= d.c.size()) q.c.assign(rem.c.size() - d.c.size() + 1, Rat(0));
    while (!rem.is_zero() && rem.c.size() >= d.c.size()) {
        std::size_t shift = rem.c.size() - d.c.size();
        Rat f = rem.c.back() / d.c.back();
        q.c[shift] = f;
        for (std::size_t i = 0; i < d.c.size(); ++i) rem.c[shift + i] -= f * d.c[i];
        rem.trim();
    }
    if (!rem.is_zero()) throw std::domain_error("PolyQ: division not exact");
    q.trim();
    return q;
}

bool PolyQ::operator==(const PolyQ& o) const { return c == o.c; }

std::string PolyQ::to_string() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << rat_string(c[i]);
        if (i == 1) os << "*t";
        if (i > 1) os << "*t^" << i;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Generic multivariate polynomial core
// ---------------------------------------------------------------------------

namespace {

template <class K>
K k_zero() {
    return K();
}
template <>
Rat k_zero<Rat>() {
    return Rat(0);
}

template <class K>
K k_one();
template <>
Rat k_one<Rat>() {
    return Rat(1);
}
template <>
PolyQ k_one<PolyQ>() {
    return PolyQ::constant(1);
}

template <class K>
bool k_is_zero(const K& k);
template <>
bool k_is_zero<Rat>(const Rat& k) {
    return k == 0;
}
template <>
bool k_is_zero<PolyQ>(const PolyQ& k) {
    return k.is_zero();
}

using Expo = std::vector<std::uint32_t>;

template <class K>
using MPoly = std::map<Expo, K>;

template <class K>
void add_term(MPoly<K>& p, const Expo& e, const K& c) {
    if (k_is_zero(c)) return;
    auto [it, inserted] = p.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (k_is_zero(it->second)) p.erase(it);
    }
}

// p *= (x_a - t * x_b)
template <class K>
MPoly<K> mul_binomial(const MPoly<K>& p, std::size_t a, std::size_t b, const K& t) {
    MPoly<K> out;
    for (const auto& [e, c] : p) {
        Expo ea = e;
        ea[a]++;
        add_term(out, ea, c);
        Expo eb = e;
        eb[b]++;
        K neg = k_zero<K>();
        neg -= t * c;
        add_term(out, eb, neg);
    }
    return out;
}

template <class K>
MPoly<K> mpoly_mul(const MPoly<K>& p, const MPoly<K>& q) {
    MPoly<K> out;
    for (const auto& [e1, c1] : p)
        for (const auto& [e2, c2] : q) {
            Expo e = e1;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
            add_term(out, e, K(c1 * c2));
        }
    return out;
}

// Exact division by (x_a - x_b): treat as a polynomial in x_a and run the
// descending recurrence Q_{m-1} = C_m + x_b * Q_m.
template <class K>
MPoly<K> divide_linear(const MPoly<K>& p, std::size_t a, std::size_t b) {
    if (p.empty()) return {};
    std::uint32_t deg = 0;
    for (const auto& [e, c] : p) deg = std::max(deg, e[a]);
    // Bucket coefficients C_m by the x_a exponent (stored with e[a] = 0).
    std::vector<MPoly<K>> buckets(deg + 1);
    for (const auto& [e, c] : p) {
        Expo r = e;
        std::uint32_t m = r[a];
        r[a] = 0;
        add_term(buckets[m], r, c);
    }
    MPoly<K> out;
    MPoly<K> q_cur;  // Q_m, starting above the top degree with 0
    for (std::uint32_t m = deg; m > 0; --m) {
        // Q_{m-1} = C_m + x_b * Q_m
        MPoly<K> next = buckets[m];
        for (const auto& [e, c] : q_cur) {
            Expo eb = e;
            eb[b]++;
            add_term(next, eb, c);
        }
        for (const auto& [e, c] : next) {
            Expo ea = e;
            ea[a] = m - 1;
            add_term(out, ea, c);
        }
        q_cur = std::move(next);
    }
    // Remainder: C_0 + x_b * Q_0 must vanish.
    MPoly<K> rem = buckets[0];
    for (const auto& [e, c] : q_cur) {
        Expo eb = e;
        eb[b]++;
        add_term(rem, eb, c);
    }
    if (!rem.empty()) throw std::logic_error("divide_linear: division not exact");
    return out;
}

int sort_sign(Expo& e) {
    // Sign of the permutation sorting e into strictly decreasing order;
    // 0 when entries repeat.
    int sign = 1;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            if (e[i] == e[j]) return 0;
            if (e[i] < e[j]) {
                std::swap(e[i], e[j]);
                sign = -sign;
            }
        }
    return sign;
}

template <class K>
std::map<Expo, K> antisymmetrize(const MPoly<K>& p) {
    std::map<Expo, K> alt;
    for (const auto& [e, c] : p) {
        Expo s = e;
        int sign = sort_sign(s);
        if (sign == 0) continue;
        K v = c;
        if (sign < 0) {
            K n = k_zero<K>();
            n -= c;
            v = n;
        }
        auto [it, inserted] = alt.emplace(std::move(s), v);
        if (!inserted) {
            it->second += v;
            if (k_is_zero(it->second)) alt.erase(it);
        }
    }
    return alt;
}

// Expand sum of alternants a_beta into a full polynomial.
template <class K>
MPoly<K> alternant_sum(const std::map<Expo, K>& alt, std::size_t n) {
    MPoly<K> out;
    for (const auto& [beta, c] : alt) {
        Expo perm = beta;
        std::sort(perm.begin(), perm.end());
        do {
            Expo s = perm;
            int sign = sort_sign(s);
            // Entries are distinct, so sign is never 0 here.
            K v = c;
            if (sign < 0) {
                K neg = k_zero<K>();
                neg -= c;
                v = neg;
            }
            add_term(out, perm, v);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    (void)n;
    return out;
}

template <class K>
std::map<Partition, K> to_mbasis(const MPoly<K>& p) {
    std::map<Partition, K> out;
    for (const auto& [e, c] : p) {
        bool sorted = true;
        for (std::size_t i = 0; i + 1 < e.size(); ++i)
            if (e[i] < e[i + 1]) {
                sorted = false;
                break;
            }
        if (!sorted) continue;
        out.emplace(Partition(std::vector<std::uint32_t>(e.begin(), e.end())), c);
    }
    return out;
}

template <class K>
MPoly<K> from_mbasis(const std::map<Partition, K>& f, std::size_t n) {
    MPoly<K> out;
    for (const auto& [mu, c] : f) {
        if (mu.length() > n) throw std::invalid_argument("from_mbasis: partition longer than n_vars");
        Expo e(n, 0);
        for (std::size_t i = 0; i < mu.length(); ++i) e[i] = mu.parts()[i];
        std::sort(e.begin(), e.end());
        do {
            out.emplace(e, c);
        } while (std::next_permutation(e.begin(), e.end()));
    }
    return out;
}

// v_lambda(t) = prod_{i>=0} prod_{j=1}^{m_i} (1 + t + ... + t^{j-1}), with
// m_0 = n - l(lambda). Division-free form of the S_n formula denominator.
template <class K>
K v_lambda(const Partition& lambda, std::size_t n, const K& t) {
    K out = k_one<K>();
    auto geom = [&](std::uint32_t j) {
        K s = k_zero<K>();
        K power = k_one<K>();
        for (std::uint32_t r = 0; r < j; ++r) {
            s += power;
            power = K(power * t);
        }
        return s;
    };
    std::uint32_t m0 = std::uint32_t(n - lambda.length());
    for (std::uint32_t j = 1; j <= m0; ++j) out = K(out * geom(j));
    std::uint32_t maxp = lambda.empty() ? 0 : lambda.parts()[0];
    for (std::uint32_t i = 1; i <= maxp; ++i) {
        std::uint32_t m = lambda.multiplicity(i);
        for (std::uint32_t j = 1; j <= m; ++j) out = K(out * geom(j));
    }
    return out;
}

template <class K>
std::map<Partition, K> hl_core(const Partition& lambda, std::size_t n, const K& t,
                               const K& divide_by) {
    if (lambda.length() > n) throw std::invalid_argument("hl: l(lambda) > n_vars");
    if (n > kMaxHlVars) throw std::invalid_argument("hl: n_vars exceeds the S_n budget");
    // x^lambda * prod_{i<j} (x_i - t x_j), antisymmetrized, divided by the
    // Vandermonde and by v_lambda(t).
    MPoly<K> w;
    Expo start(n, 0);
    for (std::size_t i = 0; i < lambda.length(); ++i) start[i] = lambda.parts()[i];
    w.emplace(start, k_one<K>());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) w = mul_binomial(w, i, j, t);
    std::map<Expo, K> alt = antisymmetrize(w);
    MPoly<K> a = alternant_sum(alt, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a = divide_linear(a, i, j);
    std::map<Partition, K> out;
    for (auto& [e, c] : to_mbasis(a)) out.emplace(e, c);
    // Divide by v_lambda.
    std::map<Partition, K> res;
    for (auto& [mu, c] : out) {
        if constexpr (std::is_same_v<K, Rat>) {
            res.emplace(mu, Rat(c / divide_by));
        } else {
            res.emplace(mu, c.exact_div(divide_by));
        }
    }
    return res;
}

// Cache of computed HL polynomials keyed by (lambda, n, t).
struct HlCache {
    std::mutex mu;
    std::map<std::tuple<Partition, std::size_t, Rat>, SymFunc> items;

    SymFunc get(const Partition& lambda, std::size_t n, const Rat& t) {
        std::lock_guard lk(mu);
        auto key = std::make_tuple(lambda, n, t);
        auto it = items.find(key);
        if (it != items.end()) return it->second;
        SymFunc f = hl_core<Rat>(lambda, n, t, v_lambda<Rat>(lambda, n, t));
        items.emplace(key, f);
        return f;
    }
};

HlCache& hl_cache() {
    static HlCache c;
    return c;
}

template <class K>
std::map<Partition, K> expand_in_P_core(
    std::map<Partition, K> f, std::size_t n_vars,
    const std::function<std::map<Partition, K>(const Partition&)>& P_of) {
    std::map<Partition, K> out;
    std::size_t guard = 0;
    while (!f.empty()) {
        if (++guard > 100000) throw std::logic_error("expand_in_P_basis: triangularity violated");
        // Pick a dominance-maximal element of the support.
        const Partition* top = nullptr;
        for (const auto& [mu, c] : f) {
            bool maximal = true;
            for (const auto& [nu, c2] : f)
                if (!(nu == mu) && dominates(nu, mu)) {
                    maximal = false;
                    break;
                }
            if (maximal) {
                top = &mu;
                break;
            }
        }
        if (!top) throw std::logic_error("expand_in_P_basis: no maximal element");
        Partition nu = *top;
        K coeff = f.at(nu);
        std::map<Partition, K> p = P_of(nu);
        for (const auto& [mu, c] : p) {
            auto it = f.find(mu);
            if (it == f.end()) it = f.emplace(mu, k_zero<K>()).first;
            it->second -= K(coeff * c);
            if (k_is_zero(it->second)) f.erase(it);
        }
        if (f.count(nu)) throw std::logic_error("expand_in_P_basis: leading term not eliminated");
        auto [it, inserted] = out.emplace(nu, coeff);
        if (!inserted) throw std::logic_error("expand_in_P_basis: repeated pivot");
        (void)n_vars;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

HlPolynomial hl_polynomial(const Partition& lambda, std::size_t n_vars, const Rat& t) {
    HlPolynomial out;
    out.n_vars = n_vars;
    out.t = t;
    out.coeffs = hl_cache().get(lambda, n_vars, t);
    return out;
}

HlPolynomial schur_polynomial(const Partition& lambda, std::size_t n_vars) {
    if (lambda.length() > n_vars) throw std::invalid_argument("schur: l(lambda) > n_vars");
    if (n_vars > kMaxHlVars) throw std::invalid_argument("schur: n_vars exceeds budget");
    // Bialternant: a_{lambda+delta} / a_delta, by exact division.
    std::map<Expo, Rat> alt;
    Expo beta(n_vars, 0);
    for (std::size_t i = 0; i < n_vars; ++i)
        beta[i] = (i < lambda.length() ? lambda.parts()[i] : 0) + std::uint32_t(n_vars - 1 - i);
    alt.emplace(beta, Rat(1));
    MPoly<Rat> a = alternant_sum(alt, n_vars);
    for (std::size_t i = 0; i < n_vars; ++i)
        for (std::size_t j = i + 1; j < n_vars; ++j) a = divide_linear(a, i, j);
    HlPolynomial out;
    out.n_vars = n_vars;
    out.t = 0;
    out.coeffs = to_mbasis(a);
    return out;
}

SymFunc expand_in_P_basis(const SymFunc& f, std::size_t n_vars, const Rat& t) {
    return expand_in_P_core<Rat>(
        f, n_vars, [&](const Partition& nu) { return hl_cache().get(nu, n_vars, t); });
}

std::map<Partition, Rat> structure_constants(const Partition& lambda, const Partition& mu,
                                             const Rat& t, std::size_t n_vars) {
    if (n_vars < lambda.size() + mu.size())
        throw std::invalid_argument("structure_constants: n_vars < |lambda|+|mu|");
    SymFunc a = hl_cache().get(lambda, n_vars, t);
    SymFunc b = hl_cache().get(mu, n_vars, t);
    MPoly<Rat> prod = mpoly_mul(from_mbasis(a, n_vars), from_mbasis(b, n_vars));
    SymFunc c = expand_in_P_basis(to_mbasis(prod), n_vars, t);
    // Support window in dominance order, asserted.
    std::vector<std::uint32_t> sum_parts, union_parts;
    for (std::size_t i = 0; i < std::max(lambda.length(), mu.length()); ++i)
        sum_parts.push_back(lambda.part(i) + mu.part(i));
    for (std::uint32_t x : lambda.parts()) union_parts.push_back(x);
    for (std::uint32_t x : mu.parts()) union_parts.push_back(x);
    Partition upper{std::move(sum_parts)}, lower{std::move(union_parts)};
    for (const auto& [nu, cv] : c) {
        if (!dominates(upper, nu) || !dominates(nu, lower))
            throw std::logic_error("structure_constants: support outside dominance window");
    }
    return c;
}

Rat principal_specialization_direct(const Partition& lambda, const Rat& t, std::size_t n_vars) {
    SymFunc f = hl_cache().get(lambda, n_vars, t);
    Rat total = 0;
    for (const auto& [mu, c] : f) {
        // m_mu(1, t, ..., t^{n-1}) = sum over distinct permutations.
        Expo e(n_vars, 0);
        for (std::size_t i = 0; i < mu.length(); ++i) e[i] = mu.parts()[i];
        std::sort(e.begin(), e.end());
        Rat meval = 0;
        do {
            std::uint64_t expo = 0;
            for (std::size_t i = 0; i < n_vars; ++i) expo += std::uint64_t(i) * e[i];
            meval += rat_pow(t, expo);
        } while (std::next_permutation(e.begin(), e.end()));
        total += c * meval;
    }
    return total;
}

namespace {

// All mu with lambda/mu a horizontal strip (interlacing).
void horizontal_strips(const Partition& lambda, std::vector<Partition>& out) {
    std::vector<std::uint32_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == lambda.length()) {
            out.emplace_back(cur);
            return;
        }
        std::uint32_t lo = lambda.part(i + 1), hi = lambda.parts()[i];
        for (std::uint32_t v = lo; v <= hi; ++v) {
            cur.push_back(v);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

Rat psi_factor(const Partition& lambda, const Partition& mu, const Rat& t) {
    // psi_{lambda/mu}(t) = prod over {i >= 1 : m_i(mu) = m_i(lambda) + 1} of
    // (1 - t^{m_i(mu)}).
    Rat out = 1;
    std::uint32_t maxp = lambda.empty() ? 0 : lambda.parts()[0];
    for (std::uint32_t i = 1; i <= maxp; ++i) {
        std::uint32_t mm = mu.multiplicity(i);
        if (mm == lambda.multiplicity(i) + 1) out *= Rat(1) - rat_pow(t, mm);
    }
    return out;
}

}  // namespace

Rat principal_specialization(const Partition& lambda, const Rat& t, std::size_t n_vars) {
    if (lambda.length() > n_vars) throw std::invalid_argument("principal_specialization: l(lambda) > n");
    std::map<std::pair<Partition, std::size_t>, Rat> memo;
    std::function<Rat(const Partition&, std::size_t)> rec = [&](const Partition& la,
                                                                std::size_t n) -> Rat {
        if (la.empty()) return 1;
        if (la.length() > n) return 0;
        auto key = std::make_pair(la, n);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Rat total = 0;
        std::vector<Partition> mus;
        horizontal_strips(la, mus);
        for (const Partition& mu : mus) {
            if (mu.length() > n - 1) continue;
            Rat term = psi_factor(la, mu, t) * rec(mu, n - 1) *
                       rat_pow(t, std::uint64_t(n - 1) * (la.size() - mu.size()));
            total += term;
        }
        memo.emplace(key, total);
        return total;
    };
    return rec(lambda, n_vars);
}

std::map<Partition, Rat> normalized_constants(const Partition& lambda, const Partition& mu,
                                              std::uint64_t p, std::size_t n_vars) {
    if (n_vars < lambda.size() + mu.size())
        throw std::invalid_argument("normalized_constants: n_vars < |lambda|+|mu|");
    Rat t(1, static_cast<unsigned long>(p));
    std::size_t n_stable = std::max<std::size_t>(lambda.size() + mu.size(), 1);
    std::map<Partition, Rat> c = structure_constants(lambda, mu, t, n_stable);
    Rat denom = principal_specialization(lambda, t, n_vars) *
                principal_specialization(mu, t, n_vars);
    std::map<Partition, Rat> out;
    for (const auto& [nu, cv] : c) {
        if (nu.length() > n_vars) continue;  // P_nu vanishes in n_vars variables
        Rat v = cv * principal_specialization(nu, t, n_vars) / denom;
        v.canonicalize();
        out.emplace(nu, v);
    }
    return out;
}

LimitConstants hl_limit_constants(const Partition& lambda, const Partition& mu, std::uint64_t p,
                                  const Rat& tolerance) {
    if (tolerance <= 0) throw std::invalid_argument("hl_limit_constants: tolerance <= 0");
    Rat t(1, static_cast<unsigned long>(p));
    // Tail bound for an (observed) geometric decay of successive differences
    // at ratio r = 3t/2 < 1: remaining error <= Delta * r / (1 - r).
    Rat r = Rat(3) * t / 2;
    Rat tail_factor = r / (Rat(1) - r);
    std::size_t n0 = std::max<std::size_t>(lambda.size() + mu.size(), 1);
    LimitConstants out;
    std::map<Partition, Rat> prev = normalized_constants(lambda, mu, p, n0);
    for (std::size_t n = n0 + 1; n <= n0 + 400; ++n) {
        std::map<Partition, Rat> cur = normalized_constants(lambda, mu, p, n);
        Rat delta = 0;
        for (const auto& [nu, v] : cur) {
            Rat d = rat_abs(v - prev.at(nu));
            if (d > delta) delta = d;
        }
        if (delta * tail_factor < tolerance && n >= n0 + 2) {
            out.values = std::move(cur);
            out.certified_error = delta * tail_factor;
            out.n_used = n;
            return out;
        }
        prev = std::move(cur);
    }
    throw BoundExceeded("hl_limit_constants: no convergence within the n budget");
}

std::map<Partition, Rat> group_theoretic_constants(const Partition& lambda, const Partition& mu,
                                                   std::uint64_t p) {
    std::map<Partition, Rat> out;
    Int al = aut_order(lambda, p), am = aut_order(mu, p);
    for (const Partition& nu : partitions_of(lambda.size() + mu.size())) {
        Int h = hall_number(p, nu, lambda, mu);
        if (h == 0) continue;
        Rat v = Rat(al * am * h) / Rat(aut_order(nu, p));
        v.canonicalize();
        out.emplace(nu, v);
    }
    if (out.empty()) out.emplace(Partition{}, Rat(1));  // lambda = mu = empty
    return out;
}

SymFuncT hl_polynomial_symbolic(const Partition& lambda, std::size_t n_vars) {
    if (lambda.size() > 3) throw std::invalid_argument("symbolic mode limited to |lambda| <= 3");
    PolyQ t = PolyQ::t();
    return hl_core<PolyQ>(lambda, n_vars, t, v_lambda<PolyQ>(lambda, n_vars, t));
}

SymFuncT structure_constants_symbolic(const Partition& lambda, const Partition& mu,
                                      std::size_t n_vars) {
    if (lambda.size() + mu.size() > 3)
        throw std::invalid_argument("symbolic mode limited to |lambda|+|mu| <= 3");
    if (n_vars < lambda.size() + mu.size())
        throw std::invalid_argument("structure_constants_symbolic: n_vars too small");
    PolyQ t = PolyQ::t();
    SymFuncT a = hl_core<PolyQ>(lambda, n_vars, t, v_lambda<PolyQ>(lambda, n_vars, t));
    SymFuncT b = hl_core<PolyQ>(mu, n_vars, t, v_lambda<PolyQ>(mu, n_vars, t));
    MPoly<PolyQ> prod = mpoly_mul(from_mbasis(a, n_vars), from_mbasis(b, n_vars));
    return expand_in_P_core<PolyQ>(to_mbasis(prod), n_vars, [&](const Partition& nu) {
        return hl_core<PolyQ>(nu, n_vars, t, v_lambda<PolyQ>(nu, n_vars, t));
    });
}

}  // namespace cokflag
