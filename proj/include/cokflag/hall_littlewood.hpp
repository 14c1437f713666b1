#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cokflag/partition.hpp"
#include "cokflag/rational.hpp"

namespace cokflag {

/// Symmetric polynomial in the monomial-symmetric basis: m_mu -> coefficient.
using SymFunc = std::map<Partition, Rat>;

/// Univariate polynomial in t over Q, for the symbolic-t golden tests.
struct PolyQ {
    std::vector<Rat> c;  // c[i] is the coefficient of t^i

    static PolyQ zero() { return {}; }
    static PolyQ constant(const Rat& r);
    static PolyQ t();

    bool is_zero() const;
    void trim();
    PolyQ operator+(const PolyQ& o) const;
    PolyQ operator-(const PolyQ& o) const;
    PolyQ operator*(const PolyQ& o) const;
    PolyQ& operator+=(const PolyQ& o);
    PolyQ& operator-=(const PolyQ& o);
    /// Exact division; throws std::domain_error on a nonzero remainder.
    PolyQ exact_div(const PolyQ& d) const;
    bool operator==(const PolyQ& o) const;
    std::string to_string() const;
};

using SymFuncT = std::map<Partition, PolyQ>;

/// Hall-Littlewood P_lambda(x_1..x_n; 0, t) with a fixed rational t, stored
/// in the monomial basis. Monic in m_lambda, supported on mu <= lambda in
/// dominance.
struct HlPolynomial {
    std::size_t n_vars = 0;
    Rat t;
    SymFunc coeffs;
};

constexpr std::size_t kMaxHlVars = 8;  // S_n symmetrization is factorial

HlPolynomial hl_polynomial(const Partition& lambda, std::size_t n_vars, const Rat& t);
/// Schur s_lambda via exact division of alternants (t plays no role).
HlPolynomial schur_polynomial(const Partition& lambda, std::size_t n_vars);

/// Unique expansion of a homogeneous f in the P basis by triangular
/// elimination against dominance-maximal support.
SymFunc expand_in_P_basis(const SymFunc& f, std::size_t n_vars, const Rat& t);

/// c^nu_{lambda,mu}(0, t); requires n_vars >= |lambda|+|mu| so the constants
/// are the stabilized ones. Support inside [lambda cup mu, lambda + mu] in
/// dominance is asserted.
std::map<Partition, Rat> structure_constants(const Partition& lambda, const Partition& mu,
                                             const Rat& t, std::size_t n_vars);

/// P_lambda(1, t, ..., t^{n-1}; 0, t), any n >= l(lambda). Uses the
/// one-variable branching recursion on specialized values; cross-checked
/// against direct polynomial evaluation for n <= kMaxHlVars in the tests.
Rat principal_specialization(const Partition& lambda, const Rat& t, std::size_t n_vars);
/// Direct evaluation of the full polynomial (n_vars <= kMaxHlVars).
Rat principal_specialization_direct(const Partition& lambda, const Rat& t, std::size_t n_vars);

/// Normalized constants c-hat at t = 1/p: the finite-n conditional law for
/// Haar matrix products of size n_vars.
std::map<Partition, Rat> normalized_constants(const Partition& lambda, const Partition& mu,
                                              std::uint64_t p, std::size_t n_vars);

struct LimitConstants {
    std::map<Partition, Rat> values;
    Rat certified_error;  // successive-difference tail bound
    std::size_t n_used = 0;
};

/// n -> infinity limit of the normalized constants, by increasing n_vars
/// until the successive differences certify the tolerance.
LimitConstants hl_limit_constants(const Partition& lambda, const Partition& mu, std::uint64_t p,
                                  const Rat& tolerance);

/// |Aut(G_lambda)||Aut(G_mu)|/|Aut(G_nu)| * #{N <= G_nu: N iso G_lambda,
/// G_nu/N iso G_mu}: the exact group-theoretic value of the same limit.
std::map<Partition, Rat> group_theoretic_constants(const Partition& lambda, const Partition& mu,
                                                   std::uint64_t p);

/// Symbolic-t mode (golden tests only, |lambda|+|mu| <= 3).
SymFuncT hl_polynomial_symbolic(const Partition& lambda, std::size_t n_vars);
SymFuncT structure_constants_symbolic(const Partition& lambda, const Partition& mu,
                                      std::size_t n_vars);

}  // namespace cokflag
