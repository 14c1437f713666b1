#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace cokflag {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int int_pow(std::uint64_t base, unsigned long e) {
    Int b;
    mpz_import(b.get_mpz_t(), 1, 1, sizeof(base), 0, 0, &base);
    return int_pow(b, e);
}

/// t^e for rational t, e >= 0.
inline Rat rat_pow(const Rat& t, unsigned long e) {
    Rat r = 1;
    Rat b = t;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline double to_double(const Rat& q) { return q.get_d(); }

inline std::string rat_string(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_str();
}

/// Parses "a/b", "a", or a plain decimal like "0.25" into an exact rational.
inline Rat parse_rational(const std::string& s) {
    auto dot = s.find('.');
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || frac_len == 0) throw std::invalid_argument("bad rational: " + s);
        Rat r(Int(digits.c_str()), int_pow(std::uint64_t(10), frac_len));
        r.canonicalize();
        return r;
    }
    Rat r(s.c_str());
    r.canonicalize();
    return r;
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

}  // namespace cokflag
