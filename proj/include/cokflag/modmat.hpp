#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cokflag/partition.hpp"

namespace cokflag {

/// The ring Z/p^N. Entries are 64-bit residues; p^N must fit in 63 bits.
struct RingSpec {
    std::uint64_t p = 2;
    std::uint32_t N = 1;
    std::uint64_t modulus = 2;

    static RingSpec make(std::uint64_t p, std::uint32_t N);

    bool operator==(const RingSpec&) const = default;

    std::uint64_t reduce(std::uint64_t x) const { return x % modulus; }
    std::uint64_t reduce_int(std::int64_t x) const {
        std::int64_t m = std::int64_t(modulus);
        std::int64_t r = x % m;
        return std::uint64_t(r < 0 ? r + m : r);
    }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= modulus ? s - modulus : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + modulus - b;
    }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        if (small_) return (a * b) % modulus;
        return std::uint64_t((unsigned __int128)(a) * b % modulus);
    }

    /// p-adic valuation in [0, N]; 0 maps to N (saturated).
    std::uint32_t valuation(std::uint64_t x) const;
    /// Unit part u with x = u * p^valuation(x); x must be nonzero.
    std::uint64_t unit_part(std::uint64_t x) const;
    /// Inverse of a unit.
    std::uint64_t inv_unit(std::uint64_t u) const;
    std::uint64_t pow_p(std::uint32_t v) const;  // p^v mod nothing (v <= N)

private:
    bool small_ = true;  // modulus^2 fits in 64 bits
};

/// Dense row-major matrix over Z/p^N.
class MatrixMod {
public:
    MatrixMod() = default;
    MatrixMod(RingSpec ring, std::size_t rows, std::size_t cols)
        : ring_(ring), rows_(rows), cols_(cols), e_(rows * cols, 0) {}
    static MatrixMod identity(RingSpec ring, std::size_t n);
    static MatrixMod from_entries(RingSpec ring, std::size_t rows, std::size_t cols,
                                  std::span<const std::int64_t> entries);

    const RingSpec& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint64_t& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }
    std::uint64_t* row(std::size_t i) { return e_.data() + i * cols_; }
    const std::uint64_t* row(std::size_t i) const { return e_.data() + i * cols_; }

    bool operator==(const MatrixMod&) const = default;
    std::string to_json() const;  // {p,N,rows,cols,entries:[...]} for failing-case dumps

private:
    RingSpec ring_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint64_t> e_;
};

MatrixMod mat_mul(const MatrixMod& a, const MatrixMod& b);

/// U*M*V diagonal with p-power entries, valuations nondecreasing; saturated
/// positions (v = N) hold 0.
struct SnfResult {
    std::vector<std::uint32_t> valuations;  // length min(rows, cols)
    MatrixMod U, V;
};

SnfResult snf(const MatrixMod& m);
/// Valuations only; skips transform bookkeeping.
std::vector<std::uint32_t> snf_valuations(const MatrixMod& m);

struct CokernelType {
    bool saturated = false;
    Partition type;  // meaningful only when !saturated
};

/// Type of Z^n / M Z^n read off mod p^N; Saturated when a valuation hits N.
CokernelType cokernel_type(const MatrixMod& m);

/// Partial products [M1, M1*M2, ..., M1*...*Mk].
std::vector<MatrixMod> product_chain(std::span<const MatrixMod> ms);

/// Row-echelon rank of (M mod p) over F_p. For p = 2 prefer BitMatrix.
std::size_t rank_mod_p(const MatrixMod& m);

/// True when det(M) is a unit mod p^N (equivalently full rank mod p).
bool is_unimodular(const MatrixMod& m);

}  // namespace cokflag
