#include "cokflag/modmat.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cokflag {

RingSpec RingSpec::make(std::uint64_t p, std::uint32_t N) {
    if (p < 2) throw std::invalid_argument("RingSpec: p must be prime >= 2");
    if (N < 1) throw std::invalid_argument("RingSpec: N must be >= 1");
    RingSpec r;
    r.p = p;
    r.N = N;
    r.modulus = 1;
    for (std::uint32_t i = 0; i < N; ++i) {
        if (r.modulus > (std::uint64_t(1) << 62) / p)
            throw std::invalid_argument("RingSpec: p^N exceeds the 63-bit entry guard");
        r.modulus *= p;
    }
    r.small_ = r.modulus < (std::uint64_t(1) << 32);
    return r;
}

std::uint32_t RingSpec::valuation(std::uint64_t x) const {
    if (x == 0) return N;
    std::uint32_t v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

std::uint64_t RingSpec::unit_part(std::uint64_t x) const {
    while (x % p == 0) x /= p;
    return x;
}

std::uint64_t RingSpec::inv_unit(std::uint64_t u) const {
    // Extended Euclid against the modulus; u must be coprime to p.
    std::int64_t a = std::int64_t(u % modulus), m = std::int64_t(modulus);
    std::int64_t x0 = 1, x1 = 0, r0 = a, r1 = m;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
    }
    if (r0 != 1 && r0 != -1) throw std::invalid_argument("inv_unit: not a unit");
    if (r0 == -1) x0 = -x0;
    x0 %= m;
    return std::uint64_t(x0 < 0 ? x0 + m : x0);
}

std::uint64_t RingSpec::pow_p(std::uint32_t v) const {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < v && i < N; ++i) r *= p;
    return v >= N ? 0 : r;
}

MatrixMod MatrixMod::identity(RingSpec ring, std::size_t n) {
    MatrixMod m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1 % ring.modulus;
    return m;
}

MatrixMod MatrixMod::from_entries(RingSpec ring, std::size_t rows, std::size_t cols,
                                  std::span<const std::int64_t> entries) {
    if (entries.size() != rows * cols) throw std::invalid_argument("from_entries: size mismatch");
    MatrixMod m(ring, rows, cols);
    for (std::size_t i = 0; i < entries.size(); ++i)
        m.row(0)[i] = ring.reduce_int(entries[i]);
    return m;
}

std::string MatrixMod::to_json() const {
    std::ostringstream os;
    os << "{\"p\":" << ring_.p << ",\"N\":" << ring_.N << ",\"rows\":" << rows_
       << ",\"cols\":" << cols_ << ",\"entries\":[";
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (i) os << ',';
        os << e_[i];
    }
    os << "]}";
    return os.str();
}

MatrixMod mat_mul(const MatrixMod& a, const MatrixMod& b) {
    if (a.ring() != b.ring()) throw std::invalid_argument("mat_mul: ring mismatch");
    if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: dimension mismatch");
    const RingSpec& R = a.ring();
    MatrixMod c(R, a.rows(), b.cols());
    const std::uint64_t m = R.modulus;
    // How many unreduced products fit in a u64 accumulator.
    std::size_t chunk = 1;
    if (m < (std::uint64_t(1) << 31)) {
        std::uint64_t percap = ~std::uint64_t(0) / ((m - 1) * (m - 1) + 1);
        chunk = std::size_t(std::min<std::uint64_t>(percap, std::uint64_t(1) << 40));
        if (chunk == 0) chunk = 1;
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const std::uint64_t* ar = a.row(i);
        std::uint64_t* cr = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            std::uint64_t f = ar[k];
            if (!f) continue;
            const std::uint64_t* br = b.row(k);
            if (chunk > 1) {
                for (std::size_t j = 0; j < b.cols(); ++j) cr[j] += f * br[j];
                if ((k + 1) % chunk == 0)
                    for (std::size_t j = 0; j < b.cols(); ++j) cr[j] %= m;
            } else {
                for (std::size_t j = 0; j < b.cols(); ++j)
                    cr[j] = R.add(cr[j], R.mul(f, br[j]));
            }
        }
        for (std::size_t j = 0; j < b.cols(); ++j) cr[j] %= m;
    }
    return c;
}

namespace {

struct SnfWork {
    MatrixMod a;
    MatrixMod* U = nullptr;
    MatrixMod* V = nullptr;

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a.at(i, c), a.at(j, c));
        if (U)
            for (std::size_t c = 0; c < U->cols(); ++c) std::swap(U->at(i, c), U->at(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a.at(r, i), a.at(r, j));
        if (V)
            for (std::size_t r = 0; r < V->rows(); ++r) std::swap(V->at(r, i), V->at(r, j));
    }
    void scale_row(std::size_t i, std::uint64_t u, std::size_t from_col) {
        const RingSpec& R = a.ring();
        for (std::size_t c = from_col; c < a.cols(); ++c) a.at(i, c) = R.mul(a.at(i, c), u);
        if (U)
            for (std::size_t c = 0; c < U->cols(); ++c) U->at(i, c) = R.mul(U->at(i, c), u);
    }
    // row_i -= f * row_t (columns >= from_col in a)
    void row_sub(std::size_t i, std::size_t t, std::uint64_t f, std::size_t from_col) {
        const RingSpec& R = a.ring();
        std::uint64_t* ri = a.row(i);
        const std::uint64_t* rt = a.row(t);
        for (std::size_t c = from_col; c < a.cols(); ++c)
            ri[c] = R.sub(ri[c], R.mul(f, rt[c]));
        if (U) {
            std::uint64_t* ui = U->row(i);
            const std::uint64_t* ut = U->row(t);
            for (std::size_t c = 0; c < U->cols(); ++c)
                ui[c] = R.sub(ui[c], R.mul(f, ut[c]));
        }
    }
    // col_j -= f * col_t (rows >= from_row in a)
    void col_sub(std::size_t j, std::size_t t, std::uint64_t f, std::size_t from_row) {
        const RingSpec& R = a.ring();
        for (std::size_t r = from_row; r < a.rows(); ++r)
            a.at(r, j) = R.sub(a.at(r, j), R.mul(f, a.at(r, t)));
        if (V)
            for (std::size_t r = 0; r < V->rows(); ++r)
                V->at(r, j) = R.sub(V->at(r, j), R.mul(f, V->at(r, t)));
    }
};

std::vector<std::uint32_t> snf_run(SnfWork& w) {
    const RingSpec& R = w.a.ring();
    const std::size_t rows = w.a.rows(), cols = w.a.cols();
    const std::size_t d = std::min(rows, cols);
    std::vector<std::uint32_t> vals(d, R.N);
    for (std::size_t t = 0; t < d; ++t) {
        // Pivot on a minimum-valuation entry of the trailing block; every
        // element is unit * p^v, so no gcd chain is needed.
        std::uint32_t best = R.N;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < rows && best > 0; ++i) {
            for (std::size_t j = t; j < cols; ++j) {
                std::uint32_t v = R.valuation(w.a.at(i, j));
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    if (best == 0) break;
                }
            }
        }
        if (best == R.N) break;  // all remaining entries are 0 mod p^N
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        std::uint64_t pivot = w.a.at(t, t);
        std::uint64_t u = R.unit_part(pivot);
        if (u != 1) w.scale_row(t, R.inv_unit(u), t);
        const std::uint64_t pv = R.pow_p(best);
        for (std::size_t i = t + 1; i < rows; ++i) {
            std::uint64_t x = w.a.at(i, t);
            if (!x) continue;
            w.row_sub(i, t, x / pv, t);
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            std::uint64_t x = w.a.at(t, j);
            if (!x) continue;
            w.col_sub(j, t, x / pv, t);
        }
        vals[t] = best;
    }
    return vals;
}

}  // namespace

SnfResult snf(const MatrixMod& m) {
    SnfResult out;
    out.U = MatrixMod::identity(m.ring(), m.rows());
    out.V = MatrixMod::identity(m.ring(), m.cols());
    SnfWork w{m, &out.U, &out.V};
    out.valuations = snf_run(w);
    return out;
}

std::vector<std::uint32_t> snf_valuations(const MatrixMod& m) {
    SnfWork w{m, nullptr, nullptr};
    return snf_run(w);
}

CokernelType cokernel_type(const MatrixMod& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("cokernel_type: matrix must be square");
    CokernelType out;
    std::vector<std::uint32_t> vals = snf_valuations(m);
    std::vector<std::uint32_t> parts;
    for (std::uint32_t v : vals) {
        if (v >= m.ring().N) {
            out.saturated = true;
            return out;
        }
        if (v > 0) parts.push_back(v);
    }
    out.type = Partition(std::move(parts));
    return out;
}

std::vector<MatrixMod> product_chain(std::span<const MatrixMod> ms) {
    if (ms.empty()) return {};
    std::vector<MatrixMod> out;
    out.reserve(ms.size());
    out.push_back(ms[0]);
    for (std::size_t i = 1; i < ms.size(); ++i) out.push_back(mat_mul(out.back(), ms[i]));
    return out;
}

std::size_t rank_mod_p(const MatrixMod& m) {
    const std::uint64_t p = m.ring().p;
    std::vector<std::uint64_t> a(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[i * m.cols() + j] = m.at(i, j) % p;
    std::size_t rank = 0;
    const std::size_t rows = m.rows(), cols = m.cols();
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && a[piv * cols + col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap_ranges(a.begin() + std::ptrdiff_t(rank * cols),
                         a.begin() + std::ptrdiff_t((rank + 1) * cols),
                         a.begin() + std::ptrdiff_t(piv * cols));
        // Normalize pivot row, then clear the column below.
        std::uint64_t inv = 1;
        {
            // Fermat inverse mod p.
            std::uint64_t b = a[rank * cols + col], e = p - 2, r = 1;
            while (e) {
                if (e & 1) r = r * b % p;
                b = b * b % p;
                e >>= 1;
            }
            inv = r;
        }
        for (std::size_t j = col; j < cols; ++j) a[rank * cols + j] = a[rank * cols + j] * inv % p;
        for (std::size_t i = rank + 1; i < rows; ++i) {
            std::uint64_t f = a[i * cols + col];
            if (!f) continue;
            for (std::size_t j = col; j < cols; ++j)
                a[i * cols + j] = (a[i * cols + j] + (p - f) * a[rank * cols + j]) % p;
        }
        ++rank;
    }
    return rank;
}

bool is_unimodular(const MatrixMod& m) {
    return m.rows() == m.cols() && rank_mod_p(m) == m.rows();
}

}  // namespace cokflag
