#include "cokflag/bitmat.hpp"

#include <stdexcept>

namespace cokflag {

void BitMatrix::mask_tail() {
    std::size_t rem = cols_ % 64;
    if (!rem || !words_) return;
    std::uint64_t mask = (std::uint64_t(1) << rem) - 1;
    for (std::size_t i = 0; i < rows_; ++i) bits_[i * words_ + words_ - 1] &= mask;
}

std::size_t bit_rank(BitMatrix m) {
    const std::size_t rows = m.rows(), cols = m.cols(), w = m.words_per_row();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        const std::size_t wi = col / 64;
        const std::uint64_t bit = std::uint64_t(1) << (col % 64);
        std::size_t piv = rank;
        while (piv < rows && !(m.row(piv)[wi] & bit)) ++piv;
        if (piv == rows) continue;
        if (piv != rank)
            for (std::size_t k = wi; k < w; ++k) std::swap(m.row(rank)[k], m.row(piv)[k]);
        const std::uint64_t* pr = m.row(rank);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            std::uint64_t* ri = m.row(i);
            if (ri[wi] & bit)
                for (std::size_t k = wi; k < w; ++k) ri[k] ^= pr[k];
        }
        ++rank;
    }
    return rank;
}

BitMatrix bit_mul(const BitMatrix& a, const BitMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("bit_mul: dimension mismatch");
    BitMatrix c(a.rows(), b.cols());
    const std::size_t wb = b.words_per_row();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::uint64_t* ci = c.row(i);
        const std::uint64_t* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if ((ai[k / 64] >> (k % 64)) & 1) {
                const std::uint64_t* bk = b.row(k);
                for (std::size_t t = 0; t < wb; ++t) ci[t] ^= bk[t];
            }
        }
    }
    return c;
}

}  // namespace cokflag
