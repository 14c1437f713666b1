#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace cokflag {

/// Dense matrix over F_2, rows packed 64 bits per word.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return words_; }

    bool get(std::size_t i, std::size_t j) const {
        return (bits_[i * words_ + j / 64] >> (j % 64)) & 1;
    }
    void set(std::size_t i, std::size_t j, bool v) {
        std::uint64_t& w = bits_[i * words_ + j / 64];
        std::uint64_t m = std::uint64_t(1) << (j % 64);
        w = v ? (w | m) : (w & ~m);
    }
    std::uint64_t* row(std::size_t i) { return bits_.data() + i * words_; }
    const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * words_; }

    /// Zeroes any bits beyond cols() in the last word of each row.
    void mask_tail();

private:
    std::size_t rows_ = 0, cols_ = 0, words_ = 0;
    std::vector<std::uint64_t> bits_;
};

std::size_t bit_rank(BitMatrix m);  // destructive internally, takes a copy
BitMatrix bit_mul(const BitMatrix& a, const BitMatrix& b);

}  // namespace cokflag
