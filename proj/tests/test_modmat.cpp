#include <doctest.h>

#include "cokflag/bitmat.hpp"
#include "cokflag/modmat.hpp"
#include "cokflag/rng.hpp"

using namespace cokflag;

namespace {

MatrixMod random_matrix(const RingSpec& ring, std::size_t rows, std::size_t cols, Rng& rng) {
    MatrixMod m(ring, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rng.bounded(ring.modulus);
    return m;
}

// Random unimodular matrix: elementary row operations applied to I.
MatrixMod random_unimodular(const RingSpec& ring, std::size_t n, Rng& rng) {
    MatrixMod m = MatrixMod::identity(ring, n);
    for (std::size_t step = 0; step < 4 * n; ++step) {
        std::size_t i = rng.bounded(n), j = rng.bounded(n);
        if (i == j) continue;
        std::uint64_t f = rng.bounded(ring.modulus);
        for (std::size_t c = 0; c < n; ++c) m.at(i, c) = ring.add(m.at(i, c), ring.mul(f, m.at(j, c)));
    }
    return m;
}

MatrixMod schoolbook_mul(const MatrixMod& a, const MatrixMod& b) {
    MatrixMod c(a.ring(), a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc = a.ring().add(acc, a.ring().mul(a.at(i, k), b.at(k, j)));
            c.at(i, j) = acc;
        }
    return c;
}

}  // namespace

TEST_CASE("snf on fixed examples") {
    RingSpec r32 = RingSpec::make(2, 5);
    MatrixMod id = MatrixMod::identity(r32, 3);
    SnfResult s = snf(id);
    CHECK(s.valuations == std::vector<std::uint32_t>{0, 0, 0});
    CHECK(s.U == MatrixMod::identity(r32, 3));
    CHECK(s.V == MatrixMod::identity(r32, 3));

    MatrixMod d(r32, 2, 2);
    d.at(0, 0) = 2;
    d.at(1, 1) = 6;
    CHECK(snf(d).valuations == std::vector<std::uint32_t>{1, 1});

    RingSpec r9 = RingSpec::make(3, 2);
    MatrixMod z(r9, 2, 2);
    CHECK(snf(z).valuations == std::vector<std::uint32_t>{2, 2});
}

TEST_CASE("cokernel_type examples") {
    RingSpec r32 = RingSpec::make(2, 5);
    CHECK(cokernel_type(MatrixMod::identity(r32, 4)).type == Partition{});
    MatrixMod d(r32, 2, 2);
    d.at(0, 0) = 2;
    d.at(1, 1) = 6;
    CokernelType ct = cokernel_type(d);
    CHECK(!ct.saturated);
    CHECK(ct.type == Partition{1, 1});
    RingSpec r8 = RingSpec::make(2, 3);
    MatrixMod z(r8, 1, 1);
    CHECK(cokernel_type(z).saturated);
}

TEST_CASE("snf transform invariants on the (p,N,n) grid") {
    // Per-cell count trimmed here; the acceptance suite runs the full 2000
    // randomized transform checks.
    Rng rng(7, 0);
    for (std::uint64_t p : {2ull, 3ull})
        for (std::uint32_t N : {4u, 8u})
            for (std::size_t n = 1; n <= 8; ++n) {
                RingSpec ring = RingSpec::make(p, N);
                for (int rep = 0; rep < 30; ++rep) {
                    MatrixMod m = random_matrix(ring, n, n, rng);
                    SnfResult s = snf(m);
                    MatrixMod umv = mat_mul(mat_mul(s.U, m), s.V);
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < n; ++j) {
                            std::uint64_t expect =
                                i == j ? ring.pow_p(s.valuations[i]) % ring.modulus : 0;
                            CHECK(umv.at(i, j) == expect);
                        }
                    CHECK(is_unimodular(s.U));
                    CHECK(is_unimodular(s.V));
                    for (std::size_t i = 1; i < n; ++i)
                        CHECK(s.valuations[i - 1] <= s.valuations[i]);
                }
            }
}

TEST_CASE("cokernel_type unimodular invariance and precision monotonicity") {
    Rng rng(11, 0);
    for (std::uint64_t p : {2ull, 3ull}) {
        RingSpec ring = RingSpec::make(p, 4);
        RingSpec wider = RingSpec::make(p, 6);
        for (int rep = 0; rep < 120; ++rep) {
            std::size_t n = 1 + rng.bounded(6);
            MatrixMod m = random_matrix(ring, n, n, rng);
            CokernelType base = cokernel_type(m);
            MatrixMod u = random_unimodular(ring, n, rng);
            MatrixMod v = random_unimodular(ring, n, rng);
            CokernelType moved = cokernel_type(mat_mul(u, mat_mul(m, v)));
            CHECK(base.saturated == moved.saturated);
            if (!base.saturated) CHECK(base.type == moved.type);
            // Same entries read at higher precision: types agree whenever the
            // narrow read-off was not saturated.
            if (!base.saturated) {
                MatrixMod lifted(wider, n, n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) lifted.at(i, j) = m.at(i, j);
                CokernelType wide = cokernel_type(lifted);
                CHECK(!wide.saturated);
                CHECK(wide.type == base.type);
            }
        }
    }
}

TEST_CASE("|cok| multiplicativity at the partition level") {
    Rng rng(13, 0);
    RingSpec ring = RingSpec::make(2, 10);
    int used = 0;
    for (int rep = 0; rep < 300 && used < 120; ++rep) {
        std::size_t n = 2 + rng.bounded(4);
        MatrixMod a = random_matrix(ring, n, n, rng);
        MatrixMod b = random_matrix(ring, n, n, rng);
        CokernelType ca = cokernel_type(a), cb = cokernel_type(b),
                     cab = cokernel_type(mat_mul(a, b));
        if (ca.saturated || cb.saturated || cab.saturated) continue;
        ++used;
        CHECK(cab.type.size() == ca.type.size() + cb.type.size());
    }
    CHECK(used >= 100);
}

TEST_CASE("product_chain matches schoolbook and handles the identity") {
    Rng rng(17, 0);
    RingSpec ring = RingSpec::make(2, 3);
    MatrixMod a = random_matrix(ring, 2, 2, rng);
    std::vector<MatrixMod> one{a};
    CHECK(product_chain(one).size() == 1);
    CHECK(product_chain(one)[0] == a);

    MatrixMod i2 = MatrixMod::identity(ring, 2);
    std::vector<MatrixMod> two{i2, a};
    auto chain = product_chain(two);
    CHECK(chain[1] == a);

    for (int rep = 0; rep < 50; ++rep) {
        MatrixMod x = random_matrix(ring, 2, 2, rng);
        MatrixMod y = random_matrix(ring, 2, 2, rng);
        std::vector<MatrixMod> ms{x, y};
        CHECK(product_chain(ms)[1] == schoolbook_mul(x, y));
    }
    RingSpec r8 = RingSpec::make(2, 8);
    for (int rep = 0; rep < 5; ++rep) {
        MatrixMod x = random_matrix(r8, 17, 17, rng);
        MatrixMod y = random_matrix(r8, 17, 17, rng);
        CHECK(mat_mul(x, y) == schoolbook_mul(x, y));
    }
    MatrixMod wrong(RingSpec::make(3, 2), 2, 2);
    std::vector<MatrixMod> bad{a, wrong};
    CHECK_THROWS_AS(product_chain(bad), std::invalid_argument);
}

TEST_CASE("rank_mod_p basics") {
    RingSpec r2 = RingSpec::make(2, 1);
    CHECK(rank_mod_p(MatrixMod::identity(r2, 5)) == 5);
    CHECK(rank_mod_p(MatrixMod(r2, 4, 4)) == 0);
    MatrixMod m(r2, 2, 2);
    m.at(0, 0) = m.at(0, 1) = m.at(1, 0) = m.at(1, 1) = 1;
    CHECK(rank_mod_p(m) == 1);
}

TEST_CASE("bit matrix rank and multiply agree with the generic path") {
    Rng rng(23, 0);
    RingSpec r2 = RingSpec::make(2, 1);
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t n = 1 + rng.bounded(70);
        BitMatrix a(n, n), b(n, n);
        MatrixMod ga(r2, n, n), gb(r2, n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                bool x = rng.bounded(2), y = rng.bounded(2);
                a.set(i, j, x);
                b.set(i, j, y);
                ga.at(i, j) = x;
                gb.at(i, j) = y;
            }
        CHECK(bit_rank(a) == rank_mod_p(ga));
        BitMatrix ab = bit_mul(a, b);
        MatrixMod gab = mat_mul(ga, gb);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(std::uint64_t(ab.get(i, j)) == gab.at(i, j));
    }
}

TEST_CASE("ring guard rejects oversized moduli") {
    CHECK_THROWS_AS(RingSpec::make(2, 64), std::invalid_argument);
    CHECK_NOTHROW(RingSpec::make(2, 62));
    CHECK_THROWS_AS(cokernel_type(MatrixMod(RingSpec::make(2, 3), 2, 3)), std::invalid_argument);
}

TEST_CASE("matrix json dump") {
    RingSpec r = RingSpec::make(3, 2);
    MatrixMod m(r, 1, 2);
    m.at(0, 0) = 4;
    m.at(0, 1) = 7;
    CHECK(m.to_json() == "{\"p\":3,\"N\":2,\"rows\":1,\"cols\":2,\"entries\":[4,7]}");
}
