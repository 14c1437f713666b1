#include <doctest.h>

#include "cokflag/group.hpp"
#include "cokflag/partition.hpp"

using namespace cokflag;

TEST_CASE("conjugate examples") {
    CHECK(conjugate(Partition{3, 1}) == Partition{2, 1, 1});
    CHECK(conjugate(Partition{}) == Partition{});
    CHECK(conjugate(Partition{1, 1, 1}) == Partition{3});
}

TEST_CASE("conjugate is an involution up to size 12") {
    for (std::uint64_t n = 0; n <= 12; ++n)
        for (const Partition& la : partitions_of(n)) {
            CHECK(conjugate(conjugate(la)) == la);
            CHECK(conjugate(la).size() == la.size());
        }
}

TEST_CASE("normalization sorts and strips zeros") {
    CHECK(Partition{0, 2, 1, 0} == Partition{2, 1});
    CHECK(Partition{0} == Partition{});
}

TEST_CASE("q_pochhammer examples and ratio property") {
    CHECK(q_pochhammer(2, 0) == Rat(1));
    CHECK(q_pochhammer(2, 1) == Rat(1, 2));
    CHECK(q_pochhammer(2, 2) == Rat(3, 8));
    for (std::uint64_t p : {2ull, 3ull, 5ull})
        for (int m = 1; m <= 10; ++m) {
            Rat ratio = q_pochhammer(p, m) / q_pochhammer(p, m - 1);
            CHECK(ratio == Rat(int_pow(p, m) - 1, int_pow(p, m)));
        }
}

TEST_CASE("gaussian binomial examples and symmetry") {
    CHECK(gaussian_binomial(2, 2, 1) == Rat(3, 2));
    CHECK(gaussian_binomial(3, 5, 0) == Rat(1));
    CHECK(gaussian_binomial(2, 1, 2) == 0);
    CHECK(gaussian_binomial(2, 3, -1) == 0);
    for (std::uint64_t p : {2ull, 3ull})
        for (int k = 0; k <= 8; ++k)
            for (int l = 0; l <= k; ++l)
                CHECK(gaussian_binomial(p, k, l) == gaussian_binomial(p, k, k - l));
}

TEST_CASE("cohen_lenstra_constant truncation") {
    TruncatedProduct c2 = cohen_lenstra_constant(2, Rat(1, 1000000));
    CHECK(to_double(c2.value) == doctest::Approx(0.2887880951).epsilon(1e-6));
    TruncatedProduct c3 = cohen_lenstra_constant(3, Rat(1, 1000000));
    CHECK(to_double(c3.value) == doctest::Approx(0.5601260779).epsilon(1e-6));
    // Two truncation depths agree within the certified error.
    TruncatedProduct finer = cohen_lenstra_constant(2, Rat(1, 1000000000));
    CHECK(rat_abs(finer.value - c2.value) <= c2.error + finer.error);
    // Large prime: first factor dominates.
    TruncatedProduct big = cohen_lenstra_constant(1000003, Rat(1, 1000));
    CHECK(big.value > Rat(1) - Rat(2, 1000003));
    CHECK(big.value < 1);
}

TEST_CASE("group sizes") {
    CHECK(group_order(Partition{1, 1}, 2) == 4);
    CHECK(group_order(Partition{}, 7) == 1);
    CHECK(group_order(Partition{2}, 3) == 9);
}

TEST_CASE("aut_order closed formula on known cases") {
    CHECK(aut_order(Partition{1, 1}, 2) == 6);
    CHECK(aut_order(Partition{1}, 5) == 4);
    CHECK(aut_order(Partition{2}, 3) == 6);
    CHECK(aut_order(Partition{2, 1}, 2) == 8);
    CHECK(aut_order(Partition{}, 2) == 1);
}

TEST_CASE("alt2_order matches the gcd decomposition for |lambda| <= 8") {
    CHECK(alt2_order(Partition{1, 1}, 2) == 2);
    CHECK(alt2_order(Partition{5}, 2) == 1);
    CHECK(alt2_order(Partition{2, 1}, 3) == 3);
    for (std::uint64_t p : {2ull, 3ull})
        for (std::uint64_t n = 0; n <= 8; ++n)
            for (const Partition& la : partitions_of(n)) {
                // wedge^2(sum Z/a_i) = sum_{i<j} Z/gcd(a_i, a_j).
                Int expect = 1;
                for (std::size_t i = 0; i < la.length(); ++i)
                    for (std::size_t j = i + 1; j < la.length(); ++j)
                        expect *= int_pow(p, std::min(la.parts()[i], la.parts()[j]));
                CHECK(alt2_order(la, p) == expect);
            }
}

TEST_CASE("GroupType basics") {
    GroupType g({{2, Partition{3, 1}}, {3, Partition{1}}});
    CHECK(g.order() == 48);
    CHECK(g.to_string() == "{\"2\":[3,1],\"3\":[1]}");
    CHECK(g.at(5) == Partition{});
    GroupType trivial;
    CHECK(trivial.order() == 1);
    CHECK(trivial.trivial());
    // Empty per-prime parts are dropped.
    CHECK(GroupType({{2, Partition{}}}) == trivial);
}

TEST_CASE("dominance order") {
    CHECK(dominates(Partition{2}, Partition{1, 1}));
    CHECK(!dominates(Partition{1, 1}, Partition{2}));
    CHECK(dominates(Partition{2, 1}, Partition{2, 1}));
    CHECK(!dominates(Partition{3}, Partition{1, 1}));  // different sizes
}
