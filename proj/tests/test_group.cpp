#include <doctest.h>

#include <set>

#include "cokflag/group.hpp"
#include "cokflag/rng.hpp"

using namespace cokflag;

TEST_CASE("span examples") {
    GroupCache::instance().clear();
    const ExplicitGroup& v2 = GroupCache::instance().group(2, Partition{1, 1});
    CHECK(span(v2, {}).order == 1);
    std::vector<Element> gens{{1, 0}, {1, 1}};
    CHECK(span(v2, gens).order == 4);

    const ExplicitGroup& g42 = GroupCache::instance().group(2, Partition{2, 1});
    std::vector<Element> one{{2, 1}};
    Subgroup h = span(g42, one);
    CHECK(h.order == 2);
    CHECK(subgroup_type(g42, h) == Partition{1});
}

TEST_CASE("span canonical basis is generator-independent") {
    Rng rng(3, 0);
    for (const Partition& la : {Partition{1, 1}, Partition{2, 1}, Partition{3, 1, 1}, Partition{2, 2}}) {
        const ExplicitGroup& g = GroupCache::instance().group(2, la);
        for (int rep = 0; rep < 40; ++rep) {
            std::vector<Element> gens;
            for (int i = 0; i < 3; ++i) gens.push_back(g.element_at(rng.bounded(g.order_u64())));
            Subgroup h = span(g, gens);
            // Re-span from all elements and from a shuffled generator list.
            std::vector<Element> all = subgroup_elements(g, h);
            CHECK(span(g, all) == h);
            std::rotate(gens.begin(), gens.begin() + 1, gens.end());
            CHECK(span(g, gens) == h);
            CHECK(std::uint64_t(all.size()) == h.order);
        }
    }
}

TEST_CASE("subgroup and quotient types") {
    const ExplicitGroup& g = GroupCache::instance().group(2, Partition{2, 1});
    CHECK(subgroup_type(g, span(g, {})) == Partition{});
    std::vector<Element> whole{{1, 0}, {0, 1}};
    CHECK(subgroup_type(g, span(g, whole)) == Partition{2, 1});
    CHECK(quotient_type(g, span(g, {})) == Partition{2, 1});
    CHECK(quotient_type(g, span(g, whole)) == Partition{});
    std::vector<Element> twozero{{2, 0}};
    CHECK(quotient_type(g, span(g, twozero)) == Partition{1, 1});
    std::vector<Element> zeroone{{0, 1}};
    CHECK(quotient_type(g, span(g, zeroone)) == Partition{2});
}

TEST_CASE("subgroup_type is monotone under added generators") {
    Rng rng(5, 0);
    const ExplicitGroup& g = GroupCache::instance().group(2, Partition{3, 2});
    for (int rep = 0; rep < 60; ++rep) {
        std::vector<Element> gens{g.element_at(rng.bounded(g.order_u64()))};
        Subgroup h1 = span(g, gens);
        gens.push_back(g.element_at(rng.bounded(g.order_u64())));
        Subgroup h2 = span(g, gens);
        CHECK(h2.order % h1.order == 0);
        CHECK(h2.order >= h1.order);
    }
}

TEST_CASE("enumerate_subgroups counts") {
    auto& cache = GroupCache::instance();
    CHECK(cache.lattice(2, Partition{1, 1}).size() == 5);
    CHECK(cache.lattice(2, Partition{2}).size() == 3);
    CHECK(cache.lattice(2, Partition{}).size() == 1);
    CHECK(cache.lattice(2, Partition{2, 1}).size() == 8);   // Z/4 + Z/2
    CHECK(cache.lattice(3, Partition{1, 1}).size() == 6);   // 4 lines + 0 + all
    CHECK(cache.lattice(2, Partition{1, 1, 1}).size() == 16);
}

TEST_CASE("enumerate_subgroups bound") {
    EnumerationBounds tight;
    tight.max_group_order = 8;
    const ExplicitGroup& g = GroupCache::instance().group(2, Partition{2, 2});
    CHECK_THROWS_AS(enumerate_subgroups(g, tight), BoundExceeded);
}

TEST_CASE("hall numbers") {
    CHECK(hall_number(2, Partition{1, 1}, Partition{1}, Partition{1}) == 3);
    CHECK(hall_number(2, Partition{2}, Partition{1}, Partition{1}) == 1);
    CHECK(hall_number(2, Partition{2, 1}, Partition{}, Partition{2, 1}) == 1);
    CHECK(hall_number(3, Partition{1, 1}, Partition{1}, Partition{1}) == 4);
    CHECK(hall_number(2, Partition{1, 1}, Partition{1}, Partition{2}) == 0);  // size mismatch
}

TEST_CASE("hall symmetry for |nu| <= 5") {
    for (std::uint64_t p : {2ull, 3ull})
        for (std::uint64_t sz = 0; sz <= (p == 2 ? 5u : 3u); ++sz)
            for (const Partition& nu : partitions_of(sz))
                for (std::uint64_t s1 = 0; s1 <= sz; ++s1)
                    for (const Partition& mu : partitions_of(s1))
                        for (const Partition& la : partitions_of(sz - s1))
                            CHECK(hall_number(p, nu, mu, la) == hall_number(p, nu, la, mu));
}

TEST_CASE("enumerate_automorphisms counts match the closed formula") {
    for (std::uint64_t p : {2ull, 3ull})
        for (std::uint64_t sz = 0; sz <= (p == 2 ? 4u : 3u); ++sz)
            for (const Partition& la : partitions_of(sz)) {
                const ExplicitGroup& g = GroupCache::instance().group(p, la);
                AutList auts = enumerate_automorphisms(g);
                CHECK(Int(static_cast<unsigned long>(auts.size())) == aut_order(la, p));
            }
}

TEST_CASE("automorphism application preserves structure") {
    const ExplicitGroup& g = GroupCache::instance().group(2, Partition{2, 1});
    const AutList& auts = GroupCache::instance().automorphisms(2, Partition{2, 1});
    Rng rng(9, 0);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t ai = rng.bounded(auts.size());
        Element x = g.element_at(rng.bounded(g.order_u64()));
        Element y = g.element_at(rng.bounded(g.order_u64()));
        Element lhs = apply_automorphism(g, auts, ai, g.add(x, y));
        Element rhs = g.add(apply_automorphism(g, auts, ai, x), apply_automorphism(g, auts, ai, y));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("aut order via Moebius surjection counting") {
    for (std::uint64_t p : {2ull, 3ull})
        for (std::uint64_t sz = 0; sz <= 4; ++sz)
            for (const Partition& la : partitions_of(sz))
                CHECK(aut_order_mobius(p, la) == aut_order(la, p));
}

TEST_CASE("surjection counts: enumeration vs Moebius inclusion-exclusion") {
    auto& cache = GroupCache::instance();
    for (std::uint64_t p : {2ull, 3ull})
        for (std::uint64_t s1 = 0; s1 <= 3; ++s1)
            for (const Partition& la : partitions_of(s1))
                for (std::uint64_t s2 = 0; s2 <= 3; ++s2)
                    for (const Partition& mu : partitions_of(s2)) {
                        const ExplicitGroup& src = cache.group(p, la);
                        const ExplicitGroup& tgt = cache.group(p, mu);
                        Int direct = count_surjections_with_flag(src, {}, tgt, {});
                        CHECK(direct == count_surjections_mobius(p, la, mu));
                    }
}

TEST_CASE("canonicalize_flag orbit classes") {
    auto& cache = GroupCache::instance();
    // (Z/2)^2: all three order-2 subgroups form one class.
    {
        const ExplicitGroup& g = cache.group(2, Partition{1, 1});
        std::set<std::string> ids;
        for (const LatticeEntry& e : cache.lattice(2, Partition{1, 1})) {
            if (e.subgroup.order != 2) continue;
            std::vector<Subgroup> chain{e.subgroup};
            ids.insert(canonicalize_flag(g, chain).orbit);
        }
        CHECK(ids.size() == 1);
    }
    // Z/4 + Z/2: order-2 subgroups fall into exactly 2 classes, split by
    // quotient type.
    {
        const ExplicitGroup& g = cache.group(2, Partition{2, 1});
        std::map<std::string, Partition> cls;
        for (const LatticeEntry& e : cache.lattice(2, Partition{2, 1})) {
            if (e.subgroup.order != 2) continue;
            std::vector<Subgroup> chain{e.subgroup};
            cls[canonicalize_flag(g, chain).orbit] = e.quotient;
        }
        CHECK(cls.size() == 2);
        std::set<Partition> quotients;
        for (auto& [k, q] : cls) quotients.insert(q);
        CHECK(quotients == std::set<Partition>{Partition{1, 1}, Partition{2}});
    }
    // Chain of trivial subgroups: class determined by nu alone.
    {
        const ExplicitGroup& g = cache.group(2, Partition{2});
        std::vector<Subgroup> chain{span(g, {})};
        FlagClass c = canonicalize_flag(g, chain);
        CHECK(c.nu == Partition{2});
    }
}

TEST_CASE("flag_aut_order examples and orbit-stabilizer") {
    auto& cache = GroupCache::instance();
    const ExplicitGroup& g = cache.group(2, Partition{1, 1});
    std::vector<Subgroup> trivial_chain{span(g, {})};
    CHECK(flag_aut_order(g, trivial_chain) == 6);
    std::vector<Element> e1{{1, 0}};
    std::vector<Subgroup> chain{span(g, e1)};
    CHECK(flag_aut_order(g, chain) == 2);

    const ExplicitGroup& z2 = cache.group(2, Partition{1});
    std::vector<Subgroup> zc{span(z2, {})};
    CHECK(flag_aut_order(z2, zc) == 1);

    // Orbit-stabilizer across every subgroup of a few small groups.
    for (std::uint64_t p : {2ull, 3ull})
        for (const Partition& nu : {Partition{1, 1}, Partition{2}, Partition{2, 1}}) {
            const ExplicitGroup& gg = cache.group(p, nu);
            Int aut = aut_order(nu, p);
            for (const LatticeEntry& e : cache.lattice(p, nu)) {
                std::vector<Subgroup> c{e.subgroup};
                OrbitInfo info = cache.flag_orbit(p, nu, c);
                CHECK(flag_aut_order(gg, c) * Int(static_cast<unsigned long>(info.orbit_size)) ==
                      aut);
            }
        }
}

TEST_CASE("count_injective_flags") {
    auto& cache = GroupCache::instance();
    const ExplicitGroup& v2 = cache.group(2, Partition{1, 1});
    CHECK(count_injective_flags(v2, 1) == 1);
    CHECK(count_injective_flags(v2, 2) == 5);
    // n_3 = number of nested pairs H1 <= H2 <= G: sum over subgroups of
    // their subgroup counts = 1 + 3*2 + 5 = 12.
    CHECK(count_injective_flags(v2, 3) == 12);
    const ExplicitGroup& z2 = cache.group(2, Partition{1});
    CHECK(count_injective_flags(z2, 2) == 2);
    // n_2(G) = #subgroups for assorted groups.
    for (const Partition& la : {Partition{2, 1}, Partition{3}, Partition{1, 1, 1}}) {
        const ExplicitGroup& g = cache.group(2, la);
        CHECK(count_injective_flags(g, 2) ==
              Int(static_cast<unsigned long>(cache.lattice(2, la).size())));
    }
}

TEST_CASE("count_surjections_with_flag examples") {
    auto& cache = GroupCache::instance();
    const ExplicitGroup& z2 = cache.group(2, Partition{1});
    const ExplicitGroup& v2 = cache.group(2, Partition{1, 1});
    const ExplicitGroup& triv = cache.group(2, Partition{});

    // source = target = (Z/2, chain=(0)) -> only the identity.
    std::vector<Subgroup> zc{span(z2, {})};
    CHECK(count_surjections_with_flag(z2, zc, z2, zc) == 1);

    // source (Z/2)^2 with chain <e1>, target Z/2 with chain (Z/2): the image
    // of e1 must be 1 (forcing surjectivity), the image of e2 is free.
    std::vector<Element> e1{{1, 0}};
    std::vector<Subgroup> src_chain{span(v2, e1)};
    std::vector<Element> whole{{1}};
    std::vector<Subgroup> tgt_chain{span(z2, whole)};
    CHECK(count_surjections_with_flag(v2, src_chain, z2, tgt_chain) == 2);

    // Trivial source cannot surject onto a nontrivial target.
    CHECK(count_surjections_with_flag(triv, {}, z2, {}) == 0);

    // Budget guard.
    EnumerationBounds tiny;
    tiny.max_hom_candidates = 2;
    CHECK_THROWS_AS(count_surjections_with_flag(v2, {}, v2, {}, tiny), BoundExceeded);
}

TEST_CASE("orbit sum over classes equals the hall number") {
    auto& cache = GroupCache::instance();
    for (const Partition& nu : {Partition{2, 1}, Partition{1, 1, 1}}) {
        std::map<std::pair<Partition, Partition>, std::uint64_t> orbit_sum;
        std::map<std::string, std::uint64_t> orbit_seen;
        for (const LatticeEntry& e : cache.lattice(2, nu)) {
            std::vector<Subgroup> c{e.subgroup};
            OrbitInfo info = cache.flag_orbit(2, nu, c);
            if (orbit_seen.insert({info.orbit_id, info.orbit_size}).second)
                orbit_sum[{e.type, e.quotient}] += info.orbit_size;
        }
        for (const auto& [key, total] : orbit_sum)
            CHECK(Int(static_cast<unsigned long>(total)) ==
                  hall_number(2, nu, key.first, key.second));
    }
}

TEST_CASE("subgroup json-ish key is deterministic") {
    const ExplicitGroup& g = GroupCache::instance().group(2, Partition{1, 1});
    std::vector<Element> e1{{1, 0}};
    Subgroup h = span(g, e1);
    CHECK(h.key() == span(g, e1).key());
    FlagClass c{2, Partition{2, 1}, "x"};
    CHECK(c.to_string() == "{\"p\":2,\"nu\":[2,1],\"orbit\":\"x\"}");
}
