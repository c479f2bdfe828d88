#include <doctest.h>

#include <cmath>
#include <vector>

#include "brw/errors.hpp"
#include "brw/gibbs.hpp"
#include "oracles.hpp"

using namespace brw;

namespace {

oracle::Inc wrap(const IncrementOracle& field) {
    return [&field](NodeRef node) { return field.increment(node); };
}

} // namespace

TEST_CASE("gibbs parameters are validated") {
    CHECK_THROWS_AS(GibbsParams({0, 1.0, 1}).validate(), DomainError);
    CHECK_THROWS_AS(GibbsParams({kMaxDepth + 1, 1.0, 1}).validate(), DomainError);
    CHECK_THROWS_AS(GibbsParams({5, -0.1, 1}).validate(), DomainError);
    CHECK_THROWS_AS(GibbsParams({5, std::nan(""), 1}).validate(), DomainError);
    CHECK_NOTHROW(GibbsParams({5, 0.0, 1}).validate());
}

TEST_CASE("free energy limit has the two-phase closed form") {
    CHECK(free_energy_limit(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(free_energy_limit(0.5) ==
          doctest::Approx(std::log(2.0) + 0.125).epsilon(1e-15));
    CHECK(free_energy_limit(kBetaCritical) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(free_energy_limit(2.0 * kBetaCritical) ==
          doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));
    // Continuity across the transition.
    CHECK(free_energy_limit(kBetaCritical - 1e-9) ==
          doctest::Approx(free_energy_limit(kBetaCritical + 1e-9)).epsilon(1e-8));
    // Monotone in beta.
    double prev = free_energy_limit(0.0);
    for (double b = 0.1; b < 3.0; b += 0.1) {
        CHECK(free_energy_limit(b) >= prev);
        prev = free_energy_limit(b);
    }
    CHECK_THROWS_AS(free_energy_limit(-1.0), DomainError);
}

TEST_CASE("table and streaming agree on log Z") {
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        const GibbsParams p{10, 0.7, seed};
        const auto table = PartitionTable::build(p);
        CHECK(table.log_partition() ==
              doctest::Approx(log_partition_streaming(p)).epsilon(1e-13));
    }
}

TEST_CASE("zero temperature collapses to counting") {
    const GibbsParams p{12, 0.0, 5};
    const auto table = PartitionTable::build(p);
    CHECK(table.log_partition() ==
          doctest::Approx(12.0 * std::log(2.0)).epsilon(1e-14));

    const OverlapLaw law = overlap_law_exact(table);
    for (int d = 0; d <= 12; ++d)
        CHECK(law.tail[d] == doctest::Approx(std::pow(0.5, d)).epsilon(1e-12));
    CHECK(law.mean() ==
          doctest::Approx((1.0 - std::pow(0.5, 12)) / 12.0).epsilon(1e-13));
}

TEST_CASE("log Z matches leaf enumeration") {
    for (std::uint64_t seed : {3u, 17u, 1001u}) {
        const IncrementOracle field({8, seed});
        const auto table = PartitionTable::build({8, 1.3, seed});
        const double expect = oracle::log_partition(8, 1.3, wrap(field));
        CHECK(table.log_partition() == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("node masses match leaf enumeration") {
    const int depth = 8;
    const std::uint64_t seed = 31;
    const double beta = 1.1;
    const IncrementOracle field({depth, seed});
    const auto table = PartitionTable::build({depth, beta, seed});
    const auto masses = oracle::leaf_masses(depth, beta, wrap(field));

    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{100},
                          std::size_t{255}})
        CHECK(table.mass({depth, i}) == doctest::Approx(masses[i]).epsilon(1e-11));

    // Interior mass is the sum over descendant leaves.
    for (int d : {1, 3, 5}) {
        const std::size_t i = (std::size_t{1} << d) - 2;
        double expect = 0.0;
        const int drop = depth - d;
        for (std::size_t j = i << drop; j < ((i + 1) << drop); ++j)
            expect += masses[j];
        CHECK(table.mass({d, i}) == doctest::Approx(expect).epsilon(1e-11));
    }

    CHECK(table.mass({0, 0}) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("masses are additive across the tree") {
    const auto table = PartitionTable::build({10, 1.7, 77});
    table.sweep_log_masses([&](int d, const std::vector<double>& logm) {
        double s = 0.0;
        for (double lm : logm) s += std::exp(lm);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        (void)d;
    });
    for (std::size_t i : {std::size_t{0}, std::size_t{9}, std::size_t{31}}) {
        const NodeRef v{5, i};
        CHECK(table.mass(v) ==
              doctest::Approx(table.mass(v.child(0)) + table.mass(v.child(1)))
                  .epsilon(1e-12));
    }
}

TEST_CASE("overlap law matches pair enumeration") {
    for (std::uint64_t seed : {5u, 23u}) {
        const int depth = 8;
        const double beta = 1.5;
        const IncrementOracle field({depth, seed});
        const auto table = PartitionTable::build({depth, beta, seed});
        const auto masses = oracle::leaf_masses(depth, beta, wrap(field));
        const auto tail = oracle::overlap_tail(depth, masses);

        const OverlapLaw law = overlap_law_exact(table);
        for (int d = 0; d <= depth; ++d)
            CHECK(law.tail[d] == doctest::Approx(tail[d]).epsilon(1e-10));

        double mean = 0.0;
        for (int d = 1; d <= depth; ++d) mean += tail[d];
        CHECK(law.mean() == doctest::Approx(mean / depth).epsilon(1e-10));
    }
}

TEST_CASE("overlap law summaries work on a hand-made law") {
    OverlapLaw law;
    law.depth = 2;
    law.tail = {1.0, 0.6, 0.2};
    CHECK(law.atom(0) == doctest::Approx(0.4));
    CHECK(law.atom(1) == doctest::Approx(0.4));
    CHECK(law.atom(2) == doctest::Approx(0.2));
    CHECK_THROWS_AS(law.atom(3), DomainError);
    CHECK(law.mean() == doctest::Approx(0.4));
    CHECK(law.moment(1) == doctest::Approx(law.mean()).epsilon(1e-15));
    CHECK(law.moment(2) == doctest::Approx(0.4 * 0.25 + 0.2).epsilon(1e-15));
    CHECK(law.mass_range(-5, 99) == doctest::Approx(1.0));
    CHECK(law.mass_low() == doctest::Approx(0.4));
    CHECK(law.mass_high() == doctest::Approx(0.2));
    CHECK(law.mass_low() + law.mass_mid() + law.mass_high() ==
          doctest::Approx(1.0));
}

TEST_CASE("bin edges sit at quarter and three-quarter overlap") {
    OverlapLaw law;
    law.depth = 12;
    law.tail.assign(13, 0.0);
    law.tail[0] = 1.0;
    // All mass at overlap 3/12 = 1/4: belongs to the low bin.
    for (int d = 1; d <= 3; ++d) law.tail[d] = 1.0;
    CHECK(law.mass_low() == doctest::Approx(1.0));
    CHECK(law.mass_mid() == doctest::Approx(0.0));
    // All mass at overlap 9/12 = 3/4: belongs to the high bin.
    for (int d = 4; d <= 9; ++d) law.tail[d] = 1.0;
    CHECK(law.mass_high() == doctest::Approx(1.0));
    CHECK(law.mass_mid() == doctest::Approx(0.0));
}

TEST_CASE("averaging laws checks depths and averages tails") {
    OverlapLaw a, b;
    a.depth = b.depth = 1;
    a.tail = {1.0, 0.2};
    b.tail = {1.0, 0.6};
    const OverlapLaw avg = average_overlap_laws({a, b});
    CHECK(avg.tail[1] == doctest::Approx(0.4));
    OverlapLaw c;
    c.depth = 2;
    c.tail = {1.0, 0.5, 0.1};
    CHECK_THROWS_AS(average_overlap_laws({a, c}), DomainError);
    CHECK_THROWS_AS(average_overlap_laws({}), DomainError);
}

TEST_CASE("mean energy matches leaf enumeration") {
    for (double beta : {0.4, 1.3, 2.5}) {
        const int depth = 8;
        const std::uint64_t seed = 111;
        const IncrementOracle field({depth, seed});
        const auto table = PartitionTable::build({depth, beta, seed});
        const auto masses = oracle::leaf_masses(depth, beta, wrap(field));
        const double expect = oracle::mean_energy(depth, wrap(field), masses);
        CHECK(table.mean_energy() == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("mixed overlap moments match triple enumeration") {
    const int depth = 6;
    const std::uint64_t seed = 19;
    const double beta = 1.8;
    const IncrementOracle field({depth, seed});
    const auto table = PartitionTable::build({depth, beta, seed});
    const auto masses = oracle::leaf_masses(depth, beta, wrap(field));
    for (auto [p1, p2] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 3}}) {
        const double expect = oracle::mixed_moment(depth, masses, p1, p2);
        CHECK(table.mixed_overlap_moment(p1, p2) ==
              doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK_THROWS_AS(table.mixed_overlap_moment(0, 1), DomainError);
}

TEST_CASE("path sums and subtree values are consistent") {
    const int depth = 9;
    const std::uint64_t seed = 404;
    const IncrementOracle field({depth, seed});
    const auto table = PartitionTable::build({depth, 0.9, seed});
    const NodeRef leaf{depth, 123};
    CHECK(table.path_sum(leaf) ==
          doctest::Approx(field.path_sum(leaf)).epsilon(1e-13));
    CHECK(table.subtree_value(leaf) == 0.0);
    CHECK(table.subtree_value({0, 0}) == table.log_partition());
    CHECK_THROWS_AS(table.increment({0, 0}), DomainError);
    CHECK_THROWS_AS(table.subtree_value({depth + 1, 0}), DomainError);
}

TEST_CASE("leaf sampling reproduces the exact masses") {
    const int depth = 4;
    const auto table = PartitionTable::build({depth, 0.6, 321});
    std::vector<double> expect(16);
    for (std::size_t i = 0; i < 16; ++i) expect[i] = table.mass({depth, i});

    const SplitMix64 gen(888);
    const std::size_t draws = 20000;
    std::vector<std::size_t> counts(16, 0);
    for (std::size_t t = 0; t < draws; ++t) {
        const NodeRef leaf = table.sample_leaf(gen, t);
        REQUIRE(leaf.depth == depth);
        ++counts[leaf.index];
    }
    double chisq = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        const double e = expect[i] * draws;
        chisq += (counts[i] - e) * (counts[i] - e) / e;
    }
    CHECK(chisq < 30.5779);  // chi-square 0.99 quantile, 15 degrees of freedom

    // Same draw index, same leaf; the generator state never moves.
    CHECK(table.sample_leaf(gen, 7) == table.sample_leaf(gen, 7));
    CHECK(gen.counter() == 0);
}

TEST_CASE("free energy estimates are reproducible and near the limit") {
    CHECK_THROWS_AS(free_energy(10, 0.5, 1, 1), DomainError);
    const auto a = free_energy(14, 0.5, 60, 2026, 1);
    const auto b = free_energy(14, 0.5, 60, 2026, 3);
    CHECK(a.per_replicate == b.per_replicate);
    CHECK(a.value.n == 60);
    CHECK(std::abs(a.value.mean - free_energy_limit(0.5)) < 0.05);
    CHECK(a.value.se < 0.01);
}

TEST_CASE("memory budget is enforced") {
    CHECK_THROWS_AS(PartitionTable::build({12, 1.0, 1}, 1000), ResourceError);
    CHECK_NOTHROW(PartitionTable::build({4, 1.0, 1}, 4096));
}

TEST_CASE("hand-built increments bypass the field") {
    const auto zero = PartitionTable::build_with(
        6, 1.5, [](NodeRef) { return 0.0; });
    CHECK(zero.log_partition() ==
          doctest::Approx(6.0 * std::log(2.0)).epsilon(1e-13));
    const OverlapLaw law = overlap_law_exact(zero);
    for (int d = 0; d <= 6; ++d)
        CHECK(law.tail[d] == doctest::Approx(std::pow(0.5, d)).epsilon(1e-12));

    const auto ones = PartitionTable::build_with(
        6, 0.8, [](NodeRef) { return 1.0; });
    CHECK(ones.log_partition() ==
          doctest::Approx(6.0 * (std::log(2.0) + 0.8)).epsilon(1e-12));
    CHECK(ones.mean_energy() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("streamed leader maximum matches enumeration") {
    for (std::uint64_t seed : {8u, 16u}) {
        const IncrementOracle field({8, seed});
        CHECK(leader_max_streaming(field) ==
              doctest::Approx(oracle::leader(8, wrap(field))).epsilon(1e-12));
    }
}
