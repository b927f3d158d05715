#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "labsched/neighborhoods.hpp"
#include "oracles.hpp"

using namespace labsched;
using labsched::testing::jpr_distance_naive;
using labsched::testing::random_permutation;

TEST_CASE("jpr distance: published pair, extremes, errors") {
    std::vector<SpecimenId> p1{3, 1, 6, 4, 5, 2};
    std::vector<SpecimenId> p2{3, 4, 6, 1, 5, 2};
    CHECK(jpr_distance(p1, p2) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(jpr_distance(p1, p1) == 0.0);

    std::vector<SpecimenId> rev(p1.rbegin(), p1.rend());
    CHECK(jpr_distance(p1, rev) == doctest::Approx(1.0));

    std::vector<SpecimenId> other{1, 2, 3, 4, 5, 7};
    CHECK_THROWS_AS(jpr_distance(p1, other), std::invalid_argument);
    CHECK_THROWS_AS(jpr_distance(std::vector<SpecimenId>{1}, std::vector<SpecimenId>{1}),
                    std::invalid_argument);
}

TEST_CASE("jpr distance agrees with the quadratic pair count") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto a = random_permutation(12, 2 * s);
        auto b = random_permutation(12, 2 * s + 1);
        CHECK(jpr_distance(a, b) == doctest::Approx(jpr_distance_naive(a, b)).epsilon(1e-15));
    }
}

TEST_CASE("jpr distance is a metric") {
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto a = random_permutation(8, 3 * s);
        auto b = random_permutation(8, 3 * s + 1);
        auto c = random_permutation(8, 3 * s + 2);
        double dab = jpr_distance(a, b);
        double dbc = jpr_distance(b, c);
        double dac = jpr_distance(a, c);
        CHECK(dab >= 0.0);
        CHECK(dab == doctest::Approx(jpr_distance(b, a)));
        CHECK((dab == 0.0) == (a == b));
        CHECK(dac <= dab + dbc + 1e-12);
    }
}

TEST_CASE("moves behave as documented") {
    SUBCASE("swap") {
        std::vector<SpecimenId> v{1, 2, 3};
        CHECK(apply_move(MoveKind::Swap, v, {0, 2}) == std::vector<SpecimenId>{3, 2, 1});
    }
    SUBCASE("insert moves the later element before the earlier one") {
        std::vector<SpecimenId> v{1, 2, 3, 4, 5};
        CHECK(apply_move(MoveKind::Insert, v, {0, 4}) == std::vector<SpecimenId>{5, 1, 2, 3, 4});
        CHECK(apply_move(MoveKind::Insert, v, {1, 3}) == std::vector<SpecimenId>{1, 4, 2, 3, 5});
    }
    SUBCASE("inverse excludes the endpoints") {
        std::vector<SpecimenId> v{1, 2, 3, 4, 5};
        CHECK(apply_move(MoveKind::Inverse, v, {0, 4}) == std::vector<SpecimenId>{1, 4, 3, 2, 5});
        // A gap of at most one element is a legal no-op.
        CHECK(apply_move(MoveKind::Inverse, v, {1, 2}) == v);
        CHECK(apply_move(MoveKind::Inverse, v, {1, 3}) == v);
    }
    SUBCASE("inclusive inverse variant") {
        std::vector<SpecimenId> v{1, 2, 3, 4, 5};
        CHECK(apply_inverse_inclusive(v, {0, 4}) == std::vector<SpecimenId>{5, 4, 3, 2, 1});
    }
    SUBCASE("block insert on contiguous blocks") {
        std::vector<SpecimenId> v{1, 2, 3, 4, 5, 6};
        BlockPartition part = split_blocks(6, 2);
        CHECK(apply_move(MoveKind::BlockInsert, v, {1, 2}, &part) ==
              std::vector<SpecimenId>{1, 2, 5, 6, 3, 4});
    }
    SUBCASE("block insert tracks scattered membership and in-block order") {
        BlockPartition part = split_blocks(6, 2);  // {1,2}{3,4}{5,6}
        std::vector<SpecimenId> scattered{3, 1, 5, 4, 2, 6};
        // Block 2 = {3,4} first appears at position 0; block 3 = {5,6} at 2.
        auto moved = apply_move(MoveKind::BlockInsert, scattered, {1, 2}, &part);
        CHECK(moved == std::vector<SpecimenId>{5, 6, 3, 1, 4, 2});
        // In-block order preserved for both blocks.
        auto pos = [&moved](SpecimenId id) {
            return std::find(moved.begin(), moved.end(), id) - moved.begin();
        };
        CHECK(pos(5) < pos(6));
        CHECK(pos(3) < pos(4));
        CHECK(pos(1) < pos(2));
    }
    SUBCASE("degenerate requests throw") {
        std::vector<SpecimenId> v{1, 2, 3};
        CHECK_THROWS_AS(apply_move(MoveKind::Swap, v, {2, 2}), std::invalid_argument);
        CHECK_THROWS_AS(apply_move(MoveKind::Swap, v, {1, 3}), std::invalid_argument);
        BlockPartition part = split_blocks(3, 3);
        CHECK_THROWS_AS(apply_move(MoveKind::BlockInsert, v, {0, 0}, &part),
                        std::invalid_argument);
    }
}

TEST_CASE("every move output is a permutation") {
    Rng rng(99);
    std::vector<SpecimenId> ref = random_permutation(17, 5);
    BlockPartition part = BlockPartition::from_sequence(ref, 4);
    for (int iter = 0; iter < 500; ++iter) {
        MoveKind kind = static_cast<MoveKind>(rng.below(4));
        std::vector<SpecimenId> moved;
        if (kind == MoveKind::BlockInsert)
            moved = apply_move(kind, ref, sample_move(kind, part.num_blocks(), rng), &part);
        else
            moved = apply_move(kind, ref, sample_move(kind, ref.size(), rng));
        std::vector<SpecimenId> sorted = moved;
        std::sort(sorted.begin(), sorted.end());
        std::vector<SpecimenId> expect(17);
        std::iota(expect.begin(), expect.end(), 1);
        CHECK(sorted == expect);
        ref = moved;  // walk on
    }
}

TEST_CASE("move sampling is uniform over unordered pairs") {
    Rng rng(7);
    SUBCASE("n = 2 always yields the single pair") {
        for (int i = 0; i < 20; ++i) {
            MoveParams mp = sample_move(MoveKind::Swap, 2, rng);
            CHECK(mp.a == 0);
            CHECK(mp.b == 1);
        }
    }
    SUBCASE("n = 5 frequencies") {
        std::map<std::pair<std::size_t, std::size_t>, int> counts;
        const int samples = 100000;
        for (int i = 0; i < samples; ++i) {
            MoveParams mp = sample_move(MoveKind::Swap, 5, rng);
            counts[{mp.a, mp.b}]++;
        }
        CHECK(counts.size() == 10);
        for (const auto& [pair, count] : counts)
            CHECK(std::abs(count / static_cast<double>(samples) - 0.1) < 0.01);
    }
    SUBCASE("three blocks yield pairs over block indices only") {
        for (int i = 0; i < 100; ++i) {
            MoveParams mp = sample_move(MoveKind::BlockInsert, 3, rng);
            CHECK(mp.b < 3);
            CHECK(mp.a < mp.b);
        }
    }
    SUBCASE("fewer than two targets is an error") {
        CHECK_THROWS_AS(sample_move(MoveKind::Swap, 1, rng), std::invalid_argument);
    }
}

TEST_CASE("block splitting") {
    BlockPartition p = split_blocks(6, 2);
    REQUIRE(p.num_blocks() == 3);
    CHECK(p.blocks[0] == std::vector<SpecimenId>{1, 2});
    CHECK(p.blocks[2] == std::vector<SpecimenId>{5, 6});

    CHECK(split_blocks(100, kDefaultBlockSize).num_blocks() == 25);

    BlockPartition r = split_blocks(7, 4);
    REQUIRE(r.num_blocks() == 2);
    CHECK(r.blocks[0].size() == 4);
    CHECK(r.blocks[1].size() == 3);
}

TEST_CASE("closed-form moments match the published table") {
    DistanceMoments swp = theoretical_moments(MoveKind::Swap, 100);
    CHECK(swp.mean == doctest::Approx(0.0134).epsilon(5e-3));
    CHECK(swp.mean == doctest::Approx(2.0 * 199 / (3.0 * 100 * 99)).epsilon(1e-15));
    CHECK(swp.variance == doctest::Approx(8.98e-5).epsilon(5e-3));

    CHECK(theoretical_moments(MoveKind::Inverse, 100).mean == doctest::Approx(0.1600).epsilon(1e-3));
    CHECK(theoretical_moments(MoveKind::Swap, 6).mean ==
          doctest::Approx(22.0 / 90.0).epsilon(1e-15));
    CHECK(theoretical_moments(MoveKind::BlockInsert, 100, 25).mean ==
          doctest::Approx(0.0280).epsilon(2e-3));

    CHECK_THROWS_AS(theoretical_moments(MoveKind::BlockInsert, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(theoretical_moments(MoveKind::BlockInsert, 100, 33), std::invalid_argument);
}

TEST_CASE("exhaustive enumeration equals the formulas exactly") {
    for (int n : {4, 6, 8}) {
        for (MoveKind kind : {MoveKind::Insert, MoveKind::Swap, MoveKind::Inverse}) {
            DistanceMoments emp = empirical_moments(kind, n, kDefaultBlockSize, 0, 0);
            DistanceMoments theory = theoretical_moments(kind, n);
            CHECK(emp.mean == doctest::Approx(theory.mean).epsilon(1e-12));
            CHECK(emp.variance == doctest::Approx(theory.variance).epsilon(1e-12));
        }
        // Two-element blocks keep n divisible by b at every tested size.
        DistanceMoments emp = empirical_moments(MoveKind::BlockInsert, n, 2, 0, 0);
        DistanceMoments theory = theoretical_moments(MoveKind::BlockInsert, n, n / 2);
        CHECK(emp.mean == doctest::Approx(theory.mean).epsilon(1e-12));
        CHECK(emp.variance == doctest::Approx(theory.variance).epsilon(1e-12));
    }
}

TEST_CASE("hand-enumerated block insert cases") {
    // Three contiguous two-element blocks on six ids: distances 8/30, 8/30, 16/30.
    DistanceMoments m = empirical_moments(MoveKind::BlockInsert, 6, 2, 0, 0);
    CHECK(m.mean == doctest::Approx(32.0 / 90.0).epsilon(1e-12));

    DistanceMoments inv6 = empirical_moments(MoveKind::Inverse, 6, kDefaultBlockSize, 0, 0);
    CHECK(inv6.mean == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("sampled moments approach the formulas") {
    DistanceMoments swp = theoretical_moments(MoveKind::Swap, 100);
    DistanceMoments mc = empirical_moments(MoveKind::Swap, 100, kDefaultBlockSize, 100000, 31);
    const double se = std::sqrt(swp.variance / 100000.0);
    CHECK(std::abs(mc.mean - swp.mean) < 5 * se);
}

TEST_CASE("perturbation ordering across neighborhoods") {
    // The full ordering INS < SWP < INB < INV needs n >= 24 (b = n/4); at
    // n = 12 the published formulas place INV below SWP.
    CHECK(theoretical_moments(MoveKind::Inverse, 12).mean <
          theoretical_moments(MoveKind::Swap, 12).mean);
    for (int n : {24, 28, 40, 100, 200, 500}) {
        double ins = theoretical_moments(MoveKind::Insert, n).mean;
        double swp = theoretical_moments(MoveKind::Swap, n).mean;
        double inb = theoretical_moments(MoveKind::BlockInsert, n, n / 4).mean;
        double inv = theoretical_moments(MoveKind::Inverse, n).mean;
        CHECK(ins < swp);
        CHECK(swp < inb);
        CHECK(inb < inv);
    }
}

TEST_CASE("scattered-block bounds bracket the contiguous value") {
    ScatteredBlockBounds b = scattered_block_bounds(100, 25);
    CHECK(b.mean_lower == doctest::Approx(1525.0 / 185625.0).epsilon(1e-12));
    CHECK(b.mean_upper == doctest::Approx(8875.0 / 185625.0).epsilon(1e-12));
    CHECK(std::abs(b.mean_lower - 0.008215) < 1e-6);
    CHECK(std::abs(b.mean_upper - 0.047811) < 1e-6);
    DistanceMoments contiguous = theoretical_moments(MoveKind::BlockInsert, 100, 25);
    CHECK(contiguous.mean == doctest::Approx(0.028014).epsilon(1e-4));
    CHECK(b.mean_lower <= contiguous.mean);
    CHECK(contiguous.mean <= b.mean_upper);
    CHECK(b.var_lower >= 0.0);
    CHECK(b.var_upper <= 1.0);
    CHECK(b.var_lower <= contiguous.variance);
    CHECK(contiguous.variance <= b.var_upper);

    CHECK_THROWS_AS(scattered_block_bounds(100, 33), std::invalid_argument);
}
