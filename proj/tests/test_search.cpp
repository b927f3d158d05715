#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "labsched/search.hpp"
#include "oracles.hpp"

using namespace labsched;

namespace {

Instance toy_instance(int n_bio, int n_immuno, int idx, std::uint64_t seed = 2024) {
    return generate_instance(toy_profile(), n_bio, n_immuno, idx, seed);
}

}  // namespace

TEST_CASE("neh_b with one whole-sequence block returns the priority order") {
    Instance inst = example6();
    // A single entity leaves nothing to insert, exposing the ranking itself.
    SpecimenSequence seq = neh_b(inst, 6, false, 1);
    std::vector<std::int64_t> totals(7, 0);
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 4; ++j)
            for (int line = 1; line <= 2; ++line) totals[static_cast<std::size_t>(i)] += inst.times.at(i, j, line);
    for (std::size_t p = 0; p + 1 < seq.order.size(); ++p)
        CHECK(totals[static_cast<std::size_t>(seq.order[p])] >=
              totals[static_cast<std::size_t>(seq.order[p + 1])]);
}

TEST_CASE("neh_b insertion spends at most b(b+1)/2 decodes") {
    Instance inst = example6();
    std::uint64_t evals = 0;
    neh_b(inst, 1, false, 3, &evals);
    CHECK(evals <= 6 * 7 / 2);
    CHECK(evals > 0);

    evals = 0;
    neh_b(inst, 2, true, 3, &evals);
    CHECK(evals <= 3 * 4 / 2);
}

TEST_CASE("neh_b beats a random baseline on the toy benchmark") {
    double neh_sum = 0.0, random_sum = 0.0;
    int cells = 0;
    for (const BenchmarkEntry& e : benchmark_plan(true)) {
        Instance inst = toy_instance(e.n_bio, e.n_immuno, e.idx);
        const TiePolicy tie = TiePolicy::lowest_index();
        SpecimenSequence seq = neh_b(inst, kDefaultBlockSize, true, 17);
        neh_sum += decode_fabm(inst, seq, tie).mtat;
        double acc = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            auto perm = labsched::testing::random_permutation(inst.num_specimens(), 900 + s);
            acc += decode_fabm(inst, SpecimenSequence{perm}, tie).mtat;
        }
        random_sum += acc / 100.0;
        ++cells;
    }
    CHECK(neh_sum / cells <= random_sum / cells);
}

TEST_CASE("annealing respects the budget exactly and is deterministic") {
    Instance inst = toy_instance(3, 3, 1);
    AnnealConfig cfg;
    cfg.budget = 777;
    cfg.seed = 5;
    cfg.nbhd = NeighborhoodSpec::fixed(MoveKind::Swap);

    SearchResult a = anneal(inst, cfg);
    CHECK(a.evaluations == 777);

    SearchResult b = anneal(inst, cfg);
    CHECK(a.best == b.best);
    CHECK(a.best_mtat == b.best_mtat);
    CHECK(a.trace.size() == b.trace.size());
    CHECK(a.evaluations == b.evaluations);

    // Best-so-far trace is non-increasing and ends at the reported best.
    for (std::size_t i = 1; i < a.trace.size(); ++i)
        CHECK(a.trace[i].mtat <= a.trace[i - 1].mtat);
    REQUIRE(!a.trace.empty());
    CHECK(a.trace.back().mtat == doctest::Approx(a.best_mtat));
}

TEST_CASE("annealing near zero temperature never accepts uphill moves") {
    Instance inst = toy_instance(4, 4, 2);
    AnnealConfig cfg;
    cfg.budget = 4000;
    cfg.seed = 11;
    cfg.initial_temp = 1e-9;
    cfg.cooling = 1.0;
    cfg.nbhd = NeighborhoodSpec::fixed(MoveKind::Swap);
    cfg.tie = TiePolicy::lowest_index();
    SearchResult result = anneal(inst, cfg);
    CHECK(result.uphill_accepts == 0);
}

TEST_CASE("fixed temperature is annealing with unit cooling") {
    Instance inst = toy_instance(3, 3, 4);
    SolverConfig cfg;
    cfg.algo = SolverConfig::Algo::FTA;
    cfg.budget = 500;
    cfg.seed = 21;
    cfg.nbhd = NeighborhoodSpec::fixed(MoveKind::Insert);
    SearchResult fta = run_solver(inst, cfg);

    AnnealConfig ac;
    ac.cooling = 1.0;
    ac.budget = 500;
    ac.seed = 21;
    ac.nbhd = NeighborhoodSpec::fixed(MoveKind::Insert);
    SearchResult sa = anneal(inst, ac);

    CHECK(fta.best == sa.best);
    CHECK(fta.best_mtat == sa.best_mtat);
    CHECK(fta.evaluations == sa.evaluations);
}

TEST_CASE("invalid configs are rejected") {
    Instance inst = toy_instance(1, 1, 1);
    AnnealConfig cfg;
    cfg.cooling = 0.0;
    CHECK_THROWS_AS(anneal(inst, cfg), std::invalid_argument);
    cfg.cooling = 1.5;
    CHECK_THROWS_AS(anneal(inst, cfg), std::invalid_argument);

    ScatterConfig sc;
    sc.refset_size = 1;
    CHECK_THROWS_AS(scatter_search(inst, sc), std::invalid_argument);
}

TEST_CASE("stagnation cuts a run short") {
    Instance inst = toy_instance(2, 2, 3);
    AnnealConfig cfg;
    cfg.budget = 1000000;
    cfg.stagnation = 200;
    cfg.seed = 9;
    cfg.nbhd = NeighborhoodSpec::fixed(MoveKind::Swap);
    SearchResult result = anneal(inst, cfg);
    CHECK(result.evaluations < 1000000);
}

TEST_CASE("vote combination reproduces the published walkthrough") {
    std::vector<SpecimenId> p1{3, 1, 6, 4, 5, 2};
    std::vector<SpecimenId> p2{3, 4, 6, 1, 5, 2};
    Rng rng(1);
    CombineTrace trace;
    auto trial = combine_solutions(p1, p2, 1569.50, 1829.17, rng, &trace);

    CHECK(std::round(trace.weights[0] * 100) / 100 == doctest::Approx(0.54));
    CHECK(std::round(trace.weights[1] * 100) / 100 == doctest::Approx(0.46));

    REQUIRE(trace.steps.size() == 6);
    CHECK(trace.steps[0].chosen_parent == 0);  // identical candidates

    CHECK(trace.steps[1].candidate1 == 1);
    CHECK(trace.steps[1].candidate2 == 4);
    CHECK(std::round(trace.steps[1].departure1 * 100) / 100 == doctest::Approx(0.92));
    CHECK(std::round(trace.steps[1].departure2 * 100) / 100 == doctest::Approx(1.08));
    CHECK(trace.steps[1].chosen_parent == 1);

    CHECK(trace.steps[2].candidate1 == 6);
    CHECK(trace.steps[2].candidate2 == 4);
    CHECK(std::round(trace.steps[2].departure2 * 100) / 100 == doctest::Approx(0.08));
    CHECK(trace.steps[2].chosen_parent == 2);

    CHECK(trial == std::vector<SpecimenId>{3, 1, 4, 6, 5, 2});
}

TEST_CASE("vote combination edge cases") {
    Rng rng(2);
    std::vector<SpecimenId> p{5, 3, 1, 2, 4};
    CombineTrace trace;
    auto trial = combine_solutions(p, p, 100.0, 120.0, rng, &trace);
    CHECK(trial == p);
    for (const CombineStep& s : trace.steps) CHECK(s.chosen_parent == 0);

    std::vector<SpecimenId> shorter{1, 2};
    CHECK_THROWS_AS(combine_solutions(p, shorter, 1.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(combine_solutions(p, p, 0.0, 1.0, rng), std::invalid_argument);

    SUBCASE("ten thousand random parent pairs always yield permutations") {
        std::vector<SpecimenId> sorted(8);
        std::iota(sorted.begin(), sorted.end(), 1);
        for (std::uint64_t s = 0; s < 10000; ++s) {
            auto a = labsched::testing::random_permutation(8, 2 * s);
            auto b = labsched::testing::random_permutation(8, 2 * s + 1);
            auto t = combine_solutions(a, b, 10.0 + s % 7, 11.0 + s % 5, rng);
            std::vector<SpecimenId> check = t;
            std::sort(check.begin(), check.end());
            REQUIRE(check == sorted);
        }
    }
}

TEST_CASE("scatter search respects budget, monotone trace, determinism") {
    Instance inst = toy_instance(3, 3, 5);
    ScatterConfig cfg;
    cfg.budget = 2000;
    cfg.seed = 33;
    cfg.nbhd = NeighborhoodSpec::fixed(MoveKind::Swap);

    SearchResult a = scatter_search(inst, cfg);
    CHECK(a.evaluations == 2000);
    for (std::size_t i = 1; i < a.trace.size(); ++i)
        CHECK(a.trace[i].mtat <= a.trace[i - 1].mtat);
    REQUIRE(!a.trace.empty());
    CHECK(a.trace.back().mtat == doctest::Approx(a.best_mtat));

    SearchResult b = scatter_search(inst, cfg);
    CHECK(a.best == b.best);
    CHECK(a.best_mtat == b.best_mtat);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("meta-Lamarckian rewards and probabilities") {
    MlState state;
    ml_update(state, MoveKind::Insert, 100.0, 90.0, 5);
    CHECK(state.reward[0] == doctest::Approx(2.0));

    state = MlState{};
    state.reward = {2.0, 1.0, 1.0, 0.0};
    auto p = state.probabilities();
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.25));
    CHECK(p[2] == doctest::Approx(0.25));
    CHECK(p[3] == doctest::Approx(0.0));

    SUBCASE("probabilities sum to one after arbitrary updates") {
        Rng rng(8);
        for (int step = 0; step < 200; ++step) {
            MoveKind kind = static_cast<MoveKind>(rng.below(4));
            ml_update(state, kind, 50.0 + rng.uniform01() * 10, 50.0 + rng.uniform01() * 10, 3);
            auto probs = state.probabilities();
            double sum = probs[0] + probs[1] + probs[2] + probs[3];
            CHECK(sum == doctest::Approx(1.0));
        }
    }

    SUBCASE("all-zero rewards fall back to uniform selection") {
        MlState fresh;
        auto probs = fresh.probabilities();
        for (double v : probs) CHECK(v == doctest::Approx(0.25));
    }

    SUBCASE("roulette frequencies follow the probabilities") {
        MlState loaded;
        loaded.reward = {2.0, 1.0, 1.0, 0.0};
        Rng rng(99);
        std::array<int, 4> counts{};
        const int draws = 100000;
        for (int i = 0; i < draws; ++i)
            counts[static_cast<std::size_t>(ml_select(loaded, rng))]++;
        CHECK(std::abs(counts[0] / static_cast<double>(draws) - 0.5) < 0.01);
        CHECK(std::abs(counts[1] / static_cast<double>(draws) - 0.25) < 0.01);
        CHECK(std::abs(counts[2] / static_cast<double>(draws) - 0.25) < 0.01);
        CHECK(counts[3] == 0);
    }

    CHECK_THROWS_AS(ml_update(state, MoveKind::Swap, 1.0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("ml-driven engines run and stay deterministic") {
    Instance inst = toy_instance(3, 3, 2);
    AnnealConfig cfg;
    cfg.budget = 600;
    cfg.seed = 77;
    cfg.nbhd = NeighborhoodSpec::meta_lamarckian();
    SearchResult a = anneal(inst, cfg);
    SearchResult b = anneal(inst, cfg);
    CHECK(a.best == b.best);
    CHECK(a.evaluations == 600);
}

TEST_CASE("syntactic neighborhood selection by instance size") {
    CHECK(aps_select_neighborhood(100) == MoveKind::Swap);
    CHECK(aps_select_neighborhood(300) == MoveKind::BlockInsert);
    CHECK(aps_select_neighborhood(8) == MoveKind::Swap);
    CHECK(aps_select_neighborhood(150) == MoveKind::Swap);
    CHECK(aps_select_neighborhood(200) == MoveKind::BlockInsert);

    Instance inst = toy_instance(1, 1, 1);
    CHECK(aps_select_neighborhood(inst) == MoveKind::Swap);
}

TEST_CASE("engines reach the reachable optimum on a two-specimen instance") {
    // Fuller statistical version lives in the acceptance suite.
    Instance inst = toy_instance(1, 1, 1);
    double optimum = labsched::testing::min_reachable_mtat(inst);
    SolverConfig cfg;
    cfg.budget = 10000;
    cfg.nbhd = NeighborhoodSpec::fixed(MoveKind::Swap);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.seed = seed;
        cfg.algo = SolverConfig::Algo::SA;
        if (run_solver(inst, cfg).best_mtat <= optimum + 1e-9) ++hits;
    }
    CHECK(hits >= 9);
}
