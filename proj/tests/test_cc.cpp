#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <ccde/cc.hpp>

#include <cmath>

using namespace ccde;

namespace {

bool same_trace(const std::vector<TracePoint>& a, const std::vector<TracePoint>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].evaluations != b[i].evaluations || a[i].best_observed != b[i].best_observed)
            return false;
        if (std::isnan(a[i].best_true) != std::isnan(b[i].best_true))
            return false;
        if (!std::isnan(a[i].best_true) && a[i].best_true != b[i].best_true)
            return false;
    }
    return true;
}

void check_trace_invariants(const CcResult& r, std::int64_t budget)
{
    REQUIRE(!r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i].evaluations > r.trace[i - 1].evaluations);
        CHECK(r.trace[i].best_observed <= r.trace[i - 1].best_observed);
    }
    CHECK(r.trace.back().evaluations == budget);
    CHECK(r.evaluations == budget);
    CHECK(r.trace.back().best_observed == r.best.fitness);
    CHECK(r.best.fitness <= r.context.fitness);
}

} // namespace

TEST_CASE("update_context requires strict improvement")
{
    ContextVector cv{Vector::Zero(4), 10.0, 3.0};
    Vector g(2);
    g << 1, 2;
    CHECK(!update_context(cv, {0, 2}, g, 10.0));
    CHECK(cv.values(2) == 0);
    CHECK(update_context(cv, {0, 2}, g, 9.0));
    CHECK(cv.values(0) == 1);
    CHECK(cv.values(2) == 2);
    CHECK(cv.fitness == 9.0);
    CHECK(!cv.true_fitness);
    CHECK_THROWS_AS(update_context(cv, {0}, g, 1.0), ContractViolation);
}

TEST_CASE("compute_delta")
{
    Vector a(3), b(3);
    a << 1, 2, 3;
    b << 0, 2, 5;
    const Vector d = compute_delta(a, b);
    CHECK(d(0) == 1);
    CHECK(d(1) == 0);
    CHECK(d(2) == 2);
}

TEST_CASE("every strategy spends the budget exactly")
{
    for (Strategy s : {Strategy::arg, Strategy::random, Strategy::delta, Strategy::multilevel, Strategy::dg, Strategy::vil, Strategy::single}) {
        CAPTURE(to_string(s));
        Objective f("rastrigin", 20, {NoiseKind::multiplicative, 0.1}, 6000);
        Rng rng(8);
        CcConfig cfg;
        cfg.decomposer.strategy = s;
        cfg.decomposer.group_count = 4;
        cfg.decomposer.candidate_counts = {2, 4, 5};
        cfg.population_size = 10;
        cfg.track_true = true;
        const CcResult r = cc_optimize(f, cfg, rng);
        check_trace_invariants(r, 6000);
        CHECK(r.context.true_fitness.has_value());
        CHECK(r.best.true_fitness.has_value());
        CHECK(f.bounds().contains(r.context.values));
        CHECK(f.bounds().contains(r.best.values));
        CHECK(r.groupings.cycles > 0);
        if (s == Strategy::dg || s == Strategy::vil)
            CHECK(r.groupings.decomposition_evaluations > 0);
    }
}

TEST_CASE("context fitness is an observed value of the context")
{
    // noiseless: observed fitness of the context equals its true value
    CcConfig cfg;
    cfg.population_size = 8;
    cfg.optimizer.variant = Variant::canonical;
    cfg.track_true = true;
    for (ContextUpdate u : {ContextUpdate::replace, ContextUpdate::improve}) {
        Objective f("sphere", 12, {}, 3000);
        Rng rng(4);
        cfg.context_update = u;
        const CcResult r = cc_optimize(f, cfg, rng);
        CHECK(r.context.fitness == doctest::Approx(f.true_value(r.context.values)));
        CHECK(*r.context.true_fitness == doctest::Approx(r.context.fitness));
        CHECK(r.best.fitness == doctest::Approx(f.true_value(r.best.values)));
    }
}

TEST_CASE("improve rule keeps the context fitness nonincreasing")
{
    // noiseless, so the improve rule and the best-so-far incumbent coincide
    Objective f("rastrigin", 16, {}, 4000);
    Rng rng(12);
    CcConfig cfg;
    cfg.population_size = 8;
    cfg.context_update = ContextUpdate::improve;
    const CcResult r = cc_optimize(f, cfg, rng);
    CHECK(r.context.fitness == r.best.fitness);
    CHECK(context_update_from_string("improve") == ContextUpdate::improve);
    CHECK_THROWS_AS(context_update_from_string("sometimes"), ConfigError);
}

TEST_CASE("single all-variables group reproduces the standalone optimizer")
{
    for (Variant v : {Variant::canonical, Variant::mde_ds}) {
        Objective f1("ackley", 8, {NoiseKind::multiplicative, 0.1}, 4000);
        Objective f2("ackley", 8, {NoiseKind::multiplicative, 0.1}, 4000);
        Rng r1(21), r2(21);
        CcConfig cfg;
        cfg.decomposer.strategy = Strategy::single;
        cfg.optimizer.variant = v;
        cfg.population_size = 12;
        cfg.track_true = true;
        const CcResult cc = cc_optimize(f1, cfg, r1);
        const OptimizerRun plain = run_optimizer(f2, cfg.optimizer, 12, true, r2);
        CHECK(same_trace(cc.trace, plain.trace));
    }
}

TEST_CASE("grouping summary and history")
{
    Objective f("sphere", 30, {}, 3000);
    Rng rng(2);
    CcConfig cfg;
    cfg.population_size = 6;
    cfg.record_groupings = true;
    const CcResult r = cc_optimize(f, cfg, rng);
    CHECK(r.groupings.history.size() == static_cast<std::size_t>(r.groupings.cycles));
    for (const auto& g : r.groupings.history)
        CHECK(is_partition(g, 30));
    CHECK(r.groupings.min_group_count <= r.groupings.max_group_count);
}

TEST_CASE("reinitialize policy also spends the budget")
{
    Objective f("rastrigin", 20, {}, 5000);
    Rng rng(3);
    CcConfig cfg;
    cfg.population_size = 10;
    cfg.subpopulation = SubpopulationPolicy::reinitialize;
    check_trace_invariants(cc_optimize(f, cfg, rng), 5000);
    CHECK(subpopulation_policy_from_string("reinitialize") == SubpopulationPolicy::reinitialize);
    CHECK_THROWS_AS(subpopulation_policy_from_string("keep"), ConfigError);
}

TEST_CASE("generations scale with group size on request")
{
    CcConfig cfg;
    cfg.population_size = 6;
    cfg.decomposer.strategy = Strategy::random;
    cfg.decomposer.group_count = 2;
    Objective f("sphere", 10, {}, 6 + 2 * (6 + 5 * 6));
    Rng rng(1);
    cfg.scale_generations = true;
    const CcResult r = cc_optimize(f, cfg, rng);
    // one cycle: each group of five re-evaluates once, then runs five generations
    CHECK(r.generations == 10);
    CHECK(r.groupings.cycles == 1);
    check_trace_invariants(r, f.budget());
}

TEST_CASE("noiseless context never gets worse")
{
    // the context's own slice joins every re-evaluated sub-population
    Objective f("rastrigin", 20, {}, 8000);
    Rng rng(6);
    CcConfig cfg;
    cfg.population_size = 8;
    cfg.optimizer.variant = Variant::canonical;
    cfg.record_groupings = true;
    const CcResult r = cc_optimize(f, cfg, rng);
    CHECK(r.context.fitness == r.best.fitness);
}

TEST_CASE("budget smaller than the population")
{
    Objective f("sphere", 5, {}, 3);
    Rng rng(1);
    CcConfig cfg;
    cfg.population_size = 10;
    const CcResult r = cc_optimize(f, cfg, rng);
    CHECK(r.evaluations == 3);
    CHECK(r.trace.back().evaluations == 3);

    Objective empty("sphere", 5, {}, 0);
    const CcResult none = cc_optimize(empty, cfg, rng);
    CHECK(none.trace.empty());
    CHECK(none.evaluations == 0);
}

TEST_CASE("same seed, same result")
{
    auto once = [] {
        Objective f("rosenbrock", 10, {NoiseKind::additive, 0.1}, 2500);
        Rng rng(77);
        CcConfig cfg;
        cfg.population_size = 8;
        return cc_optimize(f, cfg, rng);
    };
    const CcResult a = once(), b = once();
    CHECK(same_trace(a.trace, b.trace));
    CHECK(a.context.values == b.context.values);
}

TEST_CASE("invalid configurations are rejected")
{
    Objective f("sphere", 10, {}, 100);
    Rng rng(1);
    CcConfig cfg;
    cfg.population_size = 3;
    CHECK_THROWS_AS(cc_optimize(f, cfg, rng), ConfigError);
    cfg.population_size = 10;
    cfg.decomposer.strategy = Strategy::random;
    cfg.decomposer.group_count = 3;
    CHECK_THROWS_AS(cc_optimize(f, cfg, rng), ConfigError);
}

TEST_CASE("aRG with MDE-DS solves noiseless Sphere")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Objective f("sphere", 50, {}, 50000);
        Rng rng(seed);
        CcConfig cfg;
        const CcResult r = cc_optimize(f, cfg, rng);
        CHECK(r.best.fitness < 0.01 * r.trace.front().best_observed);
    }
}
