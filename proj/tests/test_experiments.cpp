#include <gtest/gtest.h>

#include "ust/experiments.hpp"

using namespace ust;

namespace {

RunConfig workers(std::size_t w) {
    RunConfig c;
    c.workers = w;
    return c;
}

}  // namespace

TEST(Intersection, RejectsRecurrentDimensions) {
    EXPECT_THROW(intersection_probability(2, 2, 100, 10, 1), PreconditionError);
    EXPECT_THROW(intersection_probability(1, 2, 100, 10, 1), PreconditionError);
    EXPECT_THROW(intersection_probability(5, 2, 100, 0, 1), PreconditionError);
}

TEST(Intersection, IndependentOfWorkerCount) {
    const std::uint64_t m[] = {10, 100, 1000};
    const auto a = intersection_sweep(4, 3, m, 300, 77, {}, workers(1));
    const auto b = intersection_sweep(4, 3, m, 300, 77, {}, workers(3));
    EXPECT_EQ(a, b);
    for (const auto& e : a) {
        EXPECT_GE(e.mean, 0);
        EXPECT_LE(e.mean, 1);
        EXPECT_EQ(e.seed, 77u);
        EXPECT_EQ(e.attempted(), 300u);
    }
}

TEST(Intersection, NondecreasingInCutoff) {
    const std::uint64_t m[] = {1, 10, 100, 1000, 3000};
    const auto est = intersection_sweep(3, 4, m, 400, 5);
    for (std::size_t i = 1; i < est.size(); ++i) EXPECT_GE(est[i].mean, est[i - 1].mean);
    EXPECT_EQ(est[0].mean, 0);  // from distance 4 nothing meets within one step
}

TEST(Intersection, SameStartDoesNotCountOrigin) {
    // With r = 0 a hit needs a return to alpha away from the shared start.
    const auto e = intersection_probability(5, 0, 0, 200, 3);
    EXPECT_EQ(e.mean, 0);
    EXPECT_GT(intersection_probability(5, 0, 50, 200, 3).mean, 0);
}

TEST(Intersection, StandardErrorShrinks) {
    const auto a = intersection_probability(3, 2, 200, 400, 11);
    const auto b = intersection_probability(3, 2, 200, 6400, 11);
    ASSERT_GT(a.std_error, 0);
    EXPECT_NEAR(b.std_error / a.std_error, 0.25, 0.1);
}

TEST(Intersection, HorizonBudget) {
    RunConfig cfg;
    cfg.budget.max_steps = 100;
    EXPECT_THROW(intersection_probability(5, 2, 1000, 10, 1, {}, cfg), ResourceLimitError);
    cfg.budget = {};
    cfg.budget.max_replicates = 5;
    EXPECT_THROW(intersection_probability(5, 2, 10, 10, 1, {}, cfg), ResourceLimitError);
}

TEST(Moments, Structure) {
    EXPECT_THROW(intersection_moments(4, 2, 100, 10, 1), PreconditionError);
    const auto m = intersection_moments(5, 2, 2000, 1500, 9);
    EXPECT_GE(m.ex2.mean, m.ex.mean);
    EXPECT_GT(m.positive.mean, 0);
    EXPECT_LE(m.positive.mean, 1);
    EXPECT_TRUE(m.pz_holds());
    EXPECT_GT(m.pz_error, 0);
    // P(X > 0) >= (EX)^2 / EX^2 holds for the empirical law exactly.
    EXPECT_GE(m.pz_margin, -1e-12);
}

TEST(Connection, CutoffAboveVertexCountGivesOne) {
    const auto e = connection_probability(3, 4, 1, 729, 50, 2);
    EXPECT_EQ(e.mean, 1);
    EXPECT_EQ(e.std_error, 0);
    EXPECT_THROW(connection_probability(3, 4, 2, 10, 10, 2), PreconditionError);
}

TEST(Connection, SweepMonotoneAndDeterministic) {
    const std::uint64_t m[] = {1, 4, 16, 64, 256};
    const auto a = connection_sweep(3, 8, 2, m, 300, 4, workers(1));
    const auto b = connection_sweep(3, 8, 2, m, 300, 4, workers(2));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a[0].mean, 0);
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GE(a[i].mean, a[i - 1].mean);
}

TEST(Connection, NeighboursAtCutoffOne) {
    // Adjacent vertices are joined directly with the edge probability, which is 1/d on Z^d
    // up to boundary effects.
    const auto e = connection_probability(2, 8, 1, 1, 4000, 6);
    EXPECT_NEAR(e.mean, 0.5, 4 * e.std_error + 0.02);
}

TEST(ComponentDensity, DegenerateControl) {
    const auto c = component_density_check(2, 3, 1000, 10, 1);
    EXPECT_TRUE(c.exact);
    EXPECT_EQ(c.ratio, 1);
    EXPECT_EQ(c.pair_sum.mean, 49.0 * 49.0);
}

TEST(ComponentDensity, Sampled) {
    const auto zero = component_density_check(2, 3, 0, 20, 1, 2000);
    EXPECT_NEAR(zero.ratio, 1.0 / 49, 0.01);
    const auto a = component_density_check(2, 3, 5, 40, 1, 2000);
    const auto b = component_density_check(2, 3, 20, 40, 1, 2000);
    EXPECT_LT(a.ratio, b.ratio);
    EXPECT_FALSE(a.exact);
    EXPECT_NEAR(a.pair_sum.mean, a.ratio * 49 * 49, 1e-6);
}

TEST(Separator, TrivialPlacement) {
    SeparatorPlacement p = collinear_placement(3, 2);
    p.x = p.v;
    EXPECT_EQ(separator_probability(3, 4, p, 50, 1).mean, 1);
    EXPECT_THROW(separator_probability(3, 3, collinear_placement(3, 2), 10, 1), PreconditionError);
}

TEST(Separator, DecreasesWithSpacing) {
    const auto a = separator_probability(3, 8, collinear_placement(3, 1), 800, 7);
    const auto b = separator_probability(3, 16, collinear_placement(3, 4), 800, 7);
    EXPECT_GT(a.mean, b.mean);
    EXPECT_EQ(separator_box_radius(3, 16, 1'000'000), 49);
    EXPECT_EQ(separator_box_radius(3, 4, 1'000'000), 32);
}

TEST(Green, MonteCarloAgreesWithExact) {
    const int radii[] = {1};
    const auto exact = green_function_scaling(3, radii, 4, 0, 1);
    ASSERT_TRUE(exact.points[0].exact.has_value());
    const auto mc = green_function_scaling(3, radii, 4, 40000, 1, GreenOptions{0});
    for (std::size_t i = 0; i < 1; ++i) {
        EXPECT_FALSE(mc.points[i].exact.has_value());
        EXPECT_NEAR(mc.points[i].estimate.mean, exact.points[i].estimate.mean, 4 * mc.points[i].estimate.std_error);
    }
    EXPECT_TRUE(exact.monotone);
}

TEST(Green, Preconditions) {
    const int radii[] = {1, 3};
    EXPECT_THROW(green_function_scaling(2, radii, 20, 10, 1), PreconditionError);
    EXPECT_THROW(green_function_scaling(3, radii, 8, 10, 1), PreconditionError);
}

TEST(FreeWired, Examples) {
    const auto a = central_edge(2);
    const int radii[] = {1, 2, 3};
    const auto rows = free_wired_gap(2, a, std::nullopt, radii);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].free.value(), mpq_class(577, 1100));
    EXPECT_EQ(rows[1].wired->value(), mpq_class(51, 112));
    EXPECT_EQ(rows[2].free.value(), mpq_class(232285, 453908));
    EXPECT_EQ(rows[2].wired->value(), mpq_class(24863, 51480));
    // B_1 wired at m = 0: origin joined to one wired vertex by four parallel edges.
    EXPECT_EQ(rows[0].wired->value(), mpq_class(1, 4));
    for (const auto& r : rows)
        if (r.wired) EXPECT_LE(r.wired->value(), r.free.value());
    EXPECT_GT(*rows[1].gap(), *rows[2].gap());
    const int bad[] = {2};
    EXPECT_THROW(free_wired_gap(2, a, 2, bad), RangeError);
}

TEST(Budgets, BoxVertexBudget) {
    RunConfig cfg;
    cfg.budget.max_vertices = 1000;
    EXPECT_THROW(connection_probability(3, 8, 1, 10, 5, 1, cfg), ResourceLimitError);
    EXPECT_THROW(component_density_check(3, 8, 10, 5, 1, 10, cfg), ResourceLimitError);
}

TEST(Budgets, WalkBudgetCensors) {
    RunConfig cfg;
    cfg.budget.max_steps = 3;
    const auto e = connection_probability(3, 8, 2, 10, 20, 1, cfg);
    EXPECT_EQ(e.replicates + e.censored_count, 20u);
    EXPECT_GT(e.censored_count, 0u);
}
