#include "colnet/cournot.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"

using namespace colnet;

namespace {

const std::vector<int> kPaperK{2, 3, 4, 3, 2};

ShiftedConvexCost paper_family() {
    return {5.0, BaseFunction::quadratic(2.0), kPaperK};
}

Graph figure_graph() { return realize_degree_sequence(kPaperK); }

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST(CournotClosedForm, SymmetricDuopoly) {
    const AspatialMarket m(10.0, 2);
    const ShiftedConvexCost cost{1.0, BaseFunction::zero(), {0, 0}};
    const Outcome out = cournot_quantities(m, cost, Graph::empty(2));
    EXPECT_DOUBLE_EQ(out.quantity[0], 3.0);
    EXPECT_DOUBLE_EQ(out.quantity[1], 3.0);
    EXPECT_DOUBLE_EQ(out.price, 4.0);
    EXPECT_DOUBLE_EQ(out.profit[0], 9.0);
    EXPECT_DOUBLE_EQ(out.profit[1], 9.0);
    EXPECT_TRUE(out.interior);
    EXPECT_TRUE(out.warnings.empty());
}

TEST(CournotClosedForm, LinearCostCompleteTriad) {
    const AspatialMarket m(10.0, 3);
    const Outcome out = cournot_quantities(m, LinearCost{2.0, 0.5}, Graph::complete(3));
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(out.quantity[i], 2.25);

    const auto oracle = oracles::best_response_market(10.0, {1.0, 1.0, 1.0});
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(out.quantity[i], oracle[i], 1e-10);
}

TEST(CournotClosedForm, PaperExampleWithoutShipping) {
    const AspatialMarket m(103.0, 5);
    const Outcome out = cournot_quantities(m, paper_family(), figure_graph());
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(out.quantity[i], 16.0);
    EXPECT_DOUBLE_EQ(out.price, 103.0 - 80.0);

    // two independent routes: damped best response and the linear FOC system
    const std::vector<double> costs(5, 7.0);
    const auto br = oracles::best_response_market(103.0, costs);
    const auto sys = oracles::linear_solve_market(103.0, costs);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(out.quantity[i], br[i], 1e-10);
        EXPECT_NEAR(out.quantity[i], sys[i], 1e-10);
    }
}

TEST(CournotClosedForm, FirstOrderConditionIdentity) {
    // At interior equilibria P - c_i = q_i, hence Y_i = q_i^2.
    std::mt19937_64 rng(17);
    for (int t = 0; t < 60; ++t) {
        const int n = 2 + static_cast<int>(rng() % 6);
        ShiftedConvexCost cost{1.0 + static_cast<double>(rng() % 5),
                               BaseFunction::quadratic(static_cast<double>(rng() % 4)), {}};
        for (int i = 0; i < n; ++i) cost.shifts.push_back(static_cast<int>(rng() % n));
        const AspatialMarket m(200.0 + static_cast<double>(rng() % 100), n);
        const Graph g = graph_from_index(n, rng() % labeled_graph_count(n));
        const Outcome out = cournot_quantities(m, cost, g);
        ASSERT_TRUE(out.interior);
        for (int i = 0; i < n; ++i) {
            EXPECT_LE(rel_err(out.price - out.marginal_cost[i], out.quantity[i]), 1e-10);
            EXPECT_LE(rel_err(out.profit[i], out.quantity[i] * out.quantity[i]), 1e-10);
        }
    }
}

TEST(CournotClosedForm, MatchesBestResponseOracle) {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 40; ++t) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const double gamma = 0.25 * static_cast<double>(rng() % 4);
        const AspatialMarket m(80.0 + static_cast<double>(rng() % 40), n);
        const Graph g = graph_from_index(n, rng() % labeled_graph_count(n));
        const Outcome out = cournot_quantities(m, LinearCost{6.0, gamma}, g);
        ASSERT_TRUE(out.interior);
        const auto oracle = oracles::best_response_market(m.alpha, out.marginal_cost);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(out.quantity[i], oracle[i], 1e-8);
    }
}

TEST(CournotClosedForm, RejectsGeneralCostAndShapeMismatch) {
    const AspatialMarket m(10.0, 2);
    const CostModel gen = GeneralCost{[](double, int) { return 1.0; }, nullptr};
    EXPECT_THROW((void)cournot_quantities(m, gen, Graph::empty(2)), UnsupportedModelError);
    EXPECT_THROW((void)cournot_quantities(m, LinearCost{1.0, 0.0}, Graph::empty(3)),
                 DomainError);
}

TEST(CournotClosedForm, FlagsInfeasibleInsteadOfThrowing) {
    // One firm priced far out of the market: the interior formula goes negative.
    const AspatialMarket m(10.0, 3);
    const ShiftedConvexCost cost{1.0, BaseFunction::table({0.0, 0.0, 0.0, 0.0, 50.0}), {0, 0, 0}};
    const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});  // firm 0 at degree 2 pays +50
    const Outcome out = cournot_quantities(m, cost, g);
    EXPECT_FALSE(out.interior);
    EXPECT_FALSE(out.warnings.empty());
}

TEST(CournotClosedForm, WarnsOnNegativeMarginalCost) {
    const AspatialMarket m(50.0, 3);
    const Outcome out = cournot_quantities(m, LinearCost{1.0, 1.0}, Graph::complete(3));
    EXPECT_TRUE(out.interior);
    EXPECT_FALSE(out.warnings.empty());
}

TEST(AspatialCondition, PaperChain) {
    const AspatialMarket m(103.0, 5);
    const ConditionResult c = aspatial_condition(m, paper_family());
    EXPECT_DOUBLE_EQ(c.lhs, 6.0);  // 103 - 5 - 5*18 - 2
    EXPECT_TRUE(c.holds);
}

TEST(AspatialCondition, FlatFamilyReducesToMarkup) {
    const AspatialMarket m(10.0, 4);
    const ShiftedConvexCost flat{3.0, BaseFunction::zero(), {0, 0, 0, 0}};
    const ConditionResult c = aspatial_condition(m, flat);
    EXPECT_DOUBLE_EQ(c.lhs, 7.0);  // alpha - gamma0
    EXPECT_TRUE(c.holds);
}

TEST(AspatialCondition, FailsWhenDemandTooSmall) {
    const AspatialMarket m(50.0, 5);
    const ConditionResult c = aspatial_condition(m, paper_family());
    EXPECT_DOUBLE_EQ(c.lhs, -47.0);
    EXPECT_FALSE(c.holds);
}

TEST(AspatialCondition, RejectsWrongModels) {
    const AspatialMarket m(50.0, 3);
    EXPECT_THROW((void)aspatial_condition(m, LinearCost{1.0, 0.5}), InvalidCostFamilyError);
    const ShiftedConvexCost concave{0.0, BaseFunction::table({-4.0, -1.0, 0.0, -1.0, -4.0}),
                                    {0, 1, 2}};
    EXPECT_THROW((void)aspatial_condition(m, concave), InvalidCostFamilyError);
}

TEST(AspatialCondition, GuaranteesNonnegativityExhaustively) {
    // When the margin is positive every graph has nonnegative quantities and
    // the two bracket inequalities hold; swept over every graph up to n = 7.
    struct Case {
        AspatialMarket market;
        ShiftedConvexCost cost;
    };
    const std::vector<Case> cases = {
        {AspatialMarket(103.0, 5), paper_family()},
        {AspatialMarket(269.0, 7),
         {2.0, BaseFunction::quadratic(1.0), {0, 1, 2, 3, 3, 2, 1}}},
    };
    for (const auto& [m, sc] : cases) {
        const CostModel cost = sc;
        const int n = m.firms;
        const ConditionResult c = aspatial_condition(m, cost);
        ASSERT_TRUE(c.holds);
        const double ratio = static_cast<double>(n - 1) / (n + 1);
        const double dp = delta_plus(cost), dm = delta_minus(cost);
        GraphEnumerator en(n);
        while (auto g = en.next()) {
            const Outcome out = cournot_quantities(m, cost, *g);
            for (int i = 0; i < n; ++i) {
                ASSERT_GE(out.quantity[i], 0.0);
                ASSERT_GT(2.0 * out.quantity[i] - ratio * dp, 0.0);
                ASSERT_GT(2.0 * out.quantity[i] - ratio * dm, 0.0);
            }
        }
    }
}

TEST(DeviationDelta, PaperDropValue) {
    const AspatialMarket m(103.0, 5);
    const CostModel cost = paper_family();
    const Graph g = figure_graph();
    for (auto [i, j] : g.edges()) {
        const DeviationDelta d = analytic_deviation_delta(m, cost, g, i, j, Deviation::Drop);
        EXPECT_NEAR(d.delta, -188.0 / 9.0, 1e-12);  // -(4/6)(2*16 - 4/6)
        EXPECT_DOUBLE_EQ(d.step, 1.0);
        // quantity update equations: endpoints move by -step(n-1)/(n+1), others by +2 step/(n+1)
        EXPECT_NEAR(d.quantity_after[i], 16.0 - 4.0 / 6.0, 1e-12);
        const int spectator = [&] {
            for (int r = 0; r < 5; ++r)
                if (r != i && r != j) return r;
            return -1;
        }();
        EXPECT_NEAR(d.quantity_after[spectator], 16.0 + 2.0 / 6.0, 1e-12);
    }
}

TEST(DeviationDelta, ZeroStepFamilyAddsForFree) {
    // flat-at-{0,1} base: adding a link changes nothing
    const BaseFunction base = BaseFunction::table({2.0, 0.0, 0.0, 0.0, 2.0});
    const ShiftedConvexCost cost{1.0, base, {0, 0, 0}};
    ASSERT_TRUE(validate_convex_family(cost, 3).ok());
    ASSERT_DOUBLE_EQ(delta_plus(cost), 0.0);
    const AspatialMarket m(40.0, 3);
    const DeviationDelta d =
        analytic_deviation_delta(m, cost, Graph::empty(3), 0, 1, Deviation::Add);
    EXPECT_DOUBLE_EQ(d.delta, 0.0);
}

TEST(DeviationDelta, MatchesDirectRecomputation) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 40; ++t) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const Graph g = graph_from_index(n, rng() % labeled_graph_count(n));
        ShiftedConvexCost cost{2.0, BaseFunction::quadratic(1.0 + (rng() % 3)), g.degrees()};
        const AspatialMarket m(300.0 + static_cast<double>(rng() % 50), n);
        const CostModel model = cost;
        const Outcome base = cournot_quantities(m, model, g);
        ASSERT_TRUE(base.interior);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const Deviation dir = g.has_edge(i, j) ? Deviation::Drop : Deviation::Add;
                const Graph dev =
                    dir == Deviation::Drop ? g.without_edge(i, j) : g.with_edge(i, j);
                const Outcome after = cournot_quantities(m, model, dev);
                ASSERT_TRUE(after.interior);
                const DeviationDelta d = analytic_deviation_delta(m, model, g, i, j, dir);
                EXPECT_LE(rel_err(d.delta, after.profit[i] - base.profit[i]), 1e-9);
                for (int r = 0; r < n; ++r)
                    EXPECT_LE(rel_err(d.quantity_after[r], after.quantity[r]), 1e-9);
            }
        }
    }
}

TEST(DeviationDelta, ErrorPaths) {
    const AspatialMarket m(103.0, 5);
    const CostModel cost = paper_family();
    const Graph g = figure_graph();
    EXPECT_THROW(
        (void)analytic_deviation_delta(m, cost, Graph::empty(5), 0, 1, Deviation::Add),
        DegreeMismatchError);
    EXPECT_THROW((void)analytic_deviation_delta(m, CostModel{LinearCost{1, 0}}, g, 0, 1,
                                                Deviation::Drop),
                 UnsupportedModelError);
    ASSERT_TRUE(g.has_edge(1, 2));
    EXPECT_THROW((void)analytic_deviation_delta(m, cost, g, 1, 2, Deviation::Add), DomainError);
    ASSERT_FALSE(g.has_edge(0, 4));
    EXPECT_THROW((void)analytic_deviation_delta(m, cost, g, 0, 4, Deviation::Drop), DomainError);
}
