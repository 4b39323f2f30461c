#include "colnet/spatial.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"

using namespace colnet;

namespace {

const std::vector<int> kPaperK{2, 3, 4, 3, 2};

ShiftedConvexCost paper_family() {
    return {5.0, BaseFunction::quadratic(2.0), kPaperK};
}

SpatialMarket paper_market(int nodes = 3) {
    return SpatialMarket::uniform(103.0, 1.0, nodes, 5);
}

Graph figure_graph() { return realize_degree_sequence(kPaperK); }

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Parameters that satisfy the sufficient condition by construction, so every
// graph's equilibrium stays interior.
std::pair<SpatialMarket, ShiftedConvexCost> random_interior_instance(std::mt19937_64& rng,
                                                                     int n, int v) {
    std::vector<std::vector<double>> ship(v, std::vector<double>(n, 0.0));
    double smax = 0.0;
    for (auto& row : ship)
        for (double& s : row) {
            s = 0.25 * static_cast<double>(rng() % 8);
            smax = std::max(smax, s);
        }
    ShiftedConvexCost cost{1.0 + static_cast<double>(rng() % 4),
                           BaseFunction::quadratic(static_cast<double>(rng() % 3)), {}};
    for (int i = 0; i < n; ++i) cost.shifts.push_back(static_cast<int>(rng() % n));
    const double f_worst = std::max(cost.base(n - 1), cost.base(1 - n));
    const double step = std::max(cost.base(1) - cost.base(0), cost.base(-1) - cost.base(0));
    const double floor = cost.gamma0 + n * (smax + f_worst) + 0.5 * (n - 1) * step;
    std::vector<double> alpha;
    const double alpha_min = floor + 1.0 + static_cast<double>(rng() % 50);
    for (int l = 0; l < v; ++l)
        alpha.push_back(alpha_min + 0.5 * static_cast<double>(rng() % 10));
    return {SpatialMarket(std::move(alpha), std::move(ship)), std::move(cost)};
}

}  // namespace

TEST(SpatialClosedForm, PaperExampleDemands) {
    const SpatialOutcome out = spatial_quantities(paper_market(), paper_family(), figure_graph());
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(out.demand[l][i], 95.0 / 6.0);
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(out.quantity[i], 3.0 * 95.0 / 6.0);
    EXPECT_TRUE(out.interior);

    // independent route: damped best response on each node's market
    const std::vector<double> node_costs(5, 5.0 + 2.0 + 1.0);  // gamma0 + f(0) + s
    const auto oracle = oracles::best_response_market(103.0, node_costs);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(out.demand[0][i], oracle[i], 1e-10);
}

TEST(SpatialClosedForm, SingleNodeNoShippingReducesToAspatial) {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 30; ++t) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const Graph g = graph_from_index(n, rng() % labeled_graph_count(n));
        ShiftedConvexCost cost{2.0, BaseFunction::quadratic(1.0), {}};
        for (int i = 0; i < n; ++i) cost.shifts.push_back(static_cast<int>(rng() % n));
        const double alpha = 120.0 + static_cast<double>(rng() % 30);
        const SpatialMarket sm = SpatialMarket::uniform(alpha, 0.0, 1, n);
        const AspatialMarket am(alpha, n);
        const SpatialOutcome s = spatial_quantities(sm, cost, g);
        const Outcome a = cournot_quantities(am, cost, g);
        for (int i = 0; i < n; ++i) {
            // same arithmetic path on both sides: reduction is bit-identical
            EXPECT_EQ(s.demand[0][i], a.quantity[i]);
            EXPECT_EQ(s.profit[i], a.profit[i]);
        }
    }
}

TEST(SpatialClosedForm, TwoNodeDuopoly) {
    const SpatialMarket m({10.0, 20.0}, {{0.0, 0.0}, {0.0, 0.0}});
    const ShiftedConvexCost cost{0.0, BaseFunction::zero(), {0, 0}};
    const SpatialOutcome out = spatial_quantities(m, cost, Graph::empty(2));
    for (int i = 0; i < 2; ++i) {
        EXPECT_DOUBLE_EQ(out.demand[0][i], 10.0 / 3.0);
        EXPECT_DOUBLE_EQ(out.demand[1][i], 20.0 / 3.0);
    }
}

TEST(SpatialClosedForm, PerNodeFirstOrderCondition) {
    std::mt19937_64 rng(59);
    for (int t = 0; t < 30; ++t) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const int v = 1 + static_cast<int>(rng() % 4);
        auto [market, cost] = random_interior_instance(rng, n, v);
        const Graph g = graph_from_index(n, rng() % labeled_graph_count(n));
        const SpatialOutcome out = spatial_quantities(market, cost, g);
        ASSERT_TRUE(out.interior);
        for (int l = 0; l < v; ++l)
            for (int i = 0; i < n; ++i) {
                const double foc = out.node_price[l] - out.marginal_cost[i] -
                                   market.shipping[l][i];
                EXPECT_LE(rel_err(foc, out.demand[l][i]), 1e-10);
                EXPECT_LE(rel_err(out.node_profit[l][i],
                                  out.demand[l][i] * out.demand[l][i]),
                          1e-10);
            }
    }
}

TEST(SpatialClosedForm, RejectsGeneralCost) {
    const CostModel gen = GeneralCost{[](double, int) { return 1.0; }, nullptr};
    EXPECT_THROW((void)spatial_quantities(paper_market(), gen, figure_graph()),
                 UnsupportedModelError);
}

TEST(SpatialMarketType, Validation) {
    EXPECT_THROW(SpatialMarket({}, {}), DomainError);
    EXPECT_THROW(SpatialMarket({-1.0}, {{1.0, 1.0}}), DomainError);
    EXPECT_THROW(SpatialMarket({10.0, 10.0}, {{1.0, 1.0}}), DomainError);
    EXPECT_THROW(SpatialMarket({10.0}, {{1.0, -0.5}}), DomainError);
    EXPECT_THROW(SpatialMarket({10.0}, {{1.0}}), DomainError);  // one firm is not an oligopoly
    const SpatialMarket ok = SpatialMarket::uniform(10.0, 0.5, 2, 3);
    EXPECT_EQ(ok.nodes(), 2);
    EXPECT_EQ(ok.firms(), 3);
    EXPECT_DOUBLE_EQ(ok.max_shipping(), 0.5);
}

TEST(SpatialCondition, PaperValueIsExactlyOne) {
    const ConditionResult c = spatial_condition(paper_market(), paper_family());
    EXPECT_EQ(c.lhs, 1.0);  // 98 - 95 - 2, exact in doubles
    EXPECT_TRUE(c.holds);
    EXPECT_TRUE(c.notes.empty());
}

TEST(SpatialCondition, ZeroShippingMatchesAspatial) {
    const SpatialMarket m = SpatialMarket::uniform(103.0, 0.0, 4, 5);
    const AspatialMarket am(103.0, 5);
    const ConditionResult s = spatial_condition(m, paper_family());
    const ConditionResult a = aspatial_condition(am, paper_family());
    EXPECT_DOUBLE_EQ(s.lhs, a.lhs);
    EXPECT_DOUBLE_EQ(s.lhs, 6.0);
}

TEST(SpatialCondition, FailsWithLargeShipping) {
    const SpatialMarket m = SpatialMarket::uniform(103.0, 2.0, 3, 5);
    const ConditionResult c = spatial_condition(m, paper_family());
    EXPECT_DOUBLE_EQ(c.lhs, -4.0);
    EXPECT_FALSE(c.holds);
}

TEST(SpatialCondition, HeterogeneousInterceptsUseTheMinimum) {
    const SpatialMarket m({103.0, 110.0, 104.0},
                          std::vector<std::vector<double>>(3, std::vector<double>(5, 1.0)));
    const ConditionResult c = spatial_condition(m, paper_family());
    EXPECT_DOUBLE_EQ(c.lhs, 1.0);  // evaluated at min alpha = 103
    ASSERT_EQ(c.notes.size(), 1u);
    EXPECT_NE(c.notes[0].find("minimum"), std::string::npos);
}

TEST(SpatialCondition, GuaranteesNonnegativityExhaustively) {
    // every graph up to n = 6 with four transport nodes
    struct Case {
        SpatialMarket market;
        ShiftedConvexCost cost;
    };
    const std::vector<Case> cases = {
        {paper_market(4), paper_family()},
        {SpatialMarket::uniform(200.0, 2.0, 4, 6),
         {2.0, BaseFunction::quadratic(1.0), {0, 1, 2, 3, 2, 1}}},
    };
    for (const auto& [m, sc] : cases) {
        const CostModel cost = sc;
        const int n = m.firms(), v = m.nodes();
        ASSERT_TRUE(spatial_condition(m, cost).holds);
        const double ratio = static_cast<double>(n - 1) / (n + 1);
        const double dp = delta_plus(cost), dm = delta_minus(cost);
        GraphEnumerator en(n);
        while (auto g = en.next()) {
            const SpatialOutcome out = spatial_quantities(m, cost, *g);
            for (int l = 0; l < v; ++l)
                for (int i = 0; i < n; ++i) {
                    ASSERT_GE(out.demand[l][i], 0.0);
                    ASSERT_GT(2.0 * out.demand[l][i] - ratio * dp, 0.0);
                    ASSERT_GT(2.0 * out.demand[l][i] - ratio * dm, 0.0);
                }
        }
    }
}

TEST(SpatialDeviation, PaperDropValuePerNode) {
    const SpatialMarket m = paper_market();
    const CostModel cost = paper_family();
    const Graph g = figure_graph();
    for (auto [i, j] : g.edges()) {
        const SpatialDeviationDelta d = spatial_deviation_delta(m, cost, g, i, j,
                                                                Deviation::Drop);
        ASSERT_EQ(d.node_delta.size(), 3u);
        for (double nd : d.node_delta) EXPECT_NEAR(nd, -62.0 / 3.0, 1e-9);
        EXPECT_NEAR(d.total, 3.0 * (-62.0 / 3.0), 1e-9);
    }
}

TEST(SpatialDeviation, ZeroStepAddHasNoEffectAtAnyNode) {
    const BaseFunction base = BaseFunction::table({2.0, 0.0, 0.0, 0.0, 2.0});
    const ShiftedConvexCost cost{1.0, base, {0, 0, 0}};
    const SpatialMarket m = SpatialMarket::uniform(40.0, 0.5, 2, 3);
    const SpatialDeviationDelta d =
        spatial_deviation_delta(m, cost, Graph::empty(3), 0, 1, Deviation::Add);
    for (double nd : d.node_delta) EXPECT_DOUBLE_EQ(nd, 0.0);
    EXPECT_DOUBLE_EQ(d.total, 0.0);
}

TEST(SpatialDeviation, MatchesDirectRecomputation) {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 25; ++t) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const int v = 1 + static_cast<int>(rng() % 4);
        auto [market, base_cost] = random_interior_instance(rng, n, v);
        const Graph g = graph_from_index(n, rng() % labeled_graph_count(n));
        base_cost.shifts = g.degrees();
        const CostModel cost = base_cost;
        const SpatialOutcome base = spatial_quantities(market, cost, g);
        ASSERT_TRUE(base.interior);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const Deviation dir = g.has_edge(i, j) ? Deviation::Drop : Deviation::Add;
                const Graph dev =
                    dir == Deviation::Drop ? g.without_edge(i, j) : g.with_edge(i, j);
                const SpatialOutcome after = spatial_quantities(market, cost, dev);
                ASSERT_TRUE(after.interior);
                const SpatialDeviationDelta d =
                    spatial_deviation_delta(market, cost, g, i, j, dir);
                EXPECT_LE(rel_err(d.total, after.profit[i] - base.profit[i]), 1e-9);
                for (int l = 0; l < v; ++l) {
                    EXPECT_LE(rel_err(d.node_delta[l],
                                      after.node_profit[l][i] - base.node_profit[l][i]),
                              1e-9);
                    for (int r = 0; r < n; ++r)
                        EXPECT_LE(rel_err(d.demand_after[l][r], after.demand[l][r]), 1e-9);
                }
            }
    }
}

TEST(SpatialDeviation, ErrorPaths) {
    const SpatialMarket m = paper_market();
    const CostModel cost = paper_family();
    EXPECT_THROW(
        (void)spatial_deviation_delta(m, cost, Graph::empty(5), 0, 1, Deviation::Add),
        DegreeMismatchError);
    EXPECT_THROW((void)spatial_deviation_delta(m, CostModel{LinearCost{1, 0}}, figure_graph(),
                                               0, 1, Deviation::Drop),
                 UnsupportedModelError);
}
