#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "colnet/cournot.hpp"

namespace colnet {

/// Spatially separated markets: one linear inverse demand per transport node
/// and a node-by-firm shipping cost matrix. Firms have no explicit location;
/// the shipping costs carry whatever geometry there is.
struct SpatialMarket {
    std::vector<double> alpha;                  // intercept per node
    std::vector<std::vector<double>> shipping;  // s[l][i], node by firm

    SpatialMarket() = default;

    SpatialMarket(std::vector<double> alpha_, std::vector<std::vector<double>> shipping_)
        : alpha(std::move(alpha_)), shipping(std::move(shipping_)) {
        if (alpha.empty()) throw DomainError("spatial market needs at least one node");
        for (double a : alpha)
            if (!(a > 0.0)) throw DomainError("demand intercepts must be positive");
        if (shipping.size() != alpha.size())
            throw DomainError("shipping matrix must have one row per node");
        const std::size_t n = shipping.front().size();
        if (n < 2) throw DomainError("oligopoly needs at least two firms");
        for (const auto& row : shipping) {
            if (row.size() != n) throw DomainError("shipping matrix must be rectangular");
            for (double s : row)
                if (s < 0.0) throw DomainError("shipping costs must be nonnegative");
        }
    }

    static SpatialMarket uniform(double alpha, double ship, int nodes, int firms) {
        return SpatialMarket(std::vector<double>(nodes, alpha),
                             std::vector<std::vector<double>>(
                                 nodes, std::vector<double>(firms, ship)));
    }

    int nodes() const { return static_cast<int>(alpha.size()); }
    int firms() const { return static_cast<int>(shipping.front().size()); }

    double max_shipping() const {
        double m = 0.0;
        for (const auto& row : shipping)
            for (double s : row) m = std::max(m, s);
        return m;
    }
};

struct SpatialOutcome {
    std::vector<std::vector<double>> demand;       // d[l][i]
    std::vector<double> node_total;                // D_l
    std::vector<double> node_price;                // P_l = alpha_l - D_l
    std::vector<std::vector<double>> node_profit;  // y[l][i] = d (P_l - c_i - s_li)
    std::vector<double> quantity;                  // q_i = sum_l d[l][i]
    std::vector<double> marginal_cost;             // c_i
    std::vector<double> profit;                    // Y_i = sum_l y[l][i]
    bool interior = true;
    std::vector<std::string> warnings;
};

/// Per-node closed form: with constant marginal costs the joint problem
/// decouples, so each node is an independent Cournot market where firm i's
/// per-unit cost is c_i + s_li. Negative demand flags the outcome infeasible.
inline SpatialOutcome spatial_quantities(const SpatialMarket& market, const CostModel& cost,
                                         const Graph& g) {
    if (g.size() != market.firms())
        throw DomainError("graph and market disagree on the firm count");
    const int n = market.firms();
    const int v = market.nodes();
    SpatialOutcome out;
    out.marginal_cost = graph_marginal_costs(cost, g);
    out.demand.resize(v);
    out.node_total.assign(v, 0.0);
    out.node_price.assign(v, 0.0);
    out.node_profit.assign(v, std::vector<double>(n, 0.0));
    out.quantity.assign(n, 0.0);
    out.profit.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (out.marginal_cost[i] < 0.0)
            out.warnings.push_back("negative marginal cost for firm " + std::to_string(i));
    std::vector<double> e(n);
    for (int l = 0; l < v; ++l) {
        for (int i = 0; i < n; ++i) e[i] = out.marginal_cost[i] + market.shipping[l][i];
        out.demand[l] = cournot_node_quantities(market.alpha[l], e);
        for (int i = 0; i < n; ++i) out.node_total[l] += out.demand[l][i];
        out.node_price[l] = market.alpha[l] - out.node_total[l];
        for (int i = 0; i < n; ++i) {
            const double d = out.demand[l][i];
            out.node_profit[l][i] = d * (out.node_price[l] - e[i]);
            out.quantity[i] += d;
            out.profit[i] += out.node_profit[l][i];
            if (d < 0.0) {
                out.interior = false;
                out.warnings.push_back("negative demand for firm " + std::to_string(i) +
                                       " at node " + std::to_string(l) +
                                       "; closed form infeasible");
            }
        }
    }
    return out;
}

/// Spatial analog of the aspatial sufficient condition, with the worst
/// shipping cost added inside the bracket. A single intercept appears in the
/// inequality; heterogeneous intercepts are evaluated at the minimum, which
/// keeps the condition sufficient at every node, and the result says so.
inline ConditionResult spatial_condition(const SpatialMarket& market, const CostModel& cost) {
    const ShiftedConvexCost& sc = detail::require_valid_family(cost, market.firms());
    const int n = market.firms();
    const double alpha_min = *std::min_element(market.alpha.begin(), market.alpha.end());
    const double alpha_max = *std::max_element(market.alpha.begin(), market.alpha.end());
    const double worst_f = std::max(sc.base(n - 1), sc.base(1 - n));
    const double worst_step = std::max(delta_plus(sc), delta_minus(sc));
    const double lhs = alpha_min - sc.gamma0 - n * (market.max_shipping() + worst_f) -
                       0.5 * (n - 1) * worst_step;
    std::vector<std::string> notes;
    if (alpha_max != alpha_min)
        notes.push_back("intercepts differ across nodes; condition evaluated at the minimum");
    return make_condition(lhs, std::move(notes));
}

/// Per-node profit changes of a one-link deviation at a graph whose degrees
/// equal the model's targets, and their sum over nodes.
struct SpatialDeviationDelta {
    std::vector<double> node_delta;  // y_li(g +- ij) - y_li(g) per node
    double total = 0.0;              // Y_i(g +- ij) - Y_i(g)
    double step = 0.0;
    std::vector<std::vector<double>> demand_before;
    std::vector<std::vector<double>> demand_after;
};

inline SpatialDeviationDelta spatial_deviation_delta(const SpatialMarket& market,
                                                     const CostModel& cost, const Graph& g,
                                                     int i, int j, Deviation dir) {
    const auto* sc = std::get_if<ShiftedConvexCost>(&cost);
    if (!sc)
        throw UnsupportedModelError("analytic deviation deltas need a shifted convex cost");
    if (g.degrees() != sc->shifts)
        throw DegreeMismatchError("graph degrees differ from the model's target degrees");
    if (dir == Deviation::Drop && !g.has_edge(i, j))
        throw DomainError("cannot drop an absent edge");
    if (dir == Deviation::Add && g.has_edge(i, j))
        throw DomainError("cannot add an existing edge");

    const SpatialOutcome base = spatial_quantities(market, cost, g);
    const double step = dir == Deviation::Drop ? delta_minus(*sc) : delta_plus(*sc);
    const int n = market.firms();
    const int v = market.nodes();
    const double ratio = static_cast<double>(n - 1) / (n + 1);

    SpatialDeviationDelta out;
    out.step = step;
    out.demand_before = base.demand;
    out.demand_after = base.demand;
    out.node_delta.resize(v);
    for (int l = 0; l < v; ++l) {
        for (int r = 0; r < n; ++r) {
            if (r == i || r == j)
                out.demand_after[l][r] += -step * n / (n + 1) + step / (n + 1);
            else
                out.demand_after[l][r] += 2.0 * step / (n + 1);
        }
        out.node_delta[l] = -step * ratio * (2.0 * base.demand[l][i] - ratio * step);
        out.total += out.node_delta[l];
    }
    return out;
}

}  // namespace colnet
