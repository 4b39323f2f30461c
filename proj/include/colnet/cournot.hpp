#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "colnet/cost.hpp"
#include "colnet/errors.hpp"
#include "colnet/graph.hpp"

namespace colnet {

/// Linear inverse demand P = alpha - Q shared by n >= 2 quantity-setting firms.
struct AspatialMarket {
    double alpha = 0.0;
    int firms = 0;

    AspatialMarket() = default;
    AspatialMarket(double alpha_, int firms_) : alpha(alpha_), firms(firms_) {
        if (!(alpha > 0.0)) throw DomainError("demand intercept must be positive");
        if (firms < 2) throw DomainError("oligopoly needs at least two firms");
    }
};

struct Outcome {
    std::vector<double> quantity;       // q_i
    std::vector<double> marginal_cost;  // c_i
    std::vector<double> profit;         // Y_i = q_i (P - c_i)
    double total = 0.0;                 // Q
    double price = 0.0;                 // P = alpha - Q
    bool interior = true;               // all q_i >= 0; false => fall back to the VI solver
    std::vector<std::string> warnings;
};

/// Cournot point of one linear-demand market: q_i = (alpha - n e_i + sum_{j!=i} e_j)/(n+1),
/// where e_i is firm i's full per-unit cost in this market. Shared by the
/// aspatial and per-node spatial closed forms so the v=1 reduction is
/// bit-identical.
inline std::vector<double> cournot_node_quantities(double alpha, const std::vector<double>& e) {
    const int n = static_cast<int>(e.size());
    double total = 0.0;
    for (double v : e) total += v;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i)
        q[i] = (alpha - n * e[i] + (total - e[i])) / (n + 1);
    return q;
}

/// Per-firm constant marginal costs induced by the graph. Rejects GeneralCost.
inline std::vector<double> graph_marginal_costs(const CostModel& cost, const Graph& g) {
    if (!constant_marginal_cost(cost))
        throw UnsupportedModelError(
            "quantity-dependent marginal costs need the vi solver, not the closed form");
    const std::vector<int> eta = g.degrees();
    const int n = g.size();
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = marginal_cost(cost, i, eta[i]);
    return c;
}

/// Closed-form interior Cournot equilibrium. A negative quantity flags the
/// outcome infeasible rather than erroring; the closed form is only valid at
/// interior points and callers must then use the VI solver.
inline Outcome cournot_quantities(const AspatialMarket& market, const CostModel& cost,
                                  const Graph& g) {
    if (g.size() != market.firms)
        throw DomainError("graph and market disagree on the firm count");
    Outcome out;
    out.marginal_cost = graph_marginal_costs(cost, g);
    out.quantity = cournot_node_quantities(market.alpha, out.marginal_cost);
    const int n = market.firms;
    for (int i = 0; i < n; ++i) out.total += out.quantity[i];
    out.price = market.alpha - out.total;
    out.profit.resize(n);
    for (int i = 0; i < n; ++i) {
        out.profit[i] = out.quantity[i] * (out.price - out.marginal_cost[i]);
        if (out.marginal_cost[i] < 0.0)
            out.warnings.push_back("negative marginal cost for firm " + std::to_string(i));
        if (out.quantity[i] < 0.0) {
            out.interior = false;
            out.warnings.push_back("negative quantity for firm " + std::to_string(i) +
                                   "; closed form infeasible");
        }
    }
    return out;
}

struct ConditionResult {
    double lhs = 0.0;  // margin of the sufficient condition
    bool holds = false;
    std::vector<std::string> notes;
};

inline ConditionResult make_condition(double lhs, std::vector<std::string> notes = {}) {
    return ConditionResult{lhs, lhs > 0.0, std::move(notes)};
}

namespace detail {
inline const ShiftedConvexCost& require_valid_family(const CostModel& cost, int n) {
    const auto* sc = std::get_if<ShiftedConvexCost>(&cost);
    if (!sc)
        throw InvalidCostFamilyError("the sufficient condition applies to shifted convex families");
    const FamilyValidation v = validate_convex_family(*sc, n);
    if (!v.ok()) throw InvalidCostFamilyError(v.describe());
    return *sc;
}
}  // namespace detail

/// Margin of alpha - gamma0 - n max{f(n-1), f(1-n)} - (n-1)/2 max{f(1)-f(0), f(-1)-f(0)}.
/// When positive, every graph's equilibrium quantities are nonnegative and the
/// deviation bracket terms stay positive.
inline ConditionResult aspatial_condition(const AspatialMarket& market, const CostModel& cost) {
    const ShiftedConvexCost& sc = detail::require_valid_family(cost, market.firms);
    const int n = market.firms;
    const double worst_f = std::max(sc.base(n - 1), sc.base(1 - n));
    const double worst_step = std::max(delta_plus(sc), delta_minus(sc));
    const double lhs = market.alpha - sc.gamma0 - n * worst_f - 0.5 * (n - 1) * worst_step;
    return make_condition(lhs);
}

enum class Deviation { Drop, Add };

/// Closed-form profit change from a one-link deviation at a graph whose
/// degrees equal the model's targets, plus the per-firm quantity updates the
/// derivation passes through (kept for auditing against recomputation).
struct DeviationDelta {
    double delta = 0.0;  // Y_i(g +- ij) - Y_i(g) for the deviating firm i
    double step = 0.0;   // f-step used (delta- for drops, delta+ for adds)
    std::vector<double> quantity_before;
    std::vector<double> quantity_after;
};

inline DeviationDelta analytic_deviation_delta(const AspatialMarket& market,
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

    const Outcome base = cournot_quantities(market, cost, g);
    const double step = dir == Deviation::Drop ? delta_minus(*sc) : delta_plus(*sc);
    const int n = market.firms;
    const double ratio = static_cast<double>(n - 1) / (n + 1);

    DeviationDelta out;
    out.step = step;
    out.quantity_before = base.quantity;
    out.quantity_after = base.quantity;
    for (int r = 0; r < n; ++r) {
        if (r == i || r == j)
            out.quantity_after[r] += -step * n / (n + 1) + step / (n + 1);
        else
            out.quantity_after[r] += 2.0 * step / (n + 1);
    }
    out.delta = -step * ratio * (2.0 * base.quantity[i] - ratio * step);
    return out;
}

}  // namespace colnet
