#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "colnet/vi.hpp"

namespace colnet {

using MarketSpec = std::variant<AspatialMarket, SpatialMarket>;

inline int market_firms(const MarketSpec& m) {
    if (const auto* a = std::get_if<AspatialMarket>(&m)) return a->firms;
    return std::get<SpatialMarket>(m).firms();
}

enum class PayoffPath { ClosedFormAspatial, ClosedFormSpatial, ViSolver, Custom };

inline const char* to_string(PayoffPath p) {
    switch (p) {
        case PayoffPath::ClosedFormAspatial: return "closed_form_cournot";
        case PayoffPath::ClosedFormSpatial: return "closed_form_spatial";
        case PayoffPath::ViSolver: return "vi_solver";
        case PayoffPath::Custom: return "custom";
    }
    return "";
}

/// Equilibrium of one market/cost/graph triple: closed form when the model has
/// constant marginal costs and an interior solution, the VI solver otherwise.
/// Records which path produced the numbers.
struct EquilibriumComputation {
    PayoffPath path = PayoffPath::ViSolver;
    std::optional<Outcome> aspatial;
    std::optional<SpatialOutcome> spatial;
    std::vector<TracePoint> trace;  // nonempty only on the solver path

    const std::vector<double>& profits() const {
        return aspatial ? aspatial->profit : spatial->profit;
    }
};

namespace detail {

inline Outcome outcome_from_point(const AspatialMarket& market, const CostModel& cost,
                                  const Graph& g, const std::vector<double>& x,
                                  std::vector<std::string> warnings) {
    Outcome out;
    out.quantity = x;
    out.warnings = std::move(warnings);
    out.interior = false;
    const std::vector<int> eta = g.degrees();
    const int n = market.firms;
    out.marginal_cost.resize(n);
    for (int i = 0; i < n; ++i)
        out.marginal_cost[i] = marginal_cost(cost, i, eta[i], x[i]);
    for (int i = 0; i < n; ++i) out.total += x[i];
    out.price = market.alpha - out.total;
    out.profit.resize(n);
    for (int i = 0; i < n; ++i) out.profit[i] = x[i] * (out.price - out.marginal_cost[i]);
    return out;
}

inline SpatialOutcome spatial_from_point(const SpatialMarket& market, const CostModel& cost,
                                         const Graph& g, const std::vector<double>& x,
                                         std::vector<std::string> warnings) {
    SpatialOutcome out;
    out.warnings = std::move(warnings);
    out.interior = false;
    const std::vector<int> eta = g.degrees();
    const int n = market.firms(), v = market.nodes();
    out.demand.assign(v, std::vector<double>(n, 0.0));
    out.node_total.assign(v, 0.0);
    out.node_price.assign(v, 0.0);
    out.node_profit.assign(v, std::vector<double>(n, 0.0));
    out.quantity.assign(n, 0.0);
    out.profit.assign(n, 0.0);
    for (int l = 0; l < v; ++l)
        for (int i = 0; i < n; ++i) {
            out.demand[l][i] = x[l * n + i];
            out.node_total[l] += x[l * n + i];
            out.quantity[i] += x[l * n + i];
        }
    out.marginal_cost.resize(n);
    for (int i = 0; i < n; ++i)
        out.marginal_cost[i] = marginal_cost(cost, i, eta[i], out.quantity[i]);
    for (int l = 0; l < v; ++l) {
        out.node_price[l] = market.alpha[l] - out.node_total[l];
        for (int i = 0; i < n; ++i) {
            out.node_profit[l][i] = out.demand[l][i] * (out.node_price[l] -
                                                        out.marginal_cost[i] -
                                                        market.shipping[l][i]);
            out.profit[i] += out.node_profit[l][i];
        }
    }
    return out;
}

inline SolveResult solve_or_fail(const ViProblem& problem, const SolverConfig& cfg,
                                 const std::vector<double>& x0, const Graph& g,
                                 bool general) {
    const SolveResult res = general ? solve_general(problem, cfg)
                                    : best_response_iterate(problem, cfg, x0);
    if (!res.converged)
        throw OracleFailureError("equilibrium solver did not converge on graph:\n" + to_text(g));
    return res;
}

}  // namespace detail

inline EquilibriumComputation compute_equilibrium(const MarketSpec& market,
                                                  const CostModel& cost, const Graph& g,
                                                  const SolverConfig& solver = {}) {
    EquilibriumComputation ec;
    if (const auto* am = std::get_if<AspatialMarket>(&market)) {
        if (!constant_marginal_cost(cost)) {
            const ViProblem p = ViProblem::from_aspatial(*am, cost, g);
            SolveResult res = detail::solve_or_fail(p, solver, {}, g, true);
            ec.path = PayoffPath::ViSolver;
            ec.trace = std::move(res.trace);
            ec.aspatial = detail::outcome_from_point(*am, cost, g, res.x,
                                                     {"general marginal cost; vi solver used"});
            return ec;
        }
        Outcome closed = cournot_quantities(*am, cost, g);
        if (closed.interior) {
            ec.path = PayoffPath::ClosedFormAspatial;
            ec.aspatial = std::move(closed);
            return ec;
        }
        const ViProblem p = ViProblem::from_aspatial(*am, cost, g);
        std::vector<double> x0(closed.quantity.size());
        for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = std::max(0.0, closed.quantity[i]);
        SolveResult res = detail::solve_or_fail(p, solver, x0, g, false);
        ec.path = PayoffPath::ViSolver;
        ec.trace = std::move(res.trace);
        ec.aspatial = detail::outcome_from_point(*am, cost, g, res.x, closed.warnings);
        return ec;
    }

    const SpatialMarket& sm = std::get<SpatialMarket>(market);
    if (!constant_marginal_cost(cost)) {
        const ViProblem p = ViProblem::from_spatial(sm, cost, g);
        SolveResult res = detail::solve_or_fail(p, solver, {}, g, true);
        ec.path = PayoffPath::ViSolver;
        ec.trace = std::move(res.trace);
        ec.spatial = detail::spatial_from_point(sm, cost, g, res.x,
                                                {"general marginal cost; vi solver used"});
        return ec;
    }
    SpatialOutcome closed = spatial_quantities(sm, cost, g);
    if (closed.interior) {
        ec.path = PayoffPath::ClosedFormSpatial;
        ec.spatial = std::move(closed);
        return ec;
    }
    const ViProblem p = ViProblem::from_spatial(sm, cost, g);
    std::vector<double> x0(p.dimension());
    const int n = sm.firms();
    for (int l = 0; l < sm.nodes(); ++l)
        for (int i = 0; i < n; ++i) x0[l * n + i] = std::max(0.0, closed.demand[l][i]);
    SolveResult res = detail::solve_or_fail(p, solver, x0, g, false);
    ec.path = PayoffPath::ViSolver;
    ec.trace = std::move(res.trace);
    ec.spatial = detail::spatial_from_point(sm, cost, g, res.x, closed.warnings);
    return ec;
}

/// Deterministic map from collaboration graphs to per-firm equilibrium
/// profits, with an epsilon for payoff comparisons. Pure and safe to share
/// across threads.
class PayoffOracle {
public:
    PayoffOracle(MarketSpec market, CostModel cost, SolverConfig solver = {},
                 double epsilon = 1e-9)
        : market_(std::move(market)),
          cost_(std::move(cost)),
          solver_(solver),
          epsilon_(epsilon),
          firms_(market_firms(*market_)) {}

    /// Custom payoff map, mainly for tests and alternative allocation rules.
    PayoffOracle(std::function<std::vector<double>(const Graph&)> payoff, int firms,
                 double epsilon = 1e-9)
        : custom_(std::move(payoff)), epsilon_(epsilon), firms_(firms) {}

    struct Evaluation {
        std::vector<double> profit;
        PayoffPath path;
    };

    Evaluation evaluate(const Graph& g) const {
        if (custom_) return {custom_(g), PayoffPath::Custom};
        const EquilibriumComputation ec = compute_equilibrium(*market_, *cost_, g, solver_);
        return {ec.profits(), ec.path};
    }

    std::vector<double> profits(const Graph& g) const { return evaluate(g).profit; }

    double epsilon() const { return epsilon_; }
    int firms() const { return firms_; }
    const MarketSpec* market() const { return market_ ? &*market_ : nullptr; }
    const CostModel* cost() const { return cost_ ? &*cost_ : nullptr; }
    const SolverConfig& solver() const { return solver_; }

private:
    std::optional<MarketSpec> market_;
    std::optional<CostModel> cost_;
    std::function<std::vector<double>(const Graph&)> custom_;
    SolverConfig solver_;
    double epsilon_ = 1e-9;
    int firms_ = 0;
};

/// x > y up to relative noise: x - y > eps * max(1, |x|, |y|).
inline bool strictly_greater(double x, double y, double eps) {
    return x - y > eps * std::max({1.0, std::abs(x), std::abs(y)});
}

struct Violation {
    enum class Kind { DropProfitable, AddMutuallyBeneficial };
    Kind kind;
    int i = 0, j = 0;
    double delta_i = 0.0;  // Y_i(deviated) - Y_i(g)
    double delta_j = 0.0;
};

struct StabilityReport {
    bool stable = true;
    std::vector<Violation> violations;
    int deviations_checked = 0;
};

/// Pairwise stability per the two-sided definition: no endpoint of an
/// existing link strictly gains by dropping it, and no absent link would
/// strictly benefit one endpoint without strictly harming the other (a tie on
/// the partner's side counts as a violation). Every deviation payoff is
/// recomputed from scratch; the analytic deltas are a separate audited path.
inline StabilityReport is_pairwise_stable(const Graph& g, const PayoffOracle& oracle) {
    StabilityReport report;
    std::vector<double> base;
    try {
        base = oracle.profits(g);
    } catch (const OracleFailureError&) {
        throw;
    } catch (const Error& e) {
        throw OracleFailureError(std::string(e.what()) + "\non graph:\n" + to_text(g));
    }
    const double eps = oracle.epsilon();
    const int n = g.size();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            ++report.deviations_checked;
            std::vector<double> dev;
            try {
                dev = oracle.profits(g.has_edge(i, j) ? g.without_edge(i, j)
                                                      : g.with_edge(i, j));
            } catch (const OracleFailureError&) {
                throw;
            } catch (const Error& e) {
                throw OracleFailureError(std::string(e.what()) + "\non a deviation of graph:\n" +
                                         to_text(g));
            }
            const double di = dev[i] - base[i];
            const double dj = dev[j] - base[j];
            if (g.has_edge(i, j)) {
                if (strictly_greater(dev[i], base[i], eps) ||
                    strictly_greater(dev[j], base[j], eps))
                    report.violations.push_back(
                        {Violation::Kind::DropProfitable, i, j, di, dj});
            } else {
                const bool i_gains = strictly_greater(dev[i], base[i], eps);
                const bool j_gains = strictly_greater(dev[j], base[j], eps);
                const bool i_not_worse = !strictly_greater(base[i], dev[i], eps);
                const bool j_not_worse = !strictly_greater(base[j], dev[j], eps);
                if ((i_gains && j_not_worse) || (j_gains && i_not_worse))
                    report.violations.push_back(
                        {Violation::Kind::AddMutuallyBeneficial, i, j, di, dj});
            }
        }
    }
    report.stable = report.violations.empty();
    return report;
}

/// All labeled graphs on n nodes with a stable verdict, each from a full
/// deviation scan.
inline std::vector<Graph> enumerate_stable_graphs(int n, const PayoffOracle& oracle,
                                                  int cap = kDefaultEnumerationCap) {
    std::vector<Graph> stable;
    GraphEnumerator en(n, cap);
    while (auto g = en.next())
        if (is_pairwise_stable(*g, oracle).stable) stable.push_back(std::move(*g));
    return stable;
}

struct VerifyMode {
    bool exhaustive = true;
    int count = 0;
    std::uint64_t seed = 0;

    static VerifyMode exhaustive_mode() { return {true, 0, 0}; }
    static VerifyMode sampled(int count, std::uint64_t seed) { return {false, count, seed}; }
};

struct DeltaAudit {
    int firm = 0;
    int i = 0, j = 0;
    bool add = false;
    double analytic = 0.0;
    double direct = 0.0;
    double rel_error = 0.0;
};

struct TheoremReport {
    bool hypothesis_met = false;
    double condition_lhs = 0.0;
    std::vector<std::string> notes;
    int realizations_checked = 0;
    bool all_stable = false;
    std::vector<Graph> unstable;  // witnesses, when any
    double max_delta_error = 0.0;
    bool deltas_match = false;
    std::vector<DeltaAudit> worst_audits;  // a handful of largest-error rows

    bool ok() const { return hypothesis_met && all_stable && deltas_match; }
};

namespace detail {

inline double deviation_delta_total(const MarketSpec& market, const CostModel& cost,
                                    const Graph& g, int i, int j, Deviation dir) {
    if (const auto* am = std::get_if<AspatialMarket>(&market))
        return analytic_deviation_delta(*am, cost, g, i, j, dir).delta;
    return spatial_deviation_delta(std::get<SpatialMarket>(market), cost, g, i, j, dir).total;
}

}  // namespace detail

/// Checks the equivalence-class theorem on realizations of k: the relevant
/// sufficient condition must hold (otherwise the report says so and nothing is
/// tested), every realization examined must be pairwise stable, and at every
/// deviation the closed-form delta must match the recomputed difference.
inline TheoremReport verify_theorem_class(const std::vector<int>& k, const MarketSpec& market,
                                          const CostModel& cost, const VerifyMode& mode,
                                          int cap = kDefaultEnumerationCap) {
    if (!is_graphical(k)) throw NotGraphicalError("degree sequence is not graphical");
    const auto* sc = std::get_if<ShiftedConvexCost>(&cost);
    if (!sc)
        throw InvalidCostFamilyError("theorem verification needs a shifted convex cost");
    if (sc->shifts != k)
        throw DegreeMismatchError("the model's target degrees must equal the verified k");
    if (market_firms(market) != static_cast<int>(k.size()))
        throw DomainError("market and degree sequence disagree on the firm count");
    if (!mode.exhaustive && mode.count < 1) throw DomainError("sampled mode needs a count");

    TheoremReport report;
    const ConditionResult cond = std::holds_alternative<AspatialMarket>(market)
                                     ? aspatial_condition(std::get<AspatialMarket>(market), cost)
                                     : spatial_condition(std::get<SpatialMarket>(market), cost);
    report.condition_lhs = cond.lhs;
    report.notes = cond.notes;
    report.hypothesis_met = cond.holds;
    if (!cond.holds) {
        report.notes.push_back("hypothesis unmet; realizations not tested");
        return report;
    }

    const PayoffOracle oracle(market, cost);
    const double tol = 1e-9;

    auto audit_graph = [&](const Graph& g) {
        const std::vector<double> base = oracle.profits(g);
        ++report.realizations_checked;
        if (!is_pairwise_stable(g, oracle).stable) report.unstable.push_back(g);
        const int n = g.size();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const Deviation dir = g.has_edge(i, j) ? Deviation::Drop : Deviation::Add;
                const Graph dev = dir == Deviation::Drop ? g.without_edge(i, j)
                                                         : g.with_edge(i, j);
                const double analytic =
                    detail::deviation_delta_total(market, cost, g, i, j, dir);
                const double direct = oracle.profits(dev)[i] - base[i];
                const double rel = std::abs(analytic - direct) /
                                   std::max({1.0, std::abs(analytic), std::abs(direct)});
                if (rel > report.max_delta_error) {
                    report.max_delta_error = rel;
                    report.worst_audits.push_back(
                        {i, i, j, dir == Deviation::Add, analytic, direct, rel});
                    if (report.worst_audits.size() > 8)
                        report.worst_audits.erase(report.worst_audits.begin());
                }
            }
        }
    };

    if (mode.exhaustive) {
        RealizationEnumerator en(k, cap);
        while (auto g = en.next()) audit_graph(*g);
    } else {
        std::mt19937_64 rng(mode.seed);
        for (int t = 0; t < mode.count; ++t) audit_graph(random_realization(k, rng()));
    }

    report.all_stable = report.unstable.empty() && report.realizations_checked > 0;
    report.deltas_match = report.max_delta_error <= tol;
    return report;
}

}  // namespace colnet
