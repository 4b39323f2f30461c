#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "colnet/cournot.hpp"
#include "colnet/spatial.hpp"

namespace colnet {

struct SolverConfig {
    double damping = 0.5;      // Jacobi best-response damping in (0, 1]
    int max_iterations = 10000;
    double tolerance = 1e-10;  // on the natural residual and successive change
    double step = 0.0;         // projected-gradient step; 0 picks 1/(2n)
};

struct TracePoint {
    int iteration = 0;
    double residual = 0.0;
    double max_change = 0.0;
};

struct SolveResult {
    std::vector<double> x;
    bool converged = false;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<TracePoint> trace;
    bool vi_verified = false;  // sampled-direction check, solve_general only
    double vi_worst = 0.0;     // most positive <grad(x*), y - x*> over samples
};

/// Composed variational inequality over the nonnegative orthant for one or
/// more linear-demand markets. Variables are demands d_li laid out node-major:
/// x[l * firms + i]. The operator is the stacked profit gradient
///   dY_i/dd_li = (alpha_l - D_l) - s_li - c_i(q_i) - d_li - q_i dc_i/dq,
/// which collapses to the familiar Cournot first-order condition when the
/// marginal cost is constant in quantity.
class ViProblem {
public:
    /// Constant per-firm marginal costs (best response available).
    static ViProblem linear(std::vector<double> alpha,
                            std::vector<std::vector<double>> shipping,
                            std::vector<double> cost) {
        ViProblem p;
        p.firms_ = static_cast<int>(cost.size());
        p.alpha_ = std::move(alpha);
        p.ship_ = std::move(shipping);
        p.const_cost_ = std::move(cost);
        p.validate_shape();
        return p;
    }

    /// Quantity-dependent marginal costs; degree per firm fixed by the graph.
    static ViProblem general(std::vector<double> alpha,
                             std::vector<std::vector<double>> shipping,
                             GeneralCost cost, std::vector<int> degrees) {
        ViProblem p;
        p.firms_ = static_cast<int>(degrees.size());
        p.alpha_ = std::move(alpha);
        p.ship_ = std::move(shipping);
        p.gen_cost_ = std::move(cost);
        p.degree_ = std::move(degrees);
        p.validate_shape();
        return p;
    }

    static ViProblem from_aspatial(const AspatialMarket& market, const CostModel& cost,
                                   const Graph& g) {
        if (g.size() != market.firms)
            throw DomainError("graph and market disagree on the firm count");
        std::vector<std::vector<double>> no_ship(1, std::vector<double>(market.firms, 0.0));
        if (const auto* gen = std::get_if<GeneralCost>(&cost))
            return general({market.alpha}, std::move(no_ship), *gen, g.degrees());
        return linear({market.alpha}, std::move(no_ship), graph_marginal_costs(cost, g));
    }

    static ViProblem from_spatial(const SpatialMarket& market, const CostModel& cost,
                                  const Graph& g) {
        if (g.size() != market.firms())
            throw DomainError("graph and market disagree on the firm count");
        if (const auto* gen = std::get_if<GeneralCost>(&cost))
            return general(market.alpha, market.shipping, *gen, g.degrees());
        return linear(market.alpha, market.shipping, graph_marginal_costs(cost, g));
    }

    int firms() const { return firms_; }
    int nodes() const { return static_cast<int>(alpha_.size()); }
    int dimension() const { return firms_ * nodes(); }
    bool constant_cost() const { return !gen_cost_.has_value(); }
    const GeneralCost* general_cost() const { return gen_cost_ ? &*gen_cost_ : nullptr; }
    const std::vector<int>& degrees() const { return degree_; }

    double cost_at(int firm, double quantity) const {
        return gen_cost_ ? (*gen_cost_)(quantity, degree_[firm]) : const_cost_[firm];
    }

    double cost_dq_at(int firm, double quantity) const {
        return gen_cost_ ? gen_cost_->dq(quantity, degree_[firm]) : 0.0;
    }

    std::vector<double> gradient(const std::vector<double>& x) const {
        check_point(x);
        const int n = firms_, v = nodes();
        std::vector<double> q(n, 0.0), big_d(v, 0.0);
        for (int l = 0; l < v; ++l)
            for (int i = 0; i < n; ++i) {
                q[i] += x[l * n + i];
                big_d[l] += x[l * n + i];
            }
        std::vector<double> grad(dimension());
        for (int l = 0; l < v; ++l)
            for (int i = 0; i < n; ++i) {
                const double c = cost_at(i, q[i]);
                const double cdq = cost_dq_at(i, q[i]);
                grad[l * n + i] =
                    alpha_[l] - big_d[l] - ship_[l][i] - c - x[l * n + i] - q[i] * cdq;
            }
        return grad;
    }

    /// Per-coordinate best response d_li = max(0, (alpha_l - rivals - c_i - s_li)/2).
    /// Only meaningful for constant marginal costs.
    std::vector<double> best_response(const std::vector<double>& x) const {
        if (!constant_cost())
            throw UnsupportedModelError("closed-form best response needs constant marginal costs");
        check_point(x);
        const int n = firms_, v = nodes();
        std::vector<double> br(dimension());
        for (int l = 0; l < v; ++l) {
            double big_d = 0.0;
            for (int i = 0; i < n; ++i) big_d += x[l * n + i];
            for (int i = 0; i < n; ++i) {
                const double rivals = big_d - x[l * n + i];
                br[l * n + i] =
                    std::max(0.0, (alpha_[l] - rivals - const_cost_[i] - ship_[l][i]) / 2.0);
            }
        }
        return br;
    }

private:
    void validate_shape() const {
        if (firms_ < 1) throw DomainError("vi problem needs at least one firm");
        if (alpha_.empty()) throw DomainError("vi problem needs at least one node");
        if (ship_.size() != alpha_.size())
            throw DomainError("shipping matrix must have one row per node");
        for (const auto& row : ship_)
            if (static_cast<int>(row.size()) != firms_)
                throw DomainError("shipping matrix must be rectangular");
    }

    void check_point(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != dimension())
            throw DomainError("point has the wrong dimension");
    }

    int firms_ = 0;
    std::vector<double> alpha_;
    std::vector<std::vector<double>> ship_;
    std::vector<double> const_cost_;
    std::optional<GeneralCost> gen_cost_;
    std::vector<int> degree_;
};

/// Natural-map residual ||x - proj_+(x + grad(x))||_inf; zero exactly at
/// solutions of the composed VI.
inline double vi_residual(const ViProblem& p, const std::vector<double>& x) {
    const std::vector<double> g = p.gradient(x);
    double r = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double proj = std::max(0.0, x[t] + g[t]);
        r = std::max(r, std::abs(x[t] - proj));
    }
    return r;
}

namespace detail {
inline void check_config(const SolverConfig& cfg) {
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw DomainError("damping must lie in (0, 1]");
    if (cfg.max_iterations < 1) throw DomainError("max_iterations must be positive");
    if (!(cfg.tolerance > 0.0)) throw DomainError("tolerance must be positive");
}

inline void check_start(const ViProblem& p, const std::vector<double>& x0) {
    if (static_cast<int>(x0.size()) != p.dimension())
        throw InvalidStartError("start point has the wrong dimension");
    for (double v : x0)
        if (v < 0.0) throw InvalidStartError("start point has negative entries");
}
}  // namespace detail

/// Damped Jacobi best response x <- (1 - theta) x + theta BR(x) for
/// constant-marginal-cost problems. The undamped map oscillates once several
/// firms interact (its linearization has an eigenvalue 1 - theta (n+1)/2 along
/// the all-ones direction), so the damping actually applied is
/// min(theta, 2/(n+1)), which makes the map a global contraction; the
/// configured theta is honored whenever it is already in that range.
/// Convergence is declared when ||x - BR(x)||_inf <= tolerance.
inline SolveResult best_response_iterate(const ViProblem& p, const SolverConfig& cfg,
                                         const std::vector<double>& x0) {
    detail::check_config(cfg);
    detail::check_start(p, x0);
    if (!p.constant_cost())
        throw UnsupportedModelError("best response iteration needs constant marginal costs");

    const double theta = std::min(cfg.damping, 2.0 / (p.firms() + 1));
    SolveResult res;
    res.x = x0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const std::vector<double> br = p.best_response(res.x);
        double displacement = 0.0;
        for (std::size_t t = 0; t < br.size(); ++t)
            displacement = std::max(displacement, std::abs(res.x[t] - br[t]));
        res.residual = displacement;
        if (displacement <= cfg.tolerance) {
            res.converged = true;
            break;
        }
        double change = 0.0;
        for (std::size_t t = 0; t < br.size(); ++t) {
            const double next = (1.0 - theta) * res.x[t] + theta * br[t];
            change = std::max(change, std::abs(next - res.x[t]));
            res.x[t] = next;
        }
        res.iterations = it;
        res.trace.push_back({it, displacement, change});
    }
    return res;
}

/// Projected fixed-point iteration x <- proj_+(x + sigma grad(x)) for the
/// general model. The step halves whenever a candidate raises the natural
/// residual. On convergence the VI inequality <grad(x*), y - x*> <= 0 is
/// spot-checked on sampled feasible points. Throws GradientMismatchError when
/// a supplied analytic dc/dq disagrees with finite differences at probe points.
inline SolveResult solve_general(const ViProblem& p, const SolverConfig& cfg) {
    detail::check_config(cfg);

    if (const GeneralCost* gc = p.general_cost(); gc && gc->cost_dq) {
        const double probes[] = {0.0, 0.37, 1.13, 2.71, 9.62};
        std::vector<int> seen;
        for (int i = 0; i < p.firms(); ++i) {
            const int eta = p.degrees()[i];
            if (std::find(seen.begin(), seen.end(), eta) != seen.end()) continue;
            seen.push_back(eta);
            for (double q : probes) {
                const double analytic = gc->cost_dq(q, eta);
                GeneralCost fd_only{gc->cost, nullptr};
                const double fd = fd_only.dq(q, eta);
                if (std::abs(analytic - fd) > 1e-5 * std::max(1.0, std::abs(analytic))) {
                    std::ostringstream os;
                    os << "analytic dc/dq " << analytic << " vs finite difference " << fd
                       << " at q=" << q << ", degree=" << eta;
                    throw GradientMismatchError(os.str());
                }
            }
        }
    }

    const int n = p.firms();
    double sigma = cfg.step > 0.0 ? cfg.step : 1.0 / (2.0 * n);

    SolveResult res;
    // Scaled interior guess from the gradient at the origin,
    // x_li = max(0, (alpha_l - s_li - c_i(0)) / (n+1)).
    res.x.assign(p.dimension(), 0.0);
    const std::vector<double> g0 = p.gradient(res.x);
    for (int t = 0; t < p.dimension(); ++t) res.x[t] = std::max(0.0, g0[t] / (n + 1));

    res.residual = vi_residual(p, res.x);
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        if (res.residual <= cfg.tolerance) {
            res.converged = true;
            break;
        }
        const std::vector<double> g = p.gradient(res.x);
        std::vector<double> cand(p.dimension());
        for (int t = 0; t < p.dimension(); ++t)
            cand[t] = std::max(0.0, res.x[t] + sigma * g[t]);
        const double cand_res = vi_residual(p, cand);
        res.iterations = it;
        if (cand_res > res.residual && sigma > 1e-14) {
            sigma /= 2.0;
            res.trace.push_back({it, res.residual, 0.0});
            continue;
        }
        double change = 0.0;
        for (int t = 0; t < p.dimension(); ++t)
            change = std::max(change, std::abs(cand[t] - res.x[t]));
        res.x = std::move(cand);
        res.residual = cand_res;
        res.trace.push_back({it, res.residual, change});
    }
    if (res.residual <= cfg.tolerance) res.converged = true;

    if (res.converged) {
        const std::vector<double> g = p.gradient(res.x);
        double scale = 1.0;
        for (double xv : res.x) scale = std::max(scale, std::abs(xv));
        std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.dimension()));
        std::uniform_real_distribution<double> unif(0.0, 2.0 * scale);
        double worst = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < 64; ++s) {
            double inner = 0.0;
            for (int t = 0; t < p.dimension(); ++t) inner += g[t] * (unif(rng) - res.x[t]);
            worst = std::max(worst, inner);
        }
        res.vi_worst = worst;
        const double slack =
            4.0 * p.dimension() * std::max(cfg.tolerance, res.residual) * scale + 1e-12;
        res.vi_verified = worst <= slack;
    }
    return res;
}

/// CSV trace of (iteration, residual, max-coordinate-change).
inline std::string trace_csv(const std::vector<TracePoint>& trace) {
    std::ostringstream os;
    os << "iteration,residual,max_change\n";
    os.precision(17);
    for (const TracePoint& t : trace)
        os << t.iteration << "," << t.residual << "," << t.max_change << "\n";
    return os.str();
}

}  // namespace colnet
