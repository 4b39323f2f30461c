#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "colnet/errors.hpp"

namespace colnet {

/// Marginal cost decreasing linearly in the number of collaborators:
/// c_i = gamma0 - gamma * eta_i. May go negative for large degrees; callers
/// attach a warning instead of clamping.
struct LinearCost {
    double gamma0 = 0.0;  // marginal cost with no links
    double gamma = 0.0;   // per-link reduction, >= 0
};

/// Base function f evaluated on the integer grid. Builtins are defined on all
/// of Z; a tabulated base covers [-half_width, half_width].
class BaseFunction {
public:
    static BaseFunction quadratic(double psi) {
        BaseFunction f;
        f.kind_ = Kind::Quadratic;
        f.psi_ = psi;
        return f;
    }

    static BaseFunction absolute() {
        BaseFunction f;
        f.kind_ = Kind::Absolute;
        return f;
    }

    static BaseFunction zero() { return BaseFunction{}; }

    /// values has odd length 2m+1 and covers arguments -m..m.
    static BaseFunction table(std::vector<double> values) {
        if (values.empty() || values.size() % 2 == 0)
            throw DomainError("base table needs odd length, centered at 0");
        BaseFunction f;
        f.kind_ = Kind::Table;
        f.values_ = std::move(values);
        return f;
    }

    double operator()(int t) const {
        switch (kind_) {
            case Kind::Quadratic: return static_cast<double>(t) * t + psi_;
            case Kind::Absolute: return std::abs(t);
            case Kind::Zero: return 0.0;
            case Kind::Table: {
                const int m = half_width();
                if (t < -m || t > m)
                    throw DomainError("base table does not cover argument " + std::to_string(t));
                return values_[static_cast<std::size_t>(t + m)];
            }
        }
        return 0.0;
    }

    /// Largest |t| the function is defined for.
    int half_width() const {
        return kind_ == Kind::Table
                   ? static_cast<int>((values_.size() - 1) / 2)
                   : std::numeric_limits<int>::max();
    }

    std::string name() const {
        switch (kind_) {
            case Kind::Quadratic: {
                std::ostringstream os;
                os << "quadratic_psi(" << psi_ << ")";
                return os.str();
            }
            case Kind::Absolute: return "abs";
            case Kind::Zero: return "zero";
            case Kind::Table: return "table[" + std::to_string(values_.size()) + "]";
        }
        return "";
    }

    double psi() const { return psi_; }
    bool is_table() const { return kind_ == Kind::Table; }
    const std::vector<double>& values() const { return values_; }

private:
    enum class Kind { Quadratic, Absolute, Zero, Table };
    Kind kind_ = Kind::Zero;
    double psi_ = 0.0;
    std::vector<double> values_;
};

/// Shifted convex family: one base f shared by all firms, firm i paying
/// gamma0 + f(eta_i - k_i). The theorems require f nonnegative, discretely
/// convex, and minimized at 0, with every shift k_i in {0..n-1}.
struct ShiftedConvexCost {
    double gamma0 = 0.0;
    BaseFunction base = BaseFunction::zero();
    std::vector<int> shifts;  // target degree k_i per firm

    int firms() const { return static_cast<int>(shifts.size()); }
};

/// Marginal cost depending on own quantity and degree. The derivative in q is
/// taken from dq when supplied, by central differences otherwise.
struct GeneralCost {
    std::function<double(double quantity, int degree)> cost;
    std::function<double(double quantity, int degree)> cost_dq;  // may be empty

    double operator()(double quantity, int degree) const { return cost(quantity, degree); }

    double dq(double quantity, int degree) const {
        if (cost_dq) return cost_dq(quantity, degree);
        const double h = 1e-6;
        if (quantity >= h)
            return (cost(quantity + h, degree) - cost(quantity - h, degree)) / (2 * h);
        return (cost(quantity + h, degree) - cost(quantity, degree)) / h;
    }
};

using CostModel = std::variant<LinearCost, ShiftedConvexCost, GeneralCost>;

inline double marginal_cost(const LinearCost& m, int degree) {
    if (degree < 0) throw DomainError("degree must be nonnegative");
    return m.gamma0 - m.gamma * degree;
}

inline double marginal_cost(const ShiftedConvexCost& m, int firm, int degree) {
    const int n = m.firms();
    if (firm < 0 || firm >= n) throw DomainError("firm index out of range");
    if (degree < 0 || degree > n - 1) throw DomainError("degree out of range");
    return m.gamma0 + m.base(degree - m.shifts[firm]);
}

/// Model-dispatching marginal cost. quantity is required for GeneralCost and
/// ignored otherwise.
inline double marginal_cost(const CostModel& m, int firm, int degree,
                            std::optional<double> quantity = std::nullopt) {
    if (const auto* lin = std::get_if<LinearCost>(&m)) return marginal_cost(*lin, degree);
    if (const auto* sc = std::get_if<ShiftedConvexCost>(&m))
        return marginal_cost(*sc, firm, degree);
    const auto& gen = std::get<GeneralCost>(m);
    if (!quantity) throw DomainError("general marginal cost needs a quantity");
    if (degree < 0) throw DomainError("degree must be nonnegative");
    return gen(*quantity, degree);
}

/// Cost change from losing one collaborator at the target degree:
/// f(k_i - 1) - f(k_i) = f(-1) - f(0), identical for every firm.
inline double delta_minus(const ShiftedConvexCost& m) { return m.base(-1) - m.base(0); }

/// Cost change from gaining one collaborator at the target degree:
/// f(k_i + 1) - f(k_i) = f(1) - f(0).
inline double delta_plus(const ShiftedConvexCost& m) { return m.base(1) - m.base(0); }

inline double delta_minus(const CostModel& m) {
    const auto* sc = std::get_if<ShiftedConvexCost>(&m);
    if (!sc) throw UnsupportedModelError("delta_minus is defined for shifted convex costs only");
    return delta_minus(*sc);
}

inline double delta_plus(const CostModel& m) {
    const auto* sc = std::get_if<ShiftedConvexCost>(&m);
    if (!sc) throw UnsupportedModelError("delta_plus is defined for shifted convex costs only");
    return delta_plus(*sc);
}

/// Hypothesis check for the shifted convex family over the grid
/// [-(n-1), n-1]. Carries a witness argument for each failed property.
struct FamilyValidation {
    bool domain_covered = true;
    int domain_needed = 0;
    bool nonnegative = true;
    std::optional<int> nonnegative_witness;
    bool convex = true;
    std::optional<int> convex_witness;
    bool min_at_zero = true;
    std::optional<int> min_witness;
    bool shifts_valid = true;
    std::optional<int> shift_witness;  // offending firm

    bool ok() const {
        return domain_covered && nonnegative && convex && min_at_zero && shifts_valid;
    }

    std::string describe() const {
        if (ok()) return "valid shifted convex family";
        std::ostringstream os;
        os << "invalid cost family:";
        if (!domain_covered)
            os << " base table does not cover [-" << domain_needed << "," << domain_needed << "];";
        if (!nonnegative) os << " f(" << *nonnegative_witness << ") < 0;";
        if (!convex) os << " convexity fails at " << *convex_witness << ";";
        if (!min_at_zero) os << " f(" << *min_witness << ") < f(0);";
        if (!shifts_valid) os << " shift of firm " << *shift_witness << " outside {0..n-1};";
        return os.str();
    }
};

inline FamilyValidation validate_convex_family(const ShiftedConvexCost& m, int n) {
    FamilyValidation v;
    if (n < 1) throw DomainError("firm count must be positive");
    const int m_needed = n - 1;
    v.domain_needed = m_needed;
    if (m.base.half_width() < m_needed) {
        v.domain_covered = false;
        return v;  // grid checks below would throw
    }
    for (int t = -m_needed; t <= m_needed; ++t) {
        const double f = m.base(t);
        if (v.nonnegative && f < 0.0) {
            v.nonnegative = false;
            v.nonnegative_witness = t;
        }
        if (v.min_at_zero && f < m.base(0)) {
            v.min_at_zero = false;
            v.min_witness = t;
        }
        if (v.convex && t > -m_needed && t < m_needed) {
            if (m.base(t + 1) - 2.0 * f + m.base(t - 1) < 0.0) {
                v.convex = false;
                v.convex_witness = t;
            }
        }
    }
    if (static_cast<int>(m.shifts.size()) != n) {
        v.shifts_valid = false;
        v.shift_witness = -1;
    } else {
        for (int i = 0; i < n; ++i) {
            if (m.shifts[i] < 0 || m.shifts[i] > n - 1) {
                v.shifts_valid = false;
                v.shift_witness = i;
                break;
            }
        }
    }
    return v;
}

/// True when the model's marginal cost does not depend on quantity, i.e. the
/// closed-form equilibria apply.
inline bool constant_marginal_cost(const CostModel& m) {
    return !std::holds_alternative<GeneralCost>(m);
}

}  // namespace colnet
