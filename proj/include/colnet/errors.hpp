#pragma once

#include <stdexcept>
#include <string>

namespace colnet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the model's domain (bad node index, degree, parameter).
struct DomainError : Error { using Error::Error; };

// Degree sequence admits no simple graph.
struct NotGraphicalError : Error { using Error::Error; };

// Enumeration request larger than the configured node cap.
struct CapExceededError : Error { using Error::Error; };

// Operation is undefined for the given cost model kind.
struct UnsupportedModelError : Error { using Error::Error; };

// Shifted convex cost family fails one of the theorem hypotheses.
struct InvalidCostFamilyError : Error { using Error::Error; };

// Graph degrees differ from the cost model's target degrees.
struct DegreeMismatchError : Error { using Error::Error; };

// Solver start point lies outside the feasible set.
struct InvalidStartError : Error { using Error::Error; };

// Analytic marginal-cost derivative disagrees with finite differences.
struct GradientMismatchError : Error { using Error::Error; };

// Solver hit its iteration cap without reaching the tolerance.
struct NonConvergenceError : Error { using Error::Error; };

// Payoff evaluation failed for some graph during a stability scan.
struct OracleFailureError : Error { using Error::Error; };

// Scenario document fails cross-field validation.
struct ScenarioError : Error { using Error::Error; };

}  // namespace colnet
