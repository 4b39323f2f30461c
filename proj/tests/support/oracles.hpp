#pragma once

// Test-only reference implementations, kept independent of the library's
// closed forms and solver so the two sides can check each other.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Damped simultaneous best response for one linear-demand market with fixed
/// per-firm costs. Plain loop, no projection tricks; theta is chosen small
/// enough that the map contracts for any firm count.
inline std::vector<double> best_response_market(double alpha, const std::vector<double>& cost,
                                                double tol = 1e-13, int max_iter = 200000) {
    const int n = static_cast<int>(cost.size());
    const double theta = 1.0 / (n + 1);
    std::vector<double> x(n, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        double total = 0.0;
        for (double v : x) total += v;
        double worst = 0.0;
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) {
            const double br = std::max(0.0, (alpha - (total - x[i]) - cost[i]) / 2.0);
            worst = std::max(worst, std::abs(br - x[i]));
            next[i] = (1.0 - theta) * x[i] + theta * br;
        }
        if (worst <= tol) return x;
        x = std::move(next);
    }
    throw std::runtime_error("oracle best response did not converge");
}

/// Same equilibrium via a different algebraic route: solve the interior
/// first-order system (alpha - Q - q_i - c_i = 0) by Gaussian elimination.
/// Only valid when the solution is interior.
inline std::vector<double> linear_solve_market(double alpha, const std::vector<double>& cost) {
    const int n = static_cast<int>(cost.size());
    // System: q_i + Q = alpha - c_i, i.e. (I + ones) q = b.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 1.0));
    for (int i = 0; i < n; ++i) {
        a[i][i] = 2.0;
        a[i][n] = alpha - cost[i];
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = a[i][n] / a[i][i];
    return q;
}

/// Per-firm profits in one market given quantities and full per-unit costs.
inline std::vector<double> market_profits(double alpha, const std::vector<double>& cost,
                                          const std::vector<double>& q) {
    double total = 0.0;
    for (double v : q) total += v;
    const double price = alpha - total;
    std::vector<double> y(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) y[i] = q[i] * (price - cost[i]);
    return y;
}

}  // namespace oracles
