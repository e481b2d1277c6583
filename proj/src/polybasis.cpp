#include "fbspec/polybasis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fbspec {

double legendre_eval(int n, double x) {
    if (n == 0) return 1.0;
    double p_prev = 1.0;
    double p = x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = next;
    }
    return p;
}

void legendre_table(double x, int order, std::span<double> values) {
    if (order < 0 || order > 2) {
        throw std::invalid_argument("legendre_table: order must be 0, 1 or 2, got " +
                                    std::to_string(order));
    }
    const std::size_t count = values.size();
    if (count == 0) return;

    // P_{k+1}' = P_{k-1}' + (2k+1) P_k, and the same relation one derivative up.
    std::vector<double> p(count + 1, 0.0);
    p[0] = 1.0;
    if (count > 1) p[1] = x;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
    }
    if (order == 0) {
        std::copy_n(p.begin(), count, values.begin());
        return;
    }
    std::vector<double> dp(count, 0.0);
    if (count > 1) dp[1] = 1.0;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
    }
    if (order == 1) {
        std::copy(dp.begin(), dp.end(), values.begin());
        return;
    }
    values[0] = 0.0;
    if (count > 1) values[1] = 0.0;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        values[k + 1] = values[k - 1] + (2.0 * k + 1.0) * dp[k];
    }
}

double legendre_deriv(int n, double x, int order) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("legendre_deriv: order must be 1 or 2, got " +
                                    std::to_string(order));
    }
    std::vector<double> table(static_cast<std::size_t>(n) + 1);
    legendre_table(x, order, table);
    return table.back();
}

double legendre_series(std::span<const double> c, double x) {
    // Clenshaw for P_{k+1} = ((2k+1)/(k+1)) x P_k - (k/(k+1)) P_{k-1}.
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t idx = c.size(); idx-- > 1;) {
        const double k = static_cast<double>(idx);
        const double alpha = (2.0 * k + 1.0) / (k + 1.0) * x;
        const double beta = -(k + 1.0) / (k + 2.0);
        const double b0 = c[idx] + alpha * b1 + beta * b2;
        b2 = b1;
        b1 = b0;
    }
    if (c.empty()) return 0.0;
    // Remaining terms: c0 P_0 + b1 P_1 + beta_1 b2 P_0 with beta_1 = -1/2.
    return c[0] + b1 * x - 0.5 * b2;
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
}

double QuadratureRule::integrate(const std::function<double(double)>& f, double a,
                                 double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        sum += weights[i] * f(mid + half * nodes[i]);
    }
    return half * sum;
}

QuadratureRule gauss_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule: N must be >= 1");
    constexpr double tolerance = 1e-14;
    constexpr int max_iterations = 100;

    QuadratureRule rule;
    rule.order = n;
    rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
    rule.weights.assign(static_cast<std::size_t>(n), 0.0);

    const int half = (n + 1) / 2;
    for (int i = 1; i <= half; ++i) {
        double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        bool converged = false;
        for (int it = 0; it < max_iterations; ++it) {
            const double p = legendre_eval(n, x);
            const double p_prev = legendre_eval(n - 1, x);
            dp = n * (x * p - p_prev) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= tolerance) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw std::runtime_error("gauss_rule: Newton iteration failed for root " +
                                     std::to_string(i) + " of P_" + std::to_string(n));
        }
        dp = n * (x * legendre_eval(n, x) - legendre_eval(n - 1, x)) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Guesses run from the right end; mirror into ascending order.
        const auto lo = static_cast<std::size_t>(i - 1);
        const auto hi = static_cast<std::size_t>(n - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

TrialBasis::TrialBasis(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("TrialBasis: N must be >= 0");
}

double TrialBasis::correction(int i) {
    const double k = static_cast<double>(i);
    return k * (k + 1.0) / ((k + 2.0) * (k + 3.0));
}

double trial_eval(int i, double x, int order) {
    if (i < 0) throw std::invalid_argument("trial_eval: negative index");
    if (order < 0 || order > 2) {
        throw std::invalid_argument("trial_eval: order must be 0, 1 or 2, got " +
                                    std::to_string(order));
    }
    std::vector<double> table(static_cast<std::size_t>(i) + 3);
    legendre_table(x, order, table);
    return table[static_cast<std::size_t>(i)] -
           TrialBasis::correction(i) * table[static_cast<std::size_t>(i) + 2];
}

double TrialBasis::eval(int i, double x, int order) const {
    if (i < 0 || i > n_) {
        throw std::out_of_range("TrialBasis::eval: index " + std::to_string(i) +
                                " outside 0.." + std::to_string(n_));
    }
    return trial_eval(i, x, order);
}

void TrialBasis::eval_all(double x, int order, std::span<double> out) const {
    if (order < 0 || order > 2) {
        throw std::invalid_argument("TrialBasis::eval_all: order must be 0, 1 or 2");
    }
    std::vector<double> table(static_cast<std::size_t>(n_) + 3);
    legendre_table(x, order, table);
    for (int i = 0; i <= n_; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = table[k] - correction(i) * table[k + 2];
    }
}

std::vector<double> TrialBasis::to_legendre(std::span<const double> coeffs) const {
    std::vector<double> c(static_cast<std::size_t>(n_) + 3, 0.0);
    for (int i = 0; i <= n_; ++i) {
        const auto k = static_cast<std::size_t>(i);
        c[k] += coeffs[k];
        c[k + 2] -= correction(i) * coeffs[k];
    }
    return c;
}

double TrialBasis::expand(std::span<const double> coeffs, double x) const {
    const auto c = to_legendre(coeffs);
    return legendre_series(c, x);
}

}  // namespace fbspec
