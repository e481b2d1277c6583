#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fbspec {

/// Legendre polynomial P_n(x) by the three-term recurrence.
double legendre_eval(int n, double x);

/// First (order = 1) or second (order = 2) derivative of P_n at x.
/// Throws std::invalid_argument for any other order.
double legendre_deriv(int n, double x, int order);

/// Fills values[k] = d^order/dx^order P_k(x) for k = 0..values.size()-1.
/// Valid on the closed interval, endpoints included.
void legendre_table(double x, int order, std::span<double> values);

/// Evaluates sum_k c[k] P_k(x) with Clenshaw's recurrence.
double legendre_series(std::span<const double> c, double x);

struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing, inside (-1, 1)
    std::vector<double> weights;  // positive
    int order = 0;

    double integrate(const std::function<double(double)>& f) const;

    /// Integral of f over [a, b] with the rule mapped affinely.
    double integrate(const std::function<double(double)>& f, double a, double b) const;
};

/// N-point Gauss-Legendre rule; nodes are the roots of P_N.
///
/// Roots come from Newton's method started at the asymptotic guesses
/// cos(pi (i - 1/4) / (N + 1/2)). Weights are 2 / ((1 - x^2) P_N'(x)^2).
/// Throws std::runtime_error if a root fails to converge in 100 iterations.
QuadratureRule gauss_rule(int n);

/// Neumann-compatible trial functions on [-1, 1]:
///
///   b_i = P_i - i(i+1) / ((i+2)(i+3)) P_{i+2},   i = 0..N
///
/// Each b_i has b_i'(-1) = b_i'(1) = 0, so any expansion in this basis
/// satisfies homogeneous Neumann conditions at both ends.
class TrialBasis {
public:
    explicit TrialBasis(int n);

    /// Index of the last trial function; the basis holds N + 1 functions.
    int n() const { return n_; }
    int size() const { return n_ + 1; }
    int degree_bound() const { return n_ + 2; }

    /// Correction coefficient i(i+1)/((i+2)(i+3)).
    static double correction(int i);

    /// b_i(x), b_i'(x) or b_i''(x) for order 0, 1, 2.
    double eval(int i, double x, int order) const;

    /// All N + 1 basis values (or derivatives) at x.
    void eval_all(double x, int order, std::span<double> out) const;

    /// Legendre coefficients (length N + 3) of sum_i a_i b_i.
    std::vector<double> to_legendre(std::span<const double> coeffs) const;

    /// sum_i a_i b_i(x).
    double expand(std::span<const double> coeffs, double x) const;

private:
    int n_;
};

/// Trial-basis free helper: same as TrialBasis::eval with the basis size
/// implied by i.
double trial_eval(int i, double x, int order);

}  // namespace fbspec
