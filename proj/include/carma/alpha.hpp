#pragma once

// The functions alpha_n(x) defined by
//     sinh(z) / (cosh(z) - 1 + x) = sum_k alpha_k(x) z^{2k+1},
// written as alpha_n(x) = P_n(x) / ((2n+1)! x^{n+1}) with P_n monic of
// degree n, and the roots xi of P_n, which all lie in (2, inf).

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace carma {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct AlphaFunction {
    int n = 0;
    std::vector<double> numerator;  // P_n, ascending

    /// (2n+1)!
    double normalization() const;
    double eval_numerator(double x) const;
    /// alpha_n(x); x != 0.
    double operator()(double x) const;
};

/// Exact integer coefficients of P_n.
struct ExactAlpha {
    int n = 0;
    std::vector<BigInt> numerator;

    Rational eval_numerator(const Rational& x) const;
    AlphaFunction to_double() const;
};

/// P_{n+1} = x^{n+2} L[P_n x^{-(n+1)}] with L = (x-1) d/dx + x(x-2) d^2/dx^2,
/// which is the second-order recursion with factor (2n+3)(2n+2).
AlphaFunction alpha_by_recursion(int n);
ExactAlpha alpha_exact_by_recursion(int n);

/// Truncated series division of sinh by cosh - 1 + x in y = 1/x.
AlphaFunction alpha_by_series(int n);
ExactAlpha alpha_exact_by_series(int n);

/// Explicit double sum over Stirling numbers of the second kind; n <= 4.
ExactAlpha alpha_exact_by_stirling(int n);

/// Stirling number of the second kind S(n, k).
BigInt stirling2(int n, int k);

/// Roots of P_n in increasing order, all > 2. Throws NumericError if fewer
/// than n sign changes are found or a residual check fails.
std::vector<double> xi_roots(int n);

/// eta(xi) = xi - 1 - sqrt((xi - 1)^2 - 1), evaluated without cancellation.
/// Throws ModelError for xi <= 2.
double eta(double xi);

/// eta(xi_i) for the roots of P_{n}, n = p - q - 1 (empty for n = 0).
std::vector<double> eta_values(int n);

}  // namespace carma
