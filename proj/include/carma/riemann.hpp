#pragma once

// Approximating Riemann sums Y~_n = sum_j g(delta (j + h)) dL_{n-j} and
// their ARMA(p, p-1) form
//     Phi(B) Y~_n = sigma (th_0 - th_1 B + ... + (-1)^{p-1} th_{p-1} B^{p-1}) dL_n.

#include <optional>
#include <vector>

#include "carma/levy.hpp"
#include "carma/model.hpp"

namespace carma {

struct RiemannArma {
    double delta = 0.0;
    double h = 0.0;
    double sigma = 1.0;
    /// th_k = sum_l b(lambda_l)/a'(lambda_l) e^{h delta lambda_l} e_k({e^{delta lambda_j}}_{j != l}),
    /// without the factor sigma, so sigma th_0 = g(h delta).
    std::vector<double> theta_tilde;
    std::vector<cdouble> derived_roots;
    bool invertible = false;

    /// (th_0, -th_1, th_2, ...): the MA polynomial acting on sigma dL.
    std::vector<double> ma_polynomial() const;
};

/// Truncated sum with N + 1 terms; N defaults to ceil(delta^{-1.1}). The
/// output has increments.size() - N points, y[i] using increments up to
/// index i + N.
PathGrid simulate_riemann(const CarmaModel& model, const IncrementSeries& increments, double h,
                          std::optional<std::size_t> truncation = std::nullopt);

std::size_t default_riemann_truncation(double delta);

/// Throws DistinctRootsError for repeated AR roots.
RiemannArma riemann_arma_coefficients(const CarmaModel& model, double delta, double h);

/// Leading-order spurious MA roots chi for p - q in {2, 3}, h in (0, 1).
std::vector<double> chi_roots(int p_minus_q, double h);

/// Leading-order Riemann MA polynomial: c_k = sum_{i<=k} (-1)^i C(d, i) (k - i + h)^{d-1},
/// k = 0..d-1, so that Theta~(z) ~ delta^{d-1}/(d-1)! sum_k c_k z^k times (1 - z)^q.
std::vector<double> leading_riemann_polynomial(int p_minus_q, double h);

struct OptimalRules {
    bool all_h = false;  // every h in (0, 1)
    std::vector<double> matching_h;
    std::vector<double> invertible_matching_h;
};

/// Closed forms for p - q in {1, 2, 3}; UnsupportedError beyond.
OptimalRules optimal_rules(int p_minus_q);

/// Normalized residuals, lags 0..d-1, of the leading-order matching system
///     acov(prod (1 + eta_i z))(k) / ((2d-1)! prod eta) = acov(c(h))(k) / ((d-1)!)^2.
std::vector<double> matching_residuals(int p_minus_q, double h);

/// Roots in (0, 1) of the top-lag equation whose full residual vector is
/// below 1e-10.
std::vector<double> match_h_numerically(int p_minus_q);

}  // namespace carma
