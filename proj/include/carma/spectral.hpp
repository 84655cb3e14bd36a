#pragma once

// Sampled ARMA(p, p-1) representation of Y_{n delta}:
//     Phi(B) Y_n = Theta(B) Z_n,  Phi(z) = prod (1 - e^{delta lambda_i} z),
// with Theta the minimum-phase factor of the covariance of U = Phi(B) Y.

#include <span>
#include <vector>

#include "carma/model.hpp"

namespace carma {

enum class Provenance { ExactFactorization, Asymptotic };

struct SampledArma {
    double delta = 0.0;
    std::vector<double> phi;    // ascending, phi[0] = 1
    std::vector<double> theta;  // ascending, theta[0] = 1
    double sigma2_delta = 0.0;
    Provenance provenance = Provenance::ExactFactorization;

    /// Roots of Theta (empty when Theta is constant).
    std::vector<cdouble> ma_roots() const;
    /// Every MA root has modulus > 1 + tol.
    bool min_phase(double tol = 0.0) const;
};

struct MaFactor {
    std::vector<double> theta;
    double sigma2 = 0.0;
    std::vector<cdouble> roots;  // selected roots, all outside the unit disc
};

std::vector<double> ar_polynomial(const CarmaModel& model, double delta);

/// gamma_U(0..p-1) of U_n = Phi(B) Y_n, integrating the filtered kernel
/// piecewise over [j delta, (j+1) delta). Throws NumericError when the
/// lags p and p+1 fail to vanish relative to gamma_U(0).
std::vector<double> filtered_autocovariance(const CarmaModel& model, double delta);

/// Same quantity by the double sum of phi_i phi_j gamma_Y((k+i-j) delta) for
/// lags 0..nlags-1. Loses digits to cancellation when delta is small.
std::vector<double> filtered_autocovariance_direct(const CarmaModel& model, double delta, int nlags);

/// |gamma_U(p)| and |gamma_U(p+1)| from the kernel route (both ~0).
std::pair<double, double> filtered_autocovariance_tail(const CarmaModel& model, double delta);

/// Minimum-phase MA factor of gamma (lags 0..m). Throws NonInvertibleLimit
/// for a root within 1e-8 of the unit circle and InvalidCovariance when the
/// spectrum is negative somewhere.
MaFactor spectral_factorize(std::span<const double> gamma);

/// sigma2 * sum_j theta_j theta_{j+k}, k = 0..theta.size()-1.
std::vector<double> ma_autocovariance(std::span<const double> theta, double sigma2);

/// Exact sampled ARMA by covariance factorization.
SampledArma sampled_arma(const CarmaModel& model, double delta);

/// Leading-order Theta and sigma_delta^2 as delta -> 0. Requires an
/// invertible model.
SampledArma asymptotic_arma(const CarmaModel& model, double delta);

/// psi_0..psi_{n-1} of Theta(z) / Phi(z).
std::vector<double> wold_coefficients(const SampledArma& arma, std::size_t n);

}  // namespace carma
