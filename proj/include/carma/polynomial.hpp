#pragma once

// Dense polynomial helpers. Coefficients are stored in ascending order:
// c[0] + c[1] z + ... + c[n] z^n.

#include <complex>
#include <span>
#include <vector>

namespace carma {

using cdouble = std::complex<double>;

namespace poly {

/// Coefficients of prod_i (z - r_i), monic.
std::vector<cdouble> from_roots(std::span<const cdouble> roots);

/// Coefficients of prod_i (1 - w_i z).
std::vector<cdouble> from_reciprocal_factors(std::span<const cdouble> w);

std::vector<double> multiply(std::span<const double> a, std::span<const double> b);

double evaluate(std::span<const double> c, double z);
cdouble evaluate(std::span<const double> c, cdouble z);
cdouble evaluate(std::span<const cdouble> c, cdouble z);

/// Derivative coefficients.
std::vector<double> derivative(std::span<const double> c);

/// Real parts of c; throws NumericError if any imaginary part exceeds
/// tol * max|c|.
std::vector<double> real_coefficients(std::span<const cdouble> c, double tol = 1e-10);

/// All complex roots via companion-matrix eigenvalues, each refined by a
/// few Newton steps. Trailing zero leading coefficients must be trimmed by
/// the caller.
std::vector<cdouble> roots(std::span<const double> c);

/// First n coefficients of the power series num(z) / den(z); den[0] != 0.
std::vector<double> series_divide(std::span<const double> num, std::span<const double> den,
                                  std::size_t n);

/// Lag-k sums sum_j c_j c_{j+k} for k = 0..c.size()-1.
std::vector<double> autocorrelation_sums(std::span<const double> c);

/// Replace each root by the exact conjugate of its nearest partner so that
/// expanded coefficients come out real. Roots with |Im| <= tol are made real.
void symmetrize_conjugates(std::vector<cdouble>& roots, double tol = 1e-7);

}  // namespace poly
}  // namespace carma
