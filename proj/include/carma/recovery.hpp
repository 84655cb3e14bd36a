#pragma once

// Driving-noise recovery from sampled observations and kernel estimation
// from the Wold coefficients of the sampled ARMA.

#include <cstdint>
#include <span>
#include <vector>

#include "carma/levy.hpp"
#include "carma/model.hpp"
#include "carma/spectral.hpp"

namespace carma {

struct RecoveredIncrements {
    double delta = 0.0;
    std::vector<double> values;  // values[i] pairs with path.driving[first_index + i]
    std::size_t first_index = 0;
    std::size_t burn_in = 0;
    SampledArma source_arma;
};

/// ceil(log(1e-12) / log(max |1/r|)) over the MA roots r; 0 without MA roots.
std::size_t inversion_burn_in(const SampledArma& arma);

/// Theta(B) Z_n = Phi(B) Y_n from zero initial values, L = sqrt(delta)/sigma_delta Z.
/// Refuses (NonInvertibleLimit) when Theta is not minimum phase.
RecoveredIncrements invert(const PathGrid& path, const SampledArma& arma);

/// Same recursion on a raw series; returns Z_0..Z_{n-1} with Z_k = 0 for k < p.
std::vector<double> arma_innovations(std::span<const double> y, std::span<const double> phi,
                                     std::span<const double> theta);

struct McEstimate {
    double mean = 0.0;
    double mc_stderr = 0.0;
    std::size_t paths = 0;
};

struct RecoveryMcOptions {
    int workers = 1;
    int subgrid_factor = 0;  // 0: driver default
    JumpScheme scheme = JumpScheme::RandomizedNode;
};

/// Monte Carlo estimate of E[(sum_{i<=N} L_i - L_{N delta})^2], N = floor(t/delta),
/// with L_i the recovered increments; one stationary path per seed
/// derive_seed(seed, k). The result does not depend on the worker count.
McEstimate recovery_error_mc(const CarmaModel& model, double delta, double t, std::size_t n_paths,
                             const Driver& driver, std::uint64_t seed, const RecoveryMcOptions& options = {});

/// Same sampling scheme for E|S_t (S_s - S_t) - L_t (L_s - L_t)|, S the partial
/// sums of the recovered increments, t <= s, both on the floor(./delta) grid.
/// Goes to 0 with delta whenever the squared error does.
McEstimate recovery_product_error_mc(const CarmaModel& model, double delta, double t, double s,
                                     std::size_t n_paths, const Driver& driver, std::uint64_t seed,
                                     const RecoveryMcOptions& options = {});

/// Finite-delta error variance for p = 2, q in {0, 1}.
double carma2_error_closed_form(const CarmaModel& model, double delta, double t);

/// Its limit as delta -> 0: 0 for q = 0, 2(e^{-s b t} + s b t - 1)(s - 1)/b for
/// q = 1 with b = mu_1 and s = sgn(b).
double carma2_error_limit(const CarmaModel& model, double t);

/// Biased (divisor n) sample autocovariances at lags 0..max_lag.
std::vector<double> sample_autocovariance(std::span<const double> y, std::size_t max_lag);

struct KernelEstimate {
    std::vector<double> t;
    std::vector<double> ghat;  // (sigma_delta / sqrt(delta)) psi_{floor(t/delta)}
    SampledArma arma;
};

/// Theoretical mode: exact sampled ARMA of the model.
KernelEstimate estimate_kernel(const CarmaModel& model, double delta, std::span<const double> t_grid);

/// Empirical mode: AR part of order p by extended Yule-Walker on the sample
/// autocovariances, MA part by factorizing the filtered sample covariances.
KernelEstimate estimate_kernel(const PathGrid& path, int p, std::span<const double> t_grid);

}  // namespace carma
