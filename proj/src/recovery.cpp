#include "carma/recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "carma/errors.hpp"
#include "carma/rng.hpp"

namespace carma {

namespace {

// (e^x - 1) / x without cancellation near 0.
cdouble phi1(cdouble x) {
    if (std::abs(x) < 1e-3) return 1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0 + x * x * x * x / 120.0;
    return (std::exp(x) - 1.0) / x;
}

std::size_t steps_in(double t, double delta) {
    return static_cast<std::size_t>(std::floor(t / delta + 1e-9));
}

}  // namespace

std::size_t inversion_burn_in(const SampledArma& arma) {
    double worst = 0.0;
    for (const cdouble r : arma.ma_roots()) worst = std::max(worst, 1.0 / std::abs(r));
    if (worst == 0.0) return 0;
    if (worst >= 1.0) throw NonInvertibleLimit("MA polynomial has a root on or inside the unit circle");
    return static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(worst)));
}

std::vector<double> arma_innovations(std::span<const double> y, std::span<const double> phi,
                                     std::span<const double> theta) {
    const std::size_t p = phi.size() - 1;
    std::vector<double> z(y.size(), 0.0);
    for (std::size_t n = p; n < y.size(); ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= p; ++i) acc += phi[i] * y[n - i];
        for (std::size_t j = 1; j < theta.size() && j <= n; ++j) acc -= theta[j] * z[n - j];
        z[n] = acc / theta[0];
    }
    return z;
}

RecoveredIncrements invert(const PathGrid& path, const SampledArma& arma) {
    if (!arma.min_phase()) throw NonInvertibleLimit("inversion needs a minimum-phase MA polynomial");
    const std::size_t p = arma.phi.size() - 1;
    const std::size_t burn = inversion_burn_in(arma);
    if (path.size() <= p + burn)
        throw ModelError("path of length " + std::to_string(path.size()) + " is shorter than the inversion burn-in " +
                         std::to_string(p + burn));

    const std::vector<double> z = arma_innovations(path.y, arma.phi, arma.theta);
    RecoveredIncrements out;
    out.delta = path.delta;
    out.first_index = p + burn;
    out.burn_in = burn;
    out.source_arma = arma;
    const double scale = std::sqrt(path.delta / arma.sigma2_delta);
    out.values.reserve(z.size() - out.first_index);
    for (std::size_t n = out.first_index; n < z.size(); ++n) out.values.push_back(scale * z[n]);
    return out;
}

namespace {

// Runs one stationary path per seed derive_seed(seed, k), recovers its
// increments and stores per_path(recovered, path) in slot k. Slots are
// reduced in path order, so the estimate does not depend on scheduling.
template <class PerPath>
McEstimate mc_over_paths(const CarmaModel& model, double delta, std::size_t steps, std::size_t n_paths,
                         const Driver& driver, std::uint64_t seed, const RecoveryMcOptions& options,
                         PerPath per_path) {
    if (n_paths < 2) throw ModelError("Monte Carlo needs at least two paths");
    driver.validate();
    const SampledArma arma = sampled_arma(model, delta);
    const std::size_t length = static_cast<std::size_t>(model.p()) + inversion_burn_in(arma) + steps;

    std::vector<double> values(n_paths, 0.0);
    auto one_path = [&](std::size_t k) {
        const IncrementSeries inc = generate_increments(driver, derive_seed(seed, k), delta, length,
                                                        options.subgrid_factor);
        SimulationOptions sim;
        sim.init = Init::stationary();
        sim.scheme = options.scheme;
        const PathGrid path = simulate_path(model, inc, sim);
        values[k] = per_path(invert(path, arma), path);
    };

    const int workers = std::max(1, options.workers);
    if (workers == 1) {
        for (std::size_t k = 0; k < n_paths; ++k) one_path(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < n_paths; k = next++) {
                    try {
                        one_path(k);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = n_paths;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    McEstimate est;
    est.paths = n_paths;
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(n_paths);
    double var = 0.0;
    for (const double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n_paths - 1);
    est.mean = mean;
    est.mc_stderr = std::sqrt(var / static_cast<double>(n_paths));
    return est;
}

// sum of recovered minus true increments over steps [from, to).
double partial_sums(const RecoveredIncrements& rec, const PathGrid& path, std::size_t from, std::size_t to,
                    double& truth) {
    double est = 0.0;
    truth = 0.0;
    for (std::size_t i = from; i < to; ++i) {
        est += rec.values[i];
        truth += path.driving[rec.first_index + i];
    }
    return est;
}

}  // namespace

McEstimate recovery_error_mc(const CarmaModel& model, double delta, double t, std::size_t n_paths,
                             const Driver& driver, std::uint64_t seed, const RecoveryMcOptions& options) {
    if (!(t > 0.0)) throw ModelError("recovery horizon must be positive");
    const std::size_t steps = steps_in(t, delta);
    if (steps == 0) throw ModelError("horizon is shorter than one sampling step");
    return mc_over_paths(model, delta, steps, n_paths, driver, seed, options,
                         [steps](const RecoveredIncrements& rec, const PathGrid& path) {
                             double truth = 0.0;
                             const double diff = partial_sums(rec, path, 0, steps, truth) - truth;
                             return diff * diff;
                         });
}

McEstimate recovery_product_error_mc(const CarmaModel& model, double delta, double t, double s,
                                     std::size_t n_paths, const Driver& driver, std::uint64_t seed,
                                     const RecoveryMcOptions& options) {
    if (!(t > 0.0) || !(s >= t)) throw ModelError("product check needs 0 < t <= s");
    const std::size_t nt = steps_in(t, delta), ns = steps_in(s, delta);
    if (nt == 0) throw ModelError("horizon is shorter than one sampling step");
    return mc_over_paths(model, delta, ns, n_paths, driver, seed, options,
                         [nt, ns](const RecoveredIncrements& rec, const PathGrid& path) {
                             double a_true = 0.0, b_true = 0.0;
                             const double a = partial_sums(rec, path, 0, nt, a_true);
                             const double b = partial_sums(rec, path, nt, ns, b_true);
                             return std::abs(a * b - a_true * b_true);
                         });
}

double carma2_error_closed_form(const CarmaModel& model, double delta, double t) {
    if (model.p() != 2 || model.q() > 1) throw ModelError("closed-form recovery error needs p = 2 and q <= 1");
    if (!model.has_distinct_ar_roots()) throw DistinctRootsError("closed-form recovery error needs distinct roots");
    const std::size_t n = steps_in(t, delta);
    const SampledArma arma = sampled_arma(model, delta);
    const double theta = -arma.theta[1];

    // int_0^delta g and int_0^delta g(delta + s) ds from the residue form.
    const std::vector<cdouble> res = kernel_residues(model);
    cdouble i0 = 0.0, i_shift = 0.0;
    double zsum = 0.0;
    for (int l = 0; l < 2; ++l) {
        const cdouble lam = model.ar_roots()[l];
        const cdouble base = res[l] * delta * phi1(lam * delta);
        i0 += base;
        i_shift += base * std::exp(lam * delta);
        zsum += std::exp(lam * delta).real();
    }
    const double c0 = i0.real();
    const double c1 = i_shift.real() - (zsum - theta) * c0;

    const double nd = static_cast<double>(n);
    const double s = (std::pow(theta, nd) + nd * (1.0 - theta) - 1.0) / ((1.0 - theta) * (1.0 - theta));
    return 2.0 * nd * delta - 2.0 * std::sqrt(delta / arma.sigma2_delta) * (nd * c0 + s * c1);
}

double carma2_error_limit(const CarmaModel& model, double t) {
    if (model.p() != 2 || model.q() > 1) throw ModelError("recovery error limit needs p = 2 and q <= 1");
    if (model.q() == 0) return 0.0;
    const double b = model.ma_mu()[0].real();
    const double s = b > 0.0 ? 1.0 : -1.0;
    return 2.0 * (std::exp(-s * b * t) + s * b * t - 1.0) * (s - 1.0) / b;
}

std::vector<double> sample_autocovariance(std::span<const double> y, std::size_t max_lag) {
    const std::size_t n = y.size();
    if (n <= max_lag) throw ModelError("series too short for the requested lags");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> out(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) acc += (y[i] - mean) * (y[i + k] - mean);
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

namespace {

KernelEstimate kernel_from_arma(const SampledArma& arma, std::span<const double> t_grid) {
    const double delta = arma.delta;
    std::size_t max_index = 0;
    for (const double t : t_grid) {
        if (t < 0.0) throw ModelError("kernel grid must be non-negative");
        max_index = std::max(max_index, steps_in(t, delta));
    }
    const std::vector<double> psi = wold_coefficients(arma, max_index + 1);
    const double scale = std::sqrt(arma.sigma2_delta / delta);
    KernelEstimate out;
    out.arma = arma;
    out.t.assign(t_grid.begin(), t_grid.end());
    for (const double t : t_grid) out.ghat.push_back(scale * psi[steps_in(t, delta)]);
    return out;
}

}  // namespace

KernelEstimate estimate_kernel(const CarmaModel& model, double delta, std::span<const double> t_grid) {
    return kernel_from_arma(sampled_arma(model, delta), t_grid);
}

KernelEstimate estimate_kernel(const PathGrid& path, int p, std::span<const double> t_grid) {
    if (p < 1) throw ModelError("AR order must be at least 1");
    const std::vector<double> g = sample_autocovariance(path.y, 2 * static_cast<std::size_t>(p));

    // gamma(k) = sum_i a_i gamma(k - i) for k = p..2p-1.
    Eigen::MatrixXd m(p, p);
    Eigen::VectorXd rhs(p);
    for (int r = 0; r < p; ++r) {
        const int k = p + r;
        rhs(r) = g[k];
        for (int i = 1; i <= p; ++i) m(r, i - 1) = g[std::abs(k - i)];
    }
    const Eigen::VectorXd a = m.fullPivLu().solve(rhs);

    SampledArma arma;
    arma.delta = path.delta;
    arma.phi.assign(p + 1, 1.0);
    for (int i = 1; i <= p; ++i) arma.phi[i] = -a(i - 1);

    std::vector<double> gamma_u(p, 0.0);
    for (int k = 0; k < p; ++k)
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= p; ++j) gamma_u[k] += arma.phi[i] * arma.phi[j] * g[std::abs(k + i - j)];
    const MaFactor f = spectral_factorize(gamma_u);
    arma.theta = f.theta;
    arma.sigma2_delta = f.sigma2;
    arma.provenance = Provenance::ExactFactorization;
    return kernel_from_arma(arma, t_grid);
}

}  // namespace carma
