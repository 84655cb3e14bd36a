#pragma once

// Randomized invariants. Each check runs `cases` independent models and
// reports the first failure with its case index; the unit tests and the
// acceptance runner share these.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "carma/errors.hpp"
#include "carma/model.hpp"
#include "carma/recovery.hpp"
#include "carma/spectral.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace carma::testing {

struct PropertyResult {
    bool ok = true;
    int cases = 0;
    std::string detail;
};

template <class Check>
PropertyResult run_cases(int cases, std::uint64_t seed, Check check) {
    PropertyResult res;
    ModelGen gen(seed);
    for (int i = 0; i < cases; ++i) {
        std::string why;
        bool ok = false;
        try {
            ok = check(gen, why);
        } catch (const std::exception& e) {
            why = std::string("threw: ") + e.what();
        }
        ++res.cases;
        if (!ok) {
            res.ok = false;
            res.detail = "case " + std::to_string(i) + ": " + why;
            return res;
        }
    }
    return res;
}

// The factorized MA polynomial has every root outside the unit circle, for
// invertible and non-invertible models alike.
inline PropertyResult min_phase_property(int cases = 100, std::uint64_t seed = 101) {
    return run_cases(cases, seed, [](ModelGen& gen, std::string& why) {
        gen.allow_noninvertible = true;
        const CarmaModel m = gen.model();
        const double delta = gen.delta();
        const SampledArma arma = sampled_arma(m, delta);
        if (arma.min_phase() && arma.sigma2_delta > 0.0 && arma.theta[0] == 1.0) return true;
        why = "not minimum phase: " + describe(m, delta);
        return false;
    });
}

// spectral_factorize(ma_autocovariance(theta)) reproduces the covariance and,
// for an already minimum-phase theta, theta itself.
inline PropertyResult factorization_round_trip_property(int cases = 100, std::uint64_t seed = 202) {
    return run_cases(cases, seed, [](ModelGen& gen, std::string& why) {
        const int degree = gen.pick(1, 5);
        const std::vector<double> theta = gen.ma_polynomial(degree);
        const double s2 = gen.uniform(0.1, 3.0);
        const std::vector<double> gamma = ma_autocovariance(theta, s2);
        const MaFactor f = spectral_factorize(gamma);
        const std::vector<double> back = ma_autocovariance(f.theta, f.sigma2);
        for (std::size_t k = 0; k < gamma.size(); ++k)
            if (std::abs(back[k] - gamma[k]) > 1e-9 * gamma[0]) {
                why = "covariance mismatch at lag " + std::to_string(k);
                return false;
            }
        for (const cdouble r : f.roots)
            if (!(std::abs(r) > 1.0)) {
                why = "selected root inside the unit disc";
                return false;
            }
        SampledArma probe;
        probe.theta = theta;
        if (probe.min_phase()) {
            for (std::size_t k = 0; k < theta.size(); ++k)
                if (std::abs(f.theta[k] - theta[k]) > 1e-8 * std::max(1.0, std::abs(theta[k]))) {
                    why = "min-phase input not recovered at coefficient " + std::to_string(k);
                    return false;
                }
            if (std::abs(f.sigma2 - s2) > 1e-8 * s2) {
                why = "innovation variance not recovered";
                return false;
            }
        }
        return true;
    });
}

// Phi(z) psi(z) = Theta(z) up to the truncation order.
inline PropertyResult wold_identity_property(int cases = 100, std::uint64_t seed = 303) {
    return run_cases(cases, seed, [](ModelGen& gen, std::string& why) {
        const CarmaModel m = gen.model();
        const double delta = gen.delta();
        const SampledArma arma = sampled_arma(m, delta);
        const std::size_t n = 60;
        const std::vector<double> psi = wold_coefficients(arma, n);
        double scale = 0.0;
        for (const double v : psi) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < arma.phi.size() && i <= k; ++i) acc += arma.phi[i] * psi[k - i];
            const double want = k < arma.theta.size() ? arma.theta[k] : 0.0;
            if (std::abs(acc - want) > 1e-11 * std::max(1.0, scale)) {
                why = "lag " + std::to_string(k) + ": " + describe(m, delta);
                return false;
            }
        }
        return true;
    });
}

// ARMA filtering followed by arma_innovations returns the input series.
inline PropertyResult filter_round_trip_property(int cases = 100, std::uint64_t seed = 404) {
    return run_cases(cases, seed, [](ModelGen& gen, std::string& why) {
        const CarmaModel m = gen.model();
        const double delta = gen.delta();
        const SampledArma arma = sampled_arma(m, delta);
        const std::size_t p = arma.phi.size() - 1;
        const std::size_t len = 400;
        std::normal_distribution<double> normal;
        std::vector<double> z(len, 0.0), y(len, 0.0);
        for (std::size_t n = p; n < len; ++n) z[n] = normal(gen.rng);
        for (std::size_t n = p; n < len; ++n) {
            double acc = 0.0;
            for (std::size_t j = 0; j < arma.theta.size() && j <= n; ++j) acc += arma.theta[j] * z[n - j];
            for (std::size_t i = 1; i <= p; ++i) acc -= arma.phi[i] * y[n - i];
            y[n] = acc;
        }
        double scale = 0.0;
        for (const double v : y) scale = std::max(scale, std::abs(v));
        const std::vector<double> back = arma_innovations(y, arma.phi, arma.theta);
        for (std::size_t n = 0; n < len; ++n)
            if (std::abs(back[n] - z[n]) > 1e-9 * std::max(1.0, scale)) {
                why = "index " + std::to_string(n) + ": " + describe(m, delta);
                return false;
            }
        return true;
    });
}

// Residue form, matrix exponential and the long double oracle agree on g.
inline PropertyResult kernel_equivalence_property(int cases = 100, std::uint64_t seed = 505) {
    return run_cases(cases, seed, [](ModelGen& gen, std::string& why) {
        const CarmaModel m = gen.model();
        double scale = 0.0;
        for (const auto r : oracle::residues(m)) scale += std::abs(r);
        for (int i = 0; i < 20; ++i) {
            const double t = gen.uniform(1e-4, 6.0);
            const double a = kernel_residue(m, t);
            const double b = kernel_matrix_exp(m, t);
            const double c = static_cast<double>(oracle::kernel(m, t));
            if (std::abs(a - c) > 1e-11 * scale || std::abs(b - c) > 1e-9 * scale) {
                why = "t=" + std::to_string(t) + ": " + describe(m, 0.0);
                return false;
            }
        }
        return true;
    });
}

// Phi(B) Y is (p-1)-dependent: lags p and p+1 vanish, and the computed lags
// below p match the long double double-sum at moderate delta.
inline PropertyResult dependence_property(int cases = 100, std::uint64_t seed = 606) {
    return run_cases(cases, seed, [](ModelGen& gen, std::string& why) {
        gen.allow_noninvertible = true;
        const CarmaModel m = gen.model();
        const double delta = gen.uniform(0.1, 0.5);
        const std::vector<double> gamma = filtered_autocovariance(m, delta);
        const auto [tp, tp1] = filtered_autocovariance_tail(m, delta);
        if (!(tp <= 1e-9 * gamma[0] && tp1 <= 1e-9 * gamma[0])) {
            why = "tail does not vanish: " + describe(m, delta);
            return false;
        }
        const std::vector<long double> ref = oracle::filtered_autocovariance(m, delta, m.p() + 2);
        for (int k = 0; k < m.p() + 2; ++k) {
            const double got = k < m.p() ? gamma[k] : 0.0;
            if (std::abs(got - static_cast<double>(ref[k])) > 1e-7 * gamma[0]) {
                why = "lag " + std::to_string(k) + " disagrees with the oracle: " + describe(m, delta);
                return false;
            }
        }
        return true;
    });
}

}  // namespace carma::testing
