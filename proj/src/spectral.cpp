#include "carma/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "carma/alpha.hpp"
#include "carma/errors.hpp"
#include "carma/linalg.hpp"

namespace carma {

namespace {

using Quadrature = boost::math::quadrature::gauss<double, 20>;

std::vector<double> trimmed(std::span<const double> c) {
    std::vector<double> out(c.begin(), c.end());
    while (out.size() > 1 && out.back() == 0.0) out.pop_back();
    return out;
}

// v_j = sum_{i <= j} phi_i e^{A (j-i) delta} e_p for j = 0..p-1.
std::vector<Eigen::VectorXd> filtered_vectors(const CarmaModel& model, const Eigen::MatrixXd& step,
                                              std::span<const double> phi) {
    const int p = model.p();
    std::vector<Eigen::VectorXd> v;
    v.reserve(p);
    Eigen::VectorXd cur = model.e_p();
    v.push_back(cur);
    for (int j = 1; j < p; ++j) {
        cur = step * cur;
        cur(p - 1) += phi[j];
        v.push_back(cur);
    }
    return v;
}

// v_p = prod_l (e^{A delta} - e^{lambda_l delta}) e_p, which vanishes by
// Cayley-Hamilton. Each factor is written as
// e^{lambda delta} (A - lambda) delta phi_1((A - lambda) delta) so that the
// product carries the delta^p scale instead of an O(1) rounding floor.
Eigen::VectorXd filtered_tail_vector(const CarmaModel& model, double delta) {
    const int p = model.p();
    const Eigen::MatrixXcd a = model.companion().cast<cdouble>();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(p, p);
    Eigen::MatrixXcd prod = eye;
    for (const cdouble l : model.ar_roots()) {
        const Eigen::MatrixXcd x = (a - l * eye) * delta;
        Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(2 * p, 2 * p);
        aug.topLeftCorner(p, p) = x;
        aug.topRightCorner(p, p) = eye;
        const Eigen::MatrixXcd phi1 = aug.exp().topRightCorner(p, p);
        prod = prod * (std::exp(l * delta) * x * phi1);
    }
    return (prod * model.e_p().cast<cdouble>()).real();
}

// Lagged inner products sum_j int_0^delta k_j(w) k_{j+k}(w) dw with
// k_j(w) = sigma b^T e^{A w} v_j.
std::vector<double> piecewise_inner_products(const CarmaModel& model, double delta,
                                             const std::vector<Eigen::VectorXd>& v, int nlags) {
    const int count = static_cast<int>(v.size());
    double rate = 0.0;
    for (const cdouble l : model.ar_roots()) rate = std::max(rate, std::abs(l));
    const int pieces = std::max(1, static_cast<int>(std::ceil(delta * rate)));
    const double width = delta / pieces;

    std::vector<double> out(nlags, 0.0);
    std::vector<double> k(count);
    const auto& nodes = Quadrature::abscissa();
    const auto& weights = Quadrature::weights();
    const Eigen::RowVectorXd sb = model.sigma() * model.b_vector().transpose();
    for (int s = 0; s < pieces; ++s) {
        const double centre = (s + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (const double sign : {-1.0, 1.0}) {
                if (sign < 0.0 && nodes[i] == 0.0) continue;
                const double w = centre + sign * half * nodes[i];
                const Eigen::RowVectorXd r = sb * linalg::expm(model.companion() * w);
                for (int j = 0; j < count; ++j) k[j] = r.dot(v[j]);
                for (int lag = 0; lag < nlags; ++lag) {
                    double acc = 0.0;
                    for (int j = 0; j + lag < count; ++j) acc += k[j] * k[j + lag];
                    out[lag] += half * weights[i] * acc;
                }
            }
        }
    }
    return out;
}

}  // namespace

std::vector<cdouble> SampledArma::ma_roots() const {
    const std::vector<double> t = trimmed(theta);
    return poly::roots(t);
}

bool SampledArma::min_phase(double tol) const {
    for (const cdouble r : ma_roots())
        if (!(std::abs(r) > 1.0 + tol)) return false;
    return true;
}

std::vector<double> ar_polynomial(const CarmaModel& model, double delta) {
    if (!(delta > 0.0)) throw ModelError("sampling step must be positive");
    std::vector<cdouble> z;
    for (const cdouble l : model.ar_roots()) z.push_back(std::exp(l * delta));
    return poly::real_coefficients(poly::from_reciprocal_factors(z), 1e-10);
}

std::vector<double> filtered_autocovariance(const CarmaModel& model, double delta) {
    const std::vector<double> phi = ar_polynomial(model, delta);
    const Eigen::MatrixXd step = linalg::expm(model.companion() * delta);
    const int p = model.p();
    const std::vector<double> gamma = piecewise_inner_products(model, delta, filtered_vectors(model, step, phi), p);

    const auto [t0, t1] = filtered_autocovariance_tail(model, delta);
    if (std::max(t0, t1) > 1e-9 * gamma[0])
        throw NumericError("filtered covariance does not vanish beyond lag p - 1 (lag p: " + std::to_string(t0) +
                           ", lag p+1: " + std::to_string(t1) + ", lag 0: " + std::to_string(gamma[0]) + ")");
    return gamma;
}

std::pair<double, double> filtered_autocovariance_tail(const CarmaModel& model, double delta) {
    const std::vector<double> phi = ar_polynomial(model, delta);
    const Eigen::MatrixXd step = linalg::expm(model.companion() * delta);
    std::vector<Eigen::VectorXd> v = filtered_vectors(model, step, phi);
    const Eigen::VectorXd vp = filtered_tail_vector(model, delta);
    v.push_back(vp);
    v.push_back(step * vp);
    const int p = model.p();
    const std::vector<double> lags = piecewise_inner_products(model, delta, v, p + 2);
    return {std::abs(lags[p]), std::abs(lags[p + 1])};
}

std::vector<double> filtered_autocovariance_direct(const CarmaModel& model, double delta, int nlags) {
    const std::vector<double> phi = ar_polynomial(model, delta);
    const int p = model.p();
    std::vector<double> out(nlags, 0.0);
    for (int k = 0; k < nlags; ++k)
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= p; ++j) out[k] += phi[i] * phi[j] * autocovariance(model, (k + i - j) * delta);
    return out;
}

std::vector<double> ma_autocovariance(std::span<const double> theta, double sigma2) {
    std::vector<double> out = poly::autocorrelation_sums(theta);
    for (double& v : out) v *= sigma2;
    return out;
}

MaFactor spectral_factorize(std::span<const double> gamma) {
    if (gamma.empty()) throw InvalidCovariance("empty covariance sequence");
    const double g0 = gamma[0];
    if (!(g0 > 0.0) || !std::isfinite(g0)) throw InvalidCovariance("lag-0 covariance must be positive");

    double total = 0.0;
    for (const double g : gamma) total += std::abs(g);
    constexpr int kGrid = 4096;
    for (int i = 0; i <= kGrid; ++i) {
        const double w = std::numbers::pi * i / kGrid;
        double c = g0;
        for (std::size_t k = 1; k < gamma.size(); ++k) c += 2.0 * gamma[k] * std::cos(static_cast<double>(k) * w);
        if (c < -1e-12 * total)
            throw InvalidCovariance("covariance generating function is negative at frequency " + std::to_string(w));
    }

    std::size_t m = gamma.size() - 1;
    while (m > 0 && std::abs(gamma[m]) <= 1e-14 * g0) --m;

    MaFactor out;
    if (m > 0) {
        std::vector<double> c(2 * m + 1);
        for (std::size_t i = 0; i <= 2 * m; ++i) c[i] = gamma[i > m ? i - m : m - i];
        std::vector<cdouble> all = poly::roots(c);
        std::sort(all.begin(), all.end(), [](cdouble a, cdouble b) { return std::abs(a) > std::abs(b); });
        all.resize(m);
        for (const cdouble r : all)
            if (std::abs(std::abs(r) - 1.0) <= 1e-8)
                throw NonInvertibleLimit("spectral factor has a root on the unit circle (|r| = " +
                                         std::to_string(std::abs(r)) + ")");
        for (const cdouble r : all)
            if (std::abs(r) < 1.0) throw NumericError("spectral factorization selected a root inside the unit disc");
        poly::symmetrize_conjugates(all);
        std::vector<cdouble> inv;
        for (const cdouble r : all) inv.push_back(1.0 / r);
        out.theta = poly::real_coefficients(poly::from_reciprocal_factors(inv), 1e-9);
        out.roots = std::move(all);
    } else {
        out.theta = {1.0};
    }
    double ss = 0.0;
    for (const double t : out.theta) ss += t * t;
    out.sigma2 = g0 / ss;
    out.theta.resize(gamma.size(), 0.0);

    const std::vector<double> back = ma_autocovariance(out.theta, out.sigma2);
    for (std::size_t k = 0; k < gamma.size(); ++k)
        if (std::abs(back[k] - gamma[k]) > 1e-6 * g0)
            throw NumericError("spectral factor does not reproduce the input covariances");
    return out;
}

SampledArma sampled_arma(const CarmaModel& model, double delta) {
    SampledArma out;
    out.delta = delta;
    out.phi = ar_polynomial(model, delta);
    const MaFactor f = spectral_factorize(filtered_autocovariance(model, delta));
    out.theta = f.theta;
    out.sigma2_delta = f.sigma2;
    out.provenance = Provenance::ExactFactorization;
    return out;
}

SampledArma asymptotic_arma(const CarmaModel& model, double delta) {
    if (!(delta > 0.0)) throw ModelError("sampling step must be positive");
    if (!is_invertible(model))
        throw UnsupportedError("asymptotic MA factor needs an invertible model; use the exact factorization instead");
    const int d = model.p() - model.q();
    const std::vector<double> etas = eta_values(d - 1);

    std::vector<cdouble> w;  // Theta = prod (1 - w z)
    double eta_prod = 1.0;
    for (const double e : etas) {
        w.push_back(-e);
        eta_prod *= e;
    }
    for (const cdouble mu : model.ma_mu()) {
        const double s = mu.real() > 0.0 ? 1.0 : -1.0;
        w.push_back(1.0 - s * mu * delta);
    }

    SampledArma out;
    out.delta = delta;
    out.phi = ar_polynomial(model, delta);
    out.theta = poly::real_coefficients(poly::from_reciprocal_factors(w), 1e-10);
    out.theta.resize(model.p(), 0.0);
    double fact = 1.0;
    for (int k = 2; k <= 2 * d - 1; ++k) fact *= k;
    out.sigma2_delta = model.sigma() * model.sigma() * std::pow(delta, 2 * d - 1) / (fact * eta_prod);
    out.provenance = Provenance::Asymptotic;
    return out;
}

std::vector<double> wold_coefficients(const SampledArma& arma, std::size_t n) {
    return poly::series_divide(arma.theta, arma.phi, n);
}

}  // namespace carma
