#include "carma/riemann.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "carma/alpha.hpp"
#include "carma/errors.hpp"

namespace carma {

namespace {

void require_rule(double h, bool open) {
    const bool ok = open ? (h > 0.0 && h < 1.0) : (h >= 0.0 && h <= 1.0);
    if (!ok) throw ModelError(open ? "rule h must lie in (0, 1)" : "rule h must lie in [0, 1]");
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

std::vector<double> RiemannArma::ma_polynomial() const {
    std::vector<double> out(theta_tilde.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (k % 2 == 0 ? 1.0 : -1.0) * theta_tilde[k];
    return out;
}

std::size_t default_riemann_truncation(double delta) {
    return static_cast<std::size_t>(std::ceil(std::pow(delta, -1.1)));
}

PathGrid simulate_riemann(const CarmaModel& model, const IncrementSeries& inc, double h,
                          std::optional<std::size_t> truncation) {
    require_rule(h, false);
    const double delta = inc.delta;
    const std::size_t big_n = truncation.value_or(default_riemann_truncation(delta));
    if (big_n < 1) throw ModelError("Riemann truncation must be at least 1");
    if (big_n >= inc.size())
        throw ModelError("Riemann truncation " + std::to_string(big_n) + " needs more than " +
                         std::to_string(inc.size()) + " increments");

    // g at the nodes; the right limit sigma b_{p-1} is used at t = 0.
    std::vector<double> w(big_n + 1);
    for (std::size_t j = 0; j <= big_n; ++j) {
        const double t = delta * (static_cast<double>(j) + h);
        w[j] = t > 0.0 ? kernel(model, t) : model.sigma() * model.b()[model.p() - 1];
    }

    PathGrid out;
    out.delta = delta;
    out.burn_in = big_n;
    out.seed = inc.seed;
    out.driver = inc.driver.name();
    const std::size_t len = inc.size() - big_n;
    out.y.resize(len);
    out.driving.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        const std::size_t n = i + big_n;
        double acc = 0.0;
        for (std::size_t j = 0; j <= big_n; ++j) acc += w[j] * inc.values[n - j];
        out.y[i] = acc;
        out.driving[i] = inc.values[n];
    }
    return out;
}

RiemannArma riemann_arma_coefficients(const CarmaModel& model, double delta, double h) {
    require_rule(h, false);
    if (!(delta > 0.0)) throw ModelError("sampling step must be positive");
    if (!model.has_distinct_ar_roots())
        throw DistinctRootsError("Riemann ARMA coefficients require distinct autoregressive roots");

    const int p = model.p();
    const auto lambda = model.ar_roots();
    std::vector<cdouble> z(p);
    for (int l = 0; l < p; ++l) z[l] = std::exp(lambda[l] * delta);

    std::vector<cdouble> signed_coeffs(p, 0.0);
    for (int l = 0; l < p; ++l) {
        // prod_{j != l} (1 - z_j B), built by multiplying the remaining factors.
        std::vector<cdouble> others;
        for (int j = 0; j < p; ++j)
            if (j != l) others.push_back(z[j]);
        const std::vector<cdouble> e = poly::from_reciprocal_factors(others);
        const cdouble c = model.b_poly(lambda[l]) / model.a_prime(lambda[l]) * std::exp(h * delta * lambda[l]);
        for (int k = 0; k < p; ++k) signed_coeffs[k] += c * e[k];
    }
    const std::vector<double> signed_real = poly::real_coefficients(signed_coeffs, 1e-9);

    RiemannArma out;
    out.delta = delta;
    out.h = h;
    out.sigma = model.sigma();
    out.theta_tilde.resize(p);
    for (int k = 0; k < p; ++k) out.theta_tilde[k] = (k % 2 == 0 ? 1.0 : -1.0) * signed_real[k];

    std::vector<double> t = signed_real;
    double scale = 0.0;
    for (const double v : t) scale = std::max(scale, std::abs(v));
    while (t.size() > 1 && std::abs(t.back()) <= 1e-14 * scale) t.pop_back();
    out.derived_roots = poly::roots(t);
    out.invertible = std::all_of(out.derived_roots.begin(), out.derived_roots.end(),
                                 [](cdouble r) { return std::abs(r) > 1.0; });
    return out;
}

std::vector<double> chi_roots(int p_minus_q, double h) {
    require_rule(h, true);
    if (p_minus_q == 2) return {(h - 1.0) / h};
    if (p_minus_q == 3) {
        const double s = std::sqrt(1.0 - 4.0 * (h - 1.0) * h);
        const double num = 2.0 * (h - 1.0) * (h - 1.0);
        const double base = 2.0 * (h - 1.0) * h - 1.0;
        // j = 1 subtracts (-1)^1 s, j = 2 subtracts s.
        return {num / (base + s), num / (base - s)};
    }
    throw ModelError("chi roots are available for p - q in {2, 3}");
}

std::vector<double> leading_riemann_polynomial(int d, double h) {
    if (d < 1) throw ModelError("p - q must be at least 1");
    std::vector<double> c(d, 0.0);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i <= k; ++i) c[k] += (i % 2 == 0 ? 1.0 : -1.0) * binomial(d, i) * std::pow(k - i + h, d - 1);
    return c;
}

OptimalRules optimal_rules(int d) {
    if (d < 1) throw ModelError("p - q must be at least 1");
    OptimalRules r;
    switch (d) {
        case 1:
            r.all_h = true;
            return r;
        case 2: {
            const double s = std::sqrt(3.0);
            r.matching_h = {(3.0 - s) / 6.0, (3.0 + s) / 6.0};
            r.invertible_matching_h = {(3.0 + s) / 6.0};
            return r;
        }
        case 3: {
            const double s = std::sqrt(225.0 - 30.0 * std::sqrt(30.0));
            r.matching_h = {(15.0 - s) / 30.0, (15.0 + s) / 30.0};
            return r;
        }
        default:
            throw UnsupportedError("no closed-form optimal rule for p - q = " + std::to_string(d));
    }
}

std::vector<double> matching_residuals(int d, double h) {
    if (d < 2) throw ModelError("matching system needs p - q >= 2");
    const std::vector<double> etas = eta_values(d - 1);
    std::vector<double> eta_poly{1.0};
    double eta_prod = 1.0;
    for (const double e : etas) {
        eta_poly = poly::multiply(eta_poly, std::vector<double>{1.0, e});
        eta_prod *= e;
    }
    const std::vector<double> lhs = poly::autocorrelation_sums(eta_poly);
    const std::vector<double> rhs = poly::autocorrelation_sums(leading_riemann_polynomial(d, h));
    const double lscale = factorial(2 * d - 1) * eta_prod;
    const double rscale = factorial(d - 1) * factorial(d - 1);
    std::vector<double> res(d);
    for (int k = 0; k < d; ++k) res[k] = lhs[k] / lscale - rhs[k] / rscale;
    return res;
}

std::vector<double> match_h_numerically(int d) {
    if (d < 2 || d > 3) throw ModelError("numerical matching is available for p - q in {2, 3}");
    auto top = [d](double h) { return matching_residuals(d, h)[d - 1]; };

    std::vector<double> out;
    constexpr int kGrid = 1000;
    double a = 1e-6, fa = top(a);
    for (int i = 1; i <= kGrid; ++i) {
        const double b = i == kGrid ? 1.0 - 1e-6 : static_cast<double>(i) / kGrid;
        const double fb = top(b);
        if (fa == 0.0) {
            out.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0)) {
            std::uintmax_t iters = 200;
            const auto bracket = boost::math::tools::toms748_solve(
                top, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
            out.push_back(0.5 * (bracket.first + bracket.second));
        }
        a = b;
        fa = fb;
    }
    std::vector<double> accepted;
    for (const double h : out) {
        const std::vector<double> res = matching_residuals(d, h);
        const double worst = std::abs(*std::max_element(res.begin(), res.end(), [](double x, double y) {
            return std::abs(x) < std::abs(y);
        }));
        if (worst < 1e-10) accepted.push_back(h);
    }
    return accepted;
}

}  // namespace carma
