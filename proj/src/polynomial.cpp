#include "carma/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "carma/errors.hpp"

namespace carma::poly {

std::vector<cdouble> from_roots(std::span<const cdouble> roots) {
    std::vector<cdouble> c{1.0};
    for (const cdouble r : roots) {
        std::vector<cdouble> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return c;
}

std::vector<cdouble> from_reciprocal_factors(std::span<const cdouble> w) {
    std::vector<cdouble> c{1.0};
    for (const cdouble wi : w) {
        std::vector<cdouble> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k] += c[k];
            next[k + 1] -= wi * c[k];
        }
        c = std::move(next);
    }
    return c;
}

std::vector<double> multiply(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

double evaluate(std::span<const double> c, double z) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cdouble evaluate(std::span<const double> c, cdouble z) {
    cdouble acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cdouble evaluate(std::span<const cdouble> c, cdouble z) {
    cdouble acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::vector<double> derivative(std::span<const double> c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

std::vector<double> real_coefficients(std::span<const cdouble> c, double tol) {
    double scale = 0.0;
    for (const cdouble v : c) scale = std::max(scale, std::abs(v));
    std::vector<double> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (std::abs(c[k].imag()) > tol * std::max(scale, 1e-300))
            throw NumericError("polynomial coefficient has a non-negligible imaginary part");
        out[k] = c[k].real();
    }
    return out;
}

std::vector<cdouble> roots(std::span<const double> c) {
    if (c.size() < 2) return {};
    const std::size_t n = c.size() - 1;
    if (c[n] == 0.0) throw NumericError("polynomial leading coefficient is zero");

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericError("companion eigenvalue solve failed");

    const std::vector<double> dc = derivative(c);
    std::vector<cdouble> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        cdouble z = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
        // Newton polish; keep the step only while the residual shrinks.
        cdouble fz = evaluate(c, z);
        for (int it = 0; it < 8; ++it) {
            const cdouble dfz = evaluate(std::span<const double>(dc), z);
            if (std::abs(dfz) == 0.0) break;
            const cdouble trial = z - fz / dfz;
            const cdouble ftrial = evaluate(c, trial);
            if (!(std::abs(ftrial) < std::abs(fz))) break;
            z = trial;
            fz = ftrial;
        }
        out[i] = z;
    }
    return out;
}

std::vector<double> series_divide(std::span<const double> num, std::span<const double> den,
                                  std::size_t n) {
    if (den.empty() || den[0] == 0.0) throw NumericError("series division by a zero constant term");
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = k < num.size() ? num[k] : 0.0;
        const std::size_t jmax = std::min(k, den.size() - 1);
        for (std::size_t j = 1; j <= jmax; ++j) acc -= den[j] * out[k - j];
        out[k] = acc / den[0];
    }
    return out;
}

std::vector<double> autocorrelation_sums(std::span<const double> c) {
    std::vector<double> out(c.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k)
        for (std::size_t j = 0; j + k < c.size(); ++j) out[k] += c[j] * c[j + k];
    return out;
}

void symmetrize_conjugates(std::vector<cdouble>& roots, double tol) {
    std::vector<bool> done(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (done[i]) continue;
        const double scale = std::max(1.0, std::abs(roots[i]));
        if (std::abs(roots[i].imag()) <= tol * scale) {
            roots[i] = roots[i].real();
            done[i] = true;
            continue;
        }
        std::size_t best = roots.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j == i || done[j]) continue;
            const double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == roots.size() || best_dist > 1e-4 * scale)
            throw NumericError("complex root without a conjugate partner");
        const cdouble merged = 0.5 * (roots[i] + std::conj(roots[best]));
        roots[i] = merged;
        roots[best] = std::conj(merged);
        done[i] = done[best] = true;
    }
}

}  // namespace carma::poly
