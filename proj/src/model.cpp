#include "carma/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"

namespace carma {

namespace {

bool closed_under_conjugation(std::span<const cdouble> roots, double tol) {
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        const double scale = std::max(1.0, std::abs(roots[i]));
        if (std::abs(roots[i].imag()) <= tol * scale) {
            used[i] = true;
            continue;
        }
        bool found = false;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - std::conj(roots[i])) <= tol * scale) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

// Separation below this (relative) makes the residue sums lose too many digits.
constexpr double kResidueSeparation = 1e-6;

}  // namespace

CarmaModel::CarmaModel(std::vector<cdouble> ar_roots, std::vector<cdouble> ma_mu, double sigma)
    : ar_roots_(std::move(ar_roots)), ma_mu_(std::move(ma_mu)), sigma_(sigma) {
    if (ar_roots_.empty()) throw ModelError("CARMA model needs p >= 1 autoregressive roots");
    if (ma_mu_.size() >= ar_roots_.size())
        throw ModelError("CARMA model needs q < p, got p = " + std::to_string(ar_roots_.size()) +
                         ", q = " + std::to_string(ma_mu_.size()));
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw ModelError("sigma must be positive and finite");
    if (!closed_under_conjugation(ar_roots_, 1e-12))
        throw ModelError("autoregressive roots are not closed under conjugation");
    if (!closed_under_conjugation(ma_mu_, 1e-12))
        throw ModelError("moving-average roots are not closed under conjugation");

    const int pp = p();
    const std::vector<cdouble> ac = poly::from_roots(ar_roots_);
    a_monic_ = poly::real_coefficients(ac, 1e-10);
    a_.resize(pp);
    for (int k = 1; k <= pp; ++k) a_[k - 1] = a_monic_[pp - k];

    std::vector<cdouble> neg_mu(ma_mu_.size());
    std::transform(ma_mu_.begin(), ma_mu_.end(), neg_mu.begin(), [](cdouble m) { return -m; });
    const std::vector<double> bc = poly::real_coefficients(poly::from_roots(neg_mu), 1e-10);
    b_.assign(pp, 0.0);
    std::copy(bc.begin(), bc.end(), b_.begin());

    companion_ = Eigen::MatrixXd::Zero(pp, pp);
    for (int i = 0; i + 1 < pp; ++i) companion_(i, i + 1) = 1.0;
    for (int j = 0; j < pp; ++j) companion_(pp - 1, j) = -a_[pp - 1 - j];
    b_vec_ = Eigen::Map<const Eigen::VectorXd>(b_.data(), pp);
}

Eigen::VectorXd CarmaModel::e_p() const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p());
    e(p() - 1) = 1.0;
    return e;
}

cdouble CarmaModel::a_poly(cdouble z) const { return poly::evaluate(std::span<const double>(a_monic_), z); }

cdouble CarmaModel::a_prime(cdouble z) const {
    const std::vector<double> d = poly::derivative(a_monic_);
    return poly::evaluate(std::span<const double>(d), z);
}

cdouble CarmaModel::b_poly(cdouble z) const { return poly::evaluate(std::span<const double>(b_), z); }

bool CarmaModel::has_distinct_ar_roots(double rel_tol) const {
    for (std::size_t i = 0; i < ar_roots_.size(); ++i)
        for (std::size_t j = i + 1; j < ar_roots_.size(); ++j) {
            const double scale = std::max({1.0, std::abs(ar_roots_[i]), std::abs(ar_roots_[j])});
            if (std::abs(ar_roots_[i] - ar_roots_[j]) <= rel_tol * scale) return false;
        }
    return true;
}

double CarmaModel::max_ar_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const cdouble l : ar_roots_) m = std::max(m, l.real());
    return m;
}

double CarmaModel::min_abs_ar_real() const {
    double m = std::numeric_limits<double>::infinity();
    for (const cdouble l : ar_roots_) m = std::min(m, std::abs(l.real()));
    return m;
}

bool ValidationReport::has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate(const CarmaModel& model) {
    ValidationReport report;
    for (const cdouble l : model.ar_roots()) {
        if (l.real() >= 0.0) {
            std::ostringstream os;
            os << "AR root " << l << " has non-negative real part (model is not causal)";
            report.violations.push_back({ViolationKind::NonCausal, os.str()});
        }
    }
    for (const cdouble m : model.ma_mu()) {
        if (m.real() == 0.0) {
            std::ostringstream os;
            os << "MA root " << -m << " lies on the imaginary axis";
            report.violations.push_back({ViolationKind::MaRootOnImaginaryAxis, os.str()});
        }
    }
    // a and b are monic, so the resultant is prod (lambda_i + mu_j); a
    // vanishing factor is a shared root.
    for (const cdouble l : model.ar_roots())
        for (const cdouble m : model.ma_mu()) {
            if (std::abs(l + m) <= 1e-8 * std::max(1.0, std::abs(l))) {
                std::ostringstream os;
                os << "a(z) and b(z) share the root " << l;
                report.violations.push_back({ViolationKind::CommonRoot, os.str()});
            }
        }
    return report;
}

void require_valid(const CarmaModel& model) {
    const ValidationReport report = validate(model);
    if (report.ok()) return;
    std::string msg = "invalid CARMA model:";
    for (const auto& v : report.violations) msg += " " + v.message + ";";
    throw ModelError(msg);
}

bool is_invertible(const CarmaModel& model) {
    return std::all_of(model.ma_mu().begin(), model.ma_mu().end(), [](cdouble m) { return m.real() > 0.0; });
}

std::vector<cdouble> kernel_residues(const CarmaModel& model) {
    if (!model.has_distinct_ar_roots())
        throw DistinctRootsError("residue form requires distinct autoregressive roots");
    std::vector<cdouble> r;
    r.reserve(model.p());
    for (const cdouble l : model.ar_roots()) r.push_back(model.sigma() * model.b_poly(l) / model.a_prime(l));
    return r;
}

double kernel_residue(const CarmaModel& model, double t) {
    if (t <= 0.0) return 0.0;
    const std::vector<cdouble> res = kernel_residues(model);
    cdouble acc = 0.0;
    for (int l = 0; l < model.p(); ++l) acc += res[l] * std::exp(model.ar_roots()[l] * t);
    return acc.real();
}

double kernel_matrix_exp(const CarmaModel& model, double t) {
    if (t <= 0.0) return 0.0;
    const Eigen::MatrixXd e = linalg::expm(model.companion() * t);
    return model.sigma() * model.b_vector().dot(e.col(model.p() - 1));
}

double kernel(const CarmaModel& model, double t) {
    if (t <= 0.0) return 0.0;
    if (model.has_distinct_ar_roots(kResidueSeparation)) return kernel_residue(model, t);
    return kernel_matrix_exp(model, t);
}

cdouble transfer(const CarmaModel& model, double omega) {
    const cdouble z(0.0, -omega);
    return model.sigma() * model.b_poly(z) / model.a_poly(z);
}

Eigen::MatrixXd stationary_state_covariance(const CarmaModel& model) {
    const Eigen::VectorXd e = model.e_p();
    return linalg::solve_lyapunov(model.companion(), e * e.transpose());
}

double autocovariance(const CarmaModel& model, double t) {
    const double lag = std::abs(t);
    const double s2 = model.sigma() * model.sigma();
    if (model.has_distinct_ar_roots(kResidueSeparation)) {
        cdouble acc = 0.0;
        for (const cdouble l : model.ar_roots()) {
            const cdouble w = model.b_poly(l) * model.b_poly(-l) / (model.a_prime(l) * model.a_poly(-l));
            acc += w * std::exp(l * lag);
        }
        return s2 * acc.real();
    }
    const Eigen::MatrixXd cov = stationary_state_covariance(model);
    const Eigen::MatrixXd e = linalg::expm(model.companion() * lag);
    return s2 * model.b_vector().dot(e * cov * model.b_vector());
}

}  // namespace carma
