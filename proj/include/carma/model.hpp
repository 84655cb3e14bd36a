#pragma once

// Continuous-time ARMA model a(D) Y = sigma b(D) DL in root form.
//
// AR roots lambda_j are the zeros of a(z) = prod (z - lambda_j); the MA
// polynomial is b(z) = prod (z + mu_j), so the zeros of b are -mu_j. The
// state-space form uses the companion matrix A (last row -a_p .. -a_1), the
// vector b = (b_0, .., b_{p-1}) with b_q = 1, and e_p. With the state driven
// by sigma dL, Y = b^T X and the kernel is g(t) = sigma b^T e^{At} e_p.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "carma/polynomial.hpp"

namespace carma {

class CarmaModel {
public:
    /// Throws ModelError if ar_roots is empty, ma_mu.size() >= ar_roots.size(),
    /// sigma <= 0, or either root list is not closed under conjugation (1e-12).
    CarmaModel(std::vector<cdouble> ar_roots, std::vector<cdouble> ma_mu, double sigma);

    int p() const { return static_cast<int>(ar_roots_.size()); }
    int q() const { return static_cast<int>(ma_mu_.size()); }
    double sigma() const { return sigma_; }

    std::span<const cdouble> ar_roots() const { return ar_roots_; }
    std::span<const cdouble> ma_mu() const { return ma_mu_; }

    /// a_1..a_p (a[0] holds a_1).
    std::span<const double> a() const { return a_; }
    /// b_0..b_{p-1}.
    std::span<const double> b() const { return b_; }

    const Eigen::MatrixXd& companion() const { return companion_; }
    const Eigen::VectorXd& b_vector() const { return b_vec_; }
    Eigen::VectorXd e_p() const;

    cdouble a_poly(cdouble z) const;
    cdouble a_prime(cdouble z) const;
    cdouble b_poly(cdouble z) const;

    /// Pairwise AR-root separation exceeds rel_tol * max(1, |lambda|).
    bool has_distinct_ar_roots(double rel_tol = 1e-10) const;

    /// max_j Re(lambda_j).
    double max_ar_real() const;
    /// min_j |Re(lambda_j)|.
    double min_abs_ar_real() const;

private:
    std::vector<cdouble> ar_roots_;
    std::vector<cdouble> ma_mu_;
    double sigma_;
    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<double> a_monic_;  // ascending, a_monic_[p] = 1
    Eigen::MatrixXd companion_;
    Eigen::VectorXd b_vec_;
};

enum class ViolationKind { NonCausal, MaRootOnImaginaryAxis, CommonRoot };

struct Violation {
    ViolationKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(ViolationKind kind) const;
};

ValidationReport validate(const CarmaModel& model);

/// Throws ModelError listing every violation when the report is not empty.
void require_valid(const CarmaModel& model);

/// Re(mu_j) > 0 for all j; vacuously true for q = 0.
bool is_invertible(const CarmaModel& model);

/// sigma b(lambda_l) / a'(lambda_l) for each AR root; requires distinct roots.
std::vector<cdouble> kernel_residues(const CarmaModel& model);

/// g(t); residue form when roots are well separated, matrix exponential
/// otherwise. Zero for t <= 0.
double kernel(const CarmaModel& model, double t);

/// Residue form. Throws DistinctRootsError for repeated roots.
double kernel_residue(const CarmaModel& model, double t);

/// sigma b^T e^{At} e_p.
double kernel_matrix_exp(const CarmaModel& model, double t);

/// sigma b(-i omega) / a(-i omega).
cdouble transfer(const CarmaModel& model, double omega);

/// Stationary state covariance S with A S + S A^T = -e_p e_p^T (unit driver).
Eigen::MatrixXd stationary_state_covariance(const CarmaModel& model);

/// gamma_Y(t) = Cov(Y_s, Y_{s+t}); closed residue form for distinct roots,
/// otherwise sigma^2 b^T e^{A|t|} S b.
double autocovariance(const CarmaModel& model, double t);

}  // namespace carma
