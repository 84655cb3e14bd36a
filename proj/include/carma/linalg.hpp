#pragma once

#include <Eigen/Dense>

namespace carma::linalg {

/// Matrix exponential by scaling and squaring with a fixed-order Pade
/// approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

/// Solves A S + S A^T + Q = 0 for S (A stable).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// int_0^T e^{A u} Q e^{A^T u} du from a single block exponential of
/// [[A, Q], [0, -A^T]] T.
Eigen::MatrixXd integrated_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q, double horizon);

}  // namespace carma::linalg
