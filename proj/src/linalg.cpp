#include "carma/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace carma::linalg {

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
    return m.exp();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    // Column-major vec: vec(A S) = (I kron A) vec S, vec(S A^T) = (A kron I) vec S.
    const Eigen::MatrixXd system =
        Eigen::kroneckerProduct(eye, a).eval() + Eigen::kroneckerProduct(a, eye).eval();
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
    const Eigen::VectorXd vec_s = system.fullPivLu().solve(rhs);
    Eigen::MatrixXd s = Eigen::Map<const Eigen::MatrixXd>(vec_s.data(), n, n);
    return 0.5 * (s + s.transpose());
}

Eigen::MatrixXd integrated_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q, double horizon) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = a;
    block.topRightCorner(n, n) = q;
    block.bottomRightCorner(n, n) = -a.transpose();
    const Eigen::MatrixXd e = expm(block * horizon);
    // top-right block is int_0^T e^{A(T-s)} Q e^{-A^T s} ds; right-multiplying
    // by e^{A^T T} gives the Gramian.
    Eigen::MatrixXd g = e.topRightCorner(n, n) * e.topLeftCorner(n, n).transpose();
    return 0.5 * (g + g.transpose());
}

}  // namespace carma::linalg
