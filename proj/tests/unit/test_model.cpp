#include <cmath>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"
#include "carma/model.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

using namespace carma;

TEST_CASE("constructor rejects malformed models") {
    CHECK_THROWS_AS(CarmaModel({}, {}, 1.0), ModelError);
    CHECK_THROWS_AS(CarmaModel({-1.0}, {1.0}, 1.0), ModelError);
    CHECK_THROWS_AS(CarmaModel({-1.0, -2.0}, {}, 0.0), ModelError);
    CHECK_THROWS_AS(CarmaModel({-1.0, -2.0}, {}, -1.0), ModelError);
    CHECK_THROWS_AS(CarmaModel({cdouble(-1.0, 1.0), cdouble(-1.0, 0.5)}, {}, 1.0), ModelError);
    CHECK_THROWS_AS(CarmaModel({-1.0, -2.0, -3.0}, {cdouble(1.0, 1.0), 2.0}, 1.0), ModelError);
}

TEST_CASE("polynomial coefficients and companion matrix") {
    const CarmaModel m({-0.7, -1.2}, {3.0}, 1.5);
    CHECK(m.p() == 2);
    CHECK(m.q() == 1);
    // a(z) = z^2 + 1.9 z + 0.84, b(z) = z + 3
    CHECK(m.a()[0] == doctest::Approx(1.9));
    CHECK(m.a()[1] == doctest::Approx(0.84));
    CHECK(m.b()[0] == doctest::Approx(3.0));
    CHECK(m.b()[1] == doctest::Approx(1.0));
    const auto& A = m.companion();
    CHECK(A(0, 1) == 1.0);
    CHECK(A(1, 0) == doctest::Approx(-0.84));
    CHECK(A(1, 1) == doctest::Approx(-1.9));
    CHECK(std::abs(m.a_poly(-0.7)) < 1e-14);
    CHECK(std::abs(m.b_poly(-3.0)) < 1e-14);
    CHECK(m.max_ar_real() == doctest::Approx(-0.7));
    CHECK(m.min_abs_ar_real() == doctest::Approx(0.7));
}

TEST_CASE("validation collects every violation") {
    const CarmaModel bad({0.5, -1.0, -2.0}, {0.0, 1.0}, 1.0);
    const ValidationReport r = validate(bad);
    CHECK(r.has(ViolationKind::NonCausal));
    CHECK(r.has(ViolationKind::MaRootOnImaginaryAxis));
    CHECK(r.has(ViolationKind::CommonRoot));
    CHECK(r.violations.size() == 3);
    CHECK_THROWS_AS(require_valid(bad), ModelError);
    CHECK(validate(CarmaModel({-1.0, -2.0}, {3.0}, 1.0)).ok());
}

TEST_CASE("invertibility follows the sign of Re mu") {
    CHECK(is_invertible(CarmaModel({-1.0, -2.0}, {}, 1.0)));
    CHECK(is_invertible(CarmaModel({-1.0, -2.0}, {0.5}, 1.0)));
    CHECK_FALSE(is_invertible(CarmaModel({-1.0, -2.0}, {-0.5}, 1.0)));
}

TEST_CASE("kernel closed forms") {
    const CarmaModel car1({-0.8}, {}, 2.0);
    for (const double t : {0.1, 1.0, 3.0}) CHECK(kernel(car1, t) == doctest::Approx(2.0 * std::exp(-0.8 * t)));
    CHECK(kernel(car1, 0.0) == 0.0);
    CHECK(kernel(car1, -1.0) == 0.0);

    // Repeated root: g(t) = t e^{-t}; the residue form must refuse.
    const CarmaModel rep({-1.0, -1.0}, {}, 1.0);
    CHECK_FALSE(rep.has_distinct_ar_roots());
    CHECK_THROWS_AS(kernel_residue(rep, 1.0), DistinctRootsError);
    for (const double t : {0.2, 1.0, 4.0}) CHECK(kernel(rep, t) == doctest::Approx(t * std::exp(-t)).epsilon(1e-10));

    const CarmaModel m({-0.7, -1.2}, {3.0}, 1.0);
    for (const double t : {0.05, 0.5, 2.0})
        CHECK(kernel(m, t) == doctest::Approx(static_cast<double>(oracle::kernel(m, t))).epsilon(1e-12));
}

TEST_CASE("autocovariance closed forms") {
    const CarmaModel car1({-0.8}, {}, 2.0);
    for (const double t : {0.0, 0.5, -2.0})
        CHECK(autocovariance(car1, t) == doctest::Approx(4.0 / 1.6 * std::exp(-0.8 * std::abs(t))));

    // g = t e^{-t}: gamma(t) = e^{-t} (1 + t) / 4.
    const CarmaModel rep({-1.0, -1.0}, {}, 1.0);
    for (const double t : {0.0, 0.7, 3.0})
        CHECK(autocovariance(rep, t) == doctest::Approx(std::exp(-t) * (1.0 + t) / 4.0).epsilon(1e-10));

    testing::ModelGen gen(11);
    for (int i = 0; i < 30; ++i) {
        const CarmaModel m = gen.model();
        for (const double t : {0.0, 0.3, 1.7}) {
            const double want = static_cast<double>(oracle::autocovariance(m, t));
            CHECK(autocovariance(m, t) == doctest::Approx(want).epsilon(1e-9).scale(autocovariance(m, 0.0)));
        }
    }
}

TEST_CASE("stationary state covariance solves the Lyapunov equation") {
    const CarmaModel m({cdouble(-0.5, 1.0), cdouble(-0.5, -1.0), -2.0}, {1.0}, 1.0);
    const Eigen::MatrixXd S = stationary_state_covariance(m);
    const Eigen::MatrixXd& A = m.companion();
    const Eigen::VectorXd e = m.e_p();
    const Eigen::MatrixXd resid = A * S + S * A.transpose() + e * e.transpose();
    CHECK(resid.norm() < 1e-12);
    CHECK((S - S.transpose()).norm() < 1e-14);
    const double var = m.sigma() * m.sigma() * m.b_vector().dot(S * m.b_vector());
    CHECK(var == doctest::Approx(autocovariance(m, 0.0)).epsilon(1e-10));
}

TEST_CASE("transfer function at zero frequency") {
    const CarmaModel m({-0.7, -1.2}, {3.0}, 2.0);
    const cdouble h0 = transfer(m, 0.0);
    CHECK(h0.real() == doctest::Approx(2.0 * 3.0 / 0.84));
    CHECK(h0.imag() == doctest::Approx(0.0));
}

TEST_CASE("integrated covariance matches a Riemann sum") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, -0.84, -1.9;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
    q(1, 1) = 1.0;
    const Eigen::MatrixXd got = linalg::integrated_covariance(a, q, 0.5);
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(2, 2);
    const int steps = 20000;
    const double du = 0.5 / steps;
    for (int i = 0; i < steps; ++i) {
        const Eigen::MatrixXd e = linalg::expm(a * ((i + 0.5) * du));
        want += e * q * e.transpose() * du;
    }
    CHECK((got - want).norm() < 1e-8);
}
