#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "golden_values.hpp"
#include "sgl/gaussian_model.hpp"
#include "sgl/rng.hpp"
#include "testutil.hpp"

using testutil::rel;

namespace {

sgl::GaussianProblem problem_1d(double mu) {
    sgl::Vec m(1);
    m << mu;
    return sgl::GaussianProblem(1, m);
}

}  // namespace

TEST_CASE("problem moments") {
    sgl::Vec mu(2);
    mu << 3.0, 4.0;
    const sgl::GaussianProblem p(2, mu);
    CHECK(p.theta_star() == mu);
    CHECK(p.theta_star_norm_sq() == doctest::Approx(25.0));
    CHECK(p.ex0_norm_sq() == doctest::Approx(27.0));
}

TEST_CASE("true score at a half-life time") {
    const sgl::GaussianProblem p = problem_1d(2.0);
    sgl::Vec x(1);
    x << 0.5;
    // m_{ln 2} = 1/2, so the score is -0.5 + 0.5 * 2 = 0.5.
    CHECK(std::abs(sgl::true_score(std::log(2.0), x, p)[0] - 0.5) < 1e-14);
    sgl::Vec bad(2);
    CHECK_THROWS_AS((void)sgl::true_score(1.0, bad, p), std::invalid_argument);
}

TEST_CASE("approximating score at t = 1") {
    sgl::Vec theta(2), x(2);
    theta << 1.0, 0.0;
    x << 0.0, 1.0;
    const sgl::Vec s = sgl::approx_score(1.0, theta, x);
    CHECK(rel(s[0], golden::kExpNeg1) < 1e-15);
    CHECK(s[1] == -1.0);
}

TEST_CASE("the approximating family is exact at theta = mu") {
    sgl::RngStream rng(99, "exact", 0);
    sgl::Vec mu(3);
    mu << 0.3, -1.2, 2.0;
    const sgl::GaussianProblem p(3, mu);
    for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform(0.0, 4.0);
        sgl::Vec x(3);
        for (int j = 0; j < 3; ++j) x[j] = 2.0 * rng.normal();
        const sgl::Vec diff = sgl::approx_score(t, mu, x) - sgl::true_score(t, x, p);
        CHECK(diff.norm() < 1e-14);
    }
}

TEST_CASE("the packaged family exposes values, Jacobians and the affine flag") {
    const sgl::ScoreFamily f = sgl::affine_family();
    CHECK(f.is_affine);
    sgl::RngStream rng(99, "family", 0);
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(0.0, 3.0);
        sgl::Vec theta(2), x(2);
        for (int j = 0; j < 2; ++j) theta[j] = rng.normal();
        for (int j = 0; j < 2; ++j) x[j] = rng.normal();
        CHECK((f.value(t, theta, x) - sgl::approx_score(t, theta, x)).norm() == 0.0);
        const sgl::Mat jac = f.theta_jacobian(t, theta, x);
        const sgl::Mat expect = sgl::mean_coeff(t) * sgl::Mat::Identity(2, 2);
        CHECK((jac - expect).norm() < 1e-15);
    }
}

TEST_CASE("regularity constants of the affine family") {
    const sgl::AffineScoreConstants c = sgl::affine_constants(problem_1d(0.0));
    CHECK(c.k1 == 1.0);
    CHECK(c.k2 == 1.0);
    CHECK(c.k3 == 1.0);
    CHECK(c.k4 == 1e-12);
    CHECK(c.k_total == 3.0);
    CHECK(c.alpha == 1.0);
    CHECK(c.l_mo == 1.0);
}

TEST_CASE("growth and regularity sweeps over random tuples") {
    const sgl::AffineScoreConstants c = sgl::affine_constants(problem_1d(0.0));
    sgl::RngStream rng(99, "growth", 0);
    int growth_violations = 0, lips_violations = 0, hoel_violations = 0;
    for (int i = 0; i < 100000; ++i) {
        const double t = rng.uniform(0.0, 5.0);
        const double tbar = rng.uniform(0.0, 5.0);
        sgl::Vec theta(2), thetabar(2), x(2);
        for (int j = 0; j < 2; ++j) theta[j] = 3.0 * rng.normal();
        for (int j = 0; j < 2; ++j) thetabar[j] = 3.0 * rng.normal();
        for (int j = 0; j < 2; ++j) x[j] = 3.0 * rng.normal();
        const sgl::Vec s = sgl::approx_score(t, theta, x);
        const double envelope =
            c.k_total * (1.0 + std::pow(t, c.alpha)) * (1.0 + x.norm() + theta.norm());
        growth_violations += !(s.norm() <= envelope + 1e-12);
        const double dtheta =
            (s - sgl::approx_score(t, thetabar, x)).norm();
        lips_violations += !(dtheta <= c.k1 * (theta - thetabar).norm() + 1e-12);
        const double dt = (s - sgl::approx_score(tbar, theta, x)).norm();
        const double hoel =
            c.k2 * (1.0 + theta.norm()) * std::pow(std::abs(t - tbar), c.alpha);
        hoel_violations += !(dt <= hoel + 1e-12);
    }
    CHECK(growth_violations == 0);
    CHECK(lips_violations == 0);
    CHECK(hoel_violations == 0);
}

TEST_CASE("Gaussian W2 closed-form cases") {
    const sgl::Mat i2 = sgl::Mat::Identity(2, 2);
    sgl::Vec a(2), b(2);
    a << 0.0, 0.0;
    b << 3.0, 4.0;
    CHECK(std::abs(sgl::w2_gaussian(a, i2, b, i2) - 5.0) < 1e-12);

    const sgl::Mat one = sgl::Mat::Identity(1, 1);
    sgl::Vec z(1);
    z << 0.0;
    CHECK(std::abs(sgl::w2_gaussian(z, 4.0 * one, z, one) - 1.0) < 1e-12);
}

TEST_CASE("Gaussian W2 golden fixture, symmetry and triangle inequality") {
    sgl::Mat a(3, 3), b(3, 3);
    a << 2.0, 0.5, 0.1, 0.5, 1.5, 0.2, 0.1, 0.2, 1.0;
    b << 1.0, 0.2, 0.0, 0.2, 2.0, 0.3, 0.0, 0.3, 1.5;
    sgl::Vec mu1(3), mu2(3);
    mu1 << 0.3, -0.2, 0.5;
    mu2 << 0.0, 0.1, -0.4;
    const double w = sgl::w2_gaussian(mu1, a, mu2, b);
    CHECK(rel(w, golden::kW2Fixture3x3) < 1e-10);
    CHECK(std::abs(sgl::w2_gaussian(mu2, b, mu1, a) - w) < 1e-12);
    CHECK(sgl::w2_gaussian(mu1, a, mu1, a) < 1e-7);

    const sgl::Mat c = sgl::Mat::Identity(3, 3);
    const sgl::Vec mu3 = sgl::Vec::Zero(3);
    CHECK(w <= sgl::w2_gaussian(mu1, a, mu3, c) + sgl::w2_gaussian(mu3, c, mu2, b) + 1e-10);
}

TEST_CASE("Gaussian W2 rejects genuinely indefinite covariances") {
    sgl::Mat bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    const sgl::Mat i2 = sgl::Mat::Identity(2, 2);
    const sgl::Vec z = sgl::Vec::Zero(2);
    CHECK_THROWS_AS((void)sgl::w2_gaussian(z, bad, z, i2), std::invalid_argument);
}

TEST_CASE("exact objective gap and its quadratic scaling") {
    const sgl::GaussianProblem p = problem_1d(0.0);
    const sgl::OuSchedule sch(1.0);
    sgl::Vec theta(1);
    theta << 1.0;
    CHECK(rel(sgl::exact_objective(theta, sch, p), golden::kE1T1) < 1e-13);
    sgl::Vec twice(1);
    twice << 2.0;
    CHECK(std::abs(sgl::exact_objective(twice, sch, p) -
                   4.0 * sgl::exact_objective(theta, sch, p)) < 1e-12);
    CHECK(sgl::exact_objective(p.mu, sch, p) == 0.0);
}
