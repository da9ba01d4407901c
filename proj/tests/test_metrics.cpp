#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "golden_values.hpp"
#include "sgl/gaussian_model.hpp"
#include "sgl/metrics.hpp"
#include "sgl/rng.hpp"
#include "testutil.hpp"

using testutil::rel;

TEST_CASE("sorted-coupling W2 on the line handles the textbook cases") {
    CHECK(sgl::w2_empirical_1d({0.0, 1.0}, {10.0, 11.0}) == doctest::Approx(10.0));
    CHECK(sgl::w2_empirical_1d({0.0, 1.0}, {1.0, 0.0}) == 0.0);
    CHECK(sgl::w2_empirical_1d({5.0}, {2.0}) == doctest::Approx(3.0));

    // A constant shift moves the metric by exactly that shift.
    std::vector<double> xs, ys;
    sgl::RngStream rng(11, "metrics-shift", 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal();
        xs.push_back(v);
        ys.push_back(v - 2.5);
    }
    CHECK(sgl::w2_empirical_1d(xs, ys) == doctest::Approx(2.5).epsilon(1e-12));

    CHECK_THROWS_AS((void)sgl::w2_empirical_1d({1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)sgl::w2_empirical_1d({}, {}), std::invalid_argument);
}

TEST_CASE("empirical W2 converges on shifted Gaussians") {
    sgl::RngStream rng(12, "metrics-gauss", 0);
    const int n = 100000;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) xs[i] = rng.normal();
    for (int i = 0; i < n; ++i) ys[i] = 2.0 + rng.normal();
    // W2(N(0,1), N(2,1)) = 2; the empirical estimate carries O(n^{-1/2}) noise.
    CHECK(std::abs(sgl::w2_empirical_1d(xs, ys) - 2.0) < 0.03);
}

TEST_CASE("sliced W2 in one dimension is the sorted coupling up to sign") {
    sgl::RngStream data(13, "metrics-sliced", 0);
    const int n = 4000;
    sgl::Mat xs(n, 1), ys(n, 1);
    std::vector<double> xv(n), yv(n);
    for (int i = 0; i < n; ++i) {
        xv[i] = data.normal();
        yv[i] = 0.7 * data.normal() + 0.2;
        xs(i, 0) = xv[i];
        ys(i, 0) = yv[i];
    }
    const double direct = sgl::w2_empirical_1d(xv, yv);
    sgl::RngStream proj(14, "metrics-proj", 0);
    // Every 1-d unit projection is +1 or -1 and W2 is symmetric under both.
    const double sliced = sgl::sliced_w2(xs, ys, 8, proj);
    CHECK(rel(sgl::BigFloat(sliced), sgl::BigFloat(direct)) < 1e-12);
}

TEST_CASE("moment fitting is exact on a two-point cloud") {
    sgl::Mat samples(2, 2);
    samples << 1.0, 3.0, 3.0, 7.0;
    const sgl::Vec m = sgl::sample_mean(samples);
    CHECK(m[0] == doctest::Approx(2.0));
    CHECK(m[1] == doctest::Approx(5.0));
    const sgl::Mat c = sgl::sample_covariance(samples);
    // Unbiased covariance of {(1,3),(3,7)}: [[2,4],[4,8]].
    CHECK(c(0, 0) == doctest::Approx(2.0));
    CHECK(c(0, 1) == doctest::Approx(4.0));
    CHECK(c(1, 0) == doctest::Approx(4.0));
    CHECK(c(1, 1) == doctest::Approx(8.0));
}

TEST_CASE("fit-based W2 equals the closed form on the fitted moments") {
    sgl::RngStream rng(15, "metrics-fit", 0);
    const int n = 500;
    sgl::Mat samples(n, 2);
    for (int i = 0; i < n; ++i) {
        samples(i, 0) = 0.5 + rng.normal();
        samples(i, 1) = -0.3 + 2.0 * rng.normal();
    }
    const sgl::Vec target_mean = sgl::Vec::Zero(2);
    const sgl::Mat target_cov = sgl::Mat::Identity(2, 2);
    const double fit = sgl::w2_gaussian_fit(samples, target_mean, target_cov);
    const double closed = sgl::w2_gaussian(sgl::sample_mean(samples),
                                           sgl::sample_covariance(samples),
                                           target_mean, target_cov);
    CHECK(rel(sgl::BigFloat(fit), sgl::BigFloat(closed)) < 1e-14);
    CHECK(fit > 0.0);
}

TEST_CASE("fit-based W2 is invariant under a common rotation") {
    sgl::RngStream rng(16, "metrics-rot", 0);
    const int n = 2000;
    sgl::Mat samples(n, 2);
    for (int i = 0; i < n; ++i) {
        samples(i, 0) = 1.0 + 0.8 * rng.normal();
        samples(i, 1) = -1.0 + 1.4 * rng.normal();
    }
    sgl::Vec mean = sgl::Vec::Zero(2);
    sgl::Mat cov(2, 2);
    cov << 1.3, 0.2, 0.2, 0.9;

    const double theta = 0.77;
    sgl::Mat rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);

    const double before = sgl::w2_gaussian_fit(samples, mean, cov);
    const sgl::Mat rotated = samples * rot.transpose();
    const double after =
        sgl::w2_gaussian_fit(rotated, rot * mean, rot * cov * rot.transpose());
    CHECK(rel(sgl::BigFloat(after), sgl::BigFloat(before)) < 1e-10);
}
