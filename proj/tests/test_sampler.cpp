#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "golden_values.hpp"
#include "sgl/gaussian_model.hpp"
#include "sgl/mc.hpp"
#include "sgl/ou.hpp"
#include "sgl/rng.hpp"
#include "sgl/sampler.hpp"
#include "testutil.hpp"

using testutil::rel;

namespace {

sgl::GaussianProblem scalar_problem(double mu) {
    return sgl::GaussianProblem(1, sgl::Vec::Constant(1, mu));
}

}  // namespace

TEST_CASE("backward grids cover the horizon or stop early") {
    const sgl::OuSchedule full(1.0);
    const sgl::TimeGrid g1 = sgl::make_backward_grid(full, 0.1, sgl::GridKind::FullHorizon);
    CHECK(g1.K == 10);
    CHECK(g1.t(0) == 0.0);
    CHECK(g1.t(10) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g1.span() == doctest::Approx(1.0).epsilon(1e-15));

    const sgl::OuSchedule stopped(1.0, 0.2);
    const sgl::TimeGrid g2 =
        sgl::make_backward_grid(stopped, 0.1, sgl::GridKind::EarlyStopped);
    CHECK(g2.K == 8);
    CHECK(g2.span() == doctest::Approx(0.8).epsilon(1e-15));

    // A step that does not divide the span is rejected.
    CHECK_THROWS_AS(
        (void)sgl::make_backward_grid(stopped, 0.3, sgl::GridKind::EarlyStopped),
        std::invalid_argument);
}

TEST_CASE("run configuration validation") {
    const sgl::OuSchedule sched(1.0);
    const sgl::TimeGrid grid = sgl::make_backward_grid(sched, 0.25, sgl::GridKind::FullHorizon);
    const sgl::Vec th = sgl::Vec::Zero(1);
    CHECK_THROWS_AS(sgl::EmRunConfig(sched, sgl::TimeGrid::spanning(0.25, 2.0), th, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sgl::EmRunConfig(sched, grid, th, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sgl::EmRunConfig(sched, grid, sgl::Vec(), 10, 1),
                    std::invalid_argument);
    CHECK_NOTHROW(sgl::EmRunConfig(sched, grid, th, 10, 1));
}

TEST_CASE("a single update step can be replayed from the path stream") {
    const sgl::OuSchedule sched(0.5);
    const sgl::TimeGrid grid = sgl::make_backward_grid(sched, 0.5, sgl::GridKind::FullHorizon);
    REQUIRE(grid.K == 1);
    const sgl::EmRunConfig cfg(sched, grid, sgl::Vec::Zero(1), 4, 123);
    const sgl::EmRunResult res = sgl::em_backward_run(cfg, sgl::affine_family());
    REQUIRE(res.samples.rows() == 4);
    REQUIRE(res.samples.cols() == 1);
    CHECK(res.n_aborted == 0);
    for (int p = 0; p < 4; ++p) {
        sgl::RngStream replay(123, "em-path", static_cast<std::uint64_t>(p));
        const double y0 = replay.normal();
        const double z = replay.normal();
        // theta_hat = 0 and gamma = 1/2: y1 = y0 / 2 + sqrt(2 gamma) z.
        CHECK(res.samples(p, 0) == doctest::Approx(0.5 * y0 + z).epsilon(1e-14));
    }
}

TEST_CASE("backward moment formulas at the endpoints") {
    const sgl::OuSchedule sched(5.0);
    const auto prob = scalar_problem(1.0);
    const sgl::LinearSdeMoments at_T = sgl::ideal_backward_moments(5.0, sched, prob);
    CHECK(rel(at_T.mean[0], golden::kOneMinusExpNeg10) < 1e-14);
    CHECK(at_T.variance == 1.0);
    const sgl::LinearSdeMoments at_0 = sgl::ideal_backward_moments(0.0, sched, prob);
    CHECK(std::abs(at_0.mean[0]) < 1e-15);
    CHECK_THROWS_AS((void)sgl::ideal_backward_moments(-0.1, sched, prob),
                    std::domain_error);
    CHECK_THROWS_AS((void)sgl::ideal_backward_moments(5.1, sched, prob),
                    std::domain_error);
}

TEST_CASE("the auxiliary process with theta_hat = mu is the ideal one") {
    const sgl::OuSchedule sched(2.0);
    const sgl::GaussianProblem prob(2, (sgl::Vec(2) << 0.7, -1.2).finished());
    for (double t : {0.0, 0.5, 1.3, 2.0}) {
        const auto ideal = sgl::ideal_backward_moments(t, sched, prob);
        const auto aux = sgl::auxiliary_moments(t, sched, prob, prob.mu);
        CHECK((ideal.mean - aux.mean).norm() == 0.0);
        CHECK(ideal.variance == aux.variance);
    }
    CHECK_THROWS_AS((void)sgl::auxiliary_moments(1.0, sched, prob, sgl::Vec::Zero(3)),
                    std::invalid_argument);
}

TEST_CASE("terminal EM variance approaches its discrete fixed point") {
    const sgl::OuSchedule sched(4.0);
    const double gamma = 0.2;
    const sgl::TimeGrid grid = sgl::make_backward_grid(sched, gamma, sgl::GridKind::FullHorizon);
    const std::int64_t n = 200000;
    const sgl::EmRunConfig cfg(sched, grid, sgl::Vec::Zero(1), n, 2024);
    const sgl::EmRunResult res = sgl::em_backward_run(cfg, sgl::affine_family());
    CHECK(res.n_aborted == 0);

    // Exact second-moment recursion for theta_hat = 0: v <- (1-gamma)^2 v + 2 gamma.
    double v = 1.0;
    for (int k = 0; k < grid.K; ++k) v = (1.0 - gamma) * (1.0 - gamma) * v + 2.0 * gamma;
    CHECK(std::abs(v - 1.0 / (1.0 - 0.5 * gamma)) < 2e-4);

    std::vector<double> ys(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) ys[static_cast<std::size_t>(i)] = res.samples(i, 0);
    const sgl::McEstimate mean = sgl::mc_estimate(ys);
    CHECK(std::abs(mean.mean) < 4.0 * mean.half_width);
    for (auto& y : ys) y = y * y;
    const sgl::McEstimate second = sgl::mc_estimate(ys);
    CHECK(std::abs(second.mean - v) < 4.0 * second.half_width);
}

TEST_CASE("terminal EM mean tracks the auxiliary mean at small steps") {
    const sgl::OuSchedule sched(1.0);
    const auto prob = scalar_problem(0.0);  // mu unused by the simulated chain
    const double gamma = 0.01;
    const sgl::TimeGrid grid = sgl::make_backward_grid(sched, gamma, sgl::GridKind::FullHorizon);
    const sgl::Vec theta_hat = sgl::Vec::Constant(1, 2.0);
    const std::int64_t n = 100000;
    const sgl::EmRunConfig cfg(sched, grid, theta_hat, n, 31);
    const sgl::EmRunResult res = sgl::em_backward_run(cfg, sgl::affine_family());

    // Exact EM mean recursion: m <- (1-gamma) m + 2 gamma e^{-(T-t_k)} theta_hat.
    double m = 0.0;
    for (int k = 0; k < grid.K; ++k)
        m = (1.0 - gamma) * m + 2.0 * gamma * std::exp(-(1.0 - grid.t(k))) * theta_hat[0];
    const double aux = sgl::auxiliary_moments(1.0, sched, prob, theta_hat).mean[0];
    CHECK(std::abs(m - aux) < 5.0 * gamma);

    std::vector<double> ys(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) ys[static_cast<std::size_t>(i)] = res.samples(i, 0);
    const sgl::McEstimate est = sgl::mc_estimate(ys);
    CHECK(std::abs(est.mean - m) < 4.0 * est.half_width);
}

TEST_CASE("score-noise certificate closed cases") {
    const sgl::OuSchedule sched(1.0, 0.25);
    const auto prob = scalar_problem(0.5);
    const double factor = std::exp(-0.5) - std::exp(-2.0);

    const sgl::EpsilonSnEstimate zero =
        sgl::estimate_epsilon_sn(sched, prob, {prob.mu});
    CHECK(zero.value == 0.0);
    CHECK(zero.n == 1);

    std::vector<sgl::Vec> two = {sgl::Vec::Constant(1, 1.5), sgl::Vec::Constant(1, -0.5)};
    const sgl::EpsilonSnEstimate sym = sgl::estimate_epsilon_sn(sched, prob, two);
    CHECK(sym.value == doctest::Approx(factor).epsilon(1e-14));
    CHECK(sym.half_width == 0.0);
    CHECK(sym.n == 2);

    CHECK_THROWS_AS((void)sgl::estimate_epsilon_sn(sched, prob, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sgl::estimate_epsilon_sn(sched, prob, {sgl::Vec::Zero(2)}),
                    std::invalid_argument);
}

TEST_CASE("path integral reproduces the certificate for the affine family") {
    const sgl::OuSchedule sched(1.0);
    const auto prob = scalar_problem(0.0);
    const sgl::Vec theta_hat = sgl::Vec::Constant(1, 1.0);
    const double certificate = 1.0 - std::exp(-2.0);  // |theta_hat - mu|^2 = 1

    const sgl::McEstimate split = sgl::epsilon_sn_path_integral(
        sched, prob, theta_hat, 50, 1e-3, 9, true);
    CHECK(rel(sgl::BigFloat(split.mean), sgl::BigFloat(certificate)) < 1e-2);
    // The integrand is path-independent here, so the paths agree exactly.
    CHECK(split.half_width < 1e-12);

    const sgl::McEstimate direct = sgl::epsilon_sn_path_integral(
        sched, prob, theta_hat, 50, 1e-3, 9, false);
    CHECK(rel(sgl::BigFloat(direct.mean), sgl::BigFloat(0.5 * certificate)) < 1e-2);
}

TEST_CASE("sampler output is reproducible and seed-sensitive") {
    const sgl::OuSchedule sched(1.0);
    const sgl::TimeGrid grid = sgl::make_backward_grid(sched, 0.1, sgl::GridKind::FullHorizon);
    const sgl::Vec th = sgl::Vec::Constant(2, 0.4);
    const sgl::EmRunConfig a(sched, grid, th, 64, 5);
    const sgl::EmRunConfig b(sched, grid, th, 64, 5);
    const sgl::EmRunConfig c(sched, grid, th, 64, 6);
    const auto ra = sgl::em_backward_run(a, sgl::affine_family());
    const auto rb = sgl::em_backward_run(b, sgl::affine_family());
    const auto rc = sgl::em_backward_run(c, sgl::affine_family());
    CHECK((ra.samples - rb.samples).norm() == 0.0);
    CHECK((ra.samples - rc.samples).norm() > 0.0);
    CHECK(ra.n_aborted == 0);
}

TEST_CASE("CSV export writes a deterministic locale-free table") {
    sgl::Mat m(2, 2);
    m << 0.5, -1.25, 3.0, 0.0;
    const std::string path = "sampler_csv_test.tmp";
    sgl::write_samples_csv(m, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "y_0,y_1");
    std::string row;
    std::getline(in, row);
    CHECK(row.find(',') != std::string::npos);
    CHECK(row.find('.') != std::string::npos);
    int rows = 1;
    while (std::getline(in, row) && !row.empty()) ++rows;
    CHECK(rows == 2);
    in.close();
    std::remove(path.c_str());
}
