#include "sgl/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "sgl/parallel.hpp"
#include "sgl/rng.hpp"

namespace sgl {

TimeGrid make_backward_grid(const OuSchedule& schedule, double gamma, GridKind kind) {
    const double span =
        kind == GridKind::FullHorizon ? schedule.T : schedule.T - schedule.epsilon;
    return TimeGrid::spanning(span, gamma);
}

EmRunConfig::EmRunConfig(OuSchedule schedule_, TimeGrid grid_, Vec theta_hat_,
                         std::int64_t n_paths_, std::uint64_t seed_)
    : schedule(schedule_),
      grid(grid_),
      theta_hat(std::move(theta_hat_)),
      n_paths(n_paths_),
      seed(seed_) {
    if (!(grid.gamma > 0.0 && grid.gamma < 1.0))
        throw std::invalid_argument("EmRunConfig: gamma must lie in (0,1)");
    if (grid.span() > schedule.T + 1e-12)
        throw std::invalid_argument("EmRunConfig: grid extends past the horizon");
    if (n_paths < 1) throw std::invalid_argument("EmRunConfig: need at least one path");
    if (theta_hat.size() < 1)
        throw std::invalid_argument("EmRunConfig: empty parameter vector");
}

EmRunResult em_backward_run(const EmRunConfig& config, const ScoreFamily& family) {
    const int d = static_cast<int>(config.theta_hat.size());
    const int K = config.grid.K;
    const double gamma = config.grid.gamma;
    const double root = std::sqrt(2.0 * gamma);
    const double T = config.schedule.T;

    // Per-step drift coefficient for the affine family:
    // y <- (1 - gamma) y + 2 gamma m_{T - t_k} theta_hat + noise.
    std::vector<double> affine_coeff;
    if (family.is_affine) {
        affine_coeff.resize(K);
        for (int k = 0; k < K; ++k)
            affine_coeff[k] = 2.0 * gamma * mean_coeff(T - config.grid.t(k));
    }

    Mat samples(config.n_paths, d);
    std::vector<char> ok(config.n_paths, 1);
    std::atomic<std::int64_t> aborted{0};

    parallel_for(static_cast<std::size_t>(config.n_paths), [&](std::size_t p) {
        RngStream rng(config.seed, "em-path", p);
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = rng.normal();
        if (family.is_affine) {
            for (int k = 0; k < K; ++k) {
                const double keep = 1.0 - gamma;
                const double drift = affine_coeff[k];
                for (int i = 0; i < d; ++i)
                    y[i] = keep * y[i] + drift * config.theta_hat[i] + root * rng.normal();
            }
        } else {
            Vec noise(d);
            for (int k = 0; k < K; ++k) {
                const double tk = T - config.grid.t(k);
                for (int i = 0; i < d; ++i) noise[i] = rng.normal();
                y += gamma * (y + 2.0 * family.value(tk, config.theta_hat, y)) +
                     root * noise;
            }
        }
        if (std::isfinite(y.sum())) {
            samples.row(p) = y;
        } else {
            ok[p] = 0;
            aborted.fetch_add(1);
        }
    });

    EmRunResult result;
    result.n_aborted = aborted.load();
    if (result.n_aborted == 0) {
        result.samples = std::move(samples);
        return result;
    }
    result.samples.resize(config.n_paths - result.n_aborted, d);
    std::int64_t row = 0;
    for (std::int64_t p = 0; p < config.n_paths; ++p)
        if (ok[p]) result.samples.row(row++) = samples.row(p);
    return result;
}

namespace {

LinearSdeMoments linear_backward_moments(double t, const OuSchedule& schedule,
                                         const Vec& driver) {
    if (t < 0.0 || t > schedule.T)
        throw std::domain_error("backward moments: t outside [0, T]");
    // Solving mean' = -mean + 2 e^{-(T-t)} driver from 0, var' = -2 var + 2
    // from 1: the variance stays pinned at its fixed point.
    LinearSdeMoments m;
    m.mean = (std::exp(-(schedule.T - t)) - std::exp(-(schedule.T + t))) * driver;
    m.variance = 1.0;
    return m;
}

}  // namespace

LinearSdeMoments ideal_backward_moments(double t, const OuSchedule& schedule,
                                        const GaussianProblem& problem) {
    return linear_backward_moments(t, schedule, problem.mu);
}

LinearSdeMoments auxiliary_moments(double t, const OuSchedule& schedule,
                                   const GaussianProblem& problem, const Vec& theta_hat) {
    if (theta_hat.size() != problem.d)
        throw std::invalid_argument("auxiliary_moments: dimension mismatch");
    return linear_backward_moments(t, schedule, theta_hat);
}

Mat auxiliary_fine_run(const OuSchedule& schedule, const Vec& theta_hat, double t_end,
                       std::int64_t n_paths, double fine_step, std::uint64_t seed) {
    if (t_end < 0.0 || t_end > schedule.T)
        throw std::domain_error("auxiliary_fine_run: t_end outside [0, T]");
    if (!(fine_step > 0.0))
        throw std::invalid_argument("auxiliary_fine_run: fine_step must be positive");
    const int d = static_cast<int>(theta_hat.size());
    const int steps = std::max(1, static_cast<int>(std::ceil(t_end / fine_step)));
    const double h = t_end / steps;
    const double root = std::sqrt(2.0 * h);
    Mat out(n_paths, d);
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
        RngStream rng(seed, "aux-fine", p);
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = rng.normal();
        for (int k = 0; k < steps; ++k) {
            const double drift = 2.0 * h * mean_coeff(schedule.T - k * h);
            for (int i = 0; i < d; ++i)
                y[i] = (1.0 - h) * y[i] + drift * theta_hat[i] + root * rng.normal();
        }
        out.row(p) = y;
    });
    return out;
}

EpsilonSnEstimate estimate_epsilon_sn(const OuSchedule& schedule,
                                      const GaussianProblem& problem,
                                      const std::vector<Vec>& theta_hat_samples) {
    if (theta_hat_samples.empty())
        throw std::invalid_argument("estimate_epsilon_sn: empty sample set");
    const double factor =
        std::exp(-2.0 * schedule.epsilon) - std::exp(-2.0 * schedule.T);
    std::vector<double> sq;
    sq.reserve(theta_hat_samples.size());
    for (const Vec& th : theta_hat_samples) {
        if (th.size() != problem.d)
            throw std::invalid_argument("estimate_epsilon_sn: dimension mismatch");
        sq.push_back((th - problem.mu).squaredNorm());
    }
    EpsilonSnEstimate e;
    e.n = static_cast<std::int64_t>(sq.size());
    if (sq.size() == 1) {
        e.value = factor * sq[0];
        e.half_width = 0.0;
        return e;
    }
    const McEstimate m = mc_estimate(sq);
    e.value = factor * m.mean;
    e.half_width = factor * m.half_width;
    return e;
}

McEstimate epsilon_sn_path_integral(const OuSchedule& schedule,
                                    const GaussianProblem& problem, const Vec& theta_hat,
                                    std::int64_t n_paths, double fine_step,
                                    std::uint64_t seed, bool split_chain) {
    if (theta_hat.size() != problem.d)
        throw std::invalid_argument("epsilon_sn_path_integral: dimension mismatch");
    const double t_end = schedule.T - schedule.epsilon;
    const int d = problem.d;
    const int steps = std::max(1, static_cast<int>(std::ceil(t_end / fine_step)));
    const double h = t_end / steps;
    const double root = std::sqrt(2.0 * h);
    std::vector<double> integrals(n_paths);
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
        RngStream rng(seed, "eps-sn-path", p);
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = rng.normal();
        auto integrand = [&](double r) {
            const double back = schedule.T - r;
            const Vec diff_true = true_score(back, y, problem) -
                                  approx_score(back, theta_hat, y);
            if (!split_chain) return diff_true.squaredNorm();
            const Vec at_star = true_score(back, y, problem) -
                                approx_score(back, problem.theta_star(), y);
            const Vec star_vs_hat = approx_score(back, problem.theta_star(), y) -
                                    approx_score(back, theta_hat, y);
            return 2.0 * at_star.squaredNorm() + 2.0 * star_vs_hat.squaredNorm();
        };
        // Trapezoid in r along the simulated path.
        double acc = 0.5 * integrand(0.0);
        for (int k = 0; k < steps; ++k) {
            const double drift = 2.0 * h * mean_coeff(schedule.T - k * h);
            for (int i = 0; i < d; ++i)
                y[i] = (1.0 - h) * y[i] + drift * theta_hat[i] + root * rng.normal();
            const double r = (k + 1) * h;
            acc += (k + 1 == steps ? 0.5 : 1.0) * integrand(r);
        }
        integrals[p] = acc * h;
    });
    return mc_estimate(integrals, seed);
}

void write_samples_csv(const Mat& samples, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_samples_csv: cannot open " + path);
    const Eigen::Index d = samples.cols();
    for (Eigen::Index j = 0; j < d; ++j) {
        out << "y_" << j;
        out << (j + 1 < d ? ',' : '\n');
    }
    char buf[40];
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        for (Eigen::Index j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", samples(r, j));
            out << buf;
            out << (j + 1 < d ? ',' : '\n');
        }
    }
}

}  // namespace sgl
