#include "sgl/sgld.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "sgl/parallel.hpp"

namespace sgl {

TrainingSample draw_training_sample(const OuSchedule& schedule,
                                    const GaussianProblem& problem, RngStream& rng) {
    TrainingSample s;
    s.tau = rng.uniform(schedule.epsilon, schedule.T);
    s.x0.resize(problem.d);
    s.z.resize(problem.d);
    for (int i = 0; i < problem.d; ++i) s.x0[i] = problem.mu[i] + rng.normal();
    for (int i = 0; i < problem.d; ++i) s.z[i] = rng.normal();
    return s;
}

Vec stochastic_gradient_general(const Vec& theta, const TrainingSample& sample,
                                const ScoreFamily& family,
                                const std::function<double(double)>& kappa) {
    const double m = mean_coeff(sample.tau);
    const double sg = std_coeff(sample.tau);
    if (sg == 0.0 && sample.z.norm() != 0.0)
        throw std::domain_error(
            "stochastic_gradient_general: sigma_t = 0 with z != 0");
    const Vec xt = m * sample.x0 + sg * sample.z;
    Vec v = family.value(sample.tau, theta, xt);
    if (sg > 0.0) v += sample.z / sg;
    const Mat jac = family.theta_jacobian(sample.tau, theta, xt);
    return 2.0 * kappa(sample.tau) * (jac.transpose() * v);
}

Vec stochastic_gradient_gaussian(const Vec& theta, const TrainingSample& sample,
                                 const GaussianProblem& problem) {
    if (theta.size() != problem.d || sample.x0.size() != problem.d ||
        sample.z.size() != problem.d)
        throw std::invalid_argument("stochastic_gradient_gaussian: dimension mismatch");
    const double m = mean_coeff(sample.tau);
    const double sg = std_coeff(sample.tau);
    const double s2 = sg * sg;
    // 2 sigma^2 m (sigma^{-1} z - m x0 - sigma z + m theta) with the
    // sigma^{-1} folded into the weight, so tau = 0 contributes exactly zero.
    return 2.0 * m *
           (sg * sample.z - s2 * (m * sample.x0 + sg * sample.z - m * theta));
}

Vec exact_gradient(const Vec& theta, const OuSchedule& schedule,
                   const GaussianProblem& problem, int nodes) {
    return 2.0 * e_sigma2_m2(schedule, nodes) * (theta - problem.mu);
}

double e_z_norm(int d) {
    if (d < 1) throw std::invalid_argument("e_z_norm: d must be positive");
    return std::sqrt(2.0) *
           std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d));
}

namespace {

constexpr std::uint64_t kX0NormOracleSeed = 0x00D15EA5E0ULL;
constexpr std::int64_t kX0NormOracleDraws = 10'000'000;

// Chunked sample mean of |mu + Z|: per-chunk sums are accumulated in a fixed
// order so the value is independent of the thread count.
McEstimate x0_norm_mc_impl(int d, double mu_norm, std::int64_t n, std::uint64_t seed) {
    const std::int64_t chunk = 16384;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<double> sums(n_chunks), sums_sq(n_chunks);
    parallel_for(static_cast<std::size_t>(n_chunks), [&](std::size_t c) {
        RngStream rng(seed, "e-x0-norm", c);
        const std::int64_t lo = static_cast<std::int64_t>(c) * chunk;
        const std::int64_t hi = std::min<std::int64_t>(lo + chunk, n);
        double s = 0.0, s2 = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            // |mu + Z| depends on mu only through |mu|; put it on axis 1.
            double q = 0.0;
            const double z0 = mu_norm + rng.normal();
            q += z0 * z0;
            for (int k = 1; k < d; ++k) {
                const double z = rng.normal();
                q += z * z;
            }
            const double r = std::sqrt(q);
            s += r;
            s2 += r * r;
        }
        sums[c] = s;
        sums_sq[c] = s2;
    });
    const double total = pairwise_sum(sums);
    const double total_sq = pairwise_sum(sums_sq);
    McEstimate e;
    e.n = n;
    e.seed = seed;
    e.mean = total / static_cast<double>(n);
    const double var =
        (total_sq - static_cast<double>(n) * e.mean * e.mean) / static_cast<double>(n - 1);
    e.half_width = 1.96 * std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    return e;
}

}  // namespace

McEstimate e_x0_norm_mc(int d, double mu_norm, std::int64_t n, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("e_x0_norm_mc: d must be positive");
    if (n < 2) throw std::invalid_argument("e_x0_norm_mc: need at least two draws");
    return x0_norm_mc_impl(d, mu_norm, n, seed);
}

double e_x0_norm(int d, double mu_norm) {
    static std::map<std::pair<int, double>, double> cache;
    static std::mutex cache_mutex;
    const auto key = std::make_pair(d, mu_norm);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value =
        x0_norm_mc_impl(d, mu_norm, kX0NormOracleDraws, kX0NormOracleSeed).mean;
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, value);
    return value;
}

double c2_numerator_expectation(const OuSchedule& schedule,
                                const GaussianProblem& problem, int nodes) {
    const int d = problem.d;
    const double ts = std::sqrt(problem.theta_star_norm_sq());
    const double ez = e_z_norm(d);          // E|Z|
    const double ez2 = static_cast<double>(d);  // E|Z|^2
    const double ex = e_x0_norm(d, ts);     // E|X0| (theta* = mu)
    const double ex2 = problem.ex0_norm_sq();
    // sigma^4 m^2 E[(a|Z| + m|X0| + m|theta*|)^2] with a = sigma^{-1} + sigma;
    // expanding and multiplying through by sigma^4 removes the singularity:
    // sigma^4 a^2 = sigma^2 (1+sigma^2)^2 and sigma^4 a = sigma^3 (1+sigma^2).
    return tau_expectation(
        [&](double t) {
            const double m = mean_coeff(t);
            const double sg = std_coeff(t);
            const double s2 = sg * sg;
            const double s3 = s2 * sg;
            const double s4 = s2 * s2;
            const double one_p = 1.0 + s2;
            return m * m *
                   (s2 * one_p * one_p * ez2 + s4 * m * m * (ex2 + ts * ts) +
                    2.0 * s3 * one_p * m * (ez * ex + ts * ez) +
                    2.0 * s4 * m * m * ts * ex);
        },
        schedule, nodes);
}

SgldConstants sgld_constants(const OuSchedule& schedule, const GaussianProblem& problem,
                             int nodes) {
    const double e1 = e_sigma2_m2(schedule, nodes);
    SgldConstants c;
    c.c1 = 1.0 / e1;
    c.c2 = 4.0 * c2_numerator_expectation(schedule, problem, nodes) / e1;
    return c;
}

SgldConfig::SgldConfig(double lambda_, double beta_, std::int64_t n_iters_, Vec theta0_,
                       OuSchedule schedule_, GaussianProblem problem_, int nodes)
    : lambda(lambda_),
      beta(beta_),
      n_iters(n_iters_),
      theta0(std::move(theta0_)),
      schedule(schedule_),
      problem(std::move(problem_)) {
    if (!(lambda > 0.0)) throw std::invalid_argument("SgldConfig: lambda must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("SgldConfig: beta must be positive");
    if (n_iters < 0) throw std::invalid_argument("SgldConfig: negative iteration count");
    if (theta0.size() != problem.d)
        throw std::invalid_argument("SgldConfig: theta0 has wrong dimension");
    e1 = e_sigma2_m2(schedule, nodes);
    e2 = e_sigma4_m4(schedule, nodes);
    const double lambda_max = std::min(e1 / (4.0 * e2), 1.0 / (2.0 * e1));
    if (lambda > lambda_max)
        throw std::invalid_argument("SgldConfig: lambda exceeds the stability range " +
                                    std::to_string(lambda_max));
    constants = sgld_constants(schedule, problem, nodes);
}

SgldResult sgld_run(const SgldConfig& config, RngStream& rng,
                    const SgldRunOptions& opts) {
    std::vector<std::int64_t> marks = opts.checkpoints;
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    std::size_t next_mark = 0;

    SgldResult out;
    Vec theta = config.theta0;
    const int d = config.problem.d;
    const double noise_scale =
        opts.add_noise ? std::sqrt(2.0 * config.lambda / config.beta) : 0.0;
    Vec h(d);

    auto record = [&](std::int64_t n) {
        while (next_mark < marks.size() && marks[next_mark] == n) {
            out.checkpoints.emplace_back(n, theta);
            ++next_mark;
        }
    };
    record(0);

    for (std::int64_t n = 0; n < config.n_iters; ++n) {
        if (opts.exact_gradient) {
            h = 2.0 * config.e1 * (theta - config.problem.mu);
        } else {
            // Draw order per iteration: tau, then X0, then Z, then xi.
            const double tau = rng.uniform(config.schedule.epsilon, config.schedule.T);
            const double m = mean_coeff(tau);
            const double sg = std_coeff(tau);
            const double s2 = sg * sg;
            const double w = 2.0 * m;
            for (int i = 0; i < d; ++i) {
                const double x0 = config.problem.mu[i] + rng.normal();
                h[i] = w * (-s2 * m * x0 + s2 * m * theta[i]);
            }
            for (int i = 0; i < d; ++i) {
                const double z = rng.normal();
                h[i] += w * (sg * z - s2 * sg * z);
            }
        }
        theta -= config.lambda * h;
        if (noise_scale > 0.0)
            for (int i = 0; i < d; ++i) theta[i] += noise_scale * rng.normal();
        if (!std::isfinite(theta.sum()))
            throw std::runtime_error("sgld_run: iterate diverged at step " +
                                     std::to_string(n + 1));
        record(n + 1);
    }
    out.theta = theta;
    return out;
}

double sgld_error_bound(const SgldConfig& config, std::int64_t n, double e0) {
    const double geo = std::pow(1.0 - 2.0 * config.lambda * config.e1,
                                static_cast<double>(n));
    return geo * e0 + config.problem.d * config.constants.c1 / config.beta +
           config.lambda * config.constants.c2;
}

double sgld_second_moment_bound(const SgldConfig& config, std::int64_t n, double e0) {
    return 2.0 * std::exp(-2.0 * static_cast<double>(n) * config.lambda * config.e1) * e0 +
           2.0 * config.problem.d * config.constants.c1 / config.beta +
           2.0 * config.lambda * config.constants.c2 +
           2.0 * config.problem.theta_star_norm_sq();
}

ConstancyReport explicit_vs_denoising_check(const std::vector<Vec>& theta_list,
                                            const OuSchedule& schedule,
                                            const GaussianProblem& problem,
                                            std::int64_t mc_n, RngStream& rng,
                                            double kappa_scale) {
    if (theta_list.size() < 2)
        throw std::invalid_argument("explicit_vs_denoising_check: need >= 2 thetas");
    const std::size_t L = theta_list.size();
    const double e1 = e_sigma2_m2(schedule);

    // kappa = kappa_scale * sigma^2; the sample term
    // kappa |sigma^{-1} z + s|^2 is evaluated as kappa_scale |z + sigma s|^2
    // so tau = 0 is harmless for the affine family.
    std::vector<std::vector<double>> terms(L);
    for (auto& v : terms) v.resize(mc_n);
    bool bad = false;
    Vec xt(problem.d), sc(problem.d);
    for (std::int64_t i = 0; i < mc_n; ++i) {
        const TrainingSample s = draw_training_sample(schedule, problem, rng);
        const double m = mean_coeff(s.tau);
        const double sg = std_coeff(s.tau);
        xt = m * s.x0 + sg * s.z;
        for (std::size_t j = 0; j < L; ++j) {
            sc = approx_score(s.tau, theta_list[j], xt);
            const double v = kappa_scale * (s.z + sg * sc).squaredNorm();
            if (!std::isfinite(v)) bad = true;
            terms[j][i] = v;
        }
    }

    ConstancyReport report;
    report.inconclusive = bad;
    report.all_pass = !bad;
    if (bad) return report;

    std::vector<double> diff(mc_n);
    for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = a + 1; b < L; ++b) {
            for (std::int64_t i = 0; i < mc_n; ++i) diff[i] = terms[a][i] - terms[b][i];
            const double exact =
                kappa_scale * e1 *
                ((theta_list[a] - problem.mu).squaredNorm() -
                 (theta_list[b] - problem.mu).squaredNorm());
            McEstimate est = mc_estimate(diff);
            est.mean -= exact;
            ConstancyPair pair{static_cast<int>(a), static_cast<int>(b), est, exact,
                               std::abs(est.mean) <= est.half_width};
            report.all_pass = report.all_pass && pair.pass;
            report.pairs.push_back(std::move(pair));
        }
    }
    return report;
}

}  // namespace sgl
