#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgl/gaussian_model.hpp"
#include "sgl/mc.hpp"
#include "sgl/ou.hpp"

namespace sgl {

// Which grid point the backward run stops at: the full horizon runs
// T/gamma update steps and ends at T; the early-stopped variant runs
// (T-epsilon)/gamma steps and ends at T-epsilon.
enum class GridKind { FullHorizon, EarlyStopped };

TimeGrid make_backward_grid(const OuSchedule& schedule, double gamma, GridKind kind);

struct EmRunConfig {
    OuSchedule schedule;
    TimeGrid grid;
    Vec theta_hat;
    std::int64_t n_paths;
    std::uint64_t seed;

    EmRunConfig(OuSchedule schedule_, TimeGrid grid_, Vec theta_hat_,
                std::int64_t n_paths_, std::uint64_t seed_);
};

struct EmRunResult {
    Mat samples;  // one row per completed path, d columns
    std::int64_t n_aborted = 0;
};

// Y_{k+1} = Y_k + gamma (Y_k + 2 s(T - t_k, theta_hat, Y_k)) + sqrt(2 gamma) Z,
// Y_0 ~ N(0, I). The score's time argument is T - t_k = T - k gamma, the
// value the continuous-time interpolation freezes over [t_k, t_{k+1}).
// Each path owns the stream (seed, "em-path", path index).
EmRunResult em_backward_run(const EmRunConfig& config, const ScoreFamily& family);

// Exact mean/isotropic variance of a linear backward-type SDE at time t.
struct LinearSdeMoments {
    Vec mean;
    double variance;
};

// d Ytilde = (Ytilde + 2 grad log p_{T-t}(Ytilde)) dt + sqrt(2) dBbar from
// N(0, I): mean(t) = mu (e^{-(T-t)} - e^{-(T+t)}), variance constant 1.
LinearSdeMoments ideal_backward_moments(double t, const OuSchedule& schedule,
                                        const GaussianProblem& problem);

// Same dynamics with s(., theta_hat, .) in place of the true score; for the
// affine family this only swaps mu for theta_hat.
LinearSdeMoments auxiliary_moments(double t, const OuSchedule& schedule,
                                   const GaussianProblem& problem, const Vec& theta_hat);

// Fine-step EM simulation of the auxiliary process up to t_end; cross-checks
// the moment formulas and feeds the score-noise path integral below.
Mat auxiliary_fine_run(const OuSchedule& schedule, const Vec& theta_hat, double t_end,
                       std::int64_t n_paths, double fine_step, std::uint64_t seed);

struct EpsilonSnEstimate {
    double value;
    double half_width;
    std::int64_t n;
};

// Score-noise certificate (e^{-2 epsilon} - e^{-2T}) x mean |theta_hat - mu|^2
// over the supplied optimizer outputs, with a 95% CI on the sample mean.
EpsilonSnEstimate estimate_epsilon_sn(const OuSchedule& schedule,
                                      const GaussianProblem& problem,
                                      const std::vector<Vec>& theta_hat_samples);

// Monte Carlo of the score-noise integral along simulated auxiliary paths.
// split_chain=false integrates |grad log p - s(theta_hat)|^2 directly;
// split_chain=true integrates the 2|grad log p - s(theta*)|^2 +
// 2|s(theta*) - s(theta_hat)|^2 majorant, whose expectation equals the
// certificate above for the affine family (the direct integral is half it).
McEstimate epsilon_sn_path_integral(const OuSchedule& schedule,
                                    const GaussianProblem& problem, const Vec& theta_hat,
                                    std::int64_t n_paths, double fine_step,
                                    std::uint64_t seed, bool split_chain);

// Terminal samples as CSV: header "y_0,...,y_{d-1}", '.' decimal, '\n' line
// endings, locale-independent.
void write_samples_csv(const Mat& samples, const std::string& path);

}  // namespace sgl
