#pragma once

#include <cstdint>
#include <vector>

#include "sgl/ou.hpp"
#include "sgl/rng.hpp"

namespace sgl {

// Exact 1-D W2 between two empirical laws of equal size: RMS difference of
// the sorted samples (sorting realizes the optimal coupling on the line).
double w2_empirical_1d(std::vector<double> xs, std::vector<double> ys);

// Fits sample mean/covariance and evaluates the closed-form Gaussian W2
// against the target. Exact in the large-n limit whenever the sampled law is
// Gaussian, which holds for every linear-with-additive-noise process here;
// empirical-coupling estimators would add O(n^{-1/d}) bias instead.
double w2_gaussian_fit(const Mat& samples, const Vec& target_mean,
                       const Mat& target_cov);

// Root-mean of squared 1-D W2 over random unit projections. Cross-check
// only; never used in pass/fail verdicts.
double sliced_w2(const Mat& xs, const Mat& ys, int n_projections, RngStream& rng);

Vec sample_mean(const Mat& samples);
Mat sample_covariance(const Mat& samples);

}  // namespace sgl
