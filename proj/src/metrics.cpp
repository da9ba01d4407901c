#include "sgl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgl/gaussian_model.hpp"
#include "sgl/mc.hpp"

namespace sgl {

double w2_empirical_1d(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("w2_empirical_1d: sample counts differ");
    if (xs.empty()) throw std::invalid_argument("w2_empirical_1d: empty samples");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dlt = xs[i] - ys[i];
        sq[i] = dlt * dlt;
    }
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size()));
}

Vec sample_mean(const Mat& samples) {
    const Eigen::Index n = samples.rows(), d = samples.cols();
    Vec mean(d);
    std::vector<double> col(n);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) col[i] = samples(i, j);
        mean[j] = pairwise_sum(col) / static_cast<double>(n);
    }
    return mean;
}

Mat sample_covariance(const Mat& samples) {
    const Eigen::Index n = samples.rows(), d = samples.cols();
    if (n < 2) throw std::invalid_argument("sample_covariance: need >= 2 samples");
    const Vec mean = sample_mean(samples);
    Mat cov(d, d);
    std::vector<double> prod(n);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a; b < d; ++b) {
            for (Eigen::Index i = 0; i < n; ++i)
                prod[i] = (samples(i, a) - mean[a]) * (samples(i, b) - mean[b]);
            cov(a, b) = cov(b, a) = pairwise_sum(prod) / static_cast<double>(n - 1);
        }
    }
    return cov;
}

double w2_gaussian_fit(const Mat& samples, const Vec& target_mean,
                       const Mat& target_cov) {
    if (samples.rows() <= samples.cols())
        throw std::invalid_argument("w2_gaussian_fit: need more samples than dimensions");
    return w2_gaussian(sample_mean(samples), sample_covariance(samples), target_mean,
                       target_cov);
}

double sliced_w2(const Mat& xs, const Mat& ys, int n_projections, RngStream& rng) {
    if (xs.cols() != ys.cols())
        throw std::invalid_argument("sliced_w2: dimension mismatch");
    if (n_projections < 1)
        throw std::invalid_argument("sliced_w2: need at least one projection");
    const Eigen::Index d = xs.cols();
    std::vector<double> sq(n_projections);
    std::vector<double> px(xs.rows()), py(ys.rows());
    Vec u(d);
    for (int k = 0; k < n_projections; ++k) {
        double norm = 0.0;
        do {
            for (Eigen::Index i = 0; i < d; ++i) u[i] = rng.normal();
            norm = u.norm();
        } while (norm == 0.0);
        u /= norm;
        for (Eigen::Index i = 0; i < xs.rows(); ++i) px[i] = xs.row(i).dot(u);
        for (Eigen::Index i = 0; i < ys.rows(); ++i) py[i] = ys.row(i).dot(u);
        const double w = w2_empirical_1d(px, py);
        sq[k] = w * w;
    }
    return std::sqrt(pairwise_sum(sq) / n_projections);
}

}  // namespace sgl
