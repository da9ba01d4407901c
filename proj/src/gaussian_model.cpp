#include "sgl/gaussian_model.hpp"

#include <cmath>
#include <stdexcept>

namespace sgl {

GaussianProblem::GaussianProblem(int d_, Vec mu_) : d(d_), mu(std::move(mu_)) {
    if (d < 1) throw std::invalid_argument("GaussianProblem: d must be positive");
    if (mu.size() != d)
        throw std::invalid_argument("GaussianProblem: mu has wrong dimension");
}

AffineScoreConstants affine_constants(const GaussianProblem&) {
    // |s(t,theta,x) - s(tbar,thetabar,xbar)| <= |theta||t-tbar| + |theta-thetabar|
    // + |x-xbar| for this family, and s(0,0,0) = 0.
    AffineScoreConstants c;
    c.k1 = 1.0;
    c.k2 = 1.0;
    c.k3 = 1.0;
    c.k4 = 1e-12;
    c.k_total = c.k1 + c.k2 + c.k3 + 0.0;
    c.alpha = 1.0;
    c.l_mo = 1.0;
    return c;
}

Vec true_score(double t, const Vec& x, const GaussianProblem& problem) {
    if (x.size() != problem.d)
        throw std::invalid_argument("true_score: dimension mismatch");
    return -x + mean_coeff(t) * problem.mu;
}

Vec approx_score(double t, const Vec& theta, const Vec& x) {
    if (theta.size() != x.size())
        throw std::invalid_argument("approx_score: dimension mismatch");
    return -x + mean_coeff(t) * theta;
}

ScoreFamily affine_family() {
    ScoreFamily f;
    f.value = [](double t, const Vec& theta, const Vec& x) {
        return approx_score(t, theta, x);
    };
    f.theta_jacobian = [](double t, const Vec& theta, const Vec&) {
        return Mat(mean_coeff(t) *
                   Mat::Identity(theta.size(), theta.size()));
    };
    f.is_affine = true;
    return f;
}

namespace {

// Symmetric PSD square root with eigenvalue clipping at zero. Rejects
// matrices whose negative eigenvalues exceed rounding-level noise.
Mat psd_sqrt(const Mat& a, const char* what) {
    if (a.rows() != a.cols()) throw std::invalid_argument(std::string(what) + ": not square");
    if (!a.isApprox(a.transpose(), 1e-10))
        throw std::invalid_argument(std::string(what) + ": not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
    Vec ev = es.eigenvalues();
    const double scale = std::max(1.0, std::abs(ev[ev.size() - 1]));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-8 * scale)
            throw std::invalid_argument(std::string(what) + ": not positive semi-definite");
        ev[i] = std::sqrt(std::max(0.0, ev[i]));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double w2_gaussian(const Vec& mu1, const Mat& cov1, const Vec& mu2, const Mat& cov2) {
    if (mu1.size() != mu2.size() || cov1.rows() != mu1.size() || cov2.rows() != mu2.size())
        throw std::invalid_argument("w2_gaussian: dimension mismatch");
    const Mat root2 = psd_sqrt(cov2, "w2_gaussian: cov2");
    const Mat inner = root2 * cov1 * root2;
    // tr((cov2^{1/2} cov1 cov2^{1/2})^{1/2}) = sum of sqrt eigenvalues.
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (inner + inner.transpose()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("w2_gaussian: eigendecomposition failed");
    double cross = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        cross += std::sqrt(std::max(0.0, es.eigenvalues()[i]));
    // Verify cov1 is admissible too, not just cov2.
    (void)psd_sqrt(cov1, "w2_gaussian: cov1");
    const double sq = (mu1 - mu2).squaredNorm() + cov1.trace() + cov2.trace() - 2.0 * cross;
    return std::sqrt(std::max(0.0, sq));
}

double exact_objective(const Vec& theta, const OuSchedule& schedule,
                       const GaussianProblem& problem, int nodes) {
    if (theta.size() != problem.d)
        throw std::invalid_argument("exact_objective: dimension mismatch");
    return e_sigma2_m2(schedule, nodes) * (theta - problem.mu).squaredNorm();
}

}  // namespace sgl
