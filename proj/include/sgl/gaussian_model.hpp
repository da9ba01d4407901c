#pragma once

#include <functional>

#include "sgl/ou.hpp"

namespace sgl {

// Target data law N(mu, I_d); mu is the unknown the optimizer must learn.
// The score-matching minimizer theta* equals mu exactly.
struct GaussianProblem {
    int d;
    Vec mu;

    GaussianProblem(int d_, Vec mu_);

    const Vec& theta_star() const { return mu; }
    double theta_star_norm_sq() const { return mu.squaredNorm(); }
    double ex0_norm_sq() const { return mu.squaredNorm() + d; }  // E|X_0|^2
};

// Growth/regularity constants of the approximating family.
struct AffineScoreConstants {
    double k1, k2, k3, k4;
    double k_total;  // k1 + k2 + k3 + |s(0,0,0)|
    double alpha;    // Hoelder exponent in t
    double l_mo;     // one-sided Lipschitz constant of the true score
};

// Constants for s(t,theta,x) = -x + m_t theta. The x-gradient of each
// component is constant, so any positive k4 is valid; we use 1e-12 to keep
// the downstream constants as tight as the positivity requirement allows.
AffineScoreConstants affine_constants(const GaussianProblem& problem);

// grad log p_t(x) = -x + m_t mu.
Vec true_score(double t, const Vec& x, const GaussianProblem& problem);

// s(t,theta,x) = -x + m_t theta; equals true_score at theta = mu.
Vec approx_score(double t, const Vec& theta, const Vec& x);

// A parametric score family: value s(t,theta,x) and the Jacobian
// d s_i / d theta_j. is_affine marks the closed-form family above, letting
// hot loops use the specialized update.
struct ScoreFamily {
    std::function<Vec(double t, const Vec& theta, const Vec& x)> value;
    std::function<Mat(double t, const Vec& theta, const Vec& x)> theta_jacobian;
    bool is_affine = false;
};

ScoreFamily affine_family();

// Exact W2 between N(mu1,cov1) and N(mu2,cov2):
// sqrt(|mu1-mu2|^2 + tr(cov1 + cov2 - 2 (cov2^{1/2} cov1 cov2^{1/2})^{1/2})).
// Eigenvalues are clipped at zero since sample covariances can be
// numerically indefinite; genuinely non-SPD input is rejected.
double w2_gaussian(const Vec& mu1, const Mat& cov1, const Vec& mu2, const Mat& cov2);

// U(theta) - U(mu) in closed form: E[sigma^2 m^2] |theta - mu|^2 for the
// kappa = sigma^2 weighting.
double exact_objective(const Vec& theta, const OuSchedule& schedule,
                       const GaussianProblem& problem,
                       int nodes = kDefaultQuadNodes);

}  // namespace sgl
