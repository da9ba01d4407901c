#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sgl/rng.hpp"

namespace sgl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Forward noising schedule for dX = -X dt + sqrt(2) dB. The marginal is
// X_t = m_t X_0 + sigma_t Z with m_t = exp(-t), sigma_t^2 = 1 - exp(-2t),
// so m_t^2 + sigma_t^2 = 1 at every t.
struct OuSchedule {
    double T;
    double epsilon;

    explicit OuSchedule(double T_, double epsilon_ = 0.0);

    double span() const { return T - epsilon; }
};

double mean_coeff(double t);  // m_t, strictly decreasing from 1
double std_coeff(double t);   // sigma_t, strictly increasing from 0

// One draw of the forward marginal at time t given X_0 = x0.
Vec forward_marginal_sample(const Vec& x0, double t, RngStream& rng);

// Nodes in [a,b] with positive weights summing to b - a.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    static Quadrature gauss_legendre(int n, double a, double b);
};

inline constexpr int kDefaultQuadNodes = 64;

// E[f(tau)] for tau ~ Uniform([epsilon, T]).
double tau_expectation(const std::function<double(double)>& integrand,
                       const OuSchedule& schedule, const Quadrature& rule);

// Same, with the default Gauss-Legendre rule on [epsilon, T].
double tau_expectation(const std::function<double(double)>& integrand,
                       const OuSchedule& schedule,
                       int nodes = kDefaultQuadNodes);

// Frequently used schedule moments.
double e_sigma2_m2(const OuSchedule& schedule, int nodes = kDefaultQuadNodes);
double e_sigma4_m4(const OuSchedule& schedule, int nodes = kDefaultQuadNodes);

// Number of gamma-size steps covering a span; the span must be an integer
// multiple of gamma (within 1e-9 relative).
struct TimeGrid {
    double gamma;
    int K;

    static TimeGrid spanning(double span, double gamma);

    double t(int k) const { return k * gamma; }
    double span() const { return K * gamma; }
};

}  // namespace sgl
