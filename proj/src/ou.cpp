#include "sgl/ou.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgl {

OuSchedule::OuSchedule(double T_, double epsilon_) : T(T_), epsilon(epsilon_) {
    if (!(T > 0.0)) throw std::invalid_argument("OuSchedule: T must be positive");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw std::invalid_argument("OuSchedule: epsilon must lie in [0,1)");
    if (!(epsilon < T))
        throw std::invalid_argument("OuSchedule: epsilon must be smaller than T");
}

double mean_coeff(double t) {
    if (t < 0.0) throw std::domain_error("mean_coeff: negative time");
    return std::exp(-t);
}

double std_coeff(double t) {
    if (t < 0.0) throw std::domain_error("std_coeff: negative time");
    // -expm1 keeps full precision for small t, where 1 - exp(-2t) cancels.
    return std::sqrt(-std::expm1(-2.0 * t));
}

Vec forward_marginal_sample(const Vec& x0, double t, RngStream& rng) {
    const double m = mean_coeff(t);
    const double s = std_coeff(t);
    Vec out(x0.size());
    for (Eigen::Index i = 0; i < x0.size(); ++i) out[i] = m * x0[i] + s * rng.normal();
    return out;
}

// Gauss-Legendre nodes by Newton iteration on P_n; the [-1,1] rule is then
// mapped affinely onto [a,b]. Weights on [a,b] sum to b - a.
Quadrature Quadrature::gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    if (!(b > a)) throw std::invalid_argument("gauss_legendre: empty interval");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-angle initial guess for the i-th root of P_n.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n and P_n' by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (b + a);
        q.nodes[i] = mid - half * x;  // roots come out descending; store ascending
        q.nodes[n - 1 - i] = mid + half * x;
        q.weights[i] = half * w;
        q.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) q.nodes[n / 2] = 0.5 * (b + a);
    return q;
}

double tau_expectation(const std::function<double(double)>& integrand,
                       const OuSchedule& schedule, const Quadrature& rule) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = integrand(rule.nodes[i]);
        if (!std::isfinite(v))
            throw std::runtime_error("tau_expectation: non-finite integrand at t=" +
                                     std::to_string(rule.nodes[i]));
        acc += rule.weights[i] * v;
    }
    return acc / schedule.span();
}

double tau_expectation(const std::function<double(double)>& integrand,
                       const OuSchedule& schedule, int nodes) {
    return tau_expectation(
        integrand, schedule,
        Quadrature::gauss_legendre(nodes, schedule.epsilon, schedule.T));
}

double e_sigma2_m2(const OuSchedule& schedule, int nodes) {
    return tau_expectation(
        [](double t) {
            const double m = mean_coeff(t), s = std_coeff(t);
            return s * s * m * m;
        },
        schedule, nodes);
}

double e_sigma4_m4(const OuSchedule& schedule, int nodes) {
    return tau_expectation(
        [](double t) {
            const double m = mean_coeff(t), s = std_coeff(t);
            return s * s * s * s * m * m * m * m;
        },
        schedule, nodes);
}

TimeGrid TimeGrid::spanning(double span, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("TimeGrid: gamma must lie in (0,1)");
    if (!(span > 0.0)) throw std::invalid_argument("TimeGrid: span must be positive");
    const double ratio = span / gamma;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0)
        throw std::invalid_argument(
            "TimeGrid: span must be an integer multiple of gamma");
    return TimeGrid{gamma, static_cast<int>(rounded)};
}

}  // namespace sgl
