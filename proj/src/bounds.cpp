#include "sgl/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "sgl/sgld.hpp"

namespace sgl {

namespace bmp = boost::multiprecision;

const BigFloat& BoundReport::term(const std::string& name) const {
    for (const auto& [key, value] : terms)
        if (key == name) return value;
    throw std::out_of_range("BoundReport: no term named " + name);
}

double theorem1_opt_prefactor() {
    return std::sqrt(4.0 / 3.0) + 2.0 * std::sqrt(33.0);
}

Theorem1Params Theorem1Params::make(const OuSchedule& schedule,
                                    const GaussianProblem& problem, double beta,
                                    double lambda, std::int64_t n, double gamma,
                                    double e0, int nodes) {
    Theorem1Params p;
    p.d = problem.d;
    p.T = schedule.T;
    p.beta = beta;
    p.lambda = lambda;
    p.n = n;
    p.gamma = gamma;
    p.e0 = e0;
    p.ex0sq = problem.ex0_norm_sq();
    p.theta_star_norm_sq = problem.theta_star_norm_sq();
    p.e1 = e_sigma2_m2(schedule, nodes);
    p.e2 = e_sigma4_m4(schedule, nodes);
    p.c2_numerator = c2_numerator_expectation(schedule, problem, nodes);
    p.c1 = 1.0 / p.e1;
    p.c2 = 4.0 * p.c2_numerator / p.e1;
    p.validate();
    return p;
}

void Theorem1Params::validate() const {
    if (d < 1) throw std::invalid_argument("Theorem1Params: d must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("Theorem1Params: T must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("Theorem1Params: beta must be positive");
    if (!(lambda > 0.0))
        throw std::invalid_argument("Theorem1Params: lambda must be positive");
    const double lambda_max = std::min(e1 / (4.0 * e2), 1.0 / (2.0 * e1));
    if (lambda > lambda_max + 1e-15)
        throw std::invalid_argument("Theorem1Params: lambda exceeds the stability range");
    // gamma = 0 is admitted as the no-discretization limit.
    if (!(gamma >= 0.0 && gamma <= 0.5))
        throw std::invalid_argument("Theorem1Params: gamma must lie in [0, 1/2]");
    if (n < 0) throw std::invalid_argument("Theorem1Params: negative n");
    if (e0 < 0.0 || ex0sq < 0.0 || theta_star_norm_sq < 0.0)
        throw std::invalid_argument("Theorem1Params: negative second moment");
}

BoundReport theorem1_bound(const Theorem1Params& p) {
    p.validate();
    const double init =
        2.0 * std::exp(-p.T) * (std::sqrt(p.ex0sq) + std::sqrt(1.5 * p.d));
    const double opt =
        theorem1_opt_prefactor() *
        (std::exp(-static_cast<double>(p.n) * p.lambda * p.e1) * std::sqrt(p.e0) +
         std::sqrt(p.d * p.c1 / p.beta) + std::sqrt(p.lambda * p.c2));
    const double disc =
        p.gamma * (std::sqrt(18.0 * p.d) + std::sqrt(132.0 * p.theta_star_norm_sq));
    BoundReport r;
    r.terms.emplace_back("init", BigFloat(init));
    r.terms.emplace_back("opt", BigFloat(opt));
    r.terms.emplace_back("disc", BigFloat(disc));
    r.total = r.terms[0].second + r.terms[1].second + r.terms[2].second;
    return r;
}

double table1_t_delta(double delta, int d, double ex0sq) {
    return std::log(8.0 * (std::sqrt(ex0sq) + std::sqrt(1.5 * d)) / delta);
}

double table1_beta_delta(double delta, int d, double e1) {
    const double c = theorem1_opt_prefactor();
    return 144.0 * d * c * c / (delta * delta * e1);
}

double table1_lambda_delta(double delta, double e1, double e2, double c2_numerator) {
    const double c = theorem1_opt_prefactor();
    return std::min({e1 / (4.0 * e2), 1.0 / (2.0 * e1),
                     delta * delta * e1 / (576.0 * c * c * c2_numerator)});
}

double table1_n_delta(double delta, double e0, double lambda, double e1) {
    // e0 small enough that the contraction target is already met needs no
    // optimization steps at all.
    const double arg = 12.0 * theorem1_opt_prefactor() * std::sqrt(e0) / delta;
    return arg <= 1.0 ? 0.0 : std::log(arg) / (lambda * e1);
}

double table1_gamma_delta(double delta, int d, double theta_star_norm_sq) {
    return std::min(delta / (4.0 * std::sqrt(18.0 * d + 132.0 * theta_star_norm_sq)),
                    0.5);
}

Table1Budget table1_budget(double delta, int d, double ex0sq, double e0,
                           double theta_star_norm_sq, double e1, double e2,
                           double c2_numerator, double lambda) {
    if (!(delta > 0.0)) throw std::invalid_argument("table1_budget: delta must be positive");
    Table1Budget b;
    b.T_delta = table1_t_delta(delta, d, ex0sq);
    b.beta_delta = table1_beta_delta(delta, d, e1);
    b.lambda_delta = table1_lambda_delta(delta, e1, e2, c2_numerator);
    b.lambda_used = lambda > 0.0 ? lambda : b.lambda_delta;
    b.n_delta = table1_n_delta(delta, e0, b.lambda_used, e1);
    b.gamma_delta = table1_gamma_delta(delta, d, theta_star_norm_sq);
    return b;
}

void Theorem2Params::validate() const {
    if (M < 1) throw std::invalid_argument("Theorem2Params: M must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("Theorem2Params: T must be positive");
    if (!(epsilon >= 0.0 && epsilon < 1.0 && epsilon < T))
        throw std::invalid_argument("Theorem2Params: epsilon must lie in [0,1) below T");
    if (!(alpha >= 0.5 && alpha <= 1.0))
        throw std::invalid_argument("Theorem2Params: alpha must lie in [1/2, 1]");
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument("Theorem2Params: zeta must lie in (0,1)");
    if (!(l_mo > 0.5)) throw std::invalid_argument("Theorem2Params: need l_mo > 1/2");
    if (k1 < 0.0 || k2 < 0.0 || k3 < 0.0 || k4 < 0.0 || k_total < 0.0)
        throw std::invalid_argument("Theorem2Params: negative regularity constant");
    if (eps_al < 0.0 || eps_sn < 0.0)
        throw std::invalid_argument("Theorem2Params: negative error level");
    if (gamma < 0) throw std::invalid_argument("Theorem2Params: negative gamma");
}

double Theorem2Params::e_theta_p(double p) const {
    const double at2 = 2.0 * eps_al + 2.0 * theta_star_norm_sq;
    if (p == 2.0) return at2;
    if (p == 4.0) return e_theta4;
    // Only p = 2 and p = 4 have principled inputs; intermediate p
    // log-interpolates between them.
    const double l2 = std::log(at2), l4 = std::log(e_theta4);
    return std::exp(l2 + 0.5 * (p - 2.0) * (l4 - l2));
}

double Theorem2Params::em0_p(double p) const {
    if (p == 2.0) return em0_p2;
    if (p == 4.0) return em0_p4;
    const double l2 = std::log(em0_p2), l4 = std::log(em0_p4);
    return std::exp(l2 + 0.5 * (p - 2.0) * (l4 - l2));
}

BigFloat c_em_p(double t, double p, const Theorem2Params& params) {
    if (!(p >= 2.0 && p <= 4.0)) throw std::invalid_argument("c_em_p: p outside [2,4]");
    if (!(t >= 0.0 && t <= params.T + 1e-12))
        throw std::invalid_argument("c_em_p: t outside [0, T]");
    const double ktp = std::pow(params.k_total, p);
    const double tap = 1.0 + std::pow(params.T, params.alpha * p);
    const double exponent =
        t * (3.0 * (p - 1.0) + p * (params.M + p - 2.0) + 1.0 +
             std::pow(2.0, 2.0 * p - 1.0) * ktp * tap);
    const double additive = params.em0_p(p) + std::pow(2.0, 3.0 * p - 2.0) * ktp * t *
                                                  (1.0 + params.e_theta_p(p)) * tap;
    return exp_adaptive(exponent) * BigFloat(additive);
}

BigFloat c_emose_p(double p, const Theorem2Params& params) {
    if (!(p >= 2.0 && p <= 4.0)) throw std::invalid_argument("c_emose_p: p outside [2,4]");
    const BigFloat cem = c_em_p(params.T, p, params);
    const double ktp = std::pow(params.k_total, p);
    const double tap = 1.0 + std::pow(params.T, params.alpha * p);
    const BigFloat drift =
        cem + BigFloat(ktp * tap) *
                  (BigFloat(std::pow(2.0, 3.0 * p - 2.0)) * cem +
                   BigFloat(std::pow(2.0, 4.0 * p - 3.0) * (1.0 + params.e_theta_p(p))));
    return BigFloat(std::pow(2.0, p - 1.0)) * drift +
           BigFloat(std::pow(params.M * p * (p - 1.0), 0.5 * p));
}

BigFloat theorem2_big_factor(const Theorem2Params& params) {
    const double t2a = std::pow(params.T, 2.0 * params.alpha);
    const double k3sq = params.k3 * params.k3;
    const double ktotsq = params.k_total * params.k_total;
    const double M = params.M;

    const BigFloat a = BigFloat(params.k4 * params.k4 / params.zeta * (1.0 + 4.0 * t2a)) *
                       c_emose_p(4.0, params);
    const BigFloat b = BigFloat(2.0 * (M + 2.0 * k3sq * (1.0 + 4.0 * t2a) * M));
    const BigFloat c = BigFloat(
        2.0 / params.zeta * params.k1 * params.k1 *
        (1.0 + 8.0 * (params.eps_al + params.theta_star_norm_sq)));
    const BigFloat d =
        BigFloat(2.0 * M / params.zeta * (M + 4.0 * k3sq * (1.0 + 4.0 * t2a))) *
        (BigFloat(1.0 + 16.0 * ktotsq * (1.0 + t2a)) * c_em_p(params.T, 2.0, params) +
         BigFloat(32.0 * ktotsq * (1.0 + t2a) *
                  (1.0 + 2.0 * params.eps_al + 2.0 * params.theta_star_norm_sq)));
    const BigFloat e =
        BigFloat(2.0) *
        (bmp::sqrt(BigFloat(1.0 + 8.0 * k3sq * (1.0 + 4.0 * t2a)) *
                   c_emose_p(2.0, params)) +
         BigFloat(2.0 * params.k1 *
                  std::sqrt(1.0 + 8.0 * params.eps_al + 8.0 * params.theta_star_norm_sq))) *
        BigFloat(M * std::sqrt(2.0) *
                 std::sqrt(M + 8.0 * k3sq * (1.0 + 4.0 * t2a) * M));
    return a + b + c + d + e;
}

// Exponent of the C4 / gamma-budget envelope before the (T - epsilon) factor.
static double c4_exponent_rate(const Theorem2Params& p) {
    const double t2a = std::pow(p.T, 2.0 * p.alpha);
    const double ta = std::pow(p.T, p.alpha);
    return 1.0 + p.zeta + p.k3 * (1.0 + 2.0 * ta + 4.0 * p.k3 * (1.0 + 4.0 * t2a));
}

BoundReport theorem2_bound(const Theorem2Params& p) {
    p.validate();
    const double span = p.T - p.epsilon;
    const double c1 = 2.0 * (std::sqrt(p.ex0sq) + std::sqrt(static_cast<double>(p.M)));
    const double c2 = 2.0 * (std::sqrt(p.ex0sq) + std::sqrt(1.5 * p.M));
    const BigFloat c3 = BigFloat(std::sqrt(2.0 / p.zeta)) *
                        exp_adaptive((1.0 + p.zeta - 2.0 * p.l_mo) * span);
    const BigFloat c4 = BigFloat(std::sqrt(2.0)) *
                        exp_adaptive(2.0 * c4_exponent_rate(p) * span) *
                        BigFloat(std::sqrt(span)) *
                        bmp::sqrt(theorem2_big_factor(p));

    BoundReport r;
    r.terms.emplace_back("early_stop", BigFloat(c1 * std::sqrt(p.epsilon)));
    r.terms.emplace_back(
        "init", BigFloat(c2) * exp_adaptive(-(2.0 * p.l_mo - 1.0) * span));
    r.terms.emplace_back("score", c3 * BigFloat(std::sqrt(p.eps_sn)));
    r.terms.emplace_back("disc",
                         c4 * bmp::pow(p.gamma, BigFloat(p.alpha)));
    r.total = 0;
    for (const auto& [key, value] : r.terms) r.total += value;
    return r;
}

double table2_eps_delta(double delta, int M, double ex0sq) {
    return delta * delta /
           (64.0 * std::pow(std::sqrt(ex0sq) + std::sqrt(static_cast<double>(M)), 2.0));
}

double table2_t_delta(double delta, int M, double ex0sq, double l_mo, double epsilon) {
    return std::log(8.0 * (std::sqrt(ex0sq) + std::sqrt(1.5 * M)) / delta) /
               (2.0 * l_mo - 1.0) +
           epsilon;
}

double table2_eps_sn_delta(double delta, double zeta, double l_mo, double span) {
    return zeta * delta * delta / 32.0 *
           std::exp(-2.0 * (1.0 + zeta - 2.0 * l_mo) * span);
}

BigFloat table2_gamma_delta(double delta, const Theorem2Params& at) {
    const double span = at.T - at.epsilon;
    const BigFloat envelope =
        bmp::pow(BigFloat(delta / (4.0 * std::sqrt(2.0))), BigFloat(1.0 / at.alpha)) *
        bmp::pow(BigFloat(span), BigFloat(-1.0 / (2.0 * at.alpha))) *
        exp_adaptive(-(2.0 / at.alpha) * c4_exponent_rate(at) * span) *
        bmp::pow(theorem2_big_factor(at), BigFloat(-1.0 / (2.0 * at.alpha)));
    return envelope < 1 ? envelope : BigFloat(1);
}

Table2Budget table2_budget(double delta, const Theorem2Params& params, double eps_frac,
                           double t_margin) {
    if (!(delta > 0.0)) throw std::invalid_argument("table2_budget: delta must be positive");
    Table2Budget b;
    b.eps_delta = table2_eps_delta(delta, params.M, params.ex0sq);
    // A caller epsilon already below the row keeps its value (0 included);
    // otherwise the chosen epsilon sits strictly inside the row.
    b.chosen_epsilon =
        params.epsilon < b.eps_delta ? params.epsilon : eps_frac * b.eps_delta;
    b.T_delta =
        table2_t_delta(delta, params.M, params.ex0sq, params.l_mo, b.chosen_epsilon);
    b.chosen_T = params.T > b.T_delta ? params.T : b.T_delta + t_margin;

    Theorem2Params at = params;
    at.T = b.chosen_T;
    at.epsilon = b.chosen_epsilon;
    b.eps_sn_delta =
        table2_eps_sn_delta(delta, params.zeta, params.l_mo, at.T - at.epsilon);
    b.gamma_delta = table2_gamma_delta(delta, at);
    return b;
}

}  // namespace sgl
