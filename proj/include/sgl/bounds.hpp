#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sgl/bigfloat.hpp"
#include "sgl/gaussian_model.hpp"
#include "sgl/ou.hpp"

namespace sgl {

// Named right-hand-side terms of a W2 bound; total is their exact sum.
struct BoundReport {
    std::vector<std::pair<std::string, BigFloat>> terms;
    BigFloat total = 0;

    const BigFloat& term(const std::string& name) const;
};

// Inputs of the Gaussian-case bound. e0 = E|theta_0 - theta*|^2; ex0sq =
// E|X_0|^2; e1/e2 are the schedule expectations E[sigma^2 m^2] and
// E[sigma^4 m^4]; c2_numerator is the expectation inside the second SGLD
// constant before its 4/e1 factor.
struct Theorem1Params {
    int d;
    double T;
    double beta;
    double lambda;
    std::int64_t n;
    double gamma;
    double e0;
    double ex0sq;
    double theta_star_norm_sq;
    double e1;
    double e2;
    double c1;
    double c2;
    double c2_numerator;

    static Theorem1Params make(const OuSchedule& schedule, const GaussianProblem& problem,
                               double beta, double lambda, std::int64_t n, double gamma,
                               double e0, int nodes = kDefaultQuadNodes);

    void validate() const;
};

// init + opt + disc:
//   2 e^{-T} (sqrt(ex0sq) + sqrt(3d/2))
// + (sqrt(4/3) + 2 sqrt(33)) (e^{-n lambda e1} sqrt(e0)
//                             + sqrt(d c1/beta) + sqrt(lambda c2))
// + gamma (sqrt(18 d) + sqrt(132 theta_star_norm_sq)).
BoundReport theorem1_bound(const Theorem1Params& p);

// sqrt(4/3) + 2 sqrt(33), the optimization-term prefactor.
double theorem1_opt_prefactor();

// One pure function per budget row.
double table1_t_delta(double delta, int d, double ex0sq);
double table1_beta_delta(double delta, int d, double e1);
double table1_lambda_delta(double delta, double e1, double e2, double c2_numerator);
double table1_n_delta(double delta, double e0, double lambda, double e1);
double table1_gamma_delta(double delta, int d, double theta_star_norm_sq);

struct Table1Budget {
    double T_delta;
    double beta_delta;
    double lambda_delta;
    double n_delta;  // for the fixed lambda below
    double gamma_delta;
    double lambda_used;
};

// Row-by-row budget for a target accuracy delta. If lambda <= 0 the row's
// "fixed lambda" is taken to be lambda_delta itself.
Table1Budget table1_budget(double delta, int d, double ex0sq, double e0,
                           double theta_star_norm_sq, double e1, double e2,
                           double c2_numerator, double lambda = 0.0);

// Inputs of the general-case bound. M is the state dimension; em0_p2/p4 are
// E|Y_0^EM|^p (M and M(M+2) for the standard Gaussian start); e_theta4 is
// the user-supplied E|theta_hat|^4 (no bound exists for it); nu is accepted
// and echoed but enters no formula. gamma is big-float because valid budget
// step sizes can be far below double range.
struct Theorem2Params {
    int M;
    double T;
    double epsilon;
    double alpha;
    double zeta;
    double l_mo;
    double k1, k2, k3, k4;
    double k_total;
    double eps_al;
    double eps_sn;
    double theta_star_norm_sq;
    double ex0sq;
    double em0_p2;
    double em0_p4;
    double e_theta4;
    double nu;
    BigFloat gamma;

    void validate() const;

    double e_theta_p(double p) const;  // 2 eps_al + 2|theta*|^2 at p=2, e_theta4 at p=4
    double em0_p(double p) const;
};

// sup_{0<=s<=t} E|Y_s^EM|^p <= C_EM,p(t):
// e^{t (3(p-1) + p(M+p-2) + 1 + 2^{2p-1} K_tot^p (1+T^{alpha p}))}
//   x (E|Y_0|^p + 2^{3p-2} K_tot^p t (1+E|theta_hat|^p)(1+T^{alpha p})).
BigFloat c_em_p(double t, double p, const Theorem2Params& params);

// E|Y_t^EM - Y_{floor(t/gamma) gamma}^EM|^p <= gamma^{p/2} C_EMose,p:
// 2^{p-1} (C_EM,p(T) + K_tot^p (1+T^{alpha p}) (2^{3p-2} C_EM,p(T)
//   + 2^{4p-3}(1+E|theta_hat|^p))) + (M p (p-1))^{p/2}.
BigFloat c_emose_p(double p, const Theorem2Params& params);

// The bracketed factor shared by the C4 constant and the gamma budget row.
BigFloat theorem2_big_factor(const Theorem2Params& params);

// early_stop + init + score + disc:
//   C1 sqrt(epsilon) + C2 e^{-(2 L_mo - 1)(T-epsilon)}
// + C3 sqrt(eps_sn) + C4 gamma^alpha.
BoundReport theorem2_bound(const Theorem2Params& p);

// One pure function per budget row; the last two take the (T, epsilon) pair
// actually chosen, since those rows depend on both.
double table2_eps_delta(double delta, int M, double ex0sq);
double table2_t_delta(double delta, int M, double ex0sq, double l_mo, double epsilon);
double table2_eps_sn_delta(double delta, double zeta, double l_mo, double span);
BigFloat table2_gamma_delta(double delta, const Theorem2Params& at);

struct Table2Budget {
    double eps_delta;
    double T_delta;       // for the chosen epsilon below
    double eps_sn_delta;  // for the chosen (T, epsilon)
    BigFloat gamma_delta;
    double chosen_epsilon;
    double chosen_T;
};

// The budget rows are sequential: epsilon_delta depends only on delta,
// T_delta on the chosen epsilon, and the last two rows on the chosen (T,
// epsilon). The chosen values are epsilon = eps_frac * eps_delta and
// T = T_delta + t_margin unless params already carries a T past T_delta.
Table2Budget table2_budget(double delta, const Theorem2Params& params,
                           double eps_frac = 0.5, double t_margin = 0.01);

}  // namespace sgl
