#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgl/bounds.hpp"
#include "sgl/gaussian_model.hpp"
#include "sgl/mc.hpp"
#include "sgl/ou.hpp"
#include "sgl/sgld.hpp"

namespace sgl {

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v);

// One checked statement: a simulated (or exactly computed) left side against
// a formula right side. Inequality checks pass iff lhs.mean + lhs.half_width
// <= rhs; identity checks pass iff the recorded deviation is inside the
// stated tolerance. Exactly computed left sides carry half_width 0.
struct LemmaCheck {
    std::string lemma_id;
    McEstimate lhs;
    BigFloat rhs = 0;
    Verdict verdict = Verdict::fail;
    std::string detail;
};

// Shared simulation inputs for the Gaussian-case checks. theta0 is the
// deterministic optimizer start, so E|theta_0 - theta*|^2 = |theta0 - mu|^2.
struct LemmaConfig {
    OuSchedule schedule;
    GaussianProblem problem;
    double gamma = 0.1;
    double lambda = 0.05;
    double beta = 1e4;
    std::int64_t n_iters = 500;
    Vec theta0;
    int n_replicas = 200;
    std::int64_t mc_samples = 200000;
    std::uint64_t seed = 12345;
    int quad_nodes = kDefaultQuadNodes;

    LemmaConfig(OuSchedule schedule_, GaussianProblem problem_);

    SgldConfig sgld() const;
    double e0() const;
};

// |H(theta,x) - H(thetabar,x)| = 2 sigma^2 m^2 |theta - thetabar| and the
// matching inner-product identity, on random triples plus the theta=thetabar
// and tau=0 edge cases. lhs.mean records the worst relative deviation over
// all trials; pass iff it stays within 1e-12.
LemmaCheck check_prop_b1(const LemmaConfig& cfg, std::int64_t n_trials = 100000);

// lemma_id "B2": E|theta_n - theta*|^2 against the three-term SGLD bound;
// "B3": E|theta_n|^2 against its doubled variant. Checked at a 1-2-5 ladder
// of checkpoints up to n_iters over n_replicas independent runs; the
// reported lhs/rhs pair is the checkpoint with the smallest margin.
LemmaCheck check_sgld_moment(const std::string& lemma_id, const LemmaConfig& cfg);

// lemma_id "B4": sup_t E|Y_t^aux|^2 vs C_aux; "B5": sup_k E|Y_k^EM|^2 vs
// C_EM; "B6": sup_t E|gap_t|^2 vs gamma C_EMose; "B7": sup_t E|Yhat_t|^2 vs
// Chat_EM. Every replica draws its own SGLD theta_hat, then simulates the
// process; the sup runs over 200 uniform times plus the grid points.
LemmaCheck check_moment_lemma(const std::string& lemma_id, const LemmaConfig& cfg);

// lemma_id "C1"/"C2": p-th moment (p in [2,4]) of the interpolated EM chain
// resp. its one-step gap, simulated with the affine family and a fixed
// theta_hat whose moments satisfy the params' E|theta_hat|^p inputs, against
// c_em_p / gamma^{p/2} c_emose_p. "C3cor"/"C4": the score-gradient cap and
// the drift Taylor remainder on random tuples (analytic affine gradients,
// finite differences kept as a cross-check). gamma is the simulated step.
LemmaCheck check_appendix_c(const std::string& lemma_id, const Theorem2Params& params,
                            double p, double gamma, std::int64_t n_paths,
                            std::uint64_t seed);

// Denoising-vs-explicit objective constancy over a small theta panel at the
// configured epsilon; pass iff every pairwise residual interval straddles 0.
LemmaCheck check_a_identity(const LemmaConfig& cfg);

struct TheoremCheckOptions {
    bool perfect_score = false;  // theta_hat := mu, optimizer skipped
    double zeta = 0.5;
    double l_mo = 1.0;
    double e_theta4 = 0.0;  // <= 0: twice the empirical fourth moment
    double nu = 0.5;
};

// theorem_id "T1": full-horizon pipeline (SGLD replicas -> EM sampler ->
// pooled terminal W2 against N(mu, I)) vs the three-term bound. "T2":
// early-stopped pipeline vs the four-term bound with affine constants; its
// eps_sn input is the certificate estimated from the replica theta_hats.
LemmaCheck check_theorem(const std::string& theorem_id, const LemmaConfig& cfg,
                         const TheoremCheckOptions& opt = {});

// The twelve checkable statement ids, in report order.
const std::vector<std::string>& all_lemma_ids();

// Dispatch by id. C1 and C2 expand to one check per p in {2, 4}; every other
// id yields a single check. Unknown ids throw std::invalid_argument.
std::vector<LemmaCheck> run_lemma_checks(const std::string& lemma_id,
                                         const LemmaConfig& cfg);

// Fixed-width human-readable summary, one row per check.
std::string lemma_check_table(const std::vector<LemmaCheck>& checks);

}  // namespace sgl
