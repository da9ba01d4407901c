#include "sgl/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace sgl {

nlohmann::json big_json(const BigFloat& v) {
    nlohmann::json j;
    const double d = big_to_double(v);
    if (std::isfinite(d))
        j["value"] = d;
    else
        j["value"] = nullptr;
    if (v > 0)
        j["log10"] = big_log10(v);
    else
        j["log10"] = nullptr;
    return j;
}

nlohmann::json vec_json(const Vec& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

nlohmann::json config_json(const Config& c) {
    nlohmann::json j;
    j["d"] = c.d;
    j["mu"] = vec_json(c.mu);
    j["theta0"] = vec_json(c.theta0);
    j["theta_hat"] = vec_json(c.theta_hat);
    j["T"] = c.T;
    j["epsilon"] = c.epsilon;
    j["gamma"] = c.gamma;
    j["lambda"] = c.lambda;
    j["beta"] = c.beta;
    j["n_iters"] = c.n_iters;
    j["n_paths"] = c.n_paths;
    j["n_replicas"] = c.n_replicas;
    j["mc_samples"] = c.mc_samples;
    j["seed"] = c.seed;
    j["zeta"] = c.zeta;
    j["alpha"] = c.alpha;
    j["k1"] = c.k1;
    j["k2"] = c.k2;
    j["k3"] = c.k3;
    j["k4"] = c.k4;
    j["e_theta4"] = c.e_theta4;
    j["e0"] = c.e0;
    j["eps_al"] = c.eps_al;
    j["eps_sn"] = c.eps_sn;
    j["nu"] = c.nu;
    j["l_mo"] = c.l_mo;
    j["n_fine"] = c.n_fine;
    j["quad_nodes"] = c.quad_nodes;
    return j;
}

nlohmann::json mc_json(const McEstimate& e) {
    nlohmann::json j;
    j["mean"] = e.mean;
    j["n"] = e.n;
    j["half_width"] = e.half_width;
    j["seed"] = e.seed;
    return j;
}

nlohmann::json bound_report_json(const BoundReport& r) {
    nlohmann::json terms;
    for (const auto& [name, value] : r.terms) terms[name] = big_json(value);
    nlohmann::json j;
    j["terms"] = terms;
    j["total"] = big_json(r.total);
    return j;
}

nlohmann::json lemma_check_json(const LemmaCheck& c) {
    nlohmann::json j;
    j["lemma_id"] = c.lemma_id;
    j["lhs"] = mc_json(c.lhs);
    j["rhs"] = big_json(c.rhs);
    j["verdict"] = verdict_name(c.verdict);
    j["detail"] = c.detail;
    return j;
}

nlohmann::json table1_budget_json(const Table1Budget& b) {
    nlohmann::json j;
    j["T_delta"] = b.T_delta;
    j["beta_delta"] = b.beta_delta;
    j["lambda_delta"] = b.lambda_delta;
    j["n_delta"] = b.n_delta;
    j["gamma_delta"] = b.gamma_delta;
    j["lambda_used"] = b.lambda_used;
    return j;
}

nlohmann::json table2_budget_json(const Table2Budget& b) {
    nlohmann::json j;
    j["eps_delta"] = b.eps_delta;
    j["T_delta"] = b.T_delta;
    j["eps_sn_delta"] = b.eps_sn_delta;
    j["gamma_delta"] = big_json(b.gamma_delta);
    j["chosen_epsilon"] = b.chosen_epsilon;
    j["chosen_T"] = b.chosen_T;
    return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace sgl
