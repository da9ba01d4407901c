#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sgl/ou.hpp"

namespace sgl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resolved experiment configuration. Flat key=value text; '#' and ';' start
// comments, [section] headers are tolerated and ignored, unknown or
// duplicated keys are hard errors (all problems are reported in one pass,
// each naming its key). "M" is accepted as an alias of "d"; if both appear
// they must agree. "mu", "theta0" and "theta_hat" accept either a scalar
// (broadcast across all d coordinates) or a comma-separated d-vector.
struct Config {
    int d = 2;
    Vec mu;         // default 0.5 per coordinate
    Vec theta0;     // default 0 per coordinate
    Vec theta_hat;  // default mu; standalone `sample` uses it as the score parameter
    double T = 1.0;
    double epsilon = 0.0;
    double gamma = 0.1;
    double lambda = 0.05;
    double beta = 1e4;
    std::int64_t n_iters = 500;
    std::int64_t n_paths = 100000;
    int n_replicas = 200;
    std::int64_t mc_samples = 200000;
    std::uint64_t seed = 12345;
    double zeta = 0.5;
    double alpha = 1.0;
    double k1 = 1.0, k2 = 1.0, k3 = 1.0, k4 = 1e-12;
    double e_theta4 = 1.0;
    double e0 = -1.0;  // resolved to |theta0 - mu|^2 when not set
    double eps_al = 0.04;
    double eps_sn = 0.02;
    double nu = 0.5;
    double l_mo = 1.0;
    std::int64_t n_fine = 100;  // fine-step divisor: auxiliary step = gamma / n_fine
    int quad_nodes = kDefaultQuadNodes;

    OuSchedule schedule() const { return OuSchedule(T, epsilon); }
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

}  // namespace sgl
