#include "sgl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace sgl {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Parser {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;

    void fail(const std::string& msg) { errors.push_back(msg); }

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    double num(const std::string& key, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const std::string& v = it->second;
        double out = fallback;
        const char* b = v.data();
        const char* e = b + v.size();
        auto res = std::from_chars(b, e, out);
        if (res.ec != std::errc{} || res.ptr != e) {
            fail("key '" + key + "': not a number: '" + v + "'");
            return fallback;
        }
        return out;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        const double v = num(key, static_cast<double>(fallback));
        const auto r = static_cast<std::int64_t>(std::llround(v));
        if (v != static_cast<double>(r))
            fail("key '" + key + "': expected an integer");
        return r;
    }

    std::vector<double> vec(const std::string& key, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return {fallback};
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            piece = trim(piece);
            double x = 0.0;
            const char* b = piece.data();
            const char* e = b + piece.size();
            auto res = std::from_chars(b, e, x);
            if (res.ec != std::errc{} || res.ptr != e) {
                fail("key '" + key + "': not a number list: '" + it->second + "'");
                return {fallback};
            }
            out.push_back(x);
        }
        if (out.empty()) {
            fail("key '" + key + "': empty value");
            return {fallback};
        }
        return out;
    }
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "d",       "M",        "mu",         "theta0",  "theta_hat", "T",
        "epsilon", "gamma",    "lambda",     "beta",    "n_iters",   "n_paths",
        "n_replicas", "mc_samples", "seed",  "zeta",    "alpha",     "k1",
        "k2",      "k3",       "k4",         "e_theta4", "e0",       "eps_al",
        "eps_sn",  "nu",       "l_mo",       "n_fine",  "quad_nodes"};
    return keys;
}

Vec resolve_vec(Parser& p, const std::string& key, std::vector<double> raw, int d) {
    if (raw.size() == 1) {
        Vec v(d);
        v.setConstant(raw[0]);
        return v;
    }
    if (static_cast<int>(raw.size()) != d) {
        p.fail("key '" + key + "': expected 1 or " + std::to_string(d) +
               " entries, got " + std::to_string(raw.size()));
        return Vec::Zero(d);
    }
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = raw[i];
    return v;
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Parser p;
    std::stringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.fail("line " + std::to_string(lineno) + ": expected key=value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key)) {
            p.fail("unknown key '" + key + "'");
            continue;
        }
        if (value.empty()) {
            p.fail("key '" + key + "': missing value");
            continue;
        }
        if (p.kv.count(key)) {
            p.fail("duplicate key '" + key + "'");
            continue;
        }
        p.kv[key] = value;
    }

    Config c;
    const std::int64_t d_val = p.integer("d", c.d);
    const std::int64_t m_val = p.integer("M", d_val);
    if (p.has("d") && p.has("M") && d_val != m_val)
        p.fail("keys 'd' and 'M' disagree");
    c.d = static_cast<int>(p.has("d") ? d_val : m_val);
    if (c.d < 1) p.fail("key 'd': must be >= 1");
    if (c.d < 1) c.d = 1;  // keep resolving the rest for a full error list

    c.mu = resolve_vec(p, "mu", p.vec("mu", 0.5), c.d);
    c.theta0 = resolve_vec(p, "theta0", p.vec("theta0", 0.0), c.d);
    if (p.has("theta_hat"))
        c.theta_hat = resolve_vec(p, "theta_hat", p.vec("theta_hat", 0.0), c.d);
    else
        c.theta_hat = c.mu;

    c.T = p.num("T", c.T);
    c.epsilon = p.num("epsilon", c.epsilon);
    c.gamma = p.num("gamma", c.gamma);
    c.lambda = p.num("lambda", c.lambda);
    c.beta = p.num("beta", c.beta);
    c.n_iters = p.integer("n_iters", c.n_iters);
    c.n_paths = p.integer("n_paths", c.n_paths);
    c.n_replicas = static_cast<int>(p.integer("n_replicas", c.n_replicas));
    c.mc_samples = p.integer("mc_samples", c.mc_samples);
    const std::int64_t seed = p.integer("seed", static_cast<std::int64_t>(c.seed));
    c.seed = static_cast<std::uint64_t>(seed);
    c.zeta = p.num("zeta", c.zeta);
    c.alpha = p.num("alpha", c.alpha);
    c.k1 = p.num("k1", c.k1);
    c.k2 = p.num("k2", c.k2);
    c.k3 = p.num("k3", c.k3);
    c.k4 = p.num("k4", c.k4);
    c.e_theta4 = p.num("e_theta4", c.e_theta4);
    c.e0 = p.num("e0", c.e0);
    c.eps_al = p.num("eps_al", c.eps_al);
    c.eps_sn = p.num("eps_sn", c.eps_sn);
    c.nu = p.num("nu", c.nu);
    c.l_mo = p.num("l_mo", c.l_mo);
    c.n_fine = p.integer("n_fine", c.n_fine);
    c.quad_nodes = static_cast<int>(p.integer("quad_nodes", c.quad_nodes));

    if (!(c.T > 0.0)) p.fail("key 'T': must be positive");
    if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) p.fail("key 'epsilon': must be in [0,1)");
    if (c.epsilon >= c.T) p.fail("key 'epsilon': must be below T");
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) p.fail("key 'gamma': must be in (0,1)");
    if (!(c.lambda > 0.0)) p.fail("key 'lambda': must be positive");
    if (!(c.beta > 0.0)) p.fail("key 'beta': must be positive");
    if (c.n_iters < 0) p.fail("key 'n_iters': must be >= 0");
    if (c.n_paths < 1) p.fail("key 'n_paths': must be >= 1");
    if (c.n_replicas < 1) p.fail("key 'n_replicas': must be >= 1");
    if (c.mc_samples < 2) p.fail("key 'mc_samples': must be >= 2");
    if (!(c.zeta > 0.0 && c.zeta < 1.0)) p.fail("key 'zeta': must be in (0,1)");
    if (!(c.alpha >= 0.5 && c.alpha <= 1.0)) p.fail("key 'alpha': must be in [1/2,1]");
    if (c.k1 < 0.0 || c.k2 < 0.0 || c.k3 < 0.0 || c.k4 < 0.0)
        p.fail("keys 'k1'..'k4': must be nonnegative");
    if (c.e_theta4 < 0.0) p.fail("key 'e_theta4': must be nonnegative");
    if (c.eps_al < 0.0) p.fail("key 'eps_al': must be nonnegative");
    if (c.eps_sn < 0.0) p.fail("key 'eps_sn': must be nonnegative");
    if (!(c.l_mo > 0.5)) p.fail("key 'l_mo': must exceed 1/2");
    if (c.n_fine < 1) p.fail("key 'n_fine': must be >= 1");
    if (c.quad_nodes < 2) p.fail("key 'quad_nodes': must be >= 2");

    if (c.e0 < 0.0) c.e0 = (c.theta0 - c.mu).squaredNorm();

    if (!p.errors.empty()) {
        std::string msg = "config error";
        for (const std::string& e : p.errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return c;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config error\n  - cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace sgl
