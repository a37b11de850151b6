#include "mfbm/config.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mfbm {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config: [" + where + "] " + what);
}

double parse_real(const std::string& where, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(where, key + ": '" + v + "' is not a real number");
    }
}

std::vector<double> parse_list(const std::string& where, const std::string& key,
                               const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(where, key + ": empty element in list");
        out.push_back(parse_real(where, key, item));
    }
    if (out.empty()) fail(where, key + ": empty list");
    return out;
}

int parse_int(const std::string& where, const std::string& key, const std::string& v) {
    const double x = parse_real(where, key, v);
    if (x != std::floor(x)) fail(where, key + ": '" + v + "' is not an integer");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& where, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(where, key + ": '" + v + "' is not a boolean (true/false)");
}

std::vector<double> broadcast(const std::string& where, const std::string& key,
                              std::vector<double> v, int dim) {
    if (v.empty()) return v;
    if (static_cast<int>(v.size()) == 1 && dim > 1) return std::vector<double>(dim, v[0]);
    if (static_cast<int>(v.size()) != dim)
        fail(where, key + ": expected 1 or " + std::to_string(dim) + " values, got " +
                        std::to_string(v.size()));
    return v;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.epsilons.clear();
    cfg.deltas.clear();

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::string section;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        if (section.empty())
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        ": key outside any [section]");
        raw[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    const std::map<std::string, std::vector<std::string>> known = {
        {"space", {"dim", "generator", "eigenvalues"}},
        {"covariance", {"q1", "q2"}},
        {"hurst", {"H", "alpha"}},
        {"family", {}}, // name plus free scalar parameters
        {"scales", {"epsilon", "delta", "h_exponent", "block"}},
        {"grid", {"T", "slow_steps", "substeps", "x0", "y0"}},
        {"mc", {"replicas", "seed", "event_mode", "event_threshold", "rate_reference", "parallel"}},
        {"output", {"dir"}},
    };
    for (const auto& [sec, keys] : raw) {
        auto it = known.find(sec);
        if (it == known.end()) fail(sec, "unknown section");
        if (sec == "family") continue;
        for (const auto& [key, value] : keys) {
            (void)value;
            bool ok = false;
            for (const std::string& k : it->second)
                if (k == key) { ok = true; break; }
            if (!ok) fail(sec, "unknown key '" + key + "'");
        }
    }

    if (auto s = raw.find("space"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            if (k == "dim") cfg.dim = parse_int("space", k, v);
            else if (k == "generator") cfg.generator = v;
            else if (k == "eigenvalues") cfg.eigenvalues = parse_list("space", k, v);
        }
    }
    if (cfg.dim < 1) fail("space", "dim must be at least 1");
    if (cfg.generator != "dirichlet" && cfg.generator != "explicit")
        fail("space", "generator must be 'dirichlet' or 'explicit'");
    if (cfg.generator == "explicit") {
        if (static_cast<int>(cfg.eigenvalues.size()) != cfg.dim)
            fail("space", "explicit generator needs exactly dim eigenvalues");
        for (std::size_t i = 0; i < cfg.eigenvalues.size(); ++i) {
            if (cfg.eigenvalues[i] <= 0.0) fail("space", "eigenvalues must be positive");
            if (i > 0 && cfg.eigenvalues[i] <= cfg.eigenvalues[i - 1])
                fail("space", "eigenvalues must be strictly increasing");
        }
    } else if (!cfg.eigenvalues.empty()) {
        fail("space", "eigenvalues given but generator is not 'explicit'");
    }

    if (auto s = raw.find("covariance"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            std::vector<double> lam = v == "identity" ? std::vector<double>{} : parse_list("covariance", k, v);
            if (k == "q1") cfg.q1 = std::move(lam);
            else cfg.q2 = std::move(lam);
        }
    }
    cfg.q1 = broadcast("covariance", "q1", cfg.q1, cfg.dim);
    cfg.q2 = broadcast("covariance", "q2", cfg.q2, cfg.dim);
    for (double l : cfg.q1)
        if (l < 0.0) fail("covariance", "q1 entries must be nonnegative");
    for (double l : cfg.q2)
        if (l < 0.0) fail("covariance", "q2 entries must be nonnegative");

    if (auto s = raw.find("hurst"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            if (k == "H") cfg.H = parse_real("hurst", k, v);
            else cfg.alpha = parse_real("hurst", k, v);
        }
    }
    if (!(cfg.H > 0.5) || !(cfg.H < 1.0))
        fail("hurst", "H = " + std::to_string(cfg.H) +
                          " rejected; the slow noise needs H strictly inside (1/2, 1)");
    if (cfg.alpha >= 0.0) {
        const double lo = 1.0 - cfg.H;
        if (!(cfg.alpha > lo) || !(cfg.alpha < 0.5))
            fail("hurst", "alpha = " + std::to_string(cfg.alpha) +
                              " outside the admissible interval (1-H, 1/2) = (" +
                              std::to_string(lo) + ", 0.5)");
    }

    if (auto s = raw.find("family"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            if (k == "name") cfg.family = v;
            else cfg.family_params[k] = parse_real("family", k, v);
        }
    }

    if (auto s = raw.find("scales"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            if (k == "epsilon") cfg.epsilons = parse_list("scales", k, v);
            else if (k == "delta") cfg.deltas = parse_list("scales", k, v);
            else if (k == "h_exponent") cfg.h_exponent = parse_real("scales", k, v);
            else if (k == "block") cfg.block = parse_real("scales", k, v);
        }
    }
    if (cfg.epsilons.empty()) cfg.epsilons = {0.1};
    if (cfg.deltas.empty()) cfg.deltas = {0.01};
    if (cfg.deltas.size() != cfg.epsilons.size() && cfg.deltas.size() != 1 &&
        cfg.epsilons.size() != 1)
        fail("scales", "epsilon and delta schedules have incompatible lengths");
    for (double e : cfg.epsilons)
        if (!(e >= 0.0) || e >= 1.0) fail("scales", "epsilon values must lie in [0, 1)");
    for (double d : cfg.deltas)
        if (!(d > 0.0) || d >= 1.0) fail("scales", "delta values must lie in (0, 1)");
    if (cfg.h_exponent < 0.0 || cfg.h_exponent >= 0.5)
        fail("scales", "h_exponent = " + std::to_string(cfg.h_exponent) +
                           " outside [0, 1/2); the deviation speed needs sqrt(eps) h(eps) -> 0");
    if (cfg.block < 0.0) fail("scales", "block must be nonnegative");

    if (auto s = raw.find("grid"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            if (k == "T") cfg.T = parse_real("grid", k, v);
            else if (k == "slow_steps") cfg.slow_steps = parse_int("grid", k, v);
            else if (k == "substeps") cfg.substeps = parse_int("grid", k, v);
            else if (k == "x0") cfg.x0 = parse_list("grid", k, v);
            else if (k == "y0") cfg.y0 = parse_list("grid", k, v);
        }
    }
    if (!(cfg.T > 0.0)) fail("grid", "T must be positive");
    if (cfg.slow_steps < 1) fail("grid", "slow_steps must be at least 1");
    if (cfg.slow_steps > FbmFactor::kCholeskyCap)
        fail("grid", "slow_steps = " + std::to_string(cfg.slow_steps) +
                         " exceeds the exact-sampler cap " + std::to_string(FbmFactor::kCholeskyCap));
    if (cfg.substeps < 0) fail("grid", "substeps must be nonnegative (0 = auto)");
    cfg.x0 = broadcast("grid", "x0", cfg.x0, cfg.dim);
    cfg.y0 = broadcast("grid", "y0", cfg.y0, cfg.dim);
    if (cfg.block > 0.0 && cfg.block < cfg.T / cfg.slow_steps - 1e-12)
        fail("scales", "block = " + std::to_string(cfg.block) + " smaller than the grid step " +
                           std::to_string(cfg.T / cfg.slow_steps));

    if (auto s = raw.find("mc"); s != raw.end()) {
        for (const auto& [k, v] : s->second) {
            if (k == "replicas") cfg.replicas = parse_int("mc", k, v);
            else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(parse_real("mc", k, v));
            else if (k == "event_mode") cfg.event_mode = parse_int("mc", k, v);
            else if (k == "event_threshold") cfg.event_threshold = parse_real("mc", k, v);
            else if (k == "rate_reference") cfg.rate_reference = parse_real("mc", k, v);
            else if (k == "parallel") cfg.parallel = parse_bool("mc", k, v);
        }
    }
    if (cfg.replicas < 1) fail("mc", "replicas must be positive");
    if (cfg.event_mode < 0 || cfg.event_mode >= cfg.dim)
        fail("mc", "event_mode out of range [0, dim)");

    if (auto s = raw.find("output"); s != raw.end()) {
        for (const auto& [k, v] : s->second)
            if (k == "dir") cfg.out_dir = v;
    }
    if (cfg.out_dir.empty()) fail("output", "dir must not be empty");

    // late cross-check: the family must exist (constructing it validates)
    cfg.coefficients(cfg.space());
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_env_overrides(ExperimentConfig& config) {
    if (const char* env = std::getenv("MFBM_SEED")) {
        try {
            config.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: MFBM_SEED='" + std::string(env) +
                                        "' is not an unsigned integer");
        }
    }
}

SpectralSpace ExperimentConfig::space() const {
    if (generator == "explicit") return SpectralSpace(eigenvalues);
    return dirichlet_laplacian_1d(dim);
}

HurstParam ExperimentConfig::hurst() const {
    return alpha >= 0.0 ? HurstParam::fractional(H, alpha) : HurstParam::fractional(H);
}

CoefficientSystem ExperimentConfig::coefficients(const SpectralSpace& sp) const {
    return make_coefficient_system(family, sp, family_params);
}

std::vector<ScaleParams> ExperimentConfig::schedule() const {
    const std::size_t n = std::max(epsilons.size(), deltas.size());
    std::vector<ScaleParams> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ScaleParams s;
        s.epsilon = epsilons[epsilons.size() == 1 ? 0 : i];
        s.delta = deltas[deltas.size() == 1 ? 0 : i];
        s.h_eps = h_exponent > 0.0 ? std::pow(s.epsilon, -h_exponent) : 1.0;
        s.block = block;
        s.validate();
        out.push_back(s);
    }
    return out;
}

SimSetup ExperimentConfig::setup(const SpectralSpace& sp) const {
    SimSetup s;
    s.q1 = q1.empty() ? CovarianceSpec::identity(sp.dim()) : CovarianceSpec::diagonal(q1);
    s.q2 = q2.empty() ? CovarianceSpec::identity(sp.dim()) : CovarianceSpec::diagonal(q2);
    s.hurst = hurst();
    s.T = T;
    s.slow_steps = slow_steps;
    double delta_min = deltas.front();
    for (double d : deltas) delta_min = std::min(delta_min, d);
    s.substeps = substeps > 0 ? substeps : required_substeps(T, slow_steps, delta_min);
    s.x0 = x0.empty() ? CoeffVector(sp.dim()) : CoeffVector(x0);
    s.y0 = y0.empty() ? CoeffVector(sp.dim()) : CoeffVector(y0);
    return s;
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string manifest_json(const std::string& command, const std::string& cfg_hash,
                          std::uint64_t seed, const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["config_hash"] = cfg_hash;
    j["seed"] = seed;
    j["version"] = kVersion;
    j["outputs"] = outputs;
    return j.dump(2);
}

} // namespace mfbm
