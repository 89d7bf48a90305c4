#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lbp/harness.hpp"

namespace lbp {

RunMode parse_run_mode(const std::string& s) {
    if (s == "fixed") return RunMode::Fixed;
    if (s == "adaptive") return RunMode::Adaptive;
    if (s == "sweep") return RunMode::Sweep;
    if (s == "scaling") return RunMode::Scaling;
    if (s == "validate") return RunMode::Validate;
    throw std::invalid_argument("unknown mode: " + s +
                                " (want fixed|adaptive|sweep|scaling|validate)");
}

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Fixed: return "fixed";
        case RunMode::Adaptive: return "adaptive";
        case RunMode::Sweep: return "sweep";
        case RunMode::Scaling: return "scaling";
        case RunMode::Validate: return "validate";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (model != "bernoulli" && model != "ising" && model != "fhmm" && model != "rbm")
        throw std::invalid_argument("config: invalid value for 'model': " + model);
    if (steps < 1) throw std::invalid_argument("config: invalid value for 'steps': must be >= 1");
    if (burnin < 0 || burnin >= steps)
        throw std::invalid_argument("config: invalid value for 'burnin': need 0 <= burnin < steps");
    if (chains < 1)
        throw std::invalid_argument("config: invalid value for 'chains': must be >= 1");
    if (scale < 1) throw std::invalid_argument("config: invalid value for 'scale': must be >= 1");
    if (rate_step <= 0.0)
        throw std::invalid_argument("config: invalid value for 'rate_step': must be positive");
    if (target_rate >= 0.0 && !(target_rate > 0.0 && target_rate < 1.0))
        throw std::invalid_argument("config: invalid value for 'target_rate': need (0, 1)");
    if (model == "bernoulli" && n < 1)
        throw std::invalid_argument("config: invalid value for 'n': must be >= 1");
    if (model == "ising" && side < 2)
        throw std::invalid_argument("config: invalid value for 'side': must be >= 2");
    if (model == "fhmm" && (length < 1 || factors < 1))
        throw std::invalid_argument("config: invalid value for 'length'/'factors': must be >= 1");
    if (model == "rbm" && rbm_file.empty())
        throw std::invalid_argument("config: invalid value for 'rbm_file': required for rbm");
    if (mode == RunMode::Scaling && sizes.size() < 3)
        throw std::invalid_argument("config: invalid value for 'sizes': need at least 3");
}

int ExperimentConfig::dimension() const {
    if (model == "bernoulli") return n;
    if (model == "ising") return side * side;
    if (model == "fhmm") return length * factors;
    return 0;  // rbm: known only after loading the weights file
}

double ExperimentConfig::default_target_rate() const {
    return sampler == SamplerFamily::Lbp ? ScaleController::kLbpTargetRate
                                         : ScaleController::kRwmTargetRate;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: invalid value for '" + key + "': " + v);
}

template <typename T, typename Parse>
T parse_num(const std::string& key, const std::string& v, Parse parse) {
    try {
        std::size_t pos = 0;
        T out = parse(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    return parse_num<int>(key, v, [](const std::string& s, std::size_t* p) {
        return std::stoi(s, p);
    });
}

long parse_long(const std::string& key, const std::string& v) {
    return parse_num<long>(key, v, [](const std::string& s, std::size_t* p) {
        return std::stol(s, p);
    });
}

double parse_double(const std::string& key, const std::string& v) {
    return parse_num<double>(key, v, [](const std::string& s, std::size_t* p) {
        return std::stod(s, p);
    });
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    return parse_num<std::uint64_t>(key, v, [](const std::string& s, std::size_t* p) {
        return static_cast<std::uint64_t>(std::stoull(s, p));
    });
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_int(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config: invalid value for '" + key + "': " + v);
    return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "model")
        cfg.model = value;
    else if (key == "config")
        cfg.config = parse_config_label(value);
    else if (key == "n")
        cfg.n = parse_int(key, value);
    else if (key == "side")
        cfg.side = parse_int(key, value);
    else if (key == "length")
        cfg.length = parse_int(key, value);
    else if (key == "factors")
        cfg.factors = parse_int(key, value);
    else if (key == "rbm_file")
        cfg.rbm_file = value;
    else if (key == "sampler")
        cfg.sampler = parse_sampler_family(value);
    else if (key == "weight_fn")
        cfg.weight_fn = parse_weight_fn(value);
    else if (key == "replacement")
        cfg.replacement = parse_bool(key, value);
    else if (key == "gradient")
        cfg.gradient = parse_bool(key, value);
    else if (key == "mode")
        cfg.mode = parse_run_mode(value);
    else if (key == "scale")
        cfg.scale = parse_int(key, value);
    else if (key == "target_rate")
        cfg.target_rate = parse_double(key, value);
    else if (key == "steps")
        cfg.steps = parse_long(key, value);
    else if (key == "burnin")
        cfg.burnin = parse_long(key, value);
    else if (key == "chains")
        cfg.chains = parse_int(key, value);
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "sizes")
        cfg.sizes = parse_int_list(key, value);
    else if (key == "rate_step")
        cfg.rate_step = parse_double(key, value);
    else if (key == "timing")
        cfg.timing = parse_bool(key, value);
    else if (key == "out")
        cfg.out = value;
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value': " + line);
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open file: " + path);
    return parse_config_text(is);
}

void write_config(const ExperimentConfig& cfg, std::ostream& os) {
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "model = " << cfg.model << "\n";
    os << "config = " << to_string(cfg.config) << "\n";
    os << "n = " << cfg.n << "\n";
    os << "side = " << cfg.side << "\n";
    os << "length = " << cfg.length << "\n";
    os << "factors = " << cfg.factors << "\n";
    if (!cfg.rbm_file.empty()) os << "rbm_file = " << cfg.rbm_file << "\n";
    os << "sampler = " << to_string(cfg.sampler) << "\n";
    os << "weight_fn = " << to_string(cfg.weight_fn) << "\n";
    os << "replacement = " << (cfg.replacement ? "true" : "false") << "\n";
    os << "gradient = " << (cfg.gradient ? "true" : "false") << "\n";
    os << "mode = " << to_string(cfg.mode) << "\n";
    os << "scale = " << cfg.scale << "\n";
    if (cfg.target_rate >= 0.0) os << "target_rate = " << num(cfg.target_rate) << "\n";
    os << "steps = " << cfg.steps << "\n";
    os << "burnin = " << cfg.burnin << "\n";
    os << "chains = " << cfg.chains << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "sizes = ";
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i)
        os << cfg.sizes[i] << (i + 1 < cfg.sizes.size() ? "," : "\n");
    os << "rate_step = " << num(cfg.rate_step) << "\n";
    os << "timing = " << (cfg.timing ? "true" : "false") << "\n";
    if (!cfg.out.empty()) os << "out = " << cfg.out << "\n";
}

}  // namespace lbp
