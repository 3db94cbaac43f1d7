#include "oriole/configfile.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"

namespace oriole {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw InputError("");
        return d;
    } catch (const std::exception&) {
        throw InputError("config: bad numeric value for " + key + ": " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long d = std::stol(v, &used);
        if (used != v.size()) throw InputError("");
        return static_cast<int>(d);
    } catch (const std::exception&) {
        throw InputError("config: bad integer value for " + key + ": " + v);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        unsigned long long d = std::stoull(v, &used);
        if (used != v.size()) throw InputError("");
        return d;
    } catch (const std::exception&) {
        throw InputError("config: bad seed value for " + key + ": " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InputError("config: bad boolean value for " + key + ": " + v);
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(to_double(key, trim(cell)));
    if (out.empty()) throw InputError("config: empty list for " + key);
    return out;
}

const std::set<std::string> kExperimentKeys = {
    "n_public_identities", "n_attacker_identities", "images_per_identity", "image_size",
    "identity_signal", "noise_sigma", "data_seed",
    "scenario", "rho", "iterations", "step_size", "penalty_weight", "dssim_window",
    "dssim_stride", "epochs", "batch_size", "learning_rate", "weight_init_scale",
    "train_test_ratio", "leak_ratio", "m", "include_targets", "seed"};

const std::set<std::string> kSweepKeys = {"sweep_axis", "sweep_values", "repeats"};

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError("config: line " + std::to_string(lineno) + " is not key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw InputError("config: empty key on line " + std::to_string(lineno));
        out[key] = value;
    }
    return out;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

void apply_experiment_keys(const ConfigMap& map, ExperimentConfig& cfg) {
    for (const auto& [key, value] : map) {
        if (kSweepKeys.count(key)) continue;  // handled by apply_sweep_keys
        if (!kExperimentKeys.count(key)) throw InputError("config: unknown key: " + key);
        if (key == "n_public_identities") cfg.data.n_public_identities = to_int(key, value);
        else if (key == "n_attacker_identities") cfg.data.n_attacker_identities = to_int(key, value);
        else if (key == "images_per_identity") cfg.data.images_per_identity = to_int(key, value);
        else if (key == "image_size") cfg.data.image_size = to_int(key, value);
        else if (key == "identity_signal") cfg.data.identity_signal = to_double(key, value);
        else if (key == "noise_sigma") cfg.data.noise_sigma = to_double(key, value);
        else if (key == "data_seed") cfg.data.seed = to_u64(key, value);
        else if (key == "scenario") cfg.scenario.scenario = scenario_from_name(value);
        else if (key == "rho") cfg.scenario.cloak.rho = to_double(key, value);
        else if (key == "iterations") cfg.scenario.cloak.iterations = to_int(key, value);
        else if (key == "step_size") cfg.scenario.cloak.step_size = to_double(key, value);
        else if (key == "penalty_weight") cfg.scenario.cloak.penalty_weight = to_double(key, value);
        else if (key == "dssim_window") cfg.scenario.cloak.dssim.window = to_int(key, value);
        else if (key == "dssim_stride") cfg.scenario.cloak.dssim.stride = to_int(key, value);
        else if (key == "epochs") cfg.scenario.train.epochs = to_int(key, value);
        else if (key == "batch_size") cfg.scenario.train.batch_size = to_int(key, value);
        else if (key == "learning_rate") cfg.scenario.train.learning_rate = to_double(key, value);
        else if (key == "weight_init_scale") cfg.scenario.train.weight_init_scale = to_double(key, value);
        else if (key == "train_test_ratio") cfg.scenario.split.train_test_ratio = to_double(key, value);
        else if (key == "leak_ratio") cfg.scenario.split.leak_ratio = to_double(key, value);
        else if (key == "m") cfg.scenario.m = to_int(key, value);
        else if (key == "include_targets") cfg.scenario.include_targets = to_bool(key, value);
        else if (key == "seed") cfg.scenario.seed = to_u64(key, value);
    }
}

void apply_sweep_keys(const ConfigMap& map, SweepSpec& spec) {
    apply_experiment_keys(map, spec.base);
    for (const auto& [key, value] : map) {
        if (!kSweepKeys.count(key)) continue;
        if (key == "sweep_axis") spec.axis = axis_from_name(value);
        else if (key == "sweep_values") spec.values = to_doubles(key, value);
        else if (key == "repeats") spec.repeats = to_int(key, value);
    }
}

std::string echo_scenario_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "scenario = " << scenario_name(cfg.scenario) << "\n"
        << "rho = " << csv::fmt(cfg.cloak.rho) << "\n"
        << "iterations = " << cfg.cloak.iterations << "\n"
        << "step_size = " << csv::fmt(cfg.cloak.step_size) << "\n"
        << "penalty_weight = " << csv::fmt(cfg.cloak.penalty_weight) << "\n"
        << "dssim_window = " << cfg.cloak.dssim.window << "\n"
        << "dssim_stride = " << cfg.cloak.dssim.stride << "\n"
        << "epochs = " << cfg.train.epochs << "\n"
        << "batch_size = " << cfg.train.batch_size << "\n"
        << "learning_rate = " << csv::fmt(cfg.train.learning_rate) << "\n"
        << "weight_init_scale = " << csv::fmt(cfg.train.weight_init_scale) << "\n"
        << "train_test_ratio = " << csv::fmt(cfg.split.train_test_ratio) << "\n"
        << "leak_ratio = " << csv::fmt(cfg.split.leak_ratio) << "\n"
        << "m = " << cfg.m << "\n"
        << "include_targets = " << (cfg.include_targets ? "true" : "false") << "\n"
        << "seed = " << cfg.seed << "\n";
    return out.str();
}

std::string echo_experiment_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "n_public_identities = " << cfg.data.n_public_identities << "\n"
        << "n_attacker_identities = " << cfg.data.n_attacker_identities << "\n"
        << "images_per_identity = " << cfg.data.images_per_identity << "\n"
        << "image_size = " << cfg.data.image_size << "\n"
        << "identity_signal = " << csv::fmt(cfg.data.identity_signal) << "\n"
        << "noise_sigma = " << csv::fmt(cfg.data.noise_sigma) << "\n"
        << "data_seed = " << cfg.data.seed << "\n"
        << echo_scenario_config(cfg.scenario);
    return out.str();
}

}  // namespace oriole
