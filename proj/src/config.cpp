#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rscma/harness.hpp"

namespace rscma {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
        throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + join(path, key) + "'");
    }
}

// Reads obj[key] into out. A missing key is an error only when `required`.
template <typename T>
void read(const json& obj, const std::string& path, const std::string& key, T& out, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) throw ConfigError("missing required config key '" + join(path, key) + "'");
        return;
    }
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + join(path, key) + "' has the wrong type");
    }
}

AlgorithmConfig parse_algorithm(const json& obj, const std::string& path) {
    AlgorithmConfig a;
    std::string name;
    read(obj, path, "name", name, true);
    try {
        a.kind = algorithm_from_string(name);
    } catch (const ConfigError& e) {
        throw ConfigError(join(path, "name") + ": " + e.what());
    }
    a.label = name;

    std::set<std::string> allowed = {"name", "label", "mu"};
    switch (a.kind) {
        case Algorithm::cma: break;
        case Algorithm::ang_cma: allowed.insert("eps_prop"); break;
        case Algorithm::scma_p: allowed.insert({"p", "eps_guard", "rho"}); break;
        case Algorithm::rscma: allowed.insert({"p", "eps_guard", "projection", "prox"}); break;
    }
    reject_unknown(obj, path, allowed);

    read(obj, path, "label", a.label, false);
    read(obj, path, "mu", a.mu, true);
    const bool uses_p = a.kind == Algorithm::scma_p || a.kind == Algorithm::rscma;
    if (uses_p) {
        read(obj, path, "p", a.p, true);
        read(obj, path, "eps_guard", a.eps_guard, false);
    }
    if (a.kind == Algorithm::ang_cma) read(obj, path, "eps_prop", a.eps_prop, false);
    if (a.kind == Algorithm::scma_p) read(obj, path, "rho", a.rho, true);

    if (a.kind == Algorithm::rscma && obj.contains("projection")) {
        std::string rule;
        read(obj, path, "projection", rule, true);
        if (rule == "hermitian") {
            a.projection = ProjectionRule::hermitian;
        } else if (rule == "real_part") {
            a.projection = ProjectionRule::real_part;
        } else {
            throw ConfigError(join(path, "projection") + ": expected hermitian or real_part, got '" +
                              rule + "'");
        }
    }
    if (a.kind == Algorithm::rscma && obj.contains("prox")) {
        const std::string ppath = join(path, "prox");
        const json& p = obj.at("prox");
        reject_unknown(p, ppath, {"mode", "lambda_r", "lambda_i", "cadence", "write_back"});
        ProxConfig prox;
        std::string mode;
        read(p, ppath, "mode", mode, true);
        try {
            prox.mode = prox_mode_from_string(mode);
        } catch (const DomainError& e) {
            throw ConfigError(join(ppath, "mode") + ": " + e.what());
        }
        read(p, ppath, "lambda_r", prox.lambda_r, true);
        read(p, ppath, "lambda_i", prox.lambda_i, true);
        read(p, ppath, "cadence", a.prox_cadence, false);
        read(p, ppath, "write_back", a.prox_write_back, false);
        a.prox = prox;
    }
    return a;
}

json algorithm_to_json(const AlgorithmConfig& a) {
    json j;
    j["name"] = to_string(a.kind);
    j["label"] = a.label;
    j["mu"] = a.mu;
    switch (a.kind) {
        case Algorithm::cma: break;
        case Algorithm::ang_cma: j["eps_prop"] = a.eps_prop; break;
        case Algorithm::scma_p:
            j["p"] = a.p;
            j["eps_guard"] = a.eps_guard;
            j["rho"] = a.rho;
            break;
        case Algorithm::rscma:
            j["p"] = a.p;
            j["eps_guard"] = a.eps_guard;
            j["projection"] = a.projection == ProjectionRule::hermitian ? "hermitian" : "real_part";
            if (a.prox) {
                j["prox"] = {{"mode", to_string(a.prox->mode)},
                             {"lambda_r", a.prox->lambda_r},
                             {"lambda_i", a.prox->lambda_i},
                             {"cadence", a.prox_cadence},
                             {"write_back", a.prox_write_back}};
            }
            break;
    }
    return j;
}

AlgorithmConfig make_algo(Algorithm kind, double mu) {
    AlgorithmConfig a;
    a.kind = kind;
    a.label = to_string(kind);
    a.mu = mu;
    return a;
}

// Step sizes and regularization weights shared by both presets; tuned on the
// desk profile (see README). CMA and RSCMA share a step size so that RSCMA
// reduces to CMA when the constraint and the prox stage are switched off.
std::vector<AlgorithmConfig> default_algorithms() {
    AlgorithmConfig cma = make_algo(Algorithm::cma, 1e-3);

    AlgorithmConfig ang = make_algo(Algorithm::ang_cma, 3e-2);
    ang.eps_prop = 1e-3;

    AlgorithmConfig scma = make_algo(Algorithm::scma_p, 1e-3);
    scma.p = 0.5;
    scma.rho = 1e-5;

    AlgorithmConfig rscma = make_algo(Algorithm::rscma, 1e-3);
    rscma.p = 0.5;
    rscma.prox = ProxConfig{ProxMode::two_thirds, 1e-4, 1e-4};
    rscma.prox_cadence = 1;
    rscma.prox_write_back = true;

    AlgorithmConfig rscma_re = make_algo(Algorithm::rscma, 1e-3);
    rscma_re.label = "rscma_re";
    rscma_re.p = 0.5;
    rscma_re.projection = ProjectionRule::real_part;
    rscma_re.prox = ProxConfig{ProxMode::half, 1e-5, 1e-5};
    rscma_re.prox_cadence = 1;
    rscma_re.prox_write_back = true;

    return {cma, ang, scma, rscma, rscma_re};
}

}  // namespace

ExperimentConfig desk_preset() {
    ExperimentConfig cfg;
    cfg.algorithms = default_algorithms();
    cfg.channel = {32, ChannelProfile::desk, 50, 0};
    cfg.signal = {"apsk8", 2.0, 30.0, 10000};
    cfg.equalizer_length = 48;
    cfg.master_seed = 2024;
    cfg.steady_state_window = 1000;
    return cfg;
}

ExperimentConfig paper_preset() {
    ExperimentConfig cfg;
    cfg.algorithms = default_algorithms();
    cfg.channel = {100, ChannelProfile::paper, 1000, 0};
    cfg.signal = {"apsk8", 2.0, 30.0, 20000};
    cfg.equalizer_length = 120;
    cfg.master_seed = 2024;
    cfg.steady_state_window = 2000;
    return cfg;
}

ExperimentConfig preset_from_string(const std::string& name) {
    if (name == "desk") return desk_preset();
    if (name == "paper") return paper_preset();
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

ExperimentConfig parse_config(const std::string& text, const std::optional<ExperimentConfig>& base) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(doc, "",
                   {"algorithms", "channel", "signal", "equalizer_length", "master_seed",
                    "averaging", "steady_state_window", "convergence_threshold_db", "threads",
                    "dump_channels"});

    const bool req = !base.has_value();
    ExperimentConfig cfg = base.value_or(ExperimentConfig{});

    read(doc, "", "equalizer_length", cfg.equalizer_length, req);
    read(doc, "", "master_seed", cfg.master_seed, req);
    read(doc, "", "steady_state_window", cfg.steady_state_window, false);
    read(doc, "", "convergence_threshold_db", cfg.convergence_threshold_db, false);
    read(doc, "", "threads", cfg.threads, false);
    read(doc, "", "dump_channels", cfg.dump_channels, false);
    if (doc.contains("averaging")) {
        std::string avg;
        read(doc, "", "averaging", avg, true);
        if (avg == "db") {
            cfg.averaging = Averaging::db;
        } else if (avg == "linear") {
            cfg.averaging = Averaging::linear;
        } else {
            throw ConfigError("averaging: expected db or linear, got '" + avg + "'");
        }
    }

    if (doc.contains("channel") || req) {
        if (!doc.contains("channel")) throw ConfigError("missing required config key 'channel'");
        const json& ch = doc["channel"];
        reject_unknown(ch, "channel", {"length", "profile", "trials", "first_trial"});
        read(ch, "channel", "length", cfg.channel.length, req);
        read(ch, "channel", "trials", cfg.channel.trials, req);
        read(ch, "channel", "first_trial", cfg.channel.first_trial, false);
        if (ch.contains("profile") || req) {
            std::string profile;
            read(ch, "channel", "profile", profile, true);
            cfg.channel.profile = channel_profile_from_string(profile);
        }
    }

    if (doc.contains("signal") || req) {
        if (!doc.contains("signal")) throw ConfigError("missing required config key 'signal'");
        const json& sig = doc["signal"];
        reject_unknown(sig, "signal", {"constellation", "ring_ratio", "snr_db", "n_iterations"});
        read(sig, "signal", "constellation", cfg.signal.constellation, req);
        read(sig, "signal", "ring_ratio", cfg.signal.ring_ratio, false);
        read(sig, "signal", "snr_db", cfg.signal.snr_db, req);
        read(sig, "signal", "n_iterations", cfg.signal.n_iterations, req);
    }

    if (doc.contains("algorithms") || req) {
        if (!doc.contains("algorithms")) throw ConfigError("missing required config key 'algorithms'");
        const json& algos = doc["algorithms"];
        if (!algos.is_array()) throw ConfigError("algorithms: expected an array");
        cfg.algorithms.clear();
        for (std::size_t i = 0; i < algos.size(); ++i) {
            cfg.algorithms.push_back(parse_algorithm(algos[i], "algorithms[" + std::to_string(i) + "]"));
        }
    }

    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::optional<ExperimentConfig>& base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), base);
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json doc;
    json algos = json::array();
    for (const auto& a : cfg.algorithms) algos.push_back(algorithm_to_json(a));
    doc["algorithms"] = std::move(algos);
    doc["channel"] = {{"length", cfg.channel.length},
                      {"profile", to_string(cfg.channel.profile)},
                      {"trials", cfg.channel.trials},
                      {"first_trial", cfg.channel.first_trial}};
    doc["signal"] = {{"constellation", cfg.signal.constellation},
                     {"ring_ratio", cfg.signal.ring_ratio},
                     {"snr_db", cfg.signal.snr_db},
                     {"n_iterations", cfg.signal.n_iterations}};
    doc["equalizer_length"] = cfg.equalizer_length;
    doc["master_seed"] = cfg.master_seed;
    doc["averaging"] = cfg.averaging == Averaging::db ? "db" : "linear";
    doc["steady_state_window"] = cfg.steady_state_window;
    doc["convergence_threshold_db"] = cfg.convergence_threshold_db;
    doc["threads"] = cfg.threads;
    doc["dump_channels"] = cfg.dump_channels;
    return doc.dump(2) + "\n";
}

}  // namespace rscma
