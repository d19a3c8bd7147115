#include "rscma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "rscma/equalizer.hpp"
#include "rscma/rng.hpp"

namespace rscma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_finite(const std::vector<double>& v) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const double x : v) {
        if (std::isnan(x)) continue;
        sum += x;
        ++n;
    }
    return n == 0 ? kNaN : sum / static_cast<double>(n);
}

AlgorithmTrace run_algorithm(const AlgorithmConfig& algo, const SparseChannel& ch,
                             const ComplexVecd& x_reversed, std::size_t n_iterations,
                             Eigen::Index n_taps, double R) {
    EqualizerState<double> state;
    state.w = init_equalizer<double>(n_taps);
    state.mu = algo.mu;
    state.p = algo.p;
    state.eps_guard = algo.eps_guard;
    state.eps_prop = algo.eps_prop;
    state.projection = algo.projection;

    const bool has_prox = algo.kind == Algorithm::rscma && algo.prox.has_value();
    const std::size_t cadence = std::max<std::size_t>(algo.prox_cadence, 1);
    ComplexVecd output_taps = state.w;

    AlgorithmTrace trace;
    trace.isi_db.reserve(n_iterations);
    const Eigen::Index total = x_reversed.size();

    for (std::size_t k = 0; k < n_iterations; ++k) {
        // Regressor [x_{k+N-1}, ..., x_k], newest sample first.
        const auto x = x_reversed.segment(total - static_cast<Eigen::Index>(k) - n_taps, n_taps);
        try {
            switch (algo.kind) {
                case Algorithm::cma: step_cma(state, x, R); break;
                case Algorithm::ang_cma: step_ang_cma(state, x, R); break;
                case Algorithm::scma_p: step_scma_p(state, x, R, algo.rho); break;
                case Algorithm::rscma: step_rscma(state, x, R); break;
            }
        } catch (const DivergenceError&) {
            trace.diverged = true;
            trace.diverged_at = k;
            break;
        }
        if (!(state.w.norm() <= kDivergenceNorm)) {
            trace.diverged = true;
            trace.diverged_at = k;
            break;
        }

        // Second stage: h = prox(w) every `cadence` steps; the output uses the
        // most recent h. With write-back the adaptive taps are replaced by h.
        if (!has_prox) {
            output_taps = state.w;
        } else if ((k + 1) % cadence == 0) {
            output_taps = regularize_complex_vector(state.w, *algo.prox);
            if (algo.prox_write_back) state.w = output_taps;
        }

        if (output_taps.squaredNorm() == 0.0) {
            // Everything pruned: no defined response, report 0 dB (all ISI).
            trace.isi_db.push_back(0.0);
        } else {
            trace.isi_db.push_back(residual_isi(ch, output_taps));
        }
    }
    if (trace.diverged) trace.isi_db.clear();
    return trace;
}

}  // namespace

double AlgorithmSummary::mean_final_isi_db() const { return mean_finite(final_isi_db); }

double AlgorithmSummary::mean_steady_state_db() const { return mean_finite(steady_state_db); }

double AlgorithmSummary::mean_hit_iteration() const { return mean_finite(hit_iteration); }

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::cma: return "cma";
        case Algorithm::ang_cma: return "ang_cma";
        case Algorithm::scma_p: return "scma_p";
        case Algorithm::rscma: return "rscma";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "cma") return Algorithm::cma;
    if (name == "ang_cma") return Algorithm::ang_cma;
    if (name == "scma_p") return Algorithm::scma_p;
    if (name == "rscma") return Algorithm::rscma;
    throw ConfigError("unknown algorithm '" + name + "' (expected cma, ang_cma, scma_p, rscma)");
}

ComplexVecd combined_response(const SparseChannel& ch, const ComplexVecd& w) {
    const Eigen::Index len = ch.taps.size();
    const Eigen::Index n = w.size();
    if (len == 0 || n == 0) throw DimensionError("combined_response: empty channel or equalizer");
    const ComplexVecd wc = w.conjugate();
    ComplexVecd t = ComplexVecd::Zero(len + n - 1);
    for (const std::size_t j : ch.support) {
        t.segment(static_cast<Eigen::Index>(j), n) += ch.taps(static_cast<Eigen::Index>(j)) * wc;
    }
    return t;
}

double residual_isi_db(const ComplexVecd& combined) {
    const Eigen::VectorXd power = combined.cwiseAbs2();
    const double peak = power.size() ? power.maxCoeff() : 0.0;
    if (!(peak > 0.0)) throw DimensionError("residual_isi: combined response is all zero");
    const double isi = (power.sum() - peak) / peak;
    if (!(isi > 0.0)) return kIsiFloorDb;
    return std::max(10.0 * std::log10(isi), kIsiFloorDb);
}

double residual_isi(const SparseChannel& ch, const ComplexVecd& w) {
    return residual_isi_db(combined_response(ch, w));
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) {
    return derive_seed(master_seed, index);
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.algorithms.empty()) throw ConfigError("algorithms: at least one algorithm required");
    if (cfg.signal.n_iterations < 1) throw ConfigError("signal.n_iterations must be >= 1");
    if (cfg.channel.trials < 1) throw ConfigError("channel.trials must be >= 1");
    if (cfg.equalizer_length < 1) throw ConfigError("equalizer_length must be >= 1");
    if (cfg.channel.length < 10) throw ConfigError("channel.length must be >= 10");
    if (cfg.steady_state_window < 1) throw ConfigError("steady_state_window must be >= 1");

    std::vector<std::string> labels;
    for (const auto& a : cfg.algorithms) {
        const std::string where = "algorithms[" + a.label + "]";
        if (!(a.mu >= 0.0)) throw ConfigError(where + ".mu must be >= 0");
        if ((a.kind == Algorithm::rscma || a.kind == Algorithm::scma_p) && !(a.p > 0.0 && a.p < 1.0)) {
            throw ConfigError(where + ".p must lie in (0, 1)");
        }
        if (!(a.eps_guard >= 0.0)) throw ConfigError(where + ".eps_guard must be >= 0");
        if (!(a.eps_prop >= 0.0)) throw ConfigError(where + ".eps_prop must be >= 0");
        if (!(a.rho >= 0.0)) throw ConfigError(where + ".rho must be >= 0");
        if (a.prox) {
            if (!(a.prox->lambda_r >= 0.0) || !(a.prox->lambda_i >= 0.0)) {
                throw ConfigError(where + ".prox lambdas must be >= 0");
            }
            if (a.prox_cadence < 1) throw ConfigError(where + ".prox.cadence must be >= 1");
        }
        if (std::find(labels.begin(), labels.end(), a.label) != labels.end()) {
            throw ConfigError("duplicate algorithm label '" + a.label + "'");
        }
        labels.push_back(a.label);
    }
    make_constellation(cfg.signal);
}

Constellation make_constellation(const SignalConfig& sig) {
    if (sig.constellation == "apsk8") return apsk8_constellation(sig.ring_ratio);
    if (sig.constellation == "qpsk") return qpsk_constellation();
    throw ConfigError("signal.constellation: unknown constellation '" + sig.constellation + "'");
}

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    const Rng root(seed);
    Rng channel_rng = root.split(1);

    TrialResult out;
    out.seed = seed;
    out.channel = draw_sparse_channel(channel_rng, cfg.channel.length, cfg.channel.profile);

    const Constellation constellation = make_constellation(cfg.signal);
    const double R = dispersion_constant(constellation);
    const auto n_taps = static_cast<Eigen::Index>(cfg.equalizer_length);
    const std::size_t n_symbols = cfg.signal.n_iterations + cfg.equalizer_length - 1;
    const ObservationStream stream =
        transmit(out.channel, constellation, n_symbols, cfg.signal.snr_db, derive_seed(seed, 2));
    const ComplexVecd x_reversed = stream.x.reverse();

    out.traces.reserve(cfg.algorithms.size());
    for (const auto& algo : cfg.algorithms) {
        out.traces.push_back(
            run_algorithm(algo, out.channel, x_reversed, cfg.signal.n_iterations, n_taps, R));
    }
    return out;
}

CampaignResult run_campaign(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();

    const std::size_t n_trials = cfg.channel.trials;
    std::vector<std::uint64_t> seeds(n_trials);
    for (std::size_t i = 0; i < n_trials; ++i) {
        seeds[i] = trial_seed(cfg.master_seed, cfg.channel.first_trial + i);
    }

    // Each trial writes only its own slot, so aggregation below does not
    // depend on scheduling.
    std::vector<TrialResult> trials(n_trials);
    unsigned n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::clamp<unsigned>(n_threads, 1, static_cast<unsigned>(n_trials));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n_trials; i = next++) {
            try {
                trials[i] = run_trial(cfg, seeds[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    CampaignResult result;
    result.config = cfg;
    result.trial_seeds = seeds;

    const std::size_t n_iter = cfg.signal.n_iterations;
    const std::size_t window = std::min(cfg.steady_state_window, n_iter);
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        AlgorithmSummary s;
        s.label = cfg.algorithms[a].label;
        std::vector<double> acc(n_iter, 0.0);
        std::size_t ok = 0;
        for (const auto& trial : trials) {
            const AlgorithmTrace& tr = trial.traces[a];
            if (tr.diverged) {
                ++s.divergence_count;
                s.final_isi_db.push_back(kNaN);
                s.steady_state_db.push_back(kNaN);
                s.hit_iteration.push_back(kNaN);
                continue;
            }
            ++ok;
            for (std::size_t k = 0; k < n_iter; ++k) {
                acc[k] += cfg.averaging == Averaging::db ? tr.isi_db[k]
                                                         : std::pow(10.0, tr.isi_db[k] / 10.0);
            }
            s.final_isi_db.push_back(tr.isi_db.back());
            double ss = 0.0;
            for (std::size_t k = n_iter - window; k < n_iter; ++k) ss += tr.isi_db[k];
            s.steady_state_db.push_back(ss / static_cast<double>(window));
            std::size_t hit = n_iter;
            for (std::size_t k = 0; k < n_iter; ++k) {
                if (tr.isi_db[k] <= cfg.convergence_threshold_db) {
                    hit = k;
                    break;
                }
            }
            s.hit_iteration.push_back(static_cast<double>(hit));
        }
        s.all_diverged = ok == 0;
        s.mean_isi_db.assign(n_iter, kNaN);
        if (ok > 0) {
            for (std::size_t k = 0; k < n_iter; ++k) {
                const double m = acc[k] / static_cast<double>(ok);
                s.mean_isi_db[k] = cfg.averaging == Averaging::db ? m : 10.0 * std::log10(m);
            }
        }
        result.algorithms.push_back(std::move(s));
    }
    if (cfg.dump_channels) {
        for (auto& trial : trials) result.channels.push_back(std::move(trial.channel));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string traces_csv(const CampaignResult& result) {
    std::string out = "iteration";
    for (const auto& a : result.algorithms) out += "," + a.label + "_isi_db";
    out += "\n";
    char buf[64];
    const std::size_t n_iter = result.config.signal.n_iterations;
    for (std::size_t k = 0; k < n_iter; ++k) {
        out += std::to_string(k);
        for (const auto& a : result.algorithms) {
            std::snprintf(buf, sizeof buf, ",%.10g", a.mean_isi_db[k]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

void write_traces_csv(const CampaignResult& result, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << traces_csv(result);
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_summary_json(const CampaignResult& result, const std::filesystem::path& path) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isnan(v)) return nullptr;
        return v;
    };
    auto arr = [&](const std::vector<double>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const double x : v) a.push_back(num(x));
        return a;
    };

    nlohmann::json doc;
    doc["tool_version"] = kToolVersion;
    doc["wall_clock_seconds"] = result.wall_seconds;
    doc["trial_seeds"] = result.trial_seeds;
    nlohmann::json algos = nlohmann::json::array();
    for (const auto& a : result.algorithms) {
        algos.push_back({
            {"label", a.label},
            {"mean_final_isi_db", num(a.mean_final_isi_db())},
            {"mean_steady_state_isi_db", num(a.mean_steady_state_db())},
            {"mean_iterations_to_threshold", num(a.mean_hit_iteration())},
            {"divergence_count", a.divergence_count},
            {"all_diverged", a.all_diverged},
            {"final_isi_db", arr(a.final_isi_db)},
        });
    }
    doc["algorithms"] = std::move(algos);
    doc["config"] = nlohmann::json::parse(config_to_json(result.config));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << doc.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_artifacts(const CampaignResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_traces_csv(result, dir / "traces.csv");
    write_summary_json(result, dir / "summary.json");
    if (!result.channels.empty()) {
        const auto ch_dir = dir / "channels";
        std::filesystem::create_directories(ch_dir);
        for (std::size_t i = 0; i < result.channels.size(); ++i) {
            std::ofstream f(ch_dir / ("trial_" + std::to_string(i) + ".json"), std::ios::binary);
            if (!f) throw std::runtime_error("cannot write channel dump in " + ch_dir.string());
            f << channel_to_json(result.channels[i]);
        }
    }
}

}  // namespace rscma
