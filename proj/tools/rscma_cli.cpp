// rscma: generate sparse channels, run equalization campaigns, probe the
// fractional-norm prox operators.
//
// Exit codes: 0 success, 1 runtime/I-O error, 2 configuration error,
// 3 campaign completed but some algorithm diverged on every trial.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rscma/harness.hpp"
#include "rscma/prox.hpp"
#include "rscma/signal_model.hpp"

namespace fs = std::filesystem;
using namespace rscma;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

constexpr const char* kOutDirEnv = "RSCMA_OUT_DIR";

fs::path default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "rscma_out";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string format_evs(double evs) {
    if (std::isinf(evs)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", evs);
    return buf;
}

struct ChannelArgs {
    std::size_t count = 1;
    std::uint64_t seed = 1;
    std::size_t length = 100;
    std::string profile = "paper";
    std::size_t evs_n = 120;
    std::optional<fs::path> out;
    bool quiet = false;
};

std::vector<double> generate_channels(const ChannelArgs& a, const fs::path* dir) {
    const ChannelProfile profile = channel_profile_from_string(a.profile);
    std::vector<double> evs(a.count);
    for (std::size_t k = 0; k < a.count; ++k) {
        const SparseChannel ch = generate_sparse_channel(trial_seed(a.seed, k), a.length, profile);
        evs[k] = eigenvalue_spread(ch, a.evs_n);
        if (dir) {
            char name[32];
            std::snprintf(name, sizeof name, "channel_%05zu.json", k);
            write_file(*dir / name, channel_to_json(ch));
            if (!a.quiet) std::cout << name << " evs=" << format_evs(evs[k]) << "\n";
        }
    }
    return evs;
}

int cmd_channel_gen(const ChannelArgs& a) {
    const fs::path dir = a.out.value_or(default_out_dir());
    ensure_dir(dir);
    const std::vector<double> evs = generate_channels(a, &dir);
    std::string csv = "channel,evs\n";
    for (std::size_t k = 0; k < evs.size(); ++k) {
        csv += std::to_string(k) + "," + format_evs(evs[k]) + "\n";
    }
    write_file(dir / "evs.csv", csv);
    return kExitOk;
}

int cmd_evs_histogram(const ChannelArgs& a, std::size_t bins) {
    const fs::path dir = a.out.value_or(default_out_dir());
    ensure_dir(dir);
    const std::vector<double> evs = generate_channels(a, nullptr);

    std::vector<double> finite;
    for (double e : evs) {
        if (std::isfinite(e)) finite.push_back(e);
    }
    std::sort(finite.begin(), finite.end());
    const std::size_t n_inf = evs.size() - finite.size();

    std::string csv = "channel,evs\n";
    for (std::size_t k = 0; k < evs.size(); ++k) {
        csv += std::to_string(k) + "," + format_evs(evs[k]) + "\n";
    }
    write_file(dir / "evs.csv", csv);

    // Histogram of log10(EVS), equal-width bins over the observed range.
    std::string hist = "bin_lo_log10,bin_hi_log10,count\n";
    if (!finite.empty()) {
        const double lo = std::log10(finite.front());
        const double hi = std::log10(finite.back());
        const double width = hi > lo ? (hi - lo) / double(bins) : 1.0;
        std::vector<std::size_t> counts(bins, 0);
        for (double e : finite) {
            const auto b = static_cast<std::size_t>((std::log10(e) - lo) / width);
            ++counts[std::min(b, bins - 1)];
        }
        for (std::size_t b = 0; b < bins; ++b) {
            char row[96];
            std::snprintf(row, sizeof row, "%.6f,%.6f,%zu\n", lo + b * width, lo + (b + 1) * width,
                          counts[b]);
            hist += row;
        }
    }
    write_file(dir / "evs_histogram.csv", hist);

    if (!a.quiet) {
        double sum = 0.0, sum_sq = 0.0;
        for (double e : finite) {
            sum += e;
            sum_sq += e * e;
        }
        const double n = double(finite.size());
        const double mean = finite.empty() ? NAN : sum / n;
        const double sd = finite.size() < 2 ? NAN : std::sqrt((sum_sq - n * mean * mean) / (n - 1));
        const auto pct = [&](double q) {
            return finite.empty() ? NAN : finite[std::size_t(q * double(finite.size() - 1))];
        };
        std::printf("channels=%zu singular=%zu mean=%.6g sd=%.6g median=%.6g p10=%.6g p90=%.6g min=%.6g max=%.6g\n",
                    evs.size(), n_inf, mean, sd, pct(0.5), pct(0.1), pct(0.9), pct(0.0), pct(1.0));
    }
    return kExitOk;
}

struct RunArgs {
    std::optional<fs::path> config;
    std::optional<std::string> preset;
    std::optional<fs::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<unsigned> threads;
    bool quiet = false;
};

int cmd_run(const RunArgs& a) {
    ExperimentConfig cfg;
    try {
        std::optional<ExperimentConfig> base;
        if (a.preset) base = preset_from_string(*a.preset);
        if (a.config) {
            cfg = load_config(*a.config, base);
        } else if (base) {
            cfg = *base;
        } else {
            throw ConfigError("run needs --config or --preset");
        }
        if (a.seed) cfg.master_seed = *a.seed;
        if (a.trials) cfg.channel.trials = *a.trials;
        if (a.threads) cfg.threads = *a.threads;
        validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const fs::path dir = a.out.value_or(default_out_dir());
    ensure_dir(dir);
    const CampaignResult result = run_campaign(cfg);
    write_artifacts(result, dir);

    bool any_all_diverged = false;
    for (const auto& s : result.algorithms) {
        any_all_diverged = any_all_diverged || s.all_diverged;
        if (!a.quiet) {
            std::printf("%-10s steady=%8.3f dB  final=%8.3f dB  hit=%8.1f  diverged=%zu/%zu\n",
                        s.label.c_str(), s.mean_steady_state_db(), s.mean_final_isi_db(),
                        s.mean_hit_iteration(), s.divergence_count, cfg.channel.trials);
        }
    }
    if (!a.quiet) {
        std::printf("wrote %s (%.1f s)\n", dir.string().c_str(), result.wall_seconds);
    }
    return any_all_diverged ? kExitDiverged : kExitOk;
}

int cmd_prox_eval(const std::string& mode_name, double w, double lambda) {
    const ProxMode mode = prox_mode_from_string(mode_name);
    const double h = prox_scalar(mode, w, lambda);
    const double tau = tau_threshold(prox_exponent<double>(mode), lambda);
    std::printf("h = %.15g\n", h);
    if (h == 0.0) {
        std::printf("residual = 0 (dead zone, |w| <= tau = %.15g)\n", tau);
    } else {
        const double r = mode == ProxMode::half ? stationarity_half(h, w, lambda)
                                                : stationarity_two_thirds(h, w, lambda);
        std::printf("residual = %.3e\n", r);
    }
    return kExitOk;
}

void add_channel_options(CLI::App* sub, ChannelArgs& a) {
    sub->add_option("--count", a.count, "number of channels")->check(CLI::PositiveNumber);
    sub->add_option("--seed", a.seed, "master seed");
    sub->add_option("--length", a.length, "channel length (>= 10)");
    sub->add_option("--profile", a.profile, "tap layout")->check(CLI::IsMember({"paper", "desk"}));
    sub->add_option("--evs-n", a.evs_n, "correlation matrix size for the eigenvalue spread");
    sub->add_option("--out", a.out, std::string("output directory (default $") + kOutDirEnv +
                                        " or ./rscma_out)");
    sub->add_flag("--quiet", a.quiet, "suppress per-channel output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse blind equalization: channels, campaigns and prox probes"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    ChannelArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("channel-gen", "write random sparse channels as JSON");
    add_channel_options(gen_cmd, gen);

    ChannelArgs hist;
    hist.count = 10000;
    std::size_t bins = 50;
    CLI::App* hist_cmd =
        app.add_subcommand("evs-histogram", "eigenvalue-spread statistics of random channels");
    add_channel_options(hist_cmd, hist);
    hist_cmd->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);

    RunArgs run;
    CLI::App* run_cmd = app.add_subcommand("run", "run an equalization campaign");
    run_cmd->add_option("--config", run.config, "JSON config file")->check(CLI::ExistingFile);
    run_cmd->add_option("--preset", run.preset, "base preset")
        ->check(CLI::IsMember({"desk", "paper"}));
    run_cmd->add_option("--out", run.out, std::string("output directory (default $") + kOutDirEnv +
                                              " or ./rscma_out)");
    run_cmd->add_option("--seed", run.seed, "override master seed");
    run_cmd->add_option("--trials", run.trials, "override number of trials")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--threads", run.threads, "worker threads (0: all cores)");
    run_cmd->add_flag("--quiet", run.quiet, "suppress the summary table");

    std::string mode = "half";
    double w = 0.0;
    double lambda = 0.0;
    CLI::App* prox_cmd = app.add_subcommand("prox-eval", "evaluate a scalar prox operator");
    prox_cmd->add_option("--mode", mode, "half or two_thirds")
        ->check(CLI::IsMember({"half", "two_thirds"}));
    prox_cmd->add_option("--w", w, "input value")->required();
    prox_cmd->add_option("--lambda", lambda, "regularization weight")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*gen_cmd) return cmd_channel_gen(gen);
        if (*hist_cmd) return cmd_evs_histogram(hist, bins);
        if (*run_cmd) return cmd_run(run);
        if (*prox_cmd) return cmd_prox_eval(mode, w, lambda);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
