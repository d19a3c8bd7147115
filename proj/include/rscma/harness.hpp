#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rscma/equalizer.hpp"
#include "rscma/prox.hpp"
#include "rscma/signal_model.hpp"
#include "rscma/types.hpp"

namespace rscma {

inline constexpr const char* kToolVersion = "rscma 0.1.0";

/// ISI values are clamped to this floor (a perfect single-spike response).
inline constexpr double kIsiFloorDb = -100.0;

/// Taps above this Euclidean norm count as a divergence.
inline constexpr double kDivergenceNorm = 1e6;

enum class Algorithm { cma, ang_cma, scma_p, rscma };
enum class Averaging { db, linear };

struct AlgorithmConfig {
    Algorithm kind = Algorithm::cma;
    std::string label;  // column name prefix; defaults to the algorithm name
    double mu = 1e-3;
    double p = 0.5;
    double eps_guard = 1e-8;
    double eps_prop = 1e-3;  // ang_cma
    double rho = 0.0;        // scma_p
    ProjectionRule projection = ProjectionRule::hermitian;  // rscma

    // Second (proximal) stage, rscma only.
    std::optional<ProxConfig> prox;
    std::size_t prox_cadence = 1;
    bool prox_write_back = false;
};

struct ChannelConfig {
    std::size_t length = 32;
    ChannelProfile profile = ChannelProfile::desk;
    std::size_t trials = 50;
    std::uint64_t first_trial = 0;  // trials use indices [first_trial, first_trial + trials)
};

struct SignalConfig {
    std::string constellation = "apsk8";
    double ring_ratio = 2.0;
    double snr_db = 30.0;
    std::size_t n_iterations = 10000;
};

struct ExperimentConfig {
    std::vector<AlgorithmConfig> algorithms;
    ChannelConfig channel;
    SignalConfig signal;
    std::size_t equalizer_length = 48;
    std::uint64_t master_seed = 1;
    Averaging averaging = Averaging::db;
    std::size_t steady_state_window = 1000;
    double convergence_threshold_db = -10.0;
    unsigned threads = 0;  // 0: hardware concurrency
    bool dump_channels = false;
};

struct AlgorithmTrace {
    std::vector<double> isi_db;  // one value per iteration, empty past a divergence
    bool diverged = false;
    std::uint64_t diverged_at = 0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    SparseChannel channel;
    std::vector<AlgorithmTrace> traces;  // parallel to cfg.algorithms
};

struct AlgorithmSummary {
    std::string label;
    std::vector<double> mean_isi_db;        // NaN everywhere if every trial diverged
    std::vector<double> final_isi_db;       // per trial, NaN for divergent trials
    std::vector<double> steady_state_db;    // per trial mean over the steady-state window
    std::vector<double> hit_iteration;      // per trial first iteration at or below threshold
    std::size_t divergence_count = 0;
    bool all_diverged = false;

    double mean_final_isi_db() const;
    double mean_steady_state_db() const;
    /// Mean over non-divergent trials; trials that never reach the threshold
    /// count as n_iterations.
    double mean_hit_iteration() const;
};

struct CampaignResult {
    ExperimentConfig config;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<AlgorithmSummary> algorithms;
    std::vector<SparseChannel> channels;  // only when cfg.dump_channels
    double wall_seconds = 0.0;
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Combined channel/equalizer response t_n = sum_i conj(w_i) h_{n-i}, i.e. the
/// impulse response seen by y = w^H x.
ComplexVecd combined_response(const SparseChannel& ch, const ComplexVecd& w);

/// 10 log10((sum |t|^2 - max |t|^2) / max |t|^2), floored at kIsiFloorDb.
double residual_isi_db(const ComplexVecd& combined);
double residual_isi(const SparseChannel& ch, const ComplexVecd& w);

/// Seed of trial `index` under `master_seed`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

void validate(const ExperimentConfig& cfg);

Constellation make_constellation(const SignalConfig& sig);

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t seed);

CampaignResult run_campaign(const ExperimentConfig& cfg);

/// `iteration,<label>_isi_db,...` with one row per iteration.
void write_traces_csv(const CampaignResult& result, const std::filesystem::path& path);
std::string traces_csv(const CampaignResult& result);

void write_summary_json(const CampaignResult& result, const std::filesystem::path& path);

/// traces.csv, summary.json and (optionally) channels/trial_<k>.json under dir.
void write_artifacts(const CampaignResult& result, const std::filesystem::path& dir);

// Config file handling (JSON). Unknown keys are rejected; errors name the key.
ExperimentConfig desk_preset();
ExperimentConfig paper_preset();
ExperimentConfig preset_from_string(const std::string& name);

/// Parse `text`. Keys absent from the file are taken from `base` when given;
/// otherwise required keys must be present.
ExperimentConfig parse_config(const std::string& text,
                              const std::optional<ExperimentConfig>& base = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::optional<ExperimentConfig>& base = std::nullopt);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace rscma
