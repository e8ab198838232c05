#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ldacs/channel.hpp"
#include "ldacs/estimator.hpp"

namespace ldacs {

/// A timing estimate fails when it misses the first preamble sample by
/// cp_len / 11 samples or more.
bool is_fail(std::int64_t sto_hat, std::int64_t true_sto, const PhyParams& params);
/// Missed detections fail.
bool is_fail(const SyncResult& result, std::int64_t true_sto, const PhyParams& params);

/// One trial as serialized by `simulate`.
struct TrialRecord {
    std::uint64_t seed = 0;
    Scenario scenario = Scenario::awgn;
    double snr_db = 0.0;
    double cfo_true = 0.0;
    bool detected = false;
    bool fail = true;
    std::int64_t sto_err = 0;  ///< sto_hat - true_sto (0 when undetected)
    double cfo_err = 0.0;      ///< cfo_hat - cfo_true
    double cfo_err_ac1 = 0.0;
    double cfo_err_ac2 = 0.0;
    std::int64_t last_sample_index = -1;
    std::int64_t true_sto = 0;
    std::uint64_t saturation_events = 0;
};

std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& r);

struct TrialStats {
    std::int64_t trials = 0;
    std::int64_t fails = 0;
    std::int64_t detections = 0;
    double fail_rate = 0.0;
    double fail_ci = 0.0;  ///< 95% normal-approximation half-width
    double cfo_mse = 0.0;  ///< over detected trials
    double cfo_mse_ac1 = 0.0;
    double cfo_mse_ac2 = 0.0;
    std::uint64_t saturation_events = 0;
    double runtime_s = 0.0;
};

TrialStats summarize(std::span<const TrialRecord> records);

/// One point of an experiment. channel.seed is ignored; trial seeds come
/// from the master seed.
struct ExperimentConfig {
    ChannelConfig channel;
    SyncConfig sync;
};

/// Mean received power per unit signal power: 1 + noise + DME.
double expected_input_power(const ChannelConfig& channel);

TrialRecord run_single_trial(const Synchronizer& sync, const ExperimentConfig& cfg, std::uint64_t seed);

/// Trials in parallel (OpenMP); records are gathered by index, so the
/// result does not depend on the worker count. Trial i uses seed
/// master_seed ^ i.
TrialStats run_trials(const Synchronizer& sync, const ExperimentConfig& cfg, std::int64_t n_trials,
                      std::uint64_t master_seed, std::vector<TrialRecord>* records = nullptr);

/// Single-threaded reference of run_trials.
TrialStats run_trials_serial(const Synchronizer& sync, const ExperimentConfig& cfg, std::int64_t n_trials,
                             std::uint64_t master_seed, std::vector<TrialRecord>* records = nullptr);

struct SweepAxes {
    std::vector<Scenario> scenarios{Scenario::awgn};
    std::vector<double> snr_db{10.0};
    std::vector<double> cfo{0.0};
    std::vector<SyncMode> modes{SyncMode::floating};
    std::vector<WordLengthConfig> words{WordLengthConfig{}};
};

struct SweepRow {
    Scenario scenario = Scenario::awgn;
    double snr_db = 0.0;
    double cfo = 0.0;
    SyncMode mode = SyncMode::floating;
    WordLengthConfig words{};
    TrialStats stats;
};

/// Cross product in the order scenario, snr, cfo, mode, word lengths. Every
/// row reuses the same master seed, so rows that differ only in mode or word
/// lengths see identical trial streams. on_row fires after each row.
std::vector<SweepRow> sweep(const Synchronizer& sync, const SweepAxes& axes, const SyncConfig& base,
                            std::int64_t n_trials, std::uint64_t master_seed,
                            const std::function<void(const SweepRow&)>& on_row = {});

std::string sweep_csv_header();
/// runtime_s is written as 0 unless record_runtime is set, which keeps
/// repeated runs byte-identical.
std::string sweep_csv_row(const SweepRow& row, bool record_runtime);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool record_runtime = false);

/// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace ldacs
