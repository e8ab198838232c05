#include "ldacs/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <stdexcept>

namespace ldacs {

bool is_fail(std::int64_t sto_hat, std::int64_t true_sto, const PhyParams& params) {
    return static_cast<double>(std::llabs(sto_hat - true_sto)) >= params.fail_threshold();
}

bool is_fail(const SyncResult& result, std::int64_t true_sto, const PhyParams& params) {
    return !result.detected || is_fail(result.sto_hat, true_sto, params);
}

std::string format_number(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string trial_csv_header() { return "seed,scenario,snr_db,cfo_true,detected,sto_err,cfo_err"; }

std::string trial_csv_row(const TrialRecord& r) {
    std::string s = std::to_string(r.seed);
    s += ',' + to_string(r.scenario);
    s += ',' + format_number(r.snr_db);
    s += ',' + format_number(r.cfo_true);
    s += r.detected ? ",1" : ",0";
    s += ',' + std::to_string(r.sto_err);
    s += ',' + format_number(r.cfo_err);
    return s;
}

TrialStats summarize(std::span<const TrialRecord> records) {
    TrialStats st;
    st.trials = static_cast<std::int64_t>(records.size());
    double se = 0.0, se1 = 0.0, se2 = 0.0;
    for (const auto& r : records) {
        st.fails += r.fail ? 1 : 0;
        st.saturation_events += r.saturation_events;
        if (r.detected) {
            ++st.detections;
            se += r.cfo_err * r.cfo_err;
            se1 += r.cfo_err_ac1 * r.cfo_err_ac1;
            se2 += r.cfo_err_ac2 * r.cfo_err_ac2;
        }
    }
    if (st.trials > 0) {
        const double n = static_cast<double>(st.trials);
        st.fail_rate = static_cast<double>(st.fails) / n;
        st.fail_ci = 1.96 * std::sqrt(st.fail_rate * (1.0 - st.fail_rate) / n);
    }
    if (st.detections > 0) {
        const double d = static_cast<double>(st.detections);
        st.cfo_mse = se / d;
        st.cfo_mse_ac1 = se1 / d;
        st.cfo_mse_ac2 = se2 / d;
    }
    return st;
}

double expected_input_power(const ChannelConfig& channel) {
    double p = 1.0;
    if (std::isfinite(channel.snr_db)) {
        p += std::pow(10.0, -channel.snr_db / 10.0);
    }
    for (const auto& src : channel.dme) {
        p += std::pow(10.0, (src.power_dbm - channel.signal_power_dbm) / 10.0);
    }
    return p;
}

TrialRecord run_single_trial(const Synchronizer& sync, const ExperimentConfig& cfg, std::uint64_t seed) {
    ChannelConfig channel = cfg.channel;
    channel.seed = seed;
    const TrialStream trial = build_trial_stream(sync.preamble(), channel, sync.params(), seed);

    SyncConfig sc = cfg.sync;
    sc.expected_input_power = expected_input_power(channel);
    const SyncResult res = sync.run(trial.samples, sc);

    TrialRecord r;
    r.seed = seed;
    r.scenario = channel.scenario;
    r.snr_db = channel.snr_db;
    r.cfo_true = channel.cfo;
    r.detected = res.detected;
    r.fail = is_fail(res, trial.true_sto, sync.params());
    r.true_sto = trial.true_sto;
    r.last_sample_index = res.last_sample_index;
    r.saturation_events = res.saturation_events;
    if (res.detected) {
        r.sto_err = res.sto_hat - trial.true_sto;
        r.cfo_err = res.cfo_hat - channel.cfo;
        r.cfo_err_ac1 = res.cfo_ac1 - channel.cfo;
        r.cfo_err_ac2 = res.cfo_ac2 - channel.cfo;
    }
    return r;
}

namespace {

void check_trials(std::int64_t n_trials) {
    if (n_trials < 1) {
        throw std::invalid_argument("run_trials: n_trials must be >= 1");
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrialStats run_trials(const Synchronizer& sync, const ExperimentConfig& cfg, std::int64_t n_trials,
                      std::uint64_t master_seed, std::vector<TrialRecord>* records) {
    check_trials(n_trials);
    cfg.channel.validate();
    cfg.sync.validate(sync.params());
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TrialRecord> local(static_cast<std::size_t>(n_trials));
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n_trials; ++i) {
        try {
            local[static_cast<std::size_t>(i)] =
                run_single_trial(sync, cfg, master_seed ^ static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical(ldacs_trial_error)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    TrialStats st = summarize(local);
    st.runtime_s = seconds_since(t0);
    if (records != nullptr) {
        *records = std::move(local);
    }
    return st;
}

TrialStats run_trials_serial(const Synchronizer& sync, const ExperimentConfig& cfg, std::int64_t n_trials,
                             std::uint64_t master_seed, std::vector<TrialRecord>* records) {
    check_trials(n_trials);
    cfg.channel.validate();
    cfg.sync.validate(sync.params());
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TrialRecord> local;
    local.reserve(static_cast<std::size_t>(n_trials));
    for (std::int64_t i = 0; i < n_trials; ++i) {
        local.push_back(run_single_trial(sync, cfg, master_seed ^ static_cast<std::uint64_t>(i)));
    }
    TrialStats st = summarize(local);
    st.runtime_s = seconds_since(t0);
    if (records != nullptr) {
        *records = std::move(local);
    }
    return st;
}

std::vector<SweepRow> sweep(const Synchronizer& sync, const SweepAxes& axes, const SyncConfig& base,
                            std::int64_t n_trials, std::uint64_t master_seed,
                            const std::function<void(const SweepRow&)>& on_row) {
    if (axes.scenarios.empty() || axes.snr_db.empty() || axes.cfo.empty() || axes.modes.empty() ||
        axes.words.empty()) {
        throw std::invalid_argument("sweep: every axis needs at least one value");
    }
    std::vector<SweepRow> rows;
    for (Scenario s : axes.scenarios) {
        for (double snr : axes.snr_db) {
            for (double cfo : axes.cfo) {
                for (SyncMode mode : axes.modes) {
                    for (const auto& words : axes.words) {
                        ExperimentConfig cfg;
                        cfg.channel = make_scenario(s, snr, cfo);
                        cfg.sync = base;
                        cfg.sync.mode = mode;
                        cfg.sync.words = words;
                        SweepRow row{s, snr, cfo, mode, words, run_trials(sync, cfg, n_trials, master_seed)};
                        if (on_row) {
                            on_row(row);
                        }
                        rows.push_back(row);
                    }
                }
            }
        }
    }
    return rows;
}

std::string sweep_csv_header() {
    return "scenario,snr_db,cfo,mode,fa,fx,trials,fail_rate,fail_ci,cfo_mse,runtime_s";
}

std::string sweep_csv_row(const SweepRow& row, bool record_runtime) {
    std::string s = to_string(row.scenario);
    s += ',' + format_number(row.snr_db);
    s += ',' + format_number(row.cfo);
    s += ',' + to_string(row.mode);
    s += ',' + std::to_string(row.words.fa);
    s += ',' + std::to_string(row.words.fx);
    s += ',' + std::to_string(row.stats.trials);
    s += ',' + format_number(row.stats.fail_rate);
    s += ',' + format_number(row.stats.fail_ci);
    s += ',' + format_number(row.stats.cfo_mse);
    s += ',' + format_number(record_runtime ? row.stats.runtime_s : 0.0);
    return s;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool record_runtime) {
    out << sweep_csv_header() << '\n';
    for (const auto& row : rows) {
        out << sweep_csv_row(row, record_runtime) << '\n';
    }
}

}  // namespace ldacs
