#include "ldacs/cli.hpp"

#include <omp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ldacs/harness.hpp"

namespace ldacs::cli {

const std::vector<KeySpec>& known_keys() {
    static const std::vector<KeySpec> keys = {
        {"scenario", "awgn", "channel preset list: awgn, enr, enr-dme, tma"},
        {"snr", "10", "SNR in dB (number, list or start:stop:step; inf = noiseless)"},
        {"cfo", "0", "CFO in subcarrier spacings, |cfo| < 2 (number, list or range)"},
        {"mode", "float", "metric arithmetic list: float, fixed"},
        {"fa", "5", "fraction bits of products and AC1/AC2/ENE (list or range, 3..15)"},
        {"fx", "4", "fraction bits of |c2| and XCR (list or range, 2..15)"},
        {"trials", "1000", "Monte Carlo trials per configuration"},
        {"seed", "1", "master seed; trial i uses seed ^ i"},
        {"trial", "0", "trial index traced by `trace`"},
        {"oversampling", "4", "oversampling factor Nov"},
        {"m_consec", "auto", "consecutive samples for detection (auto = 8 * Nov)"},
        {"delta", "auto", "STO search window in samples (auto = 56 * Nov)"},
        {"input_rms", "0.38", "AGC set-point: RMS of the Q1.15 datapath input"},
        {"correlator", "direct", "fixed-point XCR structure: direct, transpose"},
        {"cordic_iterations", "16", "CORDIC iterations (8..40)"},
        {"preamble_seed", "0x1DAC51", "seed of the surrogate preamble loading"},
        {"rician_k_db", "preset", "Rician factor of the LOS tap in dB"},
        {"doppler_hz", "preset", "maximum Doppler shift in Hz"},
        {"phase_noise_hz", "0", "Wiener phase-noise linewidth in Hz (0 = off)"},
        {"signal_power_dbm", "-75", "signal power reference for DME levels"},
        {"rx_filter_hz", "0", "receive channel filter cutoff in Hz (0 = off)"},
        {"threads", "0", "worker threads (0 = OpenMP default)"},
        {"record_runtime", "false", "write measured runtime_s into sweep CSV"},
    };
    return keys;
}

namespace {

bool is_known(const std::string& key) {
    for (const auto& k : known_keys()) {
        if (key == k.key) {
            return true;
        }
    }
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        parts.push_back(trim(cur));
    }
    if (!s.empty() && s.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

double parse_double(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    if (t == "inf" || t == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || std::isnan(v)) {
        throw ConfigError(key, "cannot parse '" + text + "' as a number");
    }
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    int base = 10;
    std::size_t skip = 0;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
        base = 16;
        skip = 2;
    }
    std::int64_t v = 0;
    const auto res = std::from_chars(t.data() + skip, t.data() + t.size(), v, base);
    if (t.size() == skip || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError(key, "cannot parse '" + text + "' as an integer");
    }
    return v;
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    int base = 10;
    std::size_t skip = 0;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
        base = 16;
        skip = 2;
    }
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data() + skip, t.data() + t.size(), v, base);
    if (t.size() == skip || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError(key, "cannot parse '" + text + "' as an unsigned integer");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no" || t == "off") {
        return false;
    }
    throw ConfigError(key, "cannot parse '" + text + "' as a boolean");
}

/// Key/value store resolved in precedence order: defaults, config file,
/// --set overrides, named flags.
class Settings {
public:
    Settings() {
        for (const auto& k : known_keys()) {
            values_[k.key] = k.default_value;
        }
    }

    void set(const std::string& key, const std::string& value) {
        if (!is_known(key)) {
            throw ConfigError(key, "unknown key");
        }
        values_[key] = value;
    }

    const std::string& raw(const std::string& key) const { return values_.at(key); }

    double number(const std::string& key) const { return parse_double(key, raw(key)); }
    std::int64_t integer(const std::string& key) const { return parse_int(key, raw(key)); }
    std::uint64_t seed(const std::string& key) const { return parse_seed(key, raw(key)); }
    bool flag(const std::string& key) const { return parse_bool(key, raw(key)); }
    std::vector<double> axis(const std::string& key) const { return parse_axis(key, raw(key)); }

    std::optional<double> preset_number(const std::string& key) const {
        if (trim(raw(key)) == "preset") {
            return std::nullopt;
        }
        return number(key);
    }

    int bounded_int(const std::string& key, std::int64_t lo, std::int64_t hi) const {
        const auto v = integer(key);
        if (v < lo || v > hi) {
            throw ConfigError(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return static_cast<int>(v);
    }

    std::vector<int> int_axis(const std::string& key, int lo, int hi) const {
        std::vector<int> out;
        for (double v : axis(key)) {
            if (v != std::floor(v) || v < lo || v > hi) {
                throw ConfigError(key, "values must be integers in [" + std::to_string(lo) + ", " +
                                           std::to_string(hi) + "]");
            }
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
};

struct Resolved {
    PhyParams params;
    std::uint64_t preamble_seed = kDefaultPreambleSeed;
    SweepAxes axes;
    SyncConfig sync;
    std::int64_t trials = 1;
    std::uint64_t seed = 1;
    std::int64_t trial = 0;
    std::optional<double> rician_k_db;
    std::optional<double> doppler_hz;
    double phase_noise_hz = 0.0;
    double signal_power_dbm = -75.0;
    double rx_filter_hz = 0.0;
    bool record_runtime = false;
    int threads = 0;
};

Resolved resolve(const Settings& s) {
    Resolved r;
    r.params.oversampling = s.bounded_int("oversampling", 1, 64);
    r.preamble_seed = s.seed("preamble_seed");

    r.axes.scenarios.clear();
    for (const auto& name : split(s.raw("scenario"), ',')) {
        try {
            r.axes.scenarios.push_back(parse_scenario(name));
        } catch (const std::invalid_argument&) {
            throw ConfigError("scenario", "unknown scenario '" + name + "'");
        }
    }
    r.axes.modes.clear();
    for (const auto& name : split(s.raw("mode"), ',')) {
        try {
            r.axes.modes.push_back(parse_sync_mode(name));
        } catch (const std::invalid_argument&) {
            throw ConfigError("mode", "unknown mode '" + name + "'");
        }
    }
    r.axes.snr_db = s.axis("snr");
    for (double v : r.axes.snr_db) {
        if (v == -std::numeric_limits<double>::infinity()) {
            throw ConfigError("snr", "must be finite or inf");
        }
    }
    r.axes.cfo = s.axis("cfo");
    for (double v : r.axes.cfo) {
        if (!(std::abs(v) < 2.0)) {
            throw ConfigError("cfo", "|cfo| must be < 2");
        }
    }
    r.axes.words.clear();
    for (int fa : s.int_axis("fa", 3, 15)) {
        for (int fx : s.int_axis("fx", 2, 15)) {
            r.axes.words.push_back(WordLengthConfig{fa, fx});
        }
    }

    r.sync = SyncConfig::defaults(r.params);
    if (trim(s.raw("m_consec")) != "auto") {
        r.sync.m_consec = s.bounded_int("m_consec", 1, 1 << 20);
    }
    if (trim(s.raw("delta")) != "auto") {
        r.sync.delta = s.bounded_int("delta", 1, r.params.symbol_len());
    }
    r.sync.input_rms = s.number("input_rms");
    if (!(r.sync.input_rms > 0.0 && r.sync.input_rms <= 1.0)) {
        throw ConfigError("input_rms", "must be in (0, 1]");
    }
    const std::string form = trim(s.raw("correlator"));
    if (form == "direct") {
        r.sync.form = CorrelatorForm::direct;
    } else if (form == "transpose") {
        r.sync.form = CorrelatorForm::transpose;
    } else {
        throw ConfigError("correlator", "expected direct or transpose");
    }
    r.sync.cordic_iterations = s.bounded_int("cordic_iterations", 8, 40);

    r.trials = s.integer("trials");
    if (r.trials < 1) {
        throw ConfigError("trials", "must be >= 1");
    }
    r.seed = s.seed("seed");
    r.trial = s.integer("trial");
    if (r.trial < 0) {
        throw ConfigError("trial", "must be >= 0");
    }
    r.rician_k_db = s.preset_number("rician_k_db");
    r.doppler_hz = s.preset_number("doppler_hz");
    r.phase_noise_hz = s.number("phase_noise_hz");
    if (!(r.phase_noise_hz >= 0.0)) {
        throw ConfigError("phase_noise_hz", "must be >= 0");
    }
    r.signal_power_dbm = s.number("signal_power_dbm");
    r.rx_filter_hz = s.number("rx_filter_hz");
    if (!(r.rx_filter_hz >= 0.0) || r.rx_filter_hz >= r.params.sample_rate_hz() / 2.0) {
        throw ConfigError("rx_filter_hz", "must be in [0, fs/2)");
    }
    r.record_runtime = s.flag("record_runtime");
    r.threads = s.bounded_int("threads", 0, 4096);
    return r;
}

ChannelConfig channel_for(const Resolved& r, Scenario scenario, double snr, double cfo) {
    ChannelConfig ch = make_scenario(scenario, snr, cfo);
    if (r.rician_k_db) {
        ch.rician_k_db = *r.rician_k_db;
    }
    if (r.doppler_hz) {
        ch.doppler_max_hz = *r.doppler_hz;
    }
    ch.phase_noise_linewidth_hz = r.phase_noise_hz;
    ch.signal_power_dbm = r.signal_power_dbm;
    ch.rx_filter_cutoff_hz = r.rx_filter_hz;
    return ch;
}

template <class T>
const T& single(const std::vector<T>& v, const char* key, const char* command) {
    if (v.size() != 1) {
        throw ConfigError(key, std::string(command) + " takes a single value");
    }
    return v.front();
}

/// Output sink: the named file, or `fallback` when no path was given.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) {
            throw std::runtime_error("cannot open output file '" + path + "'");
        }
        stream_ = file_.get();
    }

    std::ostream& get() { return *stream_; }
    bool is_file() const { return file_ != nullptr; }

    void close() {
        if (file_) {
            file_->close();
            if (!*file_) {
                throw std::runtime_error("write to output file failed");
            }
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

std::string summary_line(const SweepRow& row) {
    std::ostringstream s;
    s << "scenario=" << to_string(row.scenario) << " snr_db=" << format_number(row.snr_db)
      << " cfo=" << format_number(row.cfo) << " mode=" << to_string(row.mode) << " fa=" << row.words.fa
      << " fx=" << row.words.fx << " trials=" << row.stats.trials << " fail_rate=" << format_number(row.stats.fail_rate)
      << " fail_ci=" << format_number(row.stats.fail_ci) << " cfo_mse=" << format_number(row.stats.cfo_mse)
      << " runtime_s=" << format_number(std::round(row.stats.runtime_s * 1000.0) / 1000.0);
    return s.str();
}

int run_simulate(const Resolved& r, const std::string& output, std::ostream& out, std::ostream& err) {
    const Scenario scenario = single(r.axes.scenarios, "scenario", "simulate");
    const double snr = single(r.axes.snr_db, "snr", "simulate");
    const double cfo = single(r.axes.cfo, "cfo", "simulate");
    const SyncMode mode = single(r.axes.modes, "mode", "simulate");
    const WordLengthConfig words = single(r.axes.words, "fa", "simulate");

    const PreambleTemplate tpl = generate_preamble(r.params, r.preamble_seed);
    const Synchronizer sync(r.params, tpl);
    ExperimentConfig cfg;
    cfg.channel = channel_for(r, scenario, snr, cfo);
    cfg.sync = r.sync;
    cfg.sync.mode = mode;
    cfg.sync.words = words;

    std::vector<TrialRecord> records;
    const TrialStats st = run_trials(sync, cfg, r.trials, r.seed, &records);

    Sink sink(output, out);
    sink.get() << trial_csv_header() << '\n';
    for (const auto& rec : records) {
        sink.get() << trial_csv_row(rec) << '\n';
    }
    sink.close();
    (sink.is_file() ? out : err) << summary_line(SweepRow{scenario, snr, cfo, mode, words, st}) << '\n';
    return 0;
}

int run_sweep(const Resolved& r, const std::string& output, std::ostream& out, std::ostream& err) {
    const PreambleTemplate tpl = generate_preamble(r.params, r.preamble_seed);
    const Synchronizer sync(r.params, tpl);
    Sink sink(output, out);
    std::ostream& log = sink.is_file() ? out : err;
    sink.get() << sweep_csv_header() << '\n';
    // Rows are built one at a time so channel overrides apply to each.
    for (Scenario s : r.axes.scenarios) {
        for (double snr : r.axes.snr_db) {
            for (double cfo : r.axes.cfo) {
                for (SyncMode mode : r.axes.modes) {
                    for (const auto& words : r.axes.words) {
                        ExperimentConfig cfg;
                        cfg.channel = channel_for(r, s, snr, cfo);
                        cfg.sync = r.sync;
                        cfg.sync.mode = mode;
                        cfg.sync.words = words;
                        const SweepRow row{s, snr, cfo, mode, words, run_trials(sync, cfg, r.trials, r.seed)};
                        sink.get() << sweep_csv_row(row, r.record_runtime) << '\n';
                        log << summary_line(row) << '\n';
                    }
                }
            }
        }
    }
    sink.close();
    return 0;
}

int run_dump_template(const Resolved& r, bool samples, const std::string& output, std::ostream& out) {
    const PreambleTemplate tpl = generate_preamble(r.params, r.preamble_seed);
    Sink sink(output, out);
    std::ostream& o = sink.get();
    if (samples) {
        o << "re,im\n";
        for (const auto& v : tpl.samples) {
            o << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
        }
    } else {
        o << "m,a_m,a0_m,a1_m\n";
        for (int m = 0; m < tpl.D; ++m) {
            const auto i = static_cast<std::size_t>(m);
            o << m << ',' << format_number(tpl.a[i]) << ',' << int{tpl.a0[i]} << ',' << int{tpl.a1[i]} << '\n';
        }
    }
    sink.close();
    return 0;
}

int run_trace(const Resolved& r, bool stream_only, const std::string& output, std::ostream& out,
              std::ostream& err) {
    const Scenario scenario = single(r.axes.scenarios, "scenario", "trace");
    const double snr = single(r.axes.snr_db, "snr", "trace");
    const double cfo = single(r.axes.cfo, "cfo", "trace");
    const SyncMode mode = single(r.axes.modes, "mode", "trace");
    const WordLengthConfig words = single(r.axes.words, "fa", "trace");

    const PreambleTemplate tpl = generate_preamble(r.params, r.preamble_seed);
    const Synchronizer sync(r.params, tpl);
    ChannelConfig ch = channel_for(r, scenario, snr, cfo);
    const std::uint64_t seed = r.seed ^ static_cast<std::uint64_t>(r.trial);
    ch.seed = seed;
    const TrialStream trial = build_trial_stream(tpl, ch, r.params, seed);

    if (stream_only) {
        Sink sink(output, out);
        sink.get() << "re,im\n";
        for (const auto& x : trial.samples) {
            sink.get() << format_number(x.real()) << ',' << format_number(x.imag()) << '\n';
        }
        sink.close();
        (sink.is_file() ? out : err) << "true_sto=" << trial.true_sto << " samples=" << trial.samples.size() << '\n';
        return 0;
    }

    SyncConfig sc = r.sync;
    sc.mode = mode;
    sc.words = words;
    sc.expected_input_power = expected_input_power(ch);
    const SyncResult res = sync.run(trial.samples, sc);

    Sink sink(output, out);
    std::ostream& o = sink.get();
    if (mode == SyncMode::floating) {
        o << "n,re,im,ac1_mag,ac2_mag,ene,xcr\n";
        MetricState state(r.params, tpl);
        for (std::size_t n = 0; n < trial.samples.size(); ++n) {
            const auto& x = trial.samples[n];
            const auto s = state.step(x);
            o << n << ',' << format_number(x.real()) << ',' << format_number(x.imag()) << ','
              << format_number(std::abs(s.ac1)) << ',' << format_number(std::abs(s.ac2)) << ','
              << format_number(s.ene) << ',' << format_number(s.xcr) << '\n';
        }
    } else {
        o << "n,re,im,ac1_mag,ac2_mag,ene,xcr,re_raw,im_raw,ac1_re_raw,ac1_im_raw,ac2_re_raw,ac2_im_raw,"
             "ac1_mag_raw,ac2_mag_raw,ene_raw,xcr_raw\n";
        Datapath dp(r.params, tpl, words, sc.form, sc.cordic_iterations);
        const double gain = sc.input_rms / std::sqrt(sc.expected_input_power);
        const double sa = std::ldexp(1.0, -words.fa);
        const double sx = std::ldexp(1.0, -words.fx);
        for (std::size_t n = 0; n < trial.samples.size(); ++n) {
            const FixedIq x = to_fixed_input(trial.samples[n], gain);
            const auto s = dp.step(x);
            o << n << ',' << format_number(x.re.to_real()) << ',' << format_number(x.im.to_real()) << ','
              << format_number(static_cast<double>(s.ac1_mag) * sa) << ','
              << format_number(static_cast<double>(s.ac2_mag) * sa) << ','
              << format_number(static_cast<double>(s.ene) * sa) << ','
              << format_number(static_cast<double>(s.xcr) * sx) << ',' << x.re.raw << ',' << x.im.raw << ','
              << s.ac1_re << ',' << s.ac1_im << ',' << s.ac2_re << ',' << s.ac2_im << ',' << s.ac1_mag << ','
              << s.ac2_mag << ',' << s.ene << ',' << s.xcr << '\n';
        }
    }
    sink.close();

    std::ostream& log = sink.is_file() ? out : err;
    log << "true_sto=" << trial.true_sto << " detected=" << (res.detected ? 1 : 0)
        << " detect_index=" << res.detect_index << " peak_index=" << res.peak_index << " sto_hat=" << res.sto_hat
        << " cfo_hat=" << format_number(res.cfo_hat) << '\n';
    return 0;
}

std::string keys_help() {
    std::ostringstream s;
    s << "Configuration keys (config file `key = value`, --set key=value):\n";
    for (const auto& k : known_keys()) {
        s << "  " << k.key << " (default " << k.default_value << "): " << k.help << '\n';
    }
    s << "Precedence: defaults < --config file < --set < named options.\n"
         "Exit codes: 0 success, 1 runtime failure, 2 configuration error.";
    return s.str();
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, origin + ":" + std::to_string(number) + ": expected `key = value`");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!is_known(key)) {
            throw ConfigError(key, origin + ":" + std::to_string(number) + ": unknown key");
        }
        out[key] = value;
    }
    return out;
}

std::vector<double> parse_axis(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) {
            throw ConfigError(key, "empty list item in '" + text + "'");
        }
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(parse_double(key, parts[0]));
            continue;
        }
        if (parts.size() != 3) {
            throw ConfigError(key, "range must be start:stop:step, got '" + item + "'");
        }
        const double start = parse_double(key, parts[0]);
        const double stop = parse_double(key, parts[1]);
        const double step = parse_double(key, parts[2]);
        if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || step == 0.0 ||
            (stop - start) / step < 0.0) {
            throw ConfigError(key, "range '" + item + "' is empty or unbounded");
        }
        const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000) {
            throw ConfigError(key, "range '" + item + "' has too many points");
        }
        for (std::int64_t i = 0; i < count; ++i) {
            double v = start + static_cast<double>(i) * step;
            v = std::round(v * 1e12) / 1e12;  // drop accumulation residue such as 1e-17
            out.push_back(v == 0.0 ? 0.0 : v);
        }
    }
    if (out.empty()) {
        throw ConfigError(key, "no values");
    }
    return out;
}

int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"OFDM preamble synchronization lab: floating and bit-true fixed-point simulation", "sync-lab"};
    app.require_subcommand(1);
    app.footer(keys_help());

    struct Common {
        std::string config;
        std::vector<std::string> sets;
        std::string output;
        std::map<std::string, std::string> named;
    };
    Common common;
    bool samples = false;
    bool stream_only = false;

    auto add_common = [&](CLI::App* sub, std::initializer_list<const char*> named_keys) {
        sub->add_option("-c,--config", common.config, "config file with `key = value` lines");
        sub->add_option("--set", common.sets, "override, key=value (repeatable)")->allow_extra_args(false);
        sub->add_option("-o,--output", common.output, "output CSV path (default stdout)");
        for (const char* key : named_keys) {
            std::string flag = std::string("--") + key;
            for (auto& ch : flag) {
                if (ch == '_') {
                    ch = '-';
                }
            }
            sub->add_option_function<std::string>(
                flag, [&common, key](const std::string& v) { common.named[key] = v; },
                std::string("sets `") + key + "`");
        }
    };

    auto* simulate = app.add_subcommand("simulate", "run trials at one configuration, write per-trial CSV");
    add_common(simulate, {"scenario", "snr", "cfo", "mode", "fa", "fx", "trials", "seed", "threads"});
    auto* sweep_cmd = app.add_subcommand("sweep", "cross product of axes, one CSV row per configuration");
    add_common(sweep_cmd, {"scenario", "snr", "cfo", "mode", "fa", "fx", "trials", "seed", "threads"});
    auto* dump = app.add_subcommand("dump-template", "write the energy template (or preamble samples) as CSV");
    add_common(dump, {"oversampling", "preamble_seed"});
    dump->add_flag("--samples", samples, "write preamble samples as re,im instead of the template");
    auto* trace = app.add_subcommand("trace", "per-sample metric trace of one trial");
    add_common(trace, {"scenario", "snr", "cfo", "mode", "fa", "fx", "seed", "trial"});
    trace->add_flag("--stream", stream_only, "write the received stream as re,im instead of metrics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        Settings settings;
        if (!common.config.empty()) {
            std::ifstream in(common.config);
            if (!in) {
                throw ConfigError("config", "cannot read '" + common.config + "'");
            }
            std::ostringstream text;
            text << in.rdbuf();
            for (const auto& [k, v] : parse_config_text(text.str(), common.config)) {
                settings.set(k, v);
            }
        }
        for (const auto& kv : common.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(trim(kv), "--set expects key=value");
            }
            settings.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        for (const auto& [k, v] : common.named) {
            settings.set(k, v);
        }
        const Resolved resolved = resolve(settings);
        if (resolved.threads > 0) {
            omp_set_num_threads(resolved.threads);
        }

        if (simulate->parsed()) {
            return run_simulate(resolved, common.output, out, err);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(resolved, common.output, out, err);
        }
        if (dump->parsed()) {
            return run_dump_template(resolved, samples, common.output, out);
        }
        return run_trace(resolved, stream_only, common.output, out, err);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace ldacs::cli
