#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ldacs/datapath.hpp"
#include "ldacs/metrics.hpp"
#include "ldacs/preamble.hpp"

namespace ldacs {

enum class SyncMode { floating, fixed };

std::string to_string(SyncMode mode);
/// Accepts "float" or "fixed".
SyncMode parse_sync_mode(std::string_view name);

/// AGC set-point of the fixed-point front end: RMS of the Q1.15 input.
inline constexpr double kDefaultInputRms = 0.38;

struct SyncConfig {
    int m_consec = 32;  ///< 8 * Nov
    int delta = 224;    ///< 56 * Nov
    SyncMode mode = SyncMode::floating;
    WordLengthConfig words{};
    CorrelatorForm form = CorrelatorForm::direct;
    int cordic_iterations = kDefaultCordicIterations;
    double input_rms = kDefaultInputRms;
    /// Mean received power the AGC normalizes (signal plus noise).
    double expected_input_power = 1.0;

    static SyncConfig defaults(const PhyParams& params);
    /// m_consec >= 1, 1 <= delta <= symbol length, positive AGC settings.
    void validate(const PhyParams& params) const;
};

struct SyncResult {
    bool detected = false;
    std::int64_t detect_index = -1;
    std::int64_t peak_index = -1;  ///< argmax of XCR over the search window
    std::int64_t sto_hat = -1;     ///< peak_index minus the calibration offset
    double cfo_hat = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double cfo_ac1 = 0.0;  ///< AC1-only estimate, 2 phi1 / pi
    double cfo_ac2 = 0.0;  ///< AC2-only estimate from symbol 1
    /// Newest sample consumed when the result was produced.
    std::int64_t last_sample_index = -1;
    std::uint64_t saturation_events = 0;
};

/// Detection counter for |AC1| + |AC2| > ENE held over m consecutive samples.
class Detector {
public:
    explicit Detector(int m_consec) : m_consec_(m_consec) {}

    /// Returns true exactly once, at the sample completing the m-long run.
    bool update(bool condition);

private:
    int m_consec_;
    int run_ = 0;
    bool fired_ = false;
};

/// First index at which the AC/ENE condition has held m_consec times in a row.
std::optional<std::int64_t> detect(std::span<const MetricSnapshot> snapshots, const SyncConfig& cfg);

/// Index of the largest XCR in [detect_index, detect_index + delta), earliest on ties.
std::int64_t estimate_sto(std::span<const double> xcr, std::int64_t detect_index, const SyncConfig& cfg);

/// Branch rule on the coarse (AC1) and fine (AC2) angles: phi2/pi, shifted
/// by +2 when phi1 >= pi/2 and by -2 when phi1 <= -pi/2. A branch that lands
/// more than one spacing from the coarse estimate 2 phi1 / pi is moved by 2
/// toward it. The result is wrapped into (-2, 2].
double estimate_cfo(double phi1, double phi2);

/// Wrap into (-2, 2].
double wrap_cfo(double eps);

/// Runs the detection / timing / frequency flow over either metric source.
/// Holds the calibration offset; safe to share across threads.
class Synchronizer {
public:
    /// Calibrates the XCR peak to the first preamble sample with a noiseless
    /// floating-point run.
    Synchronizer(const PhyParams& params, const PreambleTemplate& tpl);

    SyncResult run(std::span<const Complex> stream, const SyncConfig& cfg) const;

    std::int64_t calibration_offset() const { return calibration_; }
    const PhyParams& params() const { return params_; }
    const PreambleTemplate& preamble() const { return *tpl_; }

private:
    PhyParams params_;
    const PreambleTemplate* tpl_;
    std::int64_t calibration_ = 0;
};

/// Convenience wrapper building a Synchronizer per call.
SyncResult synchronize(std::span<const Complex> stream, const PreambleTemplate& tpl, const PhyParams& params,
                       const SyncConfig& cfg);

}  // namespace ldacs
