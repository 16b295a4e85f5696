#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chbsim/config.hpp"

namespace chbsim {

struct SynthResult {
    double thd_percent = 0.0;
    double fundamental_rms = 0.0;
    std::filesystem::path waveform_path;
    std::filesystem::path harmonics_path;
};

/// Synthesizes the line voltage for the first configured strategy, writes the
/// sampled waveform and harmonic table, and reports THD and fundamental RMS.
SynthResult cmd_synth(const RunConfig& config);

struct SweepRow {
    double k = 0.0;
    double a_m = 0.0;
    double t1_ms = 0.0;
    double max_mod_order = 0.0;  // A_M (1 - K)
    double thd_pct = 0.0;
    double vrms_fund = 0.0;
    double risk_score = 0.0;
};

/// HIPWM-FMTCt sweep over the configured K grid; one row per K.
std::vector<SweepRow> cmd_sweep_k(const RunConfig& config);

struct CompareRow {
    StrategyKind kind = StrategyKind::spwm_i;
    double thd_pct = 0.0;
    double vrms_fund = 0.0;
    long events_per_period = 0;
    double risk_score = 0.0;
};

/// Strategy comparison at identical topology and m_bar; needs >= 2 strategies.
std::vector<CompareRow> cmd_compare(const RunConfig& config);

struct ResonanceRow {
    std::string component;  // "stator" or "housing"
    int m = 0;
    int n = 0;  // 0 for stator
    double p_root = 0.0;
    double frequency_hz = 0.0;
};

/// Natural-frequency table for the configured motor profile. When a harmonic
/// CSV is supplied its lines are scored against the resonances and the risk
/// report is written alongside.
std::vector<ResonanceRow> cmd_resonance(const RunConfig& config,
                                        const std::optional<std::string>& spectrum_csv = {});

/// sweep-k + compare + resonance with the stock defaults plus a summary report.
void cmd_reproduce(const RunConfig& config);

}  // namespace chbsim
