#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chbsim/acoustics.hpp"
#include "chbsim/inverter.hpp"

namespace chbsim {

struct AnalysisConfig {
    int samples_per_period = 65536;
    int max_order = 50;
    double load_r_ohm = 3.5;
    double load_l_h = 0.010;
    int periods = 1;
};

struct ModeRanges {
    int stator_m_max = 4;
    int housing_m_max = 3;
    int housing_n_max = 3;
};

struct RiskConfig {
    double window_hz = 75.0;
    double percent_threshold = 0.5;
};

struct MotorProfile {
    StatorGeometry stator;
    MaterialSpec material;
    HousingGeometry housing;
    ModeRanges modes;
    RiskConfig risk;
};

struct OutputConfig {
    std::string dir = "out";
    std::string format = "csv";  // csv | json
};

/// Line fundamental RMS targeted when the modulation index is left on "auto".
inline constexpr double target_line_vrms = 220.0;

/// Fully resolved run configuration. Field defaults are the defaults of the
/// JSON schema; CLI flags override individual fields after parsing.
struct RunConfig {
    std::vector<StrategyKind> strategies{StrategyKind::hipwm_fmtct};
    ChbTopology topology;

    double f_fund = 50.0;
    // Unset means auto: solve the modulation index per case for the target
    // line fundamental RMS, falling back to 1.0 where the strategy cannot
    // reach it within the allowed range.
    std::optional<double> amplitude;
    std::optional<std::vector<HarmonicComponent>> injection;  // default depends on strategy
    double mod_phase_rad = 0.0;

    int m_bar = 15;
    double truncation_k = 0.55;
    std::optional<double> f_carrier;  // fixed kinds default to m_bar * f_fund
    double carrier_phase_offset_cycles = 0.0;

    AnalysisConfig analysis;
    MotorProfile motor;
    std::vector<double> sweep_k{0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7, 0.8};
    OutputConfig output;
    bool diagnostics = false;
};

/// Parses and validates a JSON config document. Unknown keys are rejected with
/// the offending path in the message; all violations throw config_error.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// The resolved configuration echoed back as a JSON document (--print-config).
std::string resolved_config_json(const RunConfig& config);

/// Strategy built from the run configuration at an explicit modulation index,
/// honoring the injection override.
StrategyConfig build_strategy(const RunConfig& config, StrategyKind kind, double amplitude);

/// Natural-frequency list (stator ring modes plus housing grid) for risk scoring.
std::vector<ResonanceMode> resonance_modes(const MotorProfile& motor);

void validate(const RunConfig& config);

}  // namespace chbsim
