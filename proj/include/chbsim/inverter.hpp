#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chbsim/modulation.hpp"

namespace chbsim {

/// Cascaded H-bridge phase leg: N series cells give 2N+1 phase-voltage levels.
struct ChbTopology {
    int cells_per_phase = 2;
    double vdc_per_cell = 75.0;
    int phases = 3;

    int levels() const { return 2 * cells_per_phase + 1; }
};

void validate(const ChbTopology& topo);

enum class StrategyKind {
    spwm_i,      // level-shifted carriers (phase disposition), sine modulator
    spwm_ii,     // phase-shifted carriers, sine modulator
    spwm_iii,    // phase-shifted carriers, third-harmonic-injected modulator
    hipwm_fmtct  // phase-shifted, harmonic injection, truncated FM carrier
};

const char* to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_string(std::string_view name);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::hipwm_fmtct;
    ModulatingSpec modulating;
    CarrierSpec carrier;
    bool latch_truncation = true;
};

/// Builds the conventional configuration for a strategy kind: pure-sine vs
/// injected modulator, fixed carrier at m_bar * f vs truncated FM carrier.
StrategyConfig make_strategy(StrategyKind kind, double f_fund, double amplitude, int m_bar,
                             double truncation_k = 0.55);

void validate(const StrategyConfig& strategy, const ChbTopology& topo);

/// One comparator feeding one H-bridge leg.
struct GateAssignment {
    int cell = 0;
    int leg = 0;  // 0 = left, 1 = right
    double modulator_phase = 0.0;  // rad, relative to the phase modulator
    double carrier_offset_cycles = 0.0;
    ComparatorBand band;  // full range for phase-shifted kinds
};

/// Comparator wiring for one phase leg. Phase-shifted kinds with N cells put
/// cell j's carrier at j/(2N) cycles and drive the right leg from the
/// 180-degree modulator (unipolar switching). The level-shifted kind stacks 2N
/// contiguous bands over [-1, 1] in phase disposition, one band pair per cell.
std::vector<GateAssignment> gate_assignments(StrategyKind kind, const ChbTopology& topo);

struct PhaseWaveform {
    ChbTopology topology;
    std::vector<SwitchingPattern> cell_patterns;  // per-cell levels in {-1, 0, +1}
    SwitchingPattern composite;                   // sum of cells, in [-N, N]
    double volts_per_level = 0.0;                 // vdc_per_cell
    double fundamental_hz = 0.0;
    long gate_event_count = 0;  // device commutations per period, all legs
};

PhaseWaveform synthesize_phase(const StrategyConfig& strategy, const ChbTopology& topo,
                               double mod_phase);

struct LineWaveform {
    SwitchingPattern pattern;  // levels in [-2N, 2N]
    double volts_per_level = 0.0;
    double fundamental_hz = 0.0;
    long gate_event_count = 0;  // device commutations per period over both phases
};

/// Line voltage a-b with the b modulator 2pi/3 behind; events merged in time order.
LineWaveform synthesize_line(const StrategyConfig& strategy, const ChbTopology& topo);

/// Weighted sum of two patterns sharing the same period (wa*a + wb*b).
SwitchingPattern combine_patterns(const SwitchingPattern& a, int wa, const SwitchingPattern& b,
                                  int wb);

/// Time average of the pattern level over one period (level units).
double mean_level(const SwitchingPattern& pattern);

}  // namespace chbsim
