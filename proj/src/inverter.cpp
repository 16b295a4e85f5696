#include "chbsim/inverter.hpp"

#include <algorithm>
#include <cmath>

#include "chbsim/errors.hpp"

namespace chbsim {

void validate(const ChbTopology& topo) {
    if (topo.cells_per_phase < 1) throw config_error("topology.cells must be >= 1");
    if (!(topo.vdc_per_cell > 0.0)) throw config_error("topology.vdc must be > 0");
    if (topo.phases < 1) throw config_error("topology.phases must be >= 1");
}

const char* to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::spwm_i: return "SPWM_I";
        case StrategyKind::spwm_ii: return "SPWM_II";
        case StrategyKind::spwm_iii: return "SPWM_III";
        case StrategyKind::hipwm_fmtct: return "HIPWM_FMTCt";
    }
    return "?";
}

std::optional<StrategyKind> strategy_from_string(std::string_view name) {
    if (name == "SPWM_I") return StrategyKind::spwm_i;
    if (name == "SPWM_II") return StrategyKind::spwm_ii;
    if (name == "SPWM_III") return StrategyKind::spwm_iii;
    if (name == "HIPWM_FMTCt") return StrategyKind::hipwm_fmtct;
    return {};
}

StrategyConfig make_strategy(StrategyKind kind, double f_fund, double amplitude, int m_bar,
                             double truncation_k) {
    StrategyConfig strategy;
    strategy.kind = kind;
    strategy.modulating.f_fund = f_fund;
    strategy.modulating.amplitude = amplitude;
    const bool injected = kind == StrategyKind::spwm_iii || kind == StrategyKind::hipwm_fmtct;
    strategy.modulating.harmonics =
        injected ? third_harmonic_injection() : std::vector<HarmonicComponent>{{1, 1.0}};
    if (kind == StrategyKind::hipwm_fmtct) {
        strategy.carrier = make_fmtc_carrier(m_bar, truncation_k);
        strategy.latch_truncation = true;
    } else {
        strategy.carrier = make_fixed_carrier(m_bar * f_fund, m_bar);
        strategy.latch_truncation = false;
    }
    return strategy;
}

void validate(const StrategyConfig& strategy, const ChbTopology& topo) {
    validate(topo);
    validate(strategy.modulating);
    validate(strategy.carrier);
    const bool needs_fmtc = strategy.kind == StrategyKind::hipwm_fmtct;
    if (needs_fmtc && strategy.carrier.kind != CarrierKind::fmtc_truncated)
        throw config_error("HIPWM_FMTCt requires the FMTC carrier");
    if (!needs_fmtc && strategy.carrier.kind != CarrierKind::triangular_fixed)
        throw config_error(std::string(to_string(strategy.kind)) + " requires a fixed carrier");
}

std::vector<GateAssignment> gate_assignments(StrategyKind kind, const ChbTopology& topo) {
    validate(topo);
    const int n = topo.cells_per_phase;
    std::vector<GateAssignment> gates;
    gates.reserve(2 * std::size_t(n));
    if (kind == StrategyKind::spwm_i) {
        // Phase disposition: 2N stacked bands over [-1, 1], all carriers in
        // phase. Cell j owns the j-th positive band; its right leg is the
        // mirrored comparison, which equals the 180-degree modulator against
        // the half-cycle-shifted carrier in the same band.
        const double height = 1.0 / n;
        for (int j = 0; j < n; ++j) {
            ComparatorBand band{(j + 0.5) * height, 0.5 * height};
            gates.push_back({j, 0, 0.0, 0.0, band});
            gates.push_back({j, 1, pi, 0.5, band});
        }
    } else {
        // Phase shift, unipolar cells: carrier of cell j at j/(2N) cycles,
        // left leg on the 0-degree modulator, right leg on the 180-degree one.
        for (int j = 0; j < n; ++j) {
            const double offset = double(j) / (2.0 * n);
            gates.push_back({j, 0, 0.0, offset, ComparatorBand{}});
            gates.push_back({j, 1, pi, offset, ComparatorBand{}});
        }
    }
    return gates;
}

SwitchingPattern combine_patterns(const SwitchingPattern& a, int wa, const SwitchingPattern& b,
                                  int wb) {
    SwitchingPattern out;
    out.period = a.period;
    out.initial_level = wa * a.initial_level + wb * b.initial_level;
    out.events.reserve(a.events.size() + b.events.size());
    int level_a = a.initial_level;
    int level_b = b.initial_level;
    std::size_t ia = 0, ib = 0;
    while (ia < a.events.size() || ib < b.events.size()) {
        const double ta = ia < a.events.size() ? a.events[ia].t : out.period + 1.0;
        const double tb = ib < b.events.size() ? b.events[ib].t : out.period + 1.0;
        double t;
        if (ta <= tb) {
            t = ta;
            level_a = a.events[ia++].level;
            if (tb == ta) level_b = b.events[ib++].level;
        } else {
            t = tb;
            level_b = b.events[ib++].level;
        }
        const int level = wa * level_a + wb * level_b;
        if (!out.events.empty() && out.events.back().t == t) {
            // Coincident steps merge; drop the event if they cancelled.
            out.events.back().level = level;
            const int before = out.events.size() >= 2 ? out.events[out.events.size() - 2].level
                                                      : out.initial_level;
            if (level == before) out.events.pop_back();
        } else {
            const int current = out.events.empty() ? out.initial_level : out.events.back().level;
            if (level != current) out.events.push_back({t, level});
        }
    }
    return out;
}

double mean_level(const SwitchingPattern& pattern) {
    if (pattern.period <= 0.0) return pattern.initial_level;
    double area = 0.0;
    double t_prev = 0.0;
    int level = pattern.initial_level;
    for (const auto& e : pattern.events) {
        area += level * (e.t - t_prev);
        t_prev = e.t;
        level = e.level;
    }
    area += level * (pattern.period - t_prev);
    return area / pattern.period;
}

namespace {

/// Global carrier rotation for the FM carrier, in cycles. The carrier gains
/// exactly m_bar/4 cycles up to the window entry, so without correction a cell
/// carrier can freeze on a triangle vertex and leave that cell saturated
/// through the whole silenced window. Centering the N frozen phases on a
/// mid-slope point keeps every cell clamping properly.
double fmtc_freeze_centering(int m_bar, int cells) {
    const double quarter = 0.25 * (m_bar % 4);
    double delta = 0.25 - (cells - 1) / (4.0 * cells) - quarter;
    return delta - 0.5 * std::floor(delta / 0.5);
}

}  // namespace

PhaseWaveform synthesize_phase(const StrategyConfig& strategy, const ChbTopology& topo,
                               double mod_phase) {
    validate(strategy, topo);
    PhaseWaveform phase;
    phase.topology = topo;
    phase.volts_per_level = topo.vdc_per_cell;
    phase.fundamental_hz = strategy.modulating.f_fund;

    const double rotation =
        strategy.carrier.kind == CarrierKind::fmtc_truncated
            ? fmtc_freeze_centering(strategy.carrier.m_bar, topo.cells_per_phase)
            : 0.0;
    const auto gates = gate_assignments(strategy.kind, topo);
    phase.cell_patterns.reserve(topo.cells_per_phase);
    for (int cell = 0; cell < topo.cells_per_phase; ++cell) {
        const GateAssignment* left = nullptr;
        const GateAssignment* right = nullptr;
        for (const auto& g : gates) {
            if (g.cell != cell) continue;
            (g.leg == 0 ? left : right) = &g;
        }
        const SwitchingPattern left_gate =
            comparator_events(strategy.modulating, strategy.carrier,
                              mod_phase + left->modulator_phase, strategy.latch_truncation,
                              rotation + left->carrier_offset_cycles, left->band);
        const SwitchingPattern right_gate =
            comparator_events(strategy.modulating, strategy.carrier,
                              mod_phase + right->modulator_phase, strategy.latch_truncation,
                              rotation + right->carrier_offset_cycles, right->band);
        phase.gate_event_count += long(left_gate.event_count() + right_gate.event_count());
        phase.cell_patterns.push_back(combine_patterns(left_gate, 1, right_gate, -1));
    }

    SwitchingPattern composite = phase.cell_patterns.front();
    for (std::size_t i = 1; i < phase.cell_patterns.size(); ++i)
        composite = combine_patterns(composite, 1, phase.cell_patterns[i], 1);
    phase.composite = std::move(composite);
    return phase;
}

LineWaveform synthesize_line(const StrategyConfig& strategy, const ChbTopology& topo) {
    if (topo.phases < 2) throw config_error("line synthesis needs at least 2 phases");
    const PhaseWaveform a = synthesize_phase(strategy, topo, 0.0);
    const PhaseWaveform b = synthesize_phase(strategy, topo, -2.0 * pi / 3.0);
    LineWaveform line;
    line.pattern = combine_patterns(a.composite, 1, b.composite, -1);
    line.volts_per_level = topo.vdc_per_cell;
    line.fundamental_hz = strategy.modulating.f_fund;
    line.gate_event_count = a.gate_event_count + b.gate_event_count;
    return line;
}

}  // namespace chbsim
