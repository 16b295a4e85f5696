#pragma once

#include <cstddef>
#include <vector>

namespace chbsim {

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// One injected component of the reference wave: (odd order, relative coefficient).
struct HarmonicComponent {
    int order = 1;
    double coeff = 1.0;
};

/// Reference (modulating) wave: fundamental plus injected odd harmonics,
///
///   m(t) = amplitude * sum_k coeff_k * sin(k * (w t + phase_offset)),  w = 2*pi*f_fund.
///
/// The phase offset acts as a time shift of the whole wave, so a three-phase set
/// keeps its injected harmonics aligned per phase. Odd orders preserve half-wave
/// symmetry: m(t + T/2) = -m(t).
struct ModulatingSpec {
    double f_fund = 50.0;     // Hz
    double amplitude = 1.0;   // modulation index m_a
    std::vector<HarmonicComponent> harmonics{{1, 1.0}};
    double phase_offset = 0.0;  // rad

    double omega() const { return 2.0 * pi * f_fund; }
    double period() const { return 1.0 / f_fund; }
    double evaluate(double t) const;
    double max_harmonic_order() const;
};

void validate(const ModulatingSpec& spec);

/// Classical third-harmonic injection set: fundamental 1.1547, third 0.1925.
/// Peaks at 1.0 for amplitude = 1 while extending the linear fundamental range.
std::vector<HarmonicComponent> third_harmonic_injection();

enum class CarrierKind { fmtc_truncated, triangular_fixed };

/// Triangular carrier description. For the frequency-modulated kind the
/// instantaneous pulsation follows
///
///   w_i(t) = max(A_M * w * (cos^2(w t + sync_phase) - K), 0)
///
/// where sync_phase is the phase offset of the modulating wave the carrier is
/// synchronized with. amplitude_param (A_M) is tied to m_bar through
/// solve_amplitude_parameter so the carrier completes exactly m_bar cycles per
/// fundamental period. Fixed carriers run free at f_carrier.
struct CarrierSpec {
    CarrierKind kind = CarrierKind::fmtc_truncated;
    double truncation_k = 0.55;  // K in [0, 1)
    int m_bar = 15;
    double amplitude_param = 0.0;    // A_M
    double phase_offset_cycles = 0.0;  // fraction of one triangle cycle, [0, 1)
    double f_carrier = 0.0;          // Hz, triangular_fixed only
};

CarrierSpec make_fmtc_carrier(int m_bar, double truncation_k, double phase_offset_cycles = 0.0);
CarrierSpec make_fixed_carrier(double f_carrier, int m_bar, double phase_offset_cycles = 0.0);
void validate(const CarrierSpec& spec);

/// Silenced-carrier window boundaries inside one fundamental period.
/// By the symmetry of cos^2: t2 = T/2 - t1, t3 = T/2 + t1, t4 = T - t1.
struct TruncationWindow {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;
    bool degenerate = false;  // K == 0: zero-measure nulls at T/4 and 3T/4
};

struct SwitchingEvent {
    double t;   // s
    int level;  // level in force from t onward
};

/// Exact-event representation of a periodic switched waveform. Events are
/// strictly increasing within [0, period); a sample taken exactly at an event
/// instant sees the post-event level. initial_level holds on [0, first event).
struct SwitchingPattern {
    double period = 0.0;
    int initial_level = 0;
    std::vector<SwitchingEvent> events;

    int level_at(double t) const;
    std::size_t event_count() const { return events.size(); }
};

/// Amplitude parameter A_M such that the clamped pulsation profile averages to
/// m_bar carrier cycles per fundamental period:
///
///   A_M = m_bar * pi / (2 * [(1/2 - K) * th0 + sin(2 th0) / 4]),  th0 = arccos(sqrt(K)).
double solve_amplitude_parameter(int m_bar, double truncation_k);

/// w_i(t) in rad/s; zero inside truncation windows. Requires an FMTC carrier.
double instantaneous_pulsation(const CarrierSpec& carrier, const ModulatingSpec& mod, double t);

TruncationWindow truncation_instants(double truncation_k, double f_fund);

/// Accumulated carrier phase in cycles: phase_offset_cycles + (1/2pi) * int_0^t w_i.
/// Closed form per piece (the integral of cos^2 is elementary); continuous and
/// non-decreasing; gains exactly m_bar cycles per fundamental period when
/// amplitude_param = solve_amplitude_parameter(m_bar, K).
double carrier_phase(const CarrierSpec& carrier, const ModulatingSpec& mod, double t);

/// Unit triangle as a function of phase in cycles: +1 at integer phase,
/// descending first, -1 at half-integer phase.
double triangle_wave(double phase_cycles);

/// Carrier sample at time t. Inside truncation windows the phase is frozen, so
/// the value holds at its last pre-window level.
double carrier_value(const CarrierSpec& carrier, const ModulatingSpec& mod, double t);

/// Affine placement of the carrier seen by one comparator: the carrier spans
/// [center - half_span, center + half_span]. Phase-shifted strategies use the
/// full range; level-shifted strategies use one band per cell leg.
struct ComparatorBand {
    double center = 0.0;
    double half_span = 1.0;
};

/// Exact comparator crossings of (modulating - carrier) over one fundamental
/// period. mod_phase is added to the modulator phase offset and carries the
/// carrier synchronization with it. With latch_truncation set the comparator
/// output is held over (t1,t2) and (t3,t4), so those windows contain no events;
/// if the held state disagrees with the comparison when the carrier resumes,
/// one event is emitted at the window exit. Levels are gate states {0, 1}.
SwitchingPattern comparator_events(const ModulatingSpec& mod, const CarrierSpec& carrier,
                                   double mod_phase, bool latch_truncation,
                                   double extra_carrier_offset_cycles = 0.0,
                                   const ComparatorBand& band = {});

}  // namespace chbsim
