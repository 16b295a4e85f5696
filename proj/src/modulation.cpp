#include "chbsim/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chbsim/errors.hpp"

namespace chbsim {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

/// Primitive of (cos^2 u - K): G(u) = (1/2 - K) u + sin(2u)/4.
double clamped_primitive(double u, double k) { return (0.5 - k) * u + 0.25 * std::sin(2.0 * u); }

/// Integral of max(cos^2 u - K, 0) from 0 to x, any real x.
/// The integrand is pi-periodic and active on [0, th0] and [pi - th0, pi).
double clamped_integral(double x, double k, double th0) {
    const double g_th0 = clamped_primitive(th0, k);
    const double half = 2.0 * g_th0;  // value over one half period [0, pi]
    double n = std::floor(x / pi);
    double r = x - n * pi;
    double part;
    if (r <= th0) {
        part = clamped_primitive(r, k);
    } else if (r < pi - th0) {
        part = g_th0;
    } else {
        part = g_th0 + clamped_primitive(r, k) - clamped_primitive(pi - th0, k);
    }
    return n * half + part;
}

double theta0_of(double k) { return std::acos(std::sqrt(k)); }

}  // namespace

double ModulatingSpec::evaluate(double t) const {
    const double x = omega() * t + phase_offset;
    double value = 0.0;
    for (const auto& h : harmonics) value += h.coeff * std::sin(h.order * x);
    return amplitude * value;
}

double ModulatingSpec::max_harmonic_order() const {
    double max_order = 1.0;
    for (const auto& h : harmonics) max_order = std::max(max_order, double(h.order));
    return max_order;
}

void validate(const ModulatingSpec& spec) {
    if (!(spec.f_fund > 0.0)) throw config_error("modulating.f_hz must be > 0");
    if (!(spec.amplitude > 0.0) || spec.amplitude > 1.2)
        throw config_error("modulating.amplitude must be in (0, 1.2]");
    if (spec.harmonics.empty()) throw config_error("modulating.harmonics must not be empty");
    for (const auto& h : spec.harmonics) {
        if (h.order < 1 || h.order % 2 == 0) {
            std::ostringstream msg;
            msg << "modulating harmonic order " << h.order
                << " invalid: orders must be odd positive (half-wave symmetry)";
            throw config_error(msg.str());
        }
    }
}

std::vector<HarmonicComponent> third_harmonic_injection() {
    return {{1, 1.1547}, {3, 0.1925}};
}

CarrierSpec make_fmtc_carrier(int m_bar, double truncation_k, double phase_offset_cycles) {
    CarrierSpec spec;
    spec.kind = CarrierKind::fmtc_truncated;
    spec.m_bar = m_bar;
    spec.truncation_k = truncation_k;
    spec.amplitude_param = solve_amplitude_parameter(m_bar, truncation_k);
    spec.phase_offset_cycles = phase_offset_cycles;
    return spec;
}

CarrierSpec make_fixed_carrier(double f_carrier, int m_bar, double phase_offset_cycles) {
    CarrierSpec spec;
    spec.kind = CarrierKind::triangular_fixed;
    spec.f_carrier = f_carrier;
    spec.m_bar = m_bar;
    spec.truncation_k = 0.0;
    spec.phase_offset_cycles = phase_offset_cycles;
    return spec;
}

void validate(const CarrierSpec& spec) {
    if (spec.m_bar < 1) throw config_error("carrier.m_bar must be >= 1");
    if (spec.kind == CarrierKind::fmtc_truncated) {
        if (spec.truncation_k < 0.0 || spec.truncation_k >= 1.0)
            throw config_error("carrier.k must be in [0, 1)");
        const double solved = solve_amplitude_parameter(spec.m_bar, spec.truncation_k);
        if (std::abs(spec.amplitude_param - solved) > 1e-9 * solved)
            throw config_error("carrier.amplitude_param inconsistent with (m_bar, k)");
    } else {
        if (!(spec.f_carrier > 0.0)) throw config_error("carrier.f_carrier_hz must be > 0");
    }
    if (spec.phase_offset_cycles < 0.0 || spec.phase_offset_cycles >= 1.0)
        throw config_error("carrier.phase_offset_cycles must be in [0, 1)");
}

double solve_amplitude_parameter(int m_bar, double truncation_k) {
    if (m_bar < 1) throw config_error("m_bar must be >= 1");
    if (truncation_k < 0.0)
        throw config_error("truncation level K must be >= 0");
    if (truncation_k >= 1.0)
        throw config_error("truncation level K must be < 1 (K = 1 implies infinite frequency)");
    const double th0 = theta0_of(truncation_k);
    const double denom = 2.0 * clamped_primitive(th0, truncation_k);
    return m_bar * pi / denom;
}

double instantaneous_pulsation(const CarrierSpec& carrier, const ModulatingSpec& mod, double t) {
    if (carrier.kind != CarrierKind::fmtc_truncated)
        throw config_error("instantaneous pulsation is defined for the FMTC carrier only");
    const double x = mod.omega() * t + mod.phase_offset;
    const double c = std::cos(x);
    const double raw = carrier.amplitude_param * mod.omega() * (c * c - carrier.truncation_k);
    return std::max(raw, 0.0);
}

TruncationWindow truncation_instants(double truncation_k, double f_fund) {
    if (!(f_fund > 0.0)) throw config_error("f_fund must be > 0");
    if (truncation_k < 0.0 || truncation_k >= 1.0)
        throw config_error("truncation level K must be in [0, 1)");
    const double period = 1.0 / f_fund;
    TruncationWindow window;
    if (truncation_k == 0.0) {
        // Zero-measure nulls at T/4 and 3T/4.
        window.degenerate = true;
        window.t1 = 0.25 * period;
        window.t2 = 0.25 * period;
        window.t3 = 0.75 * period;
        window.t4 = 0.75 * period;
        return window;
    }
    const double omega = 2.0 * pi * f_fund;
    window.t1 = theta0_of(truncation_k) / omega;
    window.t2 = 0.5 * period - window.t1;
    window.t3 = 0.5 * period + window.t1;
    window.t4 = period - window.t1;
    return window;
}

double carrier_phase(const CarrierSpec& carrier, const ModulatingSpec& mod, double t) {
    if (carrier.kind == CarrierKind::triangular_fixed)
        return carrier.phase_offset_cycles + carrier.f_carrier * t;
    // Accumulated in the modulator frame, so phase-offset copies of the
    // modulator see exact time-shifted copies of the carrier. For a zero
    // offset this is the plain integral of the pulsation from t = 0.
    const double k = carrier.truncation_k;
    const double th0 = theta0_of(k);
    const double x = mod.omega() * t + mod.phase_offset;
    const double cycles =
        carrier.amplitude_param / (2.0 * pi) * clamped_integral(x, k, th0);
    return carrier.phase_offset_cycles + cycles;
}

double triangle_wave(double phase_cycles) {
    double frac = phase_cycles - std::floor(phase_cycles);
    return frac < 0.5 ? 1.0 - 4.0 * frac : 4.0 * frac - 3.0;
}

double carrier_value(const CarrierSpec& carrier, const ModulatingSpec& mod, double t) {
    return triangle_wave(carrier_phase(carrier, mod, t));
}

int SwitchingPattern::level_at(double t) const {
    if (period <= 0.0) return initial_level;
    double folded = std::fmod(t, period);
    if (folded < 0.0) folded += period;
    // Last event with instant <= folded wins; the sample at an event instant
    // sees the post-event level.
    auto it = std::upper_bound(events.begin(), events.end(), folded,
                               [](double value, const SwitchingEvent& e) { return value < e.t; });
    if (it == events.begin()) return initial_level;
    return std::prev(it)->level;
}

namespace {

struct Comparison {
    const ModulatingSpec* mod;
    CarrierSpec carrier;
    ComparatorBand band;

    double operator()(double t) const {
        return mod->evaluate(t) -
               (band.center + band.half_span * carrier_value(carrier, *mod, t));
    }
};

/// Bisection on a sign bracket, narrowed to ~1e-15 s.
double bisect_crossing(const Comparison& d, double lo, double hi, int sign_lo) {
    for (int i = 0; i < 120 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (sign_of(d(mid)) == sign_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Segment {
    double begin;
    double end;
};

/// Active (non-silenced) carrier intervals within [0, period], in time order.
std::vector<Segment> active_segments(const CarrierSpec& carrier, const ModulatingSpec& mod) {
    const double period = mod.period();
    const double k = carrier.truncation_k;
    if (carrier.kind != CarrierKind::fmtc_truncated || k <= 0.0) return {{0.0, period}};
    const double omega = mod.omega();
    const double th0 = theta0_of(k);
    // Boundaries where cos^2(w t + phi) = K: x = j*pi +- th0.
    std::vector<double> cuts{0.0, period};
    const double x0 = mod.phase_offset;
    const int j_lo = int(std::floor(x0 / pi)) - 1;
    const int j_hi = int(std::ceil((x0 + 2.0 * pi) / pi)) + 1;
    for (int j = j_lo; j <= j_hi; ++j) {
        for (double xb : {j * pi - th0, j * pi + th0}) {
            const double t = (xb - x0) / omega;
            if (t > 0.0 && t < period) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Segment> segments;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-15) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double c = std::cos(omega * mid + x0);
        if (c * c > k) {
            if (!segments.empty() && std::abs(segments.back().end - cuts[i]) < 1e-15)
                segments.back().end = cuts[i + 1];
            else
                segments.push_back({cuts[i], cuts[i + 1]});
        }
    }
    return segments;
}

/// Carrier triangle vertex instants (phase at half-integer cycles) within
/// [0, period], used as scan brackets: between consecutive vertices the
/// carrier is monotone.
std::vector<double> vertex_instants(const CarrierSpec& carrier, const ModulatingSpec& mod) {
    const double period = mod.period();
    std::vector<double> instants;
    if (carrier.kind == CarrierKind::triangular_fixed) {
        const double f = carrier.f_carrier;
        const double first = std::ceil(2.0 * carrier_phase(carrier, mod, 0.0)) / 2.0;
        for (double v = first;; v += 0.5) {
            const double t = (v - carrier.phase_offset_cycles) / f;
            if (t >= period) break;
            if (t > 0.0) instants.push_back(t);
        }
        return instants;
    }
    const double begin = carrier_phase(carrier, mod, 0.0);
    const double end = carrier_phase(carrier, mod, period);
    for (double v = std::ceil(2.0 * begin) / 2.0; v < end; v += 0.5) {
        if (v <= begin) continue;
        // Invert the monotone phase by bisection.
        double lo = 0.0, hi = period;
        for (int i = 0; i < 100 && hi - lo > 1e-14; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (carrier_phase(carrier, mod, mid) < v)
                lo = mid;
            else
                hi = mid;
        }
        const double t = 0.5 * (lo + hi);
        if (t > 0.0 && t < period) instants.push_back(t);
    }
    return instants;
}

}  // namespace

SwitchingPattern comparator_events(const ModulatingSpec& mod, const CarrierSpec& carrier,
                                   double mod_phase, bool latch_truncation,
                                   double extra_carrier_offset_cycles, const ComparatorBand& band) {
    ModulatingSpec eff_mod = mod;
    eff_mod.phase_offset += mod_phase;
    CarrierSpec eff_carrier = carrier;
    eff_carrier.phase_offset_cycles += extra_carrier_offset_cycles;

    const double period = eff_mod.period();
    const Comparison d{&eff_mod, eff_carrier, band};

    const bool truncated =
        carrier.kind == CarrierKind::fmtc_truncated && carrier.truncation_k > 0.0;
    std::vector<Segment> segments = latch_truncation && truncated
                                        ? active_segments(eff_carrier, eff_mod)
                                        : std::vector<Segment>{{0.0, period}};
    if (segments.empty()) throw numeric_error("carrier silenced over the whole period");

    // Scan boundaries: segment edges plus triangle vertices, so every scanned
    // stretch has a monotone carrier and crossings are separated by modulator
    // timescales.
    std::vector<double> vertices = vertex_instants(eff_carrier, eff_mod);
    const double mod_step = period / (512.0 * eff_mod.max_harmonic_order());

    SwitchingPattern pattern;
    pattern.period = period;

    // Gate state entering t = 0. If t = 0 is latched inside a window the state
    // carries over from the end of the last active segment (periodic steady
    // state). An exact tie at the period boundary takes the level leading into
    // it, so the flip shows up as an event at t ~ 0 instead of vanishing.
    const double eps = 1e-10 * period;
    int state;
    if (segments.front().begin > 0.0) {
        state = sign_of(d(segments.back().end - eps));
    } else {
        state = sign_of(d(0.0));
        if (state == 0) state = sign_of(d(period - eps));
        if (state == 0) state = sign_of(d(period - 16.0 * eps));
    }
    if (state == 0) throw numeric_error("comparator degenerate near t = 0");
    pattern.initial_level = state > 0 ? 1 : 0;

    auto emit = [&](double t, int sign) {
        if (t >= period) return;
        if (!pattern.events.empty() && t <= pattern.events.back().t) return;
        pattern.events.push_back({t, sign > 0 ? 1 : 0});
    };

    for (const Segment& segment : segments) {
        // Resume check at a window exit: the held state may disagree with the
        // live comparison once the carrier unfreezes.
        if (segment.begin > 0.0 && latch_truncation && truncated) {
            const int s = sign_of(d(segment.begin + eps));
            if (s != 0 && s != state) {
                emit(segment.begin, s);
                state = s;
            }
        }
        // Scan points: vertices inside the segment plus a uniform fill.
        std::vector<double> points;
        points.push_back(segment.begin);
        for (double v : vertices)
            if (v > segment.begin && v < segment.end) points.push_back(v);
        points.push_back(segment.end);
        std::sort(points.begin(), points.end());
        std::vector<double> grid;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            grid.push_back(points[i]);
            const double span = points[i + 1] - points[i];
            const int extra = std::max(15, int(std::ceil(span / mod_step)));
            for (int j = 1; j < extra; ++j) grid.push_back(points[i] + span * j / extra);
        }
        grid.push_back(segment.end);

        double last_t = grid.front();
        int zero_run = 0;
        for (double t : grid) {
            const int s = sign_of(d(t));
            if (s == 0) {
                if (++zero_run > 4)
                    throw numeric_error("comparator has no sign near t = " + std::to_string(t));
                continue;
            }
            zero_run = 0;
            if (s != state) {
                const double root = bisect_crossing(d, last_t, t, state);
                emit(root, s);
                state = s;
            }
            last_t = t;
        }
    }

    // A crossing can sit closer to the period boundary than one representable
    // step; the pattern is periodic, so reconcile the wrap explicitly.
    const int final_level =
        pattern.events.empty() ? pattern.initial_level : pattern.events.back().level;
    if (final_level != pattern.initial_level) {
        const double wrap = std::nextafter(period, 0.0);
        if (pattern.events.empty() || pattern.events.back().t < wrap)
            pattern.events.push_back({wrap, pattern.initial_level});
        else
            pattern.events.pop_back();
    }
    return pattern;
}

}  // namespace chbsim
