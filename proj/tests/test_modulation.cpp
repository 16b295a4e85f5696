#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "chbsim/errors.hpp"
#include "chbsim/modulation.hpp"

using namespace chbsim;
using Catch::Approx;

namespace {

/// Adaptive Simpson quadrature, independent of the closed forms under test.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    if (b <= a) return 0.0;
    // Composite panels keep narrow active humps from hiding between the
    // initial probe points of the adaptive rule.
    const int panels = 128;
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h;
        const double hi = i + 1 == panels ? b : lo + h;
        sum += adaptive_simpson(f, lo, hi, f(lo), f(0.5 * (lo + hi)), f(hi), tol / panels, 40);
    }
    return sum;
}

/// Quadrature oracle for the amplitude parameter: the A_M that makes the mean
/// clamped pulsation profile equal m_bar cycles per period.
double amplitude_param_oracle(int m_bar, double k) {
    auto profile = [k](double x) {
        const double c = std::cos(x);
        return std::max(c * c - k, 0.0);
    };
    const double mean = integrate(profile, 0.0, 2.0 * pi) / (2.0 * pi);
    return m_bar / mean;
}

ModulatingSpec sine_mod(double f = 50.0, double amplitude = 1.0) {
    ModulatingSpec mod;
    mod.f_fund = f;
    mod.amplitude = amplitude;
    return mod;
}

ModulatingSpec injected_mod(double f = 50.0, double amplitude = 1.0) {
    ModulatingSpec mod;
    mod.f_fund = f;
    mod.amplitude = amplitude;
    mod.harmonics = third_harmonic_injection();
    return mod;
}

}  // namespace

TEST_CASE("amplitude parameter reference values") {
    CHECK(solve_amplitude_parameter(11, 0.5) == Approx(22.0 * pi).epsilon(1e-12));
    CHECK(solve_amplitude_parameter(15, 0.5) == Approx(30.0 * pi).epsilon(1e-12));
    CHECK(solve_amplitude_parameter(15, 0.55) == Approx(111.15125).epsilon(1e-4));
    CHECK(solve_amplitude_parameter(15, 0.3) == Approx(55.13370).epsilon(1e-3));
    // K = 0: theta0 = pi/2 makes the mean profile 1/2, so A_M = 2 m_bar.
    CHECK(solve_amplitude_parameter(7, 0.0) == Approx(14.0).epsilon(1e-12));
    CHECK(solve_amplitude_parameter(7, 0.0) == Approx(amplitude_param_oracle(7, 0.0)).epsilon(1e-9));
}

TEST_CASE("amplitude parameter rejects bad inputs") {
    CHECK_THROWS_AS(solve_amplitude_parameter(15, 1.0), config_error);
    CHECK_THROWS_AS(solve_amplitude_parameter(15, 1.2), config_error);
    CHECK_THROWS_AS(solve_amplitude_parameter(15, -0.1), config_error);
    CHECK_THROWS_AS(solve_amplitude_parameter(0, 0.5), config_error);
}

TEST_CASE("carrier spec ties the amplitude parameter to (m_bar, K)") {
    CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
    CHECK_NOTHROW(validate(carrier));
    carrier.amplitude_param *= 1.0 + 1e-6;
    CHECK_THROWS_AS(validate(carrier), config_error);
    CHECK_THROWS_AS(validate(make_fixed_carrier(0.0, 15)), config_error);
}

TEST_CASE("amplitude parameter matches quadrature across the K grid") {
    for (int i = 1; i <= 19; ++i) {
        const double k = 0.05 * i;
        const double closed = solve_amplitude_parameter(15, k);
        const double oracle = amplitude_param_oracle(15, k);
        INFO("K = " << k);
        CHECK(closed == Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("instantaneous pulsation") {
    const ModulatingSpec mod = sine_mod();
    const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);

    SECTION("peak value at t = 0") {
        const double w = instantaneous_pulsation(carrier, mod, 0.0);
        CHECK(w == Approx(carrier.amplitude_param * 0.45 * mod.omega()).epsilon(1e-12));
        CHECK(w == Approx(50.01806 * mod.omega()).epsilon(1e-4));
        CHECK(w == Approx(15713.6).epsilon(1e-3));
    }
    SECTION("clamped to zero at the quarter period") {
        CHECK(instantaneous_pulsation(carrier, mod, mod.period() / 4.0) == 0.0);
    }
    SECTION("direct evaluation with a given amplitude parameter") {
        CarrierSpec c = make_fmtc_carrier(11, 0.2);
        c.amplitude_param = 32.4700;
        CHECK(instantaneous_pulsation(c, mod, 0.0) ==
              Approx(0.8 * 32.47 * mod.omega()).epsilon(1e-12));
    }
    SECTION("non-negative and T/2 periodic") {
        std::mt19937 rng(123);
        std::uniform_real_distribution<double> dist(0.0, mod.period());
        for (int i = 0; i < 200; ++i) {
            const double t = dist(rng);
            const double w = instantaneous_pulsation(carrier, mod, t);
            CHECK(w >= 0.0);
            CHECK(instantaneous_pulsation(carrier, mod, t + 0.5 * mod.period()) ==
                  Approx(w).margin(1e-6));
        }
    }
    SECTION("fixed carrier rejected") {
        CHECK_THROWS_AS(instantaneous_pulsation(make_fixed_carrier(750.0, 15), mod, 0.0),
                        config_error);
    }
}

TEST_CASE("truncation instants") {
    SECTION("quarter-symmetric values at K = 0.5") {
        const TruncationWindow w = truncation_instants(0.5, 50.0);
        CHECK(w.t1 == Approx(2.5e-3).epsilon(1e-12));
        CHECK(w.t2 == Approx(7.5e-3).epsilon(1e-12));
        CHECK(w.t3 == Approx(12.5e-3).epsilon(1e-12));
        CHECK(w.t4 == Approx(17.5e-3).epsilon(1e-12));
        CHECK_FALSE(w.degenerate);
    }
    SECTION("reference t1 values") {
        CHECK(truncation_instants(0.2, 50.0).t1 * 1e3 == Approx(3.5242).margin(1e-3));
        CHECK(truncation_instants(0.4, 50.0).t1 * 1e3 == Approx(2.8207).margin(1e-3));
    }
    SECTION("K -> 0 limit approaches the quarter period") {
        CHECK(truncation_instants(1e-12, 50.0).t1 == Approx(5e-3).epsilon(1e-6));
        const TruncationWindow w = truncation_instants(0.0, 50.0);
        CHECK(w.degenerate);
        CHECK(w.t1 == Approx(5e-3));
    }
    SECTION("symmetry identities over a K grid") {
        for (double k = 0.05; k < 1.0; k += 0.05) {
            const TruncationWindow w = truncation_instants(k, 50.0);
            const double period = 0.02;
            CHECK(w.t2 == Approx(0.5 * period - w.t1).margin(1e-12));
            CHECK(w.t3 == Approx(0.5 * period + w.t1).margin(1e-12));
            CHECK(w.t4 == Approx(period - w.t1).margin(1e-12));
            CHECK(w.t1 > 0.0);
            CHECK(w.t4 < period);
        }
    }
    SECTION("rejects K outside [0, 1)") {
        CHECK_THROWS_AS(truncation_instants(1.0, 50.0), config_error);
        CHECK_THROWS_AS(truncation_instants(-0.2, 50.0), config_error);
    }
}

TEST_CASE("carrier phase closed form") {
    const ModulatingSpec mod = sine_mod();

    SECTION("gains exactly m_bar cycles per period") {
        for (int m_bar : {3, 9, 15, 33, 63}) {
            for (double k : {0.0, 0.25, 0.5, 0.75, 0.9}) {
                const CarrierSpec carrier = make_fmtc_carrier(m_bar, k);
                const double gain =
                    carrier_phase(carrier, mod, mod.period()) - carrier_phase(carrier, mod, 0.0);
                INFO("m_bar = " << m_bar << " K = " << k);
                CHECK(gain == Approx(double(m_bar)).margin(1e-9));
            }
        }
    }
    SECTION("half period gains m_bar / 2") {
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
        CHECK(carrier_phase(carrier, mod, 0.5 * mod.period()) - carrier_phase(carrier, mod, 0.0) ==
              Approx(7.5).margin(1e-9));
    }
    SECTION("constant inside the truncation window") {
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
        const TruncationWindow w = truncation_instants(0.55, 50.0);
        const double at_t1 = carrier_phase(carrier, mod, w.t1);
        for (int i = 1; i < 20; ++i) {
            const double t = w.t1 + (w.t2 - w.t1) * i / 20.0;
            CHECK(carrier_phase(carrier, mod, t) == Approx(at_t1).margin(1e-12));
        }
    }
    SECTION("matches quadrature of the pulsation at random instants") {
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
        auto rate = [&](double t) {
            return instantaneous_pulsation(carrier, mod, t) / (2.0 * pi);
        };
        std::mt19937 rng(20240915);
        std::uniform_real_distribution<double> dist(0.0, mod.period());
        for (int i = 0; i < 1000; ++i) {
            const double t = dist(rng);
            const double closed = carrier_phase(carrier, mod, t) - carrier.phase_offset_cycles;
            const double reference = integrate(rate, 0.0, t, 1e-14);
            CHECK(closed == Approx(reference).margin(1e-9));
        }
    }
    SECTION("honors the phase offset") {
        CarrierSpec carrier = make_fmtc_carrier(15, 0.55, 0.25);
        CHECK(carrier_phase(carrier, mod, 0.0) == Approx(0.25).margin(1e-15));
    }
    SECTION("non-decreasing") {
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.3);
        double prev = carrier_phase(carrier, mod, 0.0);
        for (int i = 1; i <= 2000; ++i) {
            const double t = mod.period() * i / 2000.0;
            const double phase = carrier_phase(carrier, mod, t);
            CHECK(phase >= prev - 1e-12);
            prev = phase;
        }
    }
}

TEST_CASE("triangle wave and carrier value") {
    CHECK(triangle_wave(0.0) == Approx(1.0));
    CHECK(triangle_wave(0.25) == Approx(0.0).margin(1e-15));
    CHECK(triangle_wave(0.5) == Approx(-1.0));
    CHECK(triangle_wave(0.75) == Approx(0.0).margin(1e-15));

    SECTION("half-cycle antisymmetry") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        for (int i = 0; i < 500; ++i) {
            const double phase = dist(rng);
            CHECK(triangle_wave(phase + 0.5) == Approx(-triangle_wave(phase)).margin(1e-12));
        }
    }
    SECTION("frozen inside the truncation window") {
        const ModulatingSpec mod = sine_mod();
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
        const TruncationWindow w = truncation_instants(0.55, 50.0);
        const double held = carrier_value(carrier, mod, w.t1);
        for (int i = 0; i <= 50; ++i) {
            const double t = w.t1 + (w.t2 - w.t1) * i / 50.0;
            CHECK(carrier_value(carrier, mod, t) == Approx(held).margin(1e-9));
        }
    }
}

TEST_CASE("modulating wave") {
    SECTION("half-wave symmetry by sampling") {
        for (const ModulatingSpec& mod : {sine_mod(), injected_mod(60.0, 0.9)}) {
            for (int i = 0; i < 400; ++i) {
                const double t = mod.period() * i / 400.0;
                CHECK(mod.evaluate(t + 0.5 * mod.period()) == Approx(-mod.evaluate(t)).margin(1e-12));
            }
        }
    }
    SECTION("injected wave peaks at one for unit amplitude") {
        const ModulatingSpec mod = injected_mod();
        double peak = 0.0;
        for (int i = 0; i < 20000; ++i)
            peak = std::max(peak, std::abs(mod.evaluate(mod.period() * i / 20000.0)));
        CHECK(peak == Approx(1.0).margin(2e-4));
    }
    SECTION("validation") {
        ModulatingSpec mod = sine_mod();
        CHECK_NOTHROW(validate(mod));
        mod.harmonics = {{2, 0.5}};
        CHECK_THROWS_AS(validate(mod), config_error);
        mod = sine_mod();
        mod.amplitude = 1.5;
        CHECK_THROWS_AS(validate(mod), config_error);
        mod = sine_mod();
        mod.f_fund = 0.0;
        CHECK_THROWS_AS(validate(mod), config_error);
    }
}

TEST_CASE("comparator events") {
    SECTION("fixed-carrier sine PWM has one crossing pair per triangle cycle") {
        const ModulatingSpec mod = sine_mod();
        const CarrierSpec carrier = make_fixed_carrier(750.0, 15);
        const SwitchingPattern gates = comparator_events(mod, carrier, 0.0, false);
        CHECK(gates.event_count() == 30);

        // Brute-force oracle: count sign changes on a dense grid.
        int changes = 0;
        const int n = 400000;
        auto diff = [&](double t) { return mod.evaluate(t) - carrier_value(carrier, mod, t); };
        double prev = diff(0.0);
        for (int i = 1; i <= n; ++i) {
            const double d = diff(mod.period() * i / n);
            if (prev != 0.0 && d != 0.0 && (prev > 0.0) != (d > 0.0)) ++changes;
            if (d != 0.0) prev = d;
        }
        CHECK(changes == 30);
    }
    SECTION("events satisfy the crossing equation") {
        const ModulatingSpec mod = injected_mod();
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
        const SwitchingPattern gates = comparator_events(mod, carrier, 0.0, true);
        REQUIRE(gates.event_count() > 0);
        double prev = -1.0;
        for (const auto& e : gates.events) {
            CHECK(e.t > prev);
            CHECK(e.t >= 0.0);
            CHECK(e.t < mod.period());
            prev = e.t;
            const double residual =
                std::abs(mod.evaluate(e.t) - carrier_value(carrier, mod, e.t));
            CHECK(residual < 1e-9);
        }
    }
    SECTION("no events inside the truncation windows") {
        const ModulatingSpec mod = injected_mod();
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.55);
        const SwitchingPattern gates = comparator_events(mod, carrier, 0.0, true);
        // The window quoted from the reference point: (2.3426, 7.6574) ms.
        for (const auto& e : gates.events) {
            const bool inside_first = e.t > 2.3426e-3 && e.t < 7.6574e-3;
            const bool inside_second = e.t > 12.3426e-3 && e.t < 17.6574e-3;
            CHECK_FALSE(inside_first);
            CHECK_FALSE(inside_second);
        }
    }
    SECTION("zero modulator toggles once per triangle half-cycle") {
        ModulatingSpec mod = sine_mod();
        mod.harmonics = {{1, 0.0}};
        const CarrierSpec carrier = make_fixed_carrier(750.0, 15);
        const SwitchingPattern gates = comparator_events(mod, carrier, 0.0, false);
        CHECK(gates.event_count() == 30);
    }
    SECTION("latch off with K = 0 matches the K -> 0 limit") {
        const ModulatingSpec mod = injected_mod();
        const SwitchingPattern at_zero =
            comparator_events(mod, make_fmtc_carrier(15, 0.0), 0.0, false);
        const SwitchingPattern near_zero =
            comparator_events(mod, make_fmtc_carrier(15, 1e-9), 0.0, false);
        CHECK(at_zero.event_count() == near_zero.event_count());
        // Pulsation strictly positive away from the isolated nulls.
        const CarrierSpec carrier = make_fmtc_carrier(15, 0.0);
        for (int i = 0; i < 1000; ++i) {
            const double t = mod.period() * (i + 0.5) / 1000.0;
            const double quarter = mod.period() / 4.0;
            if (std::abs(t - quarter) < 1e-6 || std::abs(t - 3 * quarter) < 1e-6) continue;
            CHECK(instantaneous_pulsation(carrier, mod, t) > 0.0);
        }
    }
    SECTION("pattern levels are gate states") {
        const ModulatingSpec mod = sine_mod();
        const CarrierSpec carrier = make_fixed_carrier(750.0, 15);
        const SwitchingPattern gates = comparator_events(mod, carrier, 0.0, false);
        for (const auto& e : gates.events) CHECK((e.level == 0 || e.level == 1));
        int level = gates.initial_level;
        for (const auto& e : gates.events) {
            CHECK(e.level != level);  // every event is a real transition
            level = e.level;
        }
    }
}

TEST_CASE("switching pattern level lookup") {
    SwitchingPattern pattern;
    pattern.period = 1.0;
    pattern.initial_level = 1;
    pattern.events = {{0.25, 0}, {0.5, 2}};
    CHECK(pattern.level_at(0.0) == 1);
    CHECK(pattern.level_at(0.2499) == 1);
    CHECK(pattern.level_at(0.25) == 0);  // post-event level at the instant
    CHECK(pattern.level_at(0.49) == 0);
    CHECK(pattern.level_at(0.75) == 2);
    CHECK(pattern.level_at(1.25) == 0);  // periodic fold
}
