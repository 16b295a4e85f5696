#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "chbsim/errors.hpp"
#include "chbsim/spectrum.hpp"

using namespace chbsim;
using Catch::Approx;

namespace {

SampledWaveform make_wave(std::vector<double> samples, double fundamental = 50.0,
                          int periods = 1) {
    SampledWaveform wave;
    wave.fundamental = fundamental;
    wave.periods_captured = periods;
    wave.sample_rate = fundamental * (double(samples.size()) / periods);
    wave.samples = std::move(samples);
    return wave;
}

SampledWaveform sine_wave(int n, double amplitude = 1.0, double phase = 0.0) {
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) samples[i] = amplitude * std::sin(2.0 * pi * i / n + phase);
    return make_wave(std::move(samples));
}

SampledWaveform square_wave(int n, double amplitude = 1.0) {
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) samples[i] = i < n / 2 ? amplitude : -amplitude;
    return make_wave(std::move(samples));
}

}  // namespace

TEST_CASE("sample_pattern") {
    SwitchingPattern pattern;
    pattern.period = 0.02;
    pattern.initial_level = 1;

    SECTION("constant level") {
        const SampledWaveform wave = sample_pattern(pattern, 75.0, 50.0, 4096);
        REQUIRE(wave.samples.size() == 4096);
        for (double s : wave.samples) CHECK(s == 75.0);
        CHECK(wave.sample_rate == Approx(4096 * 50.0));
    }
    SECTION("half-period square split") {
        pattern.events = {{0.01, -1}};
        const SampledWaveform wave = sample_pattern(pattern, 1.0, 50.0, 4096);
        int positive = 0, negative = 0;
        for (double s : wave.samples) (s > 0 ? positive : negative)++;
        CHECK(positive == 2048);
        CHECK(negative == 2048);
    }
    SECTION("event on a sample instant takes the post-event level") {
        pattern.events = {{0.01, -1}};
        const SampledWaveform wave = sample_pattern(pattern, 1.0, 50.0, 4096);
        CHECK(wave.samples[2048] == -1.0);  // t = 0.01 exactly
        CHECK(wave.samples[2047] == 1.0);
    }
    SECTION("rejects bad sampling parameters") {
        CHECK_THROWS_AS(sample_pattern(pattern, 1.0, 50.0, 1000), config_error);
        CHECK_THROWS_AS(sample_pattern(pattern, 1.0, 50.0, 2048), config_error);
        CHECK_THROWS_AS(sample_pattern(pattern, 1.0, 50.0, 4096, 0), config_error);
    }
    SECTION("multiple periods repeat the pattern") {
        pattern.events = {{0.005, 0}};
        const SampledWaveform wave = sample_pattern(pattern, 1.0, 50.0, 4096, 3);
        REQUIRE(wave.samples.size() == 3 * 4096);
        for (int i = 0; i < 4096; ++i) {
            CHECK(wave.samples[i] == wave.samples[i + 4096]);
            CHECK(wave.samples[i] == wave.samples[i + 2 * 4096]);
        }
        CHECK(wave.samples_per_period() == 4096);
    }
}

TEST_CASE("spectrum of elementary signals") {
    SECTION("unit sine concentrates at order 1") {
        const HarmonicTable table = spectrum(sine_wave(8192), 50);
        CHECK(table.at_order(1).amplitude == Approx(1.0).epsilon(1e-12));
        for (const auto& e : table.entries)
            if (e.order > 1) CHECK(e.amplitude < 1e-10);
        CHECK(table.dc < 1e-12);
        CHECK(table.thd_percent < 1e-8);
    }
    SECTION("square wave matches the 4/(pi n) series") {
        const HarmonicTable table = spectrum(square_wave(65536), 50);
        for (const auto& e : table.entries) {
            if (e.order % 2 == 1) {
                CHECK(e.amplitude == Approx(4.0 / (pi * e.order)).epsilon(1e-3));
            } else {
                CHECK(e.amplitude < 1e-9);
            }
        }
    }
    SECTION("linearity: scaling amplitudes leaves percents and THD unchanged") {
        const HarmonicTable base = spectrum(square_wave(8192), 50);
        const HarmonicTable scaled = spectrum(square_wave(8192, 7.5), 50);
        for (std::size_t i = 0; i < base.entries.size(); ++i) {
            CHECK(scaled.entries[i].amplitude ==
                  Approx(7.5 * base.entries[i].amplitude).margin(1e-12));
            CHECK(scaled.entries[i].percent == Approx(base.entries[i].percent).margin(1e-9));
        }
        CHECK(scaled.thd_percent == Approx(base.thd_percent).margin(1e-9));
    }
    SECTION("time shift changes phases, not amplitudes") {
        const HarmonicTable base = spectrum(sine_wave(8192), 20);
        const HarmonicTable shifted = spectrum(sine_wave(8192, 1.0, 1.234), 20);
        for (std::size_t i = 0; i < base.entries.size(); ++i)
            CHECK(shifted.entries[i].amplitude ==
                  Approx(base.entries[i].amplitude).margin(1e-10));
    }
    SECTION("max_order bounds") {
        CHECK_THROWS_AS(spectrum(sine_wave(4096), 2048), config_error);
        CHECK_NOTHROW(spectrum(sine_wave(4096), 2047));
    }
}

TEST_CASE("thd") {
    SECTION("pure sine gives zero") {
        CHECK(spectrum(sine_wave(8192), 50).thd_percent == Approx(0.0).margin(1e-8));
    }
    SECTION("square wave to order 50 matches the truncated series") {
        // 100 * sqrt(sum_{odd n in [3,49]} 1/n^2); the full series gives
        // 100 * sqrt(pi^2/8 - 1) = 48.3426 %.
        double sum = 0.0;
        for (int n = 3; n <= 49; n += 2) sum += 1.0 / (double(n) * n);
        const double expected = 100.0 * std::sqrt(sum);
        const HarmonicTable table = spectrum(square_wave(65536), 50);
        CHECK(table.thd_percent == Approx(expected).epsilon(1e-4));
        CHECK(table.thd_percent < 48.3426);
    }
    SECTION("two-tone table gives the amplitude ratio") {
        HarmonicTable table;
        table.entries = {{1, 1.0, 100.0, 0.0}, {2, 0.0, 0.0, 0.0}, {3, 0.1, 10.0, 0.0}};
        CHECK(thd(table) == Approx(10.0).epsilon(1e-12));
    }
    SECTION("zero fundamental is an error") {
        HarmonicTable table;
        table.entries = {{1, 0.0, 0.0, 0.0}, {2, 1.0, 0.0, 0.0}};
        CHECK_THROWS_AS(thd(table), numeric_error);
    }
}

TEST_CASE("fundamental rms") {
    CHECK(fundamental_rms(spectrum(sine_wave(8192), 10)) ==
          Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(spectrum(sine_wave(8192), 10).fundamental_rms == Approx(0.7071).epsilon(1e-4));
}

TEST_CASE("current spectrum") {
    const HarmonicTable voltage = spectrum(square_wave(8192, 100.0), 50);

    SECTION("resistive load keeps the percent profile") {
        const HarmonicTable current = current_spectrum(voltage, 4.0, 0.0);
        for (std::size_t i = 0; i < voltage.entries.size(); ++i) {
            CHECK(current.entries[i].percent == Approx(voltage.entries[i].percent).margin(1e-9));
            CHECK(current.entries[i].amplitude ==
                  Approx(voltage.entries[i].amplitude / 4.0).margin(1e-12));
        }
    }
    SECTION("inductive load weights percents by 1/n") {
        const HarmonicTable current = current_spectrum(voltage, 0.0, 0.01);
        for (const auto& e : current.entries) {
            const double vp = voltage.at_order(e.order).percent;
            CHECK(e.percent == Approx(vp / e.order).margin(1e-9));
        }
        CHECK(current.dc == 0.0);
    }
    SECTION("R-L attenuation at order 29 matches complex arithmetic") {
        const double r = 3.5, l = 0.01;
        const HarmonicTable current = current_spectrum(voltage, r, l);
        const double w = 2.0 * pi * voltage.fundamental_hz;
        const double z1 = std::abs(std::complex<double>(r, w * l));
        const double z29 = std::abs(std::complex<double>(r, 29.0 * w * l));
        const double expected_ratio = z1 / z29;
        CHECK(expected_ratio == Approx(0.0515847).epsilon(1e-4));
        const double actual = current.at_order(29).percent / voltage.at_order(29).percent;
        CHECK(actual == Approx(expected_ratio).epsilon(1e-9));
    }
    SECTION("dead load rejected") {
        CHECK_THROWS_AS(current_spectrum(voltage, 0.0, 0.0), config_error);
    }
}

TEST_CASE("parseval check") {
    CHECK(parseval_check(square_wave(65536)) < 1e-9);
    CHECK(parseval_check(sine_wave(8192)) < 1e-12);

    SECTION("sampled switching pattern") {
        SwitchingPattern pattern;
        pattern.period = 0.02;
        pattern.initial_level = 1;
        pattern.events = {{0.003, 0}, {0.007, 2}, {0.01, -1}, {0.0171, 0}};
        CHECK(parseval_check(sample_pattern(pattern, 75.0, 50.0, 65536)) < 1e-9);
    }
}

TEST_CASE("doubling the sampling rate is already converged") {
    SwitchingPattern pattern;
    pattern.period = 0.02;
    pattern.initial_level = 0;
    // Irrational-ish event instants so samples straddle levels differently.
    pattern.events = {{0.02 / pi, 1}, {0.011, -1}, {0.0173205, 0}};
    const HarmonicTable coarse = spectrum(sample_pattern(pattern, 1.0, 50.0, 65536), 50);
    const HarmonicTable fine = spectrum(sample_pattern(pattern, 1.0, 50.0, 131072), 50);
    for (std::size_t i = 0; i < coarse.entries.size(); ++i) {
        const double a = coarse.entries[i].amplitude;
        const double b = fine.entries[i].amplitude;
        CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("fft groundwork") {
    SECTION("delta transforms flat") {
        std::vector<std::complex<double>> data(16, 0.0);
        data[0] = 1.0;
        fft_radix2(data);
        for (const auto& bin : data) CHECK(std::abs(bin - std::complex<double>(1.0)) < 1e-12);
    }
    SECTION("matches a direct DFT") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<std::complex<double>> data(64);
        for (auto& x : data) x = {dist(rng), dist(rng)};
        auto reference = data;
        fft_radix2(data);
        for (int k = 0; k < 64; ++k) {
            std::complex<double> sum = 0.0;
            for (int j = 0; j < 64; ++j)
                sum += reference[j] * std::polar(1.0, -2.0 * pi * k * j / 64.0);
            CHECK(std::abs(data[k] - sum) < 1e-10);
        }
    }
    SECTION("non power of two rejected") {
        std::vector<std::complex<double>> data(12, 0.0);
        CHECK_THROWS_AS(fft_radix2(data), config_error);
    }
}
