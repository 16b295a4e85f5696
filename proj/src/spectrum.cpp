#include "chbsim/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "chbsim/errors.hpp"

namespace chbsim {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<std::complex<double>> transform(const SampledWaveform& wave) {
    std::vector<std::complex<double>> data(wave.samples.begin(), wave.samples.end());
    fft_radix2(data);
    return data;
}

}  // namespace

void fft_radix2(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(int(n))) throw config_error("FFT size must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * pi / double(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = data[i + j];
                const std::complex<double> v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

int SampledWaveform::samples_per_period() const {
    return periods_captured > 0 ? int(samples.size()) / periods_captured : 0;
}

SampledWaveform sample_pattern(const SwitchingPattern& pattern, double volts_per_level,
                               double fundamental_hz, int samples_per_period, int periods) {
    if (!is_power_of_two(samples_per_period) || samples_per_period < 4096)
        throw config_error("samples_per_period must be a power of two >= 4096");
    if (periods < 1) throw config_error("periods must be >= 1");
    if (!(fundamental_hz > 0.0)) throw config_error("fundamental must be > 0");

    SampledWaveform wave;
    wave.fundamental = fundamental_hz;
    wave.periods_captured = periods;
    wave.sample_rate = samples_per_period * fundamental_hz;
    wave.samples.resize(std::size_t(samples_per_period) * periods);

    const double period = pattern.period;
    std::size_t next_event = 0;
    int level = pattern.initial_level;
    for (int i = 0; i < samples_per_period; ++i) {
        const double t = double(i) / samples_per_period * period;
        while (next_event < pattern.events.size() && pattern.events[next_event].t <= t)
            level = pattern.events[next_event++].level;
        wave.samples[i] = level * volts_per_level;
    }
    for (int p = 1; p < periods; ++p)
        std::copy_n(wave.samples.begin(), samples_per_period,
                    wave.samples.begin() + std::size_t(p) * samples_per_period);
    return wave;
}

SampledWaveform sample_waveform(const LineWaveform& line, int samples_per_period, int periods) {
    return sample_pattern(line.pattern, line.volts_per_level, line.fundamental_hz,
                          samples_per_period, periods);
}

SampledWaveform sample_waveform(const PhaseWaveform& phase, int samples_per_period, int periods) {
    return sample_pattern(phase.composite, phase.volts_per_level, phase.fundamental_hz,
                          samples_per_period, periods);
}

const HarmonicEntry& HarmonicTable::at_order(int order) const {
    for (const auto& e : entries)
        if (e.order == order) return e;
    throw config_error("harmonic order " + std::to_string(order) + " not in table");
}

HarmonicTable spectrum(const SampledWaveform& wave, int max_order) {
    const int n = int(wave.samples.size());
    const int per_period = wave.samples_per_period();
    if (max_order < 1) throw config_error("max_order must be >= 1");
    if (max_order >= per_period / 2)
        throw config_error("max_order must be < samples_per_period / 2");

    const auto bins = transform(wave);
    HarmonicTable table;
    table.max_order = max_order;
    table.fundamental_hz = wave.fundamental;
    table.dc = std::abs(bins[0]) / n;

    table.entries.reserve(max_order);
    for (int order = 1; order <= max_order; ++order) {
        const std::complex<double> bin = bins[std::size_t(order) * wave.periods_captured];
        HarmonicEntry entry;
        entry.order = order;
        entry.amplitude = 2.0 * std::abs(bin) / n;
        entry.phase = std::arg(bin);
        table.entries.push_back(entry);
    }
    const double a1 = table.entries.front().amplitude;
    for (auto& e : table.entries) e.percent = a1 > 0.0 ? 100.0 * e.amplitude / a1 : 0.0;
    table.fundamental_rms = fundamental_rms(table);
    table.thd_percent = a1 > 0.0 ? thd(table) : 0.0;
    return table;
}

double thd(const HarmonicTable& table) {
    if (table.entries.empty() || table.entries.front().order != 1)
        throw config_error("THD needs harmonic orders 1..max_order");
    const double a1 = table.entries.front().amplitude;
    if (a1 == 0.0) throw numeric_error("THD undefined: fundamental amplitude is zero");
    double sum_sq = 0.0;
    for (const auto& e : table.entries)
        if (e.order >= 2) sum_sq += e.amplitude * e.amplitude;
    return 100.0 * std::sqrt(sum_sq) / a1;
}

double fundamental_rms(const HarmonicTable& table) {
    if (table.entries.empty() || table.entries.front().order != 1)
        throw config_error("fundamental RMS needs harmonic order 1");
    return table.entries.front().amplitude / std::sqrt(2.0);
}

HarmonicTable current_spectrum(const HarmonicTable& voltage, double r_ohm, double l_henry) {
    if (r_ohm < 0.0 || l_henry < 0.0) throw config_error("load R and L must be >= 0");
    if (r_ohm == 0.0 && l_henry == 0.0)
        throw config_error("invalid load: R and L cannot both be zero");
    const double omega = 2.0 * pi * voltage.fundamental_hz;
    HarmonicTable table;
    table.max_order = voltage.max_order;
    table.fundamental_hz = voltage.fundamental_hz;
    // A pure-L load has no steady-state DC path; report zero in that case.
    table.dc = r_ohm > 0.0 ? voltage.dc / r_ohm : 0.0;
    table.entries.reserve(voltage.entries.size());
    for (const auto& v : voltage.entries) {
        const std::complex<double> z(r_ohm, v.order * omega * l_henry);
        HarmonicEntry entry;
        entry.order = v.order;
        entry.amplitude = v.amplitude / std::abs(z);
        entry.phase = v.phase - std::arg(z);
        table.entries.push_back(entry);
    }
    const double i1 = table.entries.front().amplitude;
    for (auto& e : table.entries) e.percent = i1 > 0.0 ? 100.0 * e.amplitude / i1 : 0.0;
    table.fundamental_rms = fundamental_rms(table);
    table.thd_percent = i1 > 0.0 ? thd(table) : 0.0;
    return table;
}

double fundamental_peak(const SwitchingPattern& pattern, double volts_per_level) {
    if (!(pattern.period > 0.0)) throw config_error("pattern period must be > 0");
    const double w = 2.0 * pi / pattern.period;
    const std::complex<double> jw(0.0, w);
    std::complex<double> acc = 0.0;
    double t_prev = 0.0;
    int level = pattern.initial_level;
    auto add_segment = [&](double a, double b, int l) {
        if (b > a) acc += double(l) * (std::exp(-jw * a) - std::exp(-jw * b)) / jw;
    };
    for (const auto& e : pattern.events) {
        add_segment(t_prev, e.t, level);
        t_prev = e.t;
        level = e.level;
    }
    add_segment(t_prev, pattern.period, level);
    return 2.0 / pattern.period * std::abs(acc) * volts_per_level;
}

double parseval_check(const SampledWaveform& wave) {
    const int n = int(wave.samples.size());
    double mean_sq_time = 0.0;
    for (double s : wave.samples) mean_sq_time += s * s;
    mean_sq_time /= n;

    const auto bins = transform(wave);
    const double dc = std::abs(bins[0]) / n;
    double mean_sq_freq = dc * dc;
    for (int k = 1; k < n / 2; ++k) {
        const double a = 2.0 * std::abs(bins[k]) / n;
        mean_sq_freq += 0.5 * a * a;
    }
    const double nyquist = std::abs(bins[n / 2]) / n;
    mean_sq_freq += nyquist * nyquist;

    const double rms_time = std::sqrt(mean_sq_time);
    const double rms_freq = std::sqrt(mean_sq_freq);
    if (rms_time == 0.0) return rms_freq;
    return std::abs(rms_time - rms_freq) / rms_time;
}

}  // namespace chbsim
