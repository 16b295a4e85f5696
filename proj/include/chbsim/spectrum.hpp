#pragma once

#include <complex>
#include <vector>

#include "chbsim/inverter.hpp"
#include "chbsim/modulation.hpp"

namespace chbsim {

/// Synchronously sampled waveform: sample count is an exact integer number of
/// fundamental periods, so harmonics land on DFT bins with no leakage.
struct SampledWaveform {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz
    double fundamental = 0.0;  // Hz
    int periods_captured = 1;

    int samples_per_period() const;
};

/// Piecewise-constant evaluation of an exact-event pattern at uniform instants.
/// samples_per_period must be a power of two >= 4096. A sample falling exactly
/// on an event instant takes the post-event level.
SampledWaveform sample_pattern(const SwitchingPattern& pattern, double volts_per_level,
                               double fundamental_hz, int samples_per_period, int periods = 1);

SampledWaveform sample_waveform(const LineWaveform& line, int samples_per_period, int periods = 1);
SampledWaveform sample_waveform(const PhaseWaveform& phase, int samples_per_period,
                                int periods = 1);

struct HarmonicEntry {
    int order = 0;
    double amplitude = 0.0;  // peak value
    double percent = 0.0;    // 100 * amplitude / fundamental amplitude
    double phase = 0.0;      // rad, cosine convention
};

struct HarmonicTable {
    std::vector<HarmonicEntry> entries;  // orders 1..max_order
    double dc = 0.0;
    double fundamental_hz = 0.0;
    double fundamental_rms = 0.0;
    double thd_percent = 0.0;
    int max_order = 50;

    const HarmonicEntry& at_order(int order) const;
};

/// Discrete Fourier analysis at integer multiples of the fundamental.
/// Amplitudes are peak values; synchronous capture makes the bins exact.
HarmonicTable spectrum(const SampledWaveform& wave, int max_order);

/// 100 * sqrt(sum a_n^2, n = 2..max_order) / a_1.
double thd(const HarmonicTable& table);

/// a_1 / sqrt(2).
double fundamental_rms(const HarmonicTable& table);

/// Series R-L load current spectrum: i_n = v_n / |R + j n w L|, percents
/// renormalized to the current fundamental.
HarmonicTable current_spectrum(const HarmonicTable& voltage, double r_ohm, double l_henry);

/// Relative mismatch between time-domain RMS and the RMS reconstructed from
/// every DFT bin (DC, all harmonics, Nyquist). Numerical hygiene check.
double parseval_check(const SampledWaveform& wave);

/// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

/// Exact peak amplitude of the fundamental of a piecewise-constant pattern,
/// integrated segment by segment (no sampling involved).
double fundamental_peak(const SwitchingPattern& pattern, double volts_per_level);

}  // namespace chbsim
