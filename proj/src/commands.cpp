#include "chbsim/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iostream>

#include "chbsim/errors.hpp"
#include "chbsim/report.hpp"

namespace chbsim {

namespace {

Table harmonics_table(const HarmonicTable& table) {
    Table out;
    out.header = {"order", "freq_hz", "amplitude", "percent"};
    for (const auto& e : table.entries)
        out.rows.push_back({std::to_string(e.order), format_double(e.order * table.fundamental_hz),
                            format_double(e.amplitude), format_double(e.percent)});
    return out;
}

HarmonicTable load_harmonics_csv(const std::filesystem::path& path) {
    const Table raw = read_csv(path);
    if (raw.header != std::vector<std::string>{"order", "freq_hz", "amplitude", "percent"})
        throw config_error("unexpected harmonic table header in " + path.string());
    HarmonicTable table;
    for (const auto& row : raw.rows) {
        if (row.size() != 4) throw config_error("malformed harmonic row in " + path.string());
        HarmonicEntry entry;
        entry.order = std::stoi(row[0]);
        entry.amplitude = std::stod(row[2]);
        entry.percent = std::stod(row[3]);
        if (entry.order == 1) table.fundamental_hz = std::stod(row[1]);
        table.entries.push_back(entry);
    }
    if (table.entries.empty() || table.entries.front().order != 1)
        throw config_error("harmonic table must start at order 1: " + path.string());
    table.max_order = table.entries.back().order;
    return table;
}

struct CaseResult {
    double thd_pct = 0.0;
    double vrms = 0.0;
    long events = 0;
    double risk_score = 0.0;
    HarmonicTable table;
};

/// Modulation index for one case: the configured value, or on auto the index
/// that puts the line fundamental at the target RMS. Strategies that cannot
/// reach the target within the allowed range run at 1.0.
double resolve_amplitude(const RunConfig& config, StrategyKind kind) {
    if (config.amplitude) return *config.amplitude;
    const double target_peak = target_line_vrms * std::sqrt(2.0);
    auto fundamental_at = [&](double ma) {
        const StrategyConfig strategy = build_strategy(config, kind, ma);
        return fundamental_peak(synthesize_line(strategy, config.topology).pattern,
                                config.topology.vdc_per_cell);
    };
    double lo = 0.05, hi = 1.2;
    if (fundamental_at(hi) < target_peak) return 1.0;
    if (fundamental_at(lo) > target_peak) return lo;
    for (int i = 0; i < 40 && hi - lo > 1e-9; ++i) {
        const double mid = 0.5 * (lo + hi);
        (fundamental_at(mid) < target_peak ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

StrategyConfig resolve_strategy(const RunConfig& config, StrategyKind kind) {
    return build_strategy(config, kind, resolve_amplitude(config, kind));
}

CaseResult analyze_case(const RunConfig& config, const StrategyConfig& strategy,
                        const std::vector<ResonanceMode>& modes) {
    const LineWaveform line = synthesize_line(strategy, config.topology);
    const SampledWaveform sampled =
        sample_waveform(line, config.analysis.samples_per_period, config.analysis.periods);
    CaseResult result;
    result.table = spectrum(sampled, config.analysis.max_order);
    result.thd_pct = result.table.thd_percent;
    result.vrms = result.table.fundamental_rms;
    result.events = line.gate_event_count;
    result.risk_score = resonance_risk(result.table, modes, config.motor.risk.window_hz,
                                       strategy.modulating.f_fund,
                                       config.motor.risk.percent_threshold)
                            .score;
    return result;
}

}  // namespace

SynthResult cmd_synth(const RunConfig& config) {
    const StrategyConfig strategy = resolve_strategy(config, config.strategies.front());
    const LineWaveform line = synthesize_line(strategy, config.topology);
    const SampledWaveform sampled =
        sample_waveform(line, config.analysis.samples_per_period, config.analysis.periods);
    const HarmonicTable table = spectrum(sampled, config.analysis.max_order);

    Table waveform;
    waveform.header = {"t", "value"};
    waveform.rows.reserve(sampled.samples.size());
    for (std::size_t i = 0; i < sampled.samples.size(); ++i)
        waveform.rows.push_back(
            {format_double(double(i) / sampled.sample_rate), format_double(sampled.samples[i])});

    SynthResult result;
    result.thd_percent = table.thd_percent;
    result.fundamental_rms = table.fundamental_rms;
    result.waveform_path =
        write_table(config.output.dir, "waveform", config.output.format, waveform);
    result.harmonics_path =
        write_table(config.output.dir, "harmonics", config.output.format, harmonics_table(table));

    std::cout << to_string(strategy.kind) << ": thd_pct=" << format_double(table.thd_percent)
              << " vrms_fund=" << format_double(table.fundamental_rms) << "\n";
    return result;
}

std::vector<SweepRow> cmd_sweep_k(const RunConfig& config) {
    const std::vector<ResonanceMode> modes = resonance_modes(config.motor);

    auto evaluate = [&](double k) {
        RunConfig point = config;
        point.truncation_k = k;
        const StrategyConfig strategy = resolve_strategy(point, StrategyKind::hipwm_fmtct);
        const CaseResult r = analyze_case(point, strategy, modes);
        SweepRow row;
        row.k = k;
        row.a_m = strategy.carrier.amplitude_param;
        row.t1_ms = truncation_instants(k, config.f_fund).t1 * 1e3;
        row.max_mod_order = strategy.carrier.amplitude_param * (1.0 - k);
        row.thd_pct = r.thd_pct;
        row.vrms_fund = r.vrms;
        row.risk_score = r.risk_score;
        return row;
    };

    // Points run concurrently; rows are assembled in grid order.
    std::vector<std::future<SweepRow>> futures;
    futures.reserve(config.sweep_k.size());
    for (double k : config.sweep_k)
        futures.push_back(std::async(std::launch::async, evaluate, k));
    std::vector<SweepRow> rows;
    rows.reserve(futures.size());
    for (auto& f : futures) rows.push_back(f.get());

    Table table;
    table.header = {"K", "A_M", "t1_ms", "max_mod_order", "thd_pct", "vrms_fund", "risk_score"};
    for (const auto& row : rows)
        table.rows.push_back({format_double(row.k), format_double(row.a_m),
                              format_double(row.t1_ms), format_double(row.max_mod_order),
                              format_double(row.thd_pct), format_double(row.vrms_fund),
                              format_double(row.risk_score)});
    write_table(config.output.dir, "sweep_k", config.output.format, table);
    return rows;
}

std::vector<CompareRow> cmd_compare(const RunConfig& config) {
    if (config.strategies.size() < 2)
        throw config_error("compare needs at least two strategies");
    const std::vector<ResonanceMode> modes = resonance_modes(config.motor);

    std::vector<std::future<CaseResult>> futures;
    for (StrategyKind kind : config.strategies)
        futures.push_back(std::async(std::launch::async, [&, kind] {
            return analyze_case(config, resolve_strategy(config, kind), modes);
        }));

    std::vector<CompareRow> rows;
    Table table;
    table.header = {"strategy", "thd_pct", "vrms_fund", "events_per_period", "risk_score"};
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const CaseResult r = futures[i].get();
        CompareRow row;
        row.kind = config.strategies[i];
        row.thd_pct = r.thd_pct;
        row.vrms_fund = r.vrms;
        row.events_per_period = r.events;
        row.risk_score = r.risk_score;
        rows.push_back(row);
        table.rows.push_back({to_string(row.kind), format_double(row.thd_pct),
                              format_double(row.vrms_fund), std::to_string(row.events_per_period),
                              format_double(row.risk_score)});
    }
    write_table(config.output.dir, "compare", config.output.format, table);
    return rows;
}

std::vector<ResonanceRow> cmd_resonance(const RunConfig& config,
                                        const std::optional<std::string>& spectrum_csv) {
    std::vector<ResonanceRow> rows;
    for (int m = 0; m <= config.motor.modes.stator_m_max; ++m) {
        ResonanceRow row;
        row.component = "stator";
        row.m = m;
        row.n = 0;
        row.p_root = cylinder_root(m, thickness_parameter(config.motor.stator)).lower;
        row.frequency_hz = stator_resonance(m, config.motor.stator, config.motor.material);
        rows.push_back(row);
    }
    for (int m = 0; m <= config.motor.modes.housing_m_max; ++m) {
        for (int n = 1; n <= config.motor.modes.housing_n_max; ++n) {
            const HousingModeResult mode = housing_resonances(m, n, config.motor.housing);
            ResonanceRow row;
            row.component = "housing";
            row.m = m;
            row.n = n;
            for (double p : mode.roots)
                if (p > 1e-12) {
                    row.p_root = p;
                    break;
                }
            row.frequency_hz = mode.frequency_hz;
            rows.push_back(row);
        }
    }

    Table table;
    table.header = {"component", "m", "n", "p_root", "frequency_hz"};
    for (const auto& row : rows)
        table.rows.push_back({row.component, std::to_string(row.m), std::to_string(row.n),
                              format_double(row.p_root), format_double(row.frequency_hz)});
    write_table(config.output.dir, "resonance", config.output.format, table);

    std::cout << "note: bare-shell estimates from yoke/casing geometry alone; tooth and "
                 "winding mass loading is not modeled, so measured frequencies for a wound "
                 "stator sit well below these values unless mass_addition_delta is set.\n";

    if (config.diagnostics) {
        // Consistency row: the finite-cylinder cubic collapses to the ring form
        // as lambda -> 0, so housing m=0 must land on P=1 there.
        const HousingCubic cubic =
            housing_cubic_coefficients(0, 0.0, 0.0, config.motor.housing.material.poisson);
        const auto roots = solve_cubic_real(cubic.c2, cubic.c1, cubic.c0);
        const double p = roots.back();
        std::cout << "diagnostic: housing lambda->0, m=0 root P=" << format_double(p)
                  << " (ring form expects 1)\n";
    }

    if (spectrum_csv) {
        const HarmonicTable spectrum_table = load_harmonics_csv(*spectrum_csv);
        std::vector<ResonanceMode> modes = resonance_modes(config.motor);
        const RiskReport report =
            resonance_risk(spectrum_table, modes, config.motor.risk.window_hz,
                           spectrum_table.fundamental_hz, config.motor.risk.percent_threshold);
        Table risk;
        risk.header = {"force_frequency_hz", "nearest_resonance_hz", "mode_m", "mode_n",
                       "separation_hz",      "harmonic_order",       "contribution"};
        for (const auto& e : report.entries)
            risk.rows.push_back({format_double(e.force_frequency),
                                 format_double(e.nearest_resonance), std::to_string(e.mode_m),
                                 std::to_string(e.mode_n), format_double(e.separation),
                                 std::to_string(e.harmonic_order),
                                 format_double(e.contribution)});
        write_table(config.output.dir, "risk", config.output.format, risk);
        std::cout << "risk_score=" << format_double(report.score) << "\n";
    }
    return rows;
}

void cmd_reproduce(const RunConfig& config) {
    RunConfig bundle = config;
    bundle.strategies = {StrategyKind::spwm_i, StrategyKind::spwm_ii, StrategyKind::spwm_iii,
                         StrategyKind::hipwm_fmtct};

    const auto sweep = cmd_sweep_k(bundle);
    const auto comparison = cmd_compare(bundle);
    const auto resonances = cmd_resonance(bundle);

    const SweepRow* best_thd = &sweep.front();
    const SweepRow* best_risk = &sweep.front();
    for (const auto& row : sweep) {
        if (row.thd_pct < best_thd->thd_pct) best_thd = &row;
        if (row.risk_score < best_risk->risk_score) best_risk = &row;
    }

    std::filesystem::create_directories(bundle.output.dir);
    std::ofstream summary(std::filesystem::path(bundle.output.dir) / "summary.txt");
    summary << "chbsim reproduction bundle\n";
    summary << "==========================\n\n";
    summary << "Operating point: f=" << format_double(bundle.f_fund)
            << " Hz, m_bar=" << bundle.m_bar << ", cells=" << bundle.topology.cells_per_phase
            << ", vdc=" << format_double(bundle.topology.vdc_per_cell) << " V\n\n";
    summary << "Strategy comparison (line voltage, order <= " << bundle.analysis.max_order
            << "):\n";
    for (const auto& row : comparison)
        summary << "  " << to_string(row.kind) << ": thd_pct=" << format_double(row.thd_pct)
                << " vrms_fund=" << format_double(row.vrms_fund)
                << " events_per_period=" << row.events_per_period
                << " risk_score=" << format_double(row.risk_score) << "\n";
    summary << "\nHIPWM-FMTCt sweep over K (" << sweep.size() << " points):\n";
    summary << "  lowest line THD at K=" << format_double(best_thd->k) << " ("
            << format_double(best_thd->thd_pct) << " %)\n";
    summary << "  lowest resonance-risk score at K=" << format_double(best_risk->k) << " ("
            << format_double(best_risk->risk_score) << ")\n";
    summary << "\nResonance table: " << resonances.size() << " modes written to resonance."
            << bundle.output.format << "\n";
    summary << "\nScope notes:\n";
    summary << "  - Vibration levels in dB and hammer-test spectra require the physical\n"
               "    machine and measurement chain; they are out of scope here. Proximity of\n"
               "    predicted force frequencies to model resonances is reported instead.\n";
    summary << "  - Natural-frequency tables come from bare-shell formulas; wound-stator\n"
               "    measurements sit lower unless a mass correction is configured.\n";
    std::cout << "summary written to "
              << (std::filesystem::path(bundle.output.dir) / "summary.txt").string() << "\n";
}

}  // namespace chbsim
