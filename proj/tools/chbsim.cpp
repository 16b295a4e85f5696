#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chbsim/commands.hpp"
#include "chbsim/errors.hpp"

namespace {

struct Overrides {
    std::optional<double> k;
    std::optional<int> m_bar;
    std::vector<std::string> strategies;
    std::optional<int> cells;
    std::optional<double> vdc;
    std::optional<double> f;
    std::optional<int> samples;
    std::optional<int> max_order;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

void apply(const Overrides& flags, chbsim::RunConfig& config) {
    if (flags.k) config.truncation_k = *flags.k;
    if (flags.m_bar) config.m_bar = *flags.m_bar;
    if (!flags.strategies.empty()) {
        config.strategies.clear();
        for (const auto& name : flags.strategies) {
            auto kind = chbsim::strategy_from_string(name);
            if (!kind)
                throw chbsim::config_error(
                    "unknown strategy \"" + name +
                    "\" (expected SPWM_I, SPWM_II, SPWM_III or HIPWM_FMTCt)");
            config.strategies.push_back(*kind);
        }
    }
    if (flags.cells) config.topology.cells_per_phase = *flags.cells;
    if (flags.vdc) config.topology.vdc_per_cell = *flags.vdc;
    if (flags.f) config.f_fund = *flags.f;
    if (flags.samples) config.analysis.samples_per_period = *flags.samples;
    if (flags.max_order) config.analysis.max_order = *flags.max_order;
    if (flags.out_dir) config.output.dir = *flags.out_dir;
    if (flags.format) config.output.format = *flags.format;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel-inverter PWM synthesis, spectral analysis and resonance screening"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->envname("CHBSIM_CONFIG");
    bool print_config = false;
    app.add_flag("--print-config", print_config, "echo the fully resolved configuration");

    Overrides flags;
    app.add_option("--k", flags.k, "truncation level K");
    app.add_option("--m-bar", flags.m_bar, "frequency-modulation order");
    app.add_option("--strategy", flags.strategies, "strategy name (repeatable)");
    app.add_option("--cells", flags.cells, "H-bridge cells per phase");
    app.add_option("--vdc", flags.vdc, "DC link voltage per cell");
    app.add_option("--f", flags.f, "fundamental frequency in Hz");
    app.add_option("--samples", flags.samples, "samples per fundamental period");
    app.add_option("--max-order", flags.max_order, "highest harmonic order analyzed");
    app.add_option("--out", flags.out_dir, "output directory");
    app.add_option("--format", flags.format, "output format: csv or json");

    auto* synth = app.add_subcommand("synth", "synthesize one case and write its spectrum");
    auto* sweep = app.add_subcommand("sweep-k", "sweep the truncation level grid");
    auto* compare = app.add_subcommand("compare", "compare the configured strategies");
    auto* resonance = app.add_subcommand("resonance", "natural-frequency table and risk report");
    std::string spectrum_csv;
    resonance->add_option("--spectrum", spectrum_csv,
                          "harmonic CSV to score against the resonances");
    auto* reproduce =
        app.add_subcommand("reproduce-paper", "run sweep-k, compare and resonance with defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        chbsim::RunConfig config =
            config_path.empty() ? chbsim::RunConfig{} : chbsim::load_config(config_path);
        apply(flags, config);
        chbsim::validate(config);

        if (print_config) {
            std::cout << chbsim::resolved_config_json(config) << "\n";
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << "error: a subcommand is required (synth, sweep-k, compare, resonance, "
                         "reproduce-paper)\n";
            return 1;
        }
        if (synth->parsed()) {
            chbsim::cmd_synth(config);
        } else if (sweep->parsed()) {
            chbsim::cmd_sweep_k(config);
        } else if (compare->parsed()) {
            chbsim::cmd_compare(config);
        } else if (resonance->parsed()) {
            std::optional<std::string> spectrum;
            if (!spectrum_csv.empty()) spectrum = spectrum_csv;
            chbsim::cmd_resonance(config, spectrum);
        } else if (reproduce->parsed()) {
            chbsim::cmd_reproduce(config);
        }
        return 0;
    } catch (const chbsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const chbsim::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    }
}
