#include "chbsim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "chbsim/errors.hpp"

namespace chbsim {

namespace {

using nlohmann::json;

void expect_object(const json& value, const std::string& path) {
    if (!value.is_object()) throw config_error(path + " must be an object");
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) known = true;
        if (!known) throw config_error("unknown config key: " + path + "." + it.key());
    }
}

double num_or(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw config_error(path + "." + key + " must be a number");
    return v.get<double>();
}

int int_or(const json& obj, const char* key, const std::string& path, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw config_error(path + "." + key + " must be an integer");
    return v.get<int>();
}

std::string str_or(const json& obj, const char* key, const std::string& path,
                   const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw config_error(path + "." + key + " must be a string");
    return v.get<std::string>();
}

StrategyKind parse_strategy(const std::string& name, const std::string& path) {
    auto kind = strategy_from_string(name);
    if (!kind)
        throw config_error(path + ": unknown strategy \"" + name +
                           "\" (expected SPWM_I, SPWM_II, SPWM_III or HIPWM_FMTCt)");
    return *kind;
}

void parse_material(const json& obj, const std::string& path, MaterialSpec& mat) {
    expect_object(obj, path);
    expect_keys(obj, path, {"youngs_modulus_pa", "density_kg_m3", "poisson"});
    mat.youngs_modulus = num_or(obj, "youngs_modulus_pa", path, mat.youngs_modulus);
    mat.density = num_or(obj, "density_kg_m3", path, mat.density);
    mat.poisson = num_or(obj, "poisson", path, mat.poisson);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    expect_object(root, "config");
    expect_keys(root, "config",
                {"strategy", "strategies", "topology", "modulating", "carrier", "analysis",
                 "motor", "sweep", "output", "diagnostics"});

    RunConfig config;

    if (root.contains("strategy") && root.contains("strategies"))
        throw config_error("config: give either strategy or strategies, not both");
    if (root.contains("strategy"))
        config.strategies = {parse_strategy(str_or(root, "strategy", "config", ""), "strategy")};
    if (root.contains("strategies")) {
        const json& list = root.at("strategies");
        if (!list.is_array() || list.empty())
            throw config_error("config.strategies must be a non-empty array");
        config.strategies.clear();
        for (const auto& item : list) {
            if (!item.is_string()) throw config_error("config.strategies entries must be strings");
            config.strategies.push_back(parse_strategy(item.get<std::string>(), "strategies"));
        }
    }

    if (root.contains("topology")) {
        const json& obj = root.at("topology");
        expect_object(obj, "topology");
        expect_keys(obj, "topology", {"cells", "vdc", "phases"});
        config.topology.cells_per_phase = int_or(obj, "cells", "topology", 2);
        config.topology.vdc_per_cell = num_or(obj, "vdc", "topology", 75.0);
        config.topology.phases = int_or(obj, "phases", "topology", 3);
    }

    if (root.contains("modulating")) {
        const json& obj = root.at("modulating");
        expect_object(obj, "modulating");
        expect_keys(obj, "modulating", {"f_hz", "amplitude", "harmonics", "phase_deg"});
        config.f_fund = num_or(obj, "f_hz", "modulating", 50.0);
        if (obj.contains("amplitude")) {
            const json& amp = obj.at("amplitude");
            if (amp.is_string() && amp.get<std::string>() == "auto")
                config.amplitude.reset();
            else if (amp.is_number())
                config.amplitude = amp.get<double>();
            else
                throw config_error("modulating.amplitude must be a number or \"auto\"");
        }
        config.mod_phase_rad = num_or(obj, "phase_deg", "modulating", 0.0) * pi / 180.0;
        if (obj.contains("harmonics")) {
            const json& list = obj.at("harmonics");
            if (!list.is_array())
                throw config_error("modulating.harmonics must be an array of [order, coeff]");
            std::vector<HarmonicComponent> injection;
            for (const auto& item : list) {
                if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
                    !item[1].is_number())
                    throw config_error("modulating.harmonics entries must be [order, coeff]");
                injection.push_back({item[0].get<int>(), item[1].get<double>()});
            }
            config.injection = std::move(injection);
        }
    }

    if (root.contains("carrier")) {
        const json& obj = root.at("carrier");
        expect_object(obj, "carrier");
        expect_keys(obj, "carrier", {"m_bar", "k", "f_carrier_hz", "phase_offset_cycles"});
        config.m_bar = int_or(obj, "m_bar", "carrier", 15);
        config.truncation_k = num_or(obj, "k", "carrier", 0.55);
        if (obj.contains("f_carrier_hz"))
            config.f_carrier = num_or(obj, "f_carrier_hz", "carrier", 0.0);
        config.carrier_phase_offset_cycles =
            num_or(obj, "phase_offset_cycles", "carrier", 0.0);
    }

    if (root.contains("analysis")) {
        const json& obj = root.at("analysis");
        expect_object(obj, "analysis");
        expect_keys(obj, "analysis",
                    {"samples_per_period", "max_order", "load_r_ohm", "load_l_h", "periods"});
        config.analysis.samples_per_period =
            int_or(obj, "samples_per_period", "analysis", 65536);
        config.analysis.max_order = int_or(obj, "max_order", "analysis", 50);
        config.analysis.load_r_ohm = num_or(obj, "load_r_ohm", "analysis", 3.5);
        config.analysis.load_l_h = num_or(obj, "load_l_h", "analysis", 0.010);
        config.analysis.periods = int_or(obj, "periods", "analysis", 1);
    }

    if (root.contains("motor")) {
        const json& obj = root.at("motor");
        expect_object(obj, "motor");
        expect_keys(obj, "motor", {"stator", "material", "housing", "modes", "risk"});
        if (obj.contains("stator")) {
            const json& s = obj.at("stator");
            expect_object(s, "motor.stator");
            expect_keys(s, "motor.stator",
                        {"core_diameter_m", "yoke_thickness_m", "core_length_m", "stator_slots",
                         "rotor_slots", "pole_pairs", "tooth_height_m", "tooth_width_m",
                         "mass_addition_delta"});
            auto& g = config.motor.stator;
            g.core_diameter = num_or(s, "core_diameter_m", "motor.stator", g.core_diameter);
            g.yoke_thickness = num_or(s, "yoke_thickness_m", "motor.stator", g.yoke_thickness);
            g.core_length = num_or(s, "core_length_m", "motor.stator", g.core_length);
            g.stator_slots = int_or(s, "stator_slots", "motor.stator", g.stator_slots);
            g.rotor_slots = int_or(s, "rotor_slots", "motor.stator", g.rotor_slots);
            g.pole_pairs = int_or(s, "pole_pairs", "motor.stator", g.pole_pairs);
            g.tooth_height = num_or(s, "tooth_height_m", "motor.stator", g.tooth_height);
            g.tooth_width = num_or(s, "tooth_width_m", "motor.stator", g.tooth_width);
            g.mass_addition_delta =
                num_or(s, "mass_addition_delta", "motor.stator", g.mass_addition_delta);
        }
        if (obj.contains("material"))
            parse_material(obj.at("material"), "motor.material", config.motor.material);
        if (obj.contains("housing")) {
            const json& h = obj.at("housing");
            expect_object(h, "motor.housing");
            expect_keys(h, "motor.housing",
                        {"mean_diameter_m", "wall_thickness_m", "length_m", "material"});
            auto& g = config.motor.housing;
            g.mean_diameter = num_or(h, "mean_diameter_m", "motor.housing", g.mean_diameter);
            g.wall_thickness = num_or(h, "wall_thickness_m", "motor.housing", g.wall_thickness);
            g.length = num_or(h, "length_m", "motor.housing", g.length);
            if (h.contains("material"))
                parse_material(h.at("material"), "motor.housing.material", g.material);
        }
        if (obj.contains("modes")) {
            const json& mranges = obj.at("modes");
            expect_object(mranges, "motor.modes");
            expect_keys(mranges, "motor.modes",
                        {"stator_m_max", "housing_m_max", "housing_n_max"});
            config.motor.modes.stator_m_max =
                int_or(mranges, "stator_m_max", "motor.modes", 4);
            config.motor.modes.housing_m_max =
                int_or(mranges, "housing_m_max", "motor.modes", 3);
            config.motor.modes.housing_n_max =
                int_or(mranges, "housing_n_max", "motor.modes", 3);
        }
        if (obj.contains("risk")) {
            const json& r = obj.at("risk");
            expect_object(r, "motor.risk");
            expect_keys(r, "motor.risk", {"window_hz", "percent_threshold"});
            config.motor.risk.window_hz = num_or(r, "window_hz", "motor.risk", 75.0);
            config.motor.risk.percent_threshold =
                num_or(r, "percent_threshold", "motor.risk", 0.5);
        }
    }

    if (root.contains("sweep")) {
        const json& obj = root.at("sweep");
        expect_object(obj, "sweep");
        expect_keys(obj, "sweep", {"k_values"});
        if (obj.contains("k_values")) {
            const json& list = obj.at("k_values");
            if (!list.is_array() || list.empty())
                throw config_error("sweep.k_values must be a non-empty array of numbers");
            config.sweep_k.clear();
            for (const auto& item : list) {
                if (!item.is_number())
                    throw config_error("sweep.k_values entries must be numbers");
                config.sweep_k.push_back(item.get<double>());
            }
        }
    }

    if (root.contains("output")) {
        const json& obj = root.at("output");
        expect_object(obj, "output");
        expect_keys(obj, "output", {"dir", "format"});
        config.output.dir = str_or(obj, "dir", "output", "out");
        config.output.format = str_or(obj, "format", "output", "csv");
    }

    if (root.contains("diagnostics")) {
        const json& v = root.at("diagnostics");
        if (!v.is_boolean()) throw config_error("config.diagnostics must be a boolean");
        config.diagnostics = v.get<bool>();
    }

    validate(config);
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

void validate(const RunConfig& config) {
    if (config.strategies.empty()) throw config_error("at least one strategy is required");
    validate(config.topology);

    if (!(config.f_fund > 0.0)) throw config_error("modulating.f_hz must be > 0");
    if (config.amplitude && (!(*config.amplitude > 0.0) || *config.amplitude > 1.2))
        throw config_error("modulating.amplitude must be in (0, 1.2]");
    if (config.injection) {
        ModulatingSpec probe;
        probe.harmonics = *config.injection;
        validate(probe);
    }

    if (config.m_bar < 1) throw config_error("carrier.m_bar must be >= 1");
    if (config.topology.phases == 3 && (config.m_bar % 2 == 0 || config.m_bar % 3 != 0))
        throw config_error("carrier.m_bar must be an odd multiple of 3 for three-phase use");
    if (config.truncation_k < 0.0 || config.truncation_k > 0.95)
        throw config_error("carrier.k must be in [0, 0.95]");
    if (config.f_carrier && !(*config.f_carrier > 0.0))
        throw config_error("carrier.f_carrier_hz must be > 0");
    if (config.carrier_phase_offset_cycles < 0.0 || config.carrier_phase_offset_cycles >= 1.0)
        throw config_error("carrier.phase_offset_cycles must be in [0, 1)");

    const auto& analysis = config.analysis;
    if (analysis.samples_per_period < 4096 ||
        (analysis.samples_per_period & (analysis.samples_per_period - 1)) != 0)
        throw config_error("analysis.samples_per_period must be a power of two >= 4096");
    if (analysis.max_order < 1 || analysis.max_order >= analysis.samples_per_period / 2)
        throw config_error("analysis.max_order must be in [1, samples_per_period/2)");
    if (analysis.load_r_ohm < 0.0 || analysis.load_l_h < 0.0)
        throw config_error("analysis load R and L must be >= 0");
    if (analysis.load_r_ohm == 0.0 && analysis.load_l_h == 0.0)
        throw config_error("analysis load: R and L cannot both be zero");
    if (analysis.periods < 1) throw config_error("analysis.periods must be >= 1");

    validate(config.motor.stator);
    validate(config.motor.material);
    validate(config.motor.housing);
    if (config.motor.modes.stator_m_max < 0 || config.motor.modes.housing_m_max < 0)
        throw config_error("motor.modes m_max values must be >= 0");
    if (config.motor.modes.housing_n_max < 1)
        throw config_error("motor.modes.housing_n_max must be >= 1");
    if (!(config.motor.risk.window_hz > 0.0))
        throw config_error("motor.risk.window_hz must be > 0");

    for (double k : config.sweep_k)
        if (k < 0.0 || k > 0.95) throw config_error("sweep.k_values must lie in [0, 0.95]");

    if (config.output.format != "csv" && config.output.format != "json")
        throw config_error("output.format must be csv or json");
}

StrategyConfig build_strategy(const RunConfig& config, StrategyKind kind, double amplitude) {
    StrategyConfig strategy =
        make_strategy(kind, config.f_fund, amplitude, config.m_bar, config.truncation_k);
    const bool injected = kind == StrategyKind::spwm_iii || kind == StrategyKind::hipwm_fmtct;
    if (injected && config.injection) strategy.modulating.harmonics = *config.injection;
    strategy.modulating.phase_offset = config.mod_phase_rad;
    strategy.carrier.phase_offset_cycles = config.carrier_phase_offset_cycles;
    if (kind != StrategyKind::hipwm_fmtct && config.f_carrier)
        strategy.carrier.f_carrier = *config.f_carrier;
    validate(strategy, config.topology);
    return strategy;
}

std::vector<ResonanceMode> resonance_modes(const MotorProfile& motor) {
    std::vector<ResonanceMode> modes;
    for (int m = 0; m <= motor.modes.stator_m_max; ++m)
        modes.push_back({stator_resonance(m, motor.stator, motor.material), m, 0});
    for (int m = 0; m <= motor.modes.housing_m_max; ++m)
        for (int n = 1; n <= motor.modes.housing_n_max; ++n)
            modes.push_back({housing_resonances(m, n, motor.housing).frequency_hz, m, n});
    return modes;
}

std::string resolved_config_json(const RunConfig& config) {
    json root;
    if (config.strategies.size() == 1) {
        root["strategy"] = to_string(config.strategies.front());
    } else {
        json list = json::array();
        for (auto kind : config.strategies) list.push_back(to_string(kind));
        root["strategies"] = list;
    }
    root["topology"] = {{"cells", config.topology.cells_per_phase},
                        {"vdc", config.topology.vdc_per_cell},
                        {"phases", config.topology.phases}};
    root["modulating"] = {{"f_hz", config.f_fund},
                          {"phase_deg", config.mod_phase_rad * 180.0 / pi}};
    if (config.amplitude)
        root["modulating"]["amplitude"] = *config.amplitude;
    else
        root["modulating"]["amplitude"] = "auto";
    if (config.injection) {
        json list = json::array();
        for (const auto& h : *config.injection) list.push_back({h.order, h.coeff});
        root["modulating"]["harmonics"] = list;
    }
    root["carrier"] = {{"m_bar", config.m_bar},
                       {"k", config.truncation_k},
                       {"phase_offset_cycles", config.carrier_phase_offset_cycles}};
    if (config.f_carrier) root["carrier"]["f_carrier_hz"] = *config.f_carrier;
    root["analysis"] = {{"samples_per_period", config.analysis.samples_per_period},
                        {"max_order", config.analysis.max_order},
                        {"load_r_ohm", config.analysis.load_r_ohm},
                        {"load_l_h", config.analysis.load_l_h},
                        {"periods", config.analysis.periods}};
    const auto& stator = config.motor.stator;
    root["motor"]["stator"] = {{"core_diameter_m", stator.core_diameter},
                               {"yoke_thickness_m", stator.yoke_thickness},
                               {"core_length_m", stator.core_length},
                               {"stator_slots", stator.stator_slots},
                               {"rotor_slots", stator.rotor_slots},
                               {"pole_pairs", stator.pole_pairs},
                               {"tooth_height_m", stator.tooth_height},
                               {"tooth_width_m", stator.tooth_width},
                               {"mass_addition_delta", stator.mass_addition_delta}};
    const auto& material = config.motor.material;
    root["motor"]["material"] = {{"youngs_modulus_pa", material.youngs_modulus},
                                 {"density_kg_m3", material.density},
                                 {"poisson", material.poisson}};
    const auto& housing = config.motor.housing;
    root["motor"]["housing"] = {{"mean_diameter_m", housing.mean_diameter},
                                {"wall_thickness_m", housing.wall_thickness},
                                {"length_m", housing.length},
                                {"material",
                                 {{"youngs_modulus_pa", housing.material.youngs_modulus},
                                  {"density_kg_m3", housing.material.density},
                                  {"poisson", housing.material.poisson}}}};
    root["motor"]["modes"] = {{"stator_m_max", config.motor.modes.stator_m_max},
                              {"housing_m_max", config.motor.modes.housing_m_max},
                              {"housing_n_max", config.motor.modes.housing_n_max}};
    root["motor"]["risk"] = {{"window_hz", config.motor.risk.window_hz},
                             {"percent_threshold", config.motor.risk.percent_threshold}};
    root["sweep"] = {{"k_values", config.sweep_k}};
    root["output"] = {{"dir", config.output.dir}, {"format", config.output.format}};
    root["diagnostics"] = config.diagnostics;
    return root.dump(2);
}

}  // namespace chbsim
