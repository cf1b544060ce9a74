#pragma once

// JSON scenario files.
//
//   {
//     "su": { "num_subcarriers": 128, "symbol_duration_s": 1.024e-4,
//             "subcarrier_spacing_hz": 9765.6,
//             "noise_variance": {"value": 1e-3, "unit": "uW"},
//             "ber_threshold": 1e-4, "alpha": 0.5,
//             "power_threshold": {"value": "inf", "unit": "W"},
//             "max_bits": 16, "su_link_gain": 1.0,
//             "pu_interference": {"value": 0, "unit": "W"},
//             "pu_interference_per_subcarrier": {"values": [...], "unit": "W"} },
//     "path_loss": { "exponent": 4, "wavelength_m": 0.3333, "reference_distance_m": 500 },
//     "pus": [ { "kind": "cochannel", "distance_m": 5000,
//                "interference_cap": {"value": 1e-8, "unit": "uW"},
//                "probability": 0.9, "fading_rate": 1 },
//              { "kind": "adjacent", "distance_m": 1000, "bandwidth_hz": 1.25e6,
//                "center_offset_hz": 625000, ... } ],
//     "experiment": { "trials": 10000, "seed": 1,
//                     "sweep": {"param": "psi", "values": [0.5, 0.9]} }
//   }
//
// Power units: W, mW, uW (or µW); a bare number is in W. A power value may be the string "inf".
// Unknown keys are rejected.

#include "cogload/errors.hpp"
#include "cogload/scenario.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>

namespace cogload {

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (auto a : allowed)
            ok = ok || item.key() == a;
        if (!ok) throw ConfigError(where + "." + item.key() + ": unknown key");
    }
}

inline double unit_scale(const std::string& unit, const std::string& field)
{
    if (unit == "W") return 1.0;
    if (unit == "mW") return 1e-3;
    if (unit == "uW" || unit == "µW" || unit == "μW") return 1e-6;
    throw ConfigError(field + ": unknown power unit '" + unit + "' (expected W, mW, uW)");
}

inline double number_or_inf(const json& v, const std::string& field)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "Infinity") return kInf;
    }
    throw ConfigError(field + ": expected a number or \"inf\"");
}

inline double get_number(const json& obj, const std::string& key, const std::string& field)
{
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field + ": expected a number");
    return v.get<double>();
}

inline long long get_integer(const json& obj, const std::string& key, const std::string& field)
{
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
    return v.get<long long>();
}

inline double get_power(const json& obj, const std::string& key, const std::string& field)
{
    const auto& v = obj.at(key);
    if (!v.is_object()) return number_or_inf(v, field);  // bare value in W
    reject_unknown_keys(v, field, {"value", "unit"});
    if (!v.contains("value")) throw ConfigError(field + ".value: missing");
    const std::string unit = v.contains("unit") ? v.at("unit").get<std::string>() : "W";
    return number_or_inf(v.at("value"), field + ".value") * unit_scale(unit, field + ".unit");
}

template <class F>
auto with_field(const std::string& field, F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

inline void require(const json& obj, const std::string& key, const std::string& field)
{
    if (!obj.contains(key)) throw ConfigError(field + ": missing required field");
}

inline json power_json(double watts)
{
    json v;
    if (std::isinf(watts)) v["value"] = "inf";
    else v["value"] = watts;
    v["unit"] = "W";
    return v;
}

inline ScenarioConfig load_scenario_unchecked(std::string_view text)
{
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }
    detail::reject_unknown_keys(root, "config", {"su", "path_loss", "pus", "experiment"});

    ScenarioConfig cfg;

    detail::require(root, "su", "su");
    const json& su = root.at("su");
    detail::reject_unknown_keys(su, "su",
                                {"num_subcarriers", "symbol_duration_s", "subcarrier_spacing_hz",
                                 "noise_variance", "ber_threshold", "alpha", "power_threshold",
                                 "max_bits", "su_link_gain", "pu_interference",
                                 "pu_interference_per_subcarrier"});
    for (auto key : {"num_subcarriers", "symbol_duration_s", "noise_variance", "ber_threshold"})
        detail::require(su, key, std::string("su.") + key);

    auto& s = cfg.su;
    s.num_subcarriers = static_cast<int>(detail::get_integer(su, "num_subcarriers", "su.num_subcarriers"));
    s.symbol_duration = detail::get_number(su, "symbol_duration_s", "su.symbol_duration_s");
    s.subcarrier_spacing = su.contains("subcarrier_spacing_hz")
                               ? detail::get_number(su, "subcarrier_spacing_hz", "su.subcarrier_spacing_hz")
                               : 1.0 / s.symbol_duration;
    s.noise_variance = detail::get_power(su, "noise_variance", "su.noise_variance");
    {
        const json& b = su.at("ber_threshold");
        if (b.is_number()) {
            s.ber_threshold.assign(static_cast<std::size_t>(std::max(s.num_subcarriers, 0)), b.get<double>());
        } else if (b.is_array()) {
            for (const auto& x : b) {
                if (!x.is_number()) throw ConfigError("su.ber_threshold: expected numbers");
                s.ber_threshold.push_back(x.get<double>());
            }
        } else {
            throw ConfigError("su.ber_threshold: expected a number or an array");
        }
    }
    if (su.contains("alpha")) s.alpha = detail::get_number(su, "alpha", "su.alpha");
    if (su.contains("power_threshold"))
        s.power_threshold = detail::get_power(su, "power_threshold", "su.power_threshold");
    if (su.contains("max_bits"))
        s.max_bits = static_cast<int>(detail::get_integer(su, "max_bits", "su.max_bits"));
    if (su.contains("su_link_gain")) s.su_link_gain = detail::get_number(su, "su_link_gain", "su.su_link_gain");
    if (su.contains("pu_interference"))
        s.pu_interference = detail::get_power(su, "pu_interference", "su.pu_interference");
    if (su.contains("pu_interference_per_subcarrier")) {
        const std::string field = "su.pu_interference_per_subcarrier";
        const json& j = su.at("pu_interference_per_subcarrier");
        detail::reject_unknown_keys(j, field, {"values", "unit"});
        detail::require(j, "values", field + ".values");
        const double scale = detail::unit_scale(j.value("unit", std::string("W")), field + ".unit");
        if (!j.at("values").is_array()) throw ConfigError(field + ".values: expected an array");
        for (const auto& x : j.at("values")) {
            if (!x.is_number()) throw ConfigError(field + ".values: expected numbers");
            s.pu_interference_per_subcarrier.push_back(x.get<double>() * scale);
        }
    }

    detail::require(root, "path_loss", "path_loss");
    const json& pl = root.at("path_loss");
    detail::reject_unknown_keys(pl, "path_loss", {"exponent", "wavelength_m", "reference_distance_m"});
    for (auto key : {"exponent", "wavelength_m", "reference_distance_m"})
        detail::require(pl, key, std::string("path_loss.") + key);
    cfg.path_loss.exponent = detail::get_number(pl, "exponent", "path_loss.exponent");
    cfg.path_loss.wavelength = detail::get_number(pl, "wavelength_m", "path_loss.wavelength_m");
    cfg.path_loss.reference_distance =
        detail::get_number(pl, "reference_distance_m", "path_loss.reference_distance_m");

    if (root.contains("pus")) {
        const json& pus = root.at("pus");
        if (!pus.is_array()) throw ConfigError("pus: expected an array");
        for (std::size_t k = 0; k < pus.size(); ++k) {
            const json& p = pus[k];
            const std::string at = "pus[" + std::to_string(k) + "]";
            detail::reject_unknown_keys(p, at,
                                        {"kind", "distance_m", "bandwidth_hz", "center_offset_hz",
                                         "interference_cap", "probability", "fading_rate"});
            for (auto key : {"kind", "distance_m", "interference_cap"})
                detail::require(p, key, at + "." + key);
            PuDescriptor pu;
            const auto kind = detail::with_field(at + ".kind", [&] { return p.at("kind").get<std::string>(); });
            if (kind == "adjacent") pu.kind = PuKind::adjacent;
            else if (kind == "cochannel") pu.kind = PuKind::cochannel;
            else throw ConfigError(at + ".kind: expected \"adjacent\" or \"cochannel\"");
            pu.distance = detail::get_number(p, "distance_m", at + ".distance_m");
            pu.interference_cap = detail::get_power(p, "interference_cap", at + ".interference_cap");
            if (p.contains("probability")) pu.probability = detail::get_number(p, "probability", at + ".probability");
            if (p.contains("fading_rate")) pu.fading_rate = detail::get_number(p, "fading_rate", at + ".fading_rate");
            if (pu.kind == PuKind::adjacent) {
                detail::require(p, "bandwidth_hz", at + ".bandwidth_hz");
                detail::require(p, "center_offset_hz", at + ".center_offset_hz");
                pu.bandwidth = detail::get_number(p, "bandwidth_hz", at + ".bandwidth_hz");
                pu.center_offset = detail::get_number(p, "center_offset_hz", at + ".center_offset_hz");
            } else if (p.contains("bandwidth_hz") || p.contains("center_offset_hz")) {
                throw ConfigError(at + ": bandwidth_hz/center_offset_hz only apply to adjacent PUs");
            }
            cfg.pus.push_back(pu);
        }
    }

    if (root.contains("experiment")) {
        const json& ex = root.at("experiment");
        detail::reject_unknown_keys(ex, "experiment", {"trials", "seed", "sweep"});
        if (ex.contains("trials"))
            cfg.experiment.trials = static_cast<int>(detail::get_integer(ex, "trials", "experiment.trials"));
        if (ex.contains("seed")) {
            const json& sd = ex.at("seed");
            if (!sd.is_number_unsigned()) throw ConfigError("experiment.seed: expected a non-negative integer");
            cfg.experiment.seed = sd.get<std::uint64_t>();
        }
        if (ex.contains("sweep")) {
            const json& sw = ex.at("sweep");
            detail::reject_unknown_keys(sw, "experiment.sweep", {"param", "values"});
            detail::require(sw, "param", "experiment.sweep.param");
            detail::require(sw, "values", "experiment.sweep.values");
            SweepSpec spec;
            spec.param = parse_sweep_param(
                detail::with_field("experiment.sweep.param", [&] { return sw.at("param").get<std::string>(); }));
            if (!sw.at("values").is_array()) throw ConfigError("experiment.sweep.values: expected an array");
            for (const auto& v : sw.at("values"))
                spec.values.push_back(detail::number_or_inf(v, "experiment.sweep.values"));
            cfg.experiment.sweep = spec;
        }
    }

    validate(cfg);
    return cfg;
}

}  // namespace detail

/// Parses a scenario document, fills defaults and validates every invariant.
inline ScenarioConfig load_scenario(std::string_view text)
{
    try {
        return detail::load_scenario_unchecked(text);
    } catch (const nlohmann::json::exception& e) {
        // Type errors in places without a field-specific wrapper.
        throw ConfigError(std::string("invalid value: ") + e.what());
    }
}

/// Canonical JSON form (powers in W); load_scenario(to_json(cfg).dump()) == cfg.
inline nlohmann::json to_json(const ScenarioConfig& cfg)
{
    using detail::json;
    using detail::power_json;
    json root;
    const auto& s = cfg.su;
    json su;
    su["num_subcarriers"] = s.num_subcarriers;
    su["symbol_duration_s"] = s.symbol_duration;
    su["subcarrier_spacing_hz"] = s.subcarrier_spacing;
    su["noise_variance"] = power_json(s.noise_variance);
    bool uniform = !s.ber_threshold.empty();
    for (double b : s.ber_threshold)
        uniform = uniform && b == s.ber_threshold.front();
    if (uniform) su["ber_threshold"] = s.ber_threshold.front();
    else su["ber_threshold"] = s.ber_threshold;
    su["alpha"] = s.alpha;
    su["power_threshold"] = power_json(s.power_threshold);
    su["max_bits"] = s.max_bits;
    su["su_link_gain"] = s.su_link_gain;
    su["pu_interference"] = power_json(s.pu_interference);
    if (!s.pu_interference_per_subcarrier.empty())
        su["pu_interference_per_subcarrier"] = {{"values", s.pu_interference_per_subcarrier}, {"unit", "W"}};
    root["su"] = su;

    root["path_loss"] = {{"exponent", cfg.path_loss.exponent},
                         {"wavelength_m", cfg.path_loss.wavelength},
                         {"reference_distance_m", cfg.path_loss.reference_distance}};

    json pus = json::array();
    for (const auto& pu : cfg.pus) {
        json p;
        p["kind"] = to_string(pu.kind);
        p["distance_m"] = pu.distance;
        if (pu.kind == PuKind::adjacent) {
            p["bandwidth_hz"] = pu.bandwidth;
            p["center_offset_hz"] = pu.center_offset;
        }
        p["interference_cap"] = power_json(pu.interference_cap);
        p["probability"] = pu.probability;
        p["fading_rate"] = pu.fading_rate;
        pus.push_back(p);
    }
    root["pus"] = pus;

    json ex;
    ex["trials"] = cfg.experiment.trials;
    ex["seed"] = cfg.experiment.seed;
    if (cfg.experiment.sweep) {
        json values = json::array();
        for (double v : cfg.experiment.sweep->values) {
            if (std::isinf(v)) values.push_back("inf");
            else values.push_back(v);
        }
        ex["sweep"] = {{"param", to_string(cfg.experiment.sweep->param)}, {"values", values}};
    }
    root["experiment"] = ex;
    return root;
}

inline std::string serialize(const ScenarioConfig& cfg) { return to_json(cfg).dump(2); }

}  // namespace cogload
