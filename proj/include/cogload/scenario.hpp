#pragma once

// Scenario data model: SU OFDM parameters, primary-user descriptors, path loss.
// All power quantities are stored in watts.

#include "cogload/errors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace cogload {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SuParams {
    int num_subcarriers = 128;
    double symbol_duration = 102.4e-6;   // s
    double subcarrier_spacing = 9765.6;  // Hz
    double noise_variance = 1e-9;        // W
    /// Per-subcarrier target BER; a scalar config value is broadcast.
    std::vector<double> ber_threshold;
    double alpha = 0.5;
    double power_threshold = kInf;  // W
    int max_bits = 16;
    double su_link_gain = 1.0;
    double pu_interference = 0.0;  // W, constant J on every subcarrier
    /// Optional per-subcarrier J override (W); empty means "use pu_interference".
    std::vector<double> pu_interference_per_subcarrier;

    bool operator==(const SuParams&) const = default;
};

enum class PuKind { adjacent, cochannel };

struct PuDescriptor {
    PuKind kind = PuKind::cochannel;
    double distance = 0.0;          // m
    double bandwidth = 0.0;         // Hz, adjacent only
    double center_offset = 0.0;     // Hz, adjacent only; sign selects the side of the SU band
    double interference_cap = 0.0;  // W
    double probability = 0.9;
    double fading_rate = 1.0;  // ν, inverse mean of |H_sp|^2

    bool operator==(const PuDescriptor&) const = default;
};

struct PathLossParams {
    double exponent = 4.0;
    double wavelength = 1.0 / 3.0;       // m
    double reference_distance = 500.0;   // m

    bool operator==(const PathLossParams&) const = default;
};

enum class SweepParam { psi, alpha, p_aci, p_cci };

struct SweepSpec {
    SweepParam param = SweepParam::psi;
    std::vector<double> values;

    bool operator==(const SweepSpec&) const = default;
};

struct ExperimentParams {
    int trials = 1000;
    std::uint64_t seed = 1;
    std::optional<SweepSpec> sweep;

    bool operator==(const ExperimentParams&) const = default;
};

struct ScenarioConfig {
    SuParams su;
    PathLossParams path_loss;
    std::vector<PuDescriptor> pus;
    ExperimentParams experiment;

    bool operator==(const ScenarioConfig&) const = default;

    std::size_t num_adjacent() const
    {
        std::size_t n = 0;
        for (const auto& pu : pus)
            n += pu.kind == PuKind::adjacent ? 1 : 0;
        return n;
    }
};

/// Log-distance path loss anchored at free-space loss at the reference distance:
/// L(d) = 20 log10(4π d0 / λ) + 10 γ log10(d / d0). Undefined for d < d0.
inline double path_loss_db(double distance, const PathLossParams& p)
{
    if (!(distance >= p.reference_distance))
        throw DomainError("path_loss_db: distance " + std::to_string(distance) +
                          " m is below the reference distance " +
                          std::to_string(p.reference_distance) + " m");
    const double free_space =
        20.0 * std::log10(4.0 * std::numbers::pi * p.reference_distance / p.wavelength);
    return free_space + 10.0 * p.exponent * std::log10(distance / p.reference_distance);
}

inline const char* to_string(PuKind k) { return k == PuKind::adjacent ? "adjacent" : "cochannel"; }

inline const char* to_string(SweepParam p)
{
    switch (p) {
    case SweepParam::psi: return "psi";
    case SweepParam::alpha: return "alpha";
    case SweepParam::p_aci: return "p_aci";
    case SweepParam::p_cci: return "p_cci";
    }
    return "?";
}

inline SweepParam parse_sweep_param(const std::string& s)
{
    if (s == "psi") return SweepParam::psi;
    if (s == "alpha") return SweepParam::alpha;
    if (s == "p_aci") return SweepParam::p_aci;
    if (s == "p_cci") return SweepParam::p_cci;
    throw ConfigError("sweep.param: unknown parameter '" + s + "' (expected psi, alpha, p_aci, p_cci)");
}

/// Checks every invariant of the data model; throws ConfigError naming the field.
inline void validate(const ScenarioConfig& cfg)
{
    auto fail = [](const std::string& field, const std::string& what) {
        throw ConfigError(field + ": " + what);
    };
    const SuParams& su = cfg.su;
    if (su.num_subcarriers < 1) fail("su.num_subcarriers", "must be a positive integer");
    if (!(su.symbol_duration > 0.0) || !std::isfinite(su.symbol_duration))
        fail("su.symbol_duration_s", "must be positive");
    if (!(su.subcarrier_spacing > 0.0) || !std::isfinite(su.subcarrier_spacing))
        fail("su.subcarrier_spacing_hz", "must be positive");
    // Δf is usually quoted to ~5 significant digits (9.7656 kHz for 102.4 µs).
    if (std::abs(su.symbol_duration * su.subcarrier_spacing - 1.0) > 1e-5)
        fail("su.subcarrier_spacing_hz", "symbol_duration * subcarrier_spacing must equal 1");
    if (!(su.noise_variance > 0.0) || !std::isfinite(su.noise_variance))
        fail("su.noise_variance", "must be positive");
    if (su.ber_threshold.size() != static_cast<std::size_t>(su.num_subcarriers))
        fail("su.ber_threshold", "needs one value per subcarrier");
    for (double b : su.ber_threshold)
        if (!(b > 0.0 && b < 0.2)) fail("su.ber_threshold", "ber threshold out of range (0, 0.2)");
    if (!(su.alpha > 0.0 && su.alpha < 1.0)) fail("su.alpha", "alpha out of range (0, 1)");
    if (!(su.power_threshold > 0.0)) fail("su.power_threshold", "must be positive or inf");
    if (su.max_bits < 2) fail("su.max_bits", "must be at least 2");
    if (!(su.su_link_gain >= 0.0) || !std::isfinite(su.su_link_gain))
        fail("su.su_link_gain", "must be non-negative");
    if (!(su.pu_interference >= 0.0) || !std::isfinite(su.pu_interference))
        fail("su.pu_interference", "negative interference");
    if (!su.pu_interference_per_subcarrier.empty()) {
        if (su.pu_interference_per_subcarrier.size() != static_cast<std::size_t>(su.num_subcarriers))
            fail("su.pu_interference_per_subcarrier", "needs one value per subcarrier");
        for (double j : su.pu_interference_per_subcarrier)
            if (!(j >= 0.0) || !std::isfinite(j)) fail("su.pu_interference_per_subcarrier", "negative interference");
    }

    const PathLossParams& pl = cfg.path_loss;
    if (!(pl.exponent > 0.0)) fail("path_loss.exponent", "must be positive");
    if (!(pl.wavelength > 0.0)) fail("path_loss.wavelength_m", "must be positive");
    if (!(pl.reference_distance > 0.0)) fail("path_loss.reference_distance_m", "must be positive");

    for (std::size_t k = 0; k < cfg.pus.size(); ++k) {
        const PuDescriptor& pu = cfg.pus[k];
        const std::string at = "pus[" + std::to_string(k) + "].";
        if (!(pu.distance > 0.0)) fail(at + "distance_m", "must be positive");
        if (pu.distance < pl.reference_distance)
            fail(at + "distance_m", "below the path-loss reference distance");
        if (!(pu.interference_cap > 0.0)) fail(at + "interference_cap", "must be positive or inf");
        if (!(pu.probability > 0.0 && pu.probability <= 1.0))
            fail(at + "probability", "probability out of range (0, 1]");
        if (!(pu.fading_rate > 0.0) || !std::isfinite(pu.fading_rate))
            fail(at + "fading_rate", "must be positive");
        if (pu.kind == PuKind::adjacent) {
            if (!(pu.bandwidth > 0.0) || !std::isfinite(pu.bandwidth))
                fail(at + "bandwidth_hz", "must be positive");
            if (!std::isfinite(pu.center_offset)) fail(at + "center_offset_hz", "must be finite");
        }
    }

    const ExperimentParams& ex = cfg.experiment;
    if (ex.trials < 1) fail("experiment.trials", "must be at least 1");
    if (ex.sweep && ex.sweep->values.empty()) fail("experiment.sweep.values", "must not be empty");
}

}  // namespace cogload
