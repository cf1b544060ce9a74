#pragma once

// SU-link fading, PU->SU interference, SU->PU interference-link gains and the
// spectral-overlap (ACI) weights of every subcarrier.

#include "cogload/errors.hpp"
#include "cogload/quadrature.hpp"
#include "cogload/rng.hpp"
#include "cogload/scenario.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace cogload {

struct ChannelRealization {
    std::vector<double> cnir;             // C_i = |H_i|^2 g / (σ² + J_i)
    std::vector<double> pu_interference;  // J_i, W
    std::vector<double> sp_gain_rate;     // ν of each PU, in config order
};

/// ϖ[ℓ][i]: linear ACI weight of subcarrier i towards the ℓ-th adjacent PU
/// (adjacent PUs in config order). Includes the path loss to that PU.
struct AciFactors {
    std::vector<std::vector<double>> weights;

    std::size_t num_pus() const { return weights.size(); }
};

/// Per-subcarrier PU->SU interference J. The constant level applies unless a
/// per-subcarrier override is configured.
inline std::vector<double> pu_interference_to_su(const ScenarioConfig& cfg)
{
    const auto n = static_cast<std::size_t>(cfg.su.num_subcarriers);
    if (!cfg.su.pu_interference_per_subcarrier.empty()) {
        if (cfg.su.pu_interference_per_subcarrier.size() != n)
            throw ConfigError("su.pu_interference_per_subcarrier: needs one value per subcarrier");
        for (double j : cfg.su.pu_interference_per_subcarrier)
            if (!(j >= 0.0)) throw ConfigError("su.pu_interference_per_subcarrier: negative interference");
        return cfg.su.pu_interference_per_subcarrier;
    }
    if (!(cfg.su.pu_interference >= 0.0)) throw ConfigError("su.pu_interference: negative interference");
    return std::vector<double>(n, cfg.su.pu_interference);
}

/// One draw of |H_sp|^2 ~ Exponential with mean 1/ν.
inline double sample_sp_gain(double rate, Rng& rng)
{
    if (!(rate > 0.0)) throw DomainError("sample_sp_gain: fading rate must be positive");
    return std::exponential_distribution<double>(rate)(rng);
}

inline ChannelRealization sample_su_channel(const ScenarioConfig& cfg, Rng& rng)
{
    ChannelRealization out;
    out.pu_interference = pu_interference_to_su(cfg);
    const auto n = out.pu_interference.size();
    out.cnir.resize(n);
    std::exponential_distribution<double> rayleigh_power(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double h2 = rayleigh_power(rng);
        out.cnir[i] = h2 * cfg.su.su_link_gain / (cfg.su.noise_variance + out.pu_interference[i]);
    }
    out.sp_gain_rate.reserve(cfg.pus.size());
    for (const auto& pu : cfg.pus)
        out.sp_gain_rate.push_back(pu.fading_rate);
    return out;
}

/// ϖ = T_s 10^(-L/10) ∫_{f_c - B/2}^{f_c + B/2} sinc²(T_s f) df, by adaptive Simpson.
inline double spectral_overlap_factor(double center_offset, double pu_bandwidth, double symbol_duration,
                                      double path_loss_db, double quad_tol = 1e-10)
{
    if (!(pu_bandwidth > 0.0)) throw DomainError("spectral_overlap_factor: PU bandwidth must be positive");
    if (!(symbol_duration > 0.0)) throw DomainError("spectral_overlap_factor: symbol duration must be positive");
    if (!(quad_tol > 0.0 && quad_tol <= 1e-3))
        throw DomainError("spectral_overlap_factor: quadrature tolerance must lie in (0, 1e-3]");
    // Substituting x = T_s f absorbs the leading T_s.
    const double lo = symbol_duration * (center_offset - 0.5 * pu_bandwidth);
    const double hi = symbol_duration * (center_offset + 0.5 * pu_bandwidth);
    return std::pow(10.0, -0.1 * path_loss_db) * integrate_sinc2(lo, hi, quad_tol);
}

/// Spectral distance (Hz) from subcarrier `index` (0-based) to the centre of an adjacent
/// PU band. Subcarrier i sits at (i + 1/2)Δf above the SU lower edge; a positive PU
/// offset is measured upward from the upper edge, a negative one downward from the lower edge.
inline double subcarrier_to_pu_distance(int index, const SuParams& su, const PuDescriptor& pu)
{
    const double df = su.subcarrier_spacing;
    const double from_lower = (index + 0.5) * df;
    if (pu.center_offset >= 0.0) {
        const double to_upper = su.num_subcarriers * df - from_lower;
        return to_upper + pu.center_offset;
    }
    return from_lower - pu.center_offset;
}

inline AciFactors aci_factors(const ScenarioConfig& cfg, double quad_tol = 1e-10)
{
    AciFactors out;
    for (const auto& pu : cfg.pus) {
        if (pu.kind != PuKind::adjacent) continue;
        const double loss = path_loss_db(pu.distance, cfg.path_loss);
        std::vector<double> column(static_cast<std::size_t>(cfg.su.num_subcarriers));
        for (int i = 0; i < cfg.su.num_subcarriers; ++i)
            column[static_cast<std::size_t>(i)] = spectral_overlap_factor(
                subcarrier_to_pu_distance(i, cfg.su, pu), pu.bandwidth, cfg.su.symbol_duration, loss, quad_tol);
        out.weights.push_back(std::move(column));
    }
    return out;
}

}  // namespace cogload
