#pragma once

// Deterministic power caps from the statistical CCI/ACI constraints, and
// feasibility evaluation of an allocation against them.

#include "cogload/channel.hpp"
#include "cogload/errors.hpp"
#include "cogload/link_model.hpp"
#include "cogload/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cogload {

/// Relative slack within which a cap or BER target still counts as satisfied.
inline constexpr double kFeasibilityRelTol = 1e-9;

struct ConstraintCaps {
    double total_cap = kInf;        // W, min(P_th, CCI caps)
    std::vector<double> aci_caps;   // W, one per adjacent PU
    AciFactors aci_weights;
};

namespace detail {

/// -ln(1 - Ψ); +inf at Ψ = 1.
inline double tail_quantile(double probability)
{
    if (!(probability > 0.0 && probability <= 1.0)) throw DomainError("probability out of range (0, 1]");
    return -std::log1p(-probability);
}

}  // namespace detail

/// min(P_th, ν 10^(L/10) P_CCI / (-ln(1 - Ψ))). Ψ = 1 gives exactly 0 unless P_CCI is infinite.
inline double cci_power_cap(double rate, double path_loss_db, double probability, double cci_threshold,
                            double power_threshold = kInf)
{
    if (!(rate > 0.0)) throw DomainError("cci_power_cap: fading rate must be positive");
    if (!(cci_threshold > 0.0)) throw DomainError("cci_power_cap: CCI threshold must be positive");
    if (std::isinf(cci_threshold)) return power_threshold;  // never exceeded
    if (probability == 1.0) return 0.0;
    const double cap = rate * std::pow(10.0, 0.1 * path_loss_db) * cci_threshold / detail::tail_quantile(probability);
    return std::min(power_threshold, cap);
}

/// ν P_ACI / (-ln(1 - Ψ)). Ψ = 1 gives exactly 0 unless P_ACI is infinite.
inline double aci_power_cap(double rate, double probability, double aci_threshold)
{
    if (!(rate > 0.0)) throw DomainError("aci_power_cap: fading rate must be positive");
    if (!(aci_threshold > 0.0)) throw DomainError("aci_power_cap: ACI threshold must be positive");
    if (std::isinf(aci_threshold)) return kInf;
    if (probability == 1.0) return 0.0;
    return rate * aci_threshold / detail::tail_quantile(probability);
}

/// Caps for a scenario: the total cap folds P_th and every co-channel PU, one ACI cap per
/// adjacent PU (paired with its column of `weights`).
inline ConstraintCaps make_caps(const ScenarioConfig& cfg, AciFactors weights)
{
    ConstraintCaps caps;
    caps.total_cap = cfg.su.power_threshold;
    for (const auto& pu : cfg.pus) {
        if (pu.kind == PuKind::cochannel) {
            const double loss = path_loss_db(pu.distance, cfg.path_loss);
            caps.total_cap = std::min(
                caps.total_cap, cci_power_cap(pu.fading_rate, loss, pu.probability, pu.interference_cap));
        } else {
            caps.aci_caps.push_back(aci_power_cap(pu.fading_rate, pu.probability, pu.interference_cap));
        }
    }
    caps.aci_weights = std::move(weights);
    return caps;
}

struct FeasibilityReport {
    std::vector<double> ber;  // per subcarrier; 0 on silent subcarriers
    bool ber_ok = true;
    double total_power = 0.0;
    double total_cap = kInf;
    bool total_ok = true;
    std::vector<double> aci_sums;
    std::vector<double> aci_caps;
    std::vector<bool> aci_ok;
    /// Smallest normalized slack (cap - used) / cap over all constraints; negative when violated.
    double worst_margin = kInf;
    bool feasible = true;
};

namespace detail {

inline bool within_cap(double used, double cap)
{
    return used <= cap * (1.0 + kFeasibilityRelTol) || std::isinf(cap);
}

inline double normalized_slack(double used, double cap)
{
    if (std::isinf(cap)) return kInf;
    if (cap == 0.0) return used <= 0.0 ? 0.0 : -kInf;
    return (cap - used) / cap;
}

}  // namespace detail

/// Checks per-subcarrier BER, the total (power/CCI) cap and every ACI cap.
/// `bits` may be real-valued (continuous solutions) or integral.
inline FeasibilityReport check_feasible(std::span<const double> bits, std::span<const double> powers,
                                        const ConstraintCaps& caps, std::span<const double> cnir,
                                        std::span<const double> ber_threshold)
{
    const std::size_t n = bits.size();
    if (powers.size() != n || cnir.size() != n || ber_threshold.size() != n)
        throw DomainError("check_feasible: dimension mismatch");
    for (const auto& col : caps.aci_weights.weights)
        if (col.size() != n) throw DomainError("check_feasible: ACI weight dimension mismatch");
    if (caps.aci_caps.size() != caps.aci_weights.num_pus())
        throw DomainError("check_feasible: one ACI cap per adjacent PU required");

    FeasibilityReport rep;
    rep.ber.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rep.total_power += powers[i];
        if (bits[i] <= 0.0) continue;
        rep.ber[i] = bit_error_rate(powers[i], bits[i], cnir[i]);
        const bool ok = rep.ber[i] <= ber_threshold[i] * (1.0 + kFeasibilityRelTol);
        rep.ber_ok = rep.ber_ok && ok;
        rep.worst_margin = std::min(rep.worst_margin, (ber_threshold[i] - rep.ber[i]) / ber_threshold[i]);
    }
    rep.total_cap = caps.total_cap;
    rep.total_ok = detail::within_cap(rep.total_power, caps.total_cap);
    rep.worst_margin = std::min(rep.worst_margin, detail::normalized_slack(rep.total_power, caps.total_cap));

    for (std::size_t l = 0; l < caps.aci_caps.size(); ++l) {
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            used += powers[i] * caps.aci_weights.weights[l][i];
        rep.aci_sums.push_back(used);
        rep.aci_caps.push_back(caps.aci_caps[l]);
        const bool ok = detail::within_cap(used, caps.aci_caps[l]);
        rep.aci_ok.push_back(ok);
        rep.worst_margin = std::min(rep.worst_margin, detail::normalized_slack(used, caps.aci_caps[l]));
    }
    rep.feasible = rep.ber_ok && rep.total_ok &&
                   std::all_of(rep.aci_ok.begin(), rep.aci_ok.end(), [](bool b) { return b; });
    return rep;
}

}  // namespace cogload
