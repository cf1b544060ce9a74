#pragma once

// First-order optimality check of a continuous solution.
//
// With the per-subcarrier BER multipliers λ_i recovered from ∂L/∂P_i = 0,
//   λ_i = μ_i (2^b_i - 1) / (0.32 C_i e_i),   e_i = exp(-1.6 C_i P_i / (2^b_i - 1)),
// stationarity in b_i reads  -(1 - α) + λ_i 0.32 ln2 C_i P_i 2^b_i e_i / (2^b_i - 1)^2 = 0.

#include "cogload/constraints.hpp"
#include "cogload/errors.hpp"
#include "cogload/link_model.hpp"
#include "cogload/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace cogload {

struct KktTolerances {
    double stationarity = 1e-8;
    double primal = 1e-9;          // relative to each cap / BER target
    double complementarity = 1e-10;
    double dual = 1e-12;
};

struct KktReport {
    double stationarity_power = 0.0;  // max |∂L/∂P_i| over active subcarriers
    double stationarity_bits = 0.0;   // max |∂L/∂b_i| over active subcarriers
    double primal = 0.0;              // max normalized violation max(g, 0)
    double complementarity = 0.0;     // max |λ g|
    double dual_sign = 0.0;           // min multiplier, including the recovered λ_i
    std::vector<double> ber_multipliers;  // recovered λ_i; 0 on nulled subcarriers
    bool pass = false;
};

inline KktReport kkt_verify(const ContinuousSolution& s, const LoadingProblem& p, const KktTolerances& tol = {})
{
    const std::size_t n = p.size();
    if (s.bits.size() != n || s.powers.size() != n || p.ber_threshold.size() != n)
        throw DomainError("kkt_verify: dimension mismatch");
    if (s.lambda_aci.size() != p.caps.aci_caps.size() || p.caps.aci_weights.num_pus() != p.caps.aci_caps.size())
        throw DomainError("kkt_verify: one ACI multiplier and cap per adjacent PU required");
    for (const auto& col : p.caps.aci_weights.weights)
        if (col.size() != n) throw DomainError("kkt_verify: ACI weight dimension mismatch");

    const double alpha = p.alpha;
    KktReport rep;
    rep.ber_multipliers.assign(n, 0.0);
    rep.dual_sign = s.lambda_power;
    for (double l : s.lambda_aci)
        rep.dual_sign = std::min(rep.dual_sign, l);

    auto violation = [](double used, double cap) {
        if (std::isinf(cap)) return 0.0;
        const double over = used - cap;
        if (over <= 0.0) return 0.0;
        return cap > 0.0 ? over / cap : kInf;
    };
    auto gap = [](double used, double cap) { return std::isinf(cap) ? 0.0 : used - cap; };

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += s.powers[i];
        if (s.bits[i] <= 0.0) continue;
        const double c = p.cnir[i];
        const double b = s.bits[i];
        const double pw = s.powers[i];
        const double m = std::exp2(b) - 1.0;
        const double e = std::exp(-1.6 * c * pw / m);

        double mu = alpha + s.lambda_power;
        for (std::size_t l = 0; l < s.lambda_aci.size(); ++l)
            mu += p.caps.aci_weights.weights[l][i] * s.lambda_aci[l];

        const double lam_i = mu * m / (0.32 * c * e);
        rep.ber_multipliers[i] = lam_i;
        rep.dual_sign = std::min(rep.dual_sign, lam_i);

        const double d_power = alpha - lam_i * 0.32 * c / m * e + (mu - alpha);
        const double d_bits = -(1.0 - alpha) + lam_i * 0.32 * std::numbers::ln2 * c * pw * std::exp2(b) / (m * m) * e;
        rep.stationarity_power = std::max(rep.stationarity_power, std::abs(d_power));
        rep.stationarity_bits = std::max(rep.stationarity_bits, std::abs(d_bits));

        const double g = 0.2 * e - p.ber_threshold[i];
        rep.primal = std::max(rep.primal, std::max(g, 0.0) / p.ber_threshold[i]);
        rep.complementarity = std::max(rep.complementarity, std::abs(lam_i * g));
    }

    rep.primal = std::max(rep.primal, violation(total, p.caps.total_cap));
    rep.complementarity = std::max(rep.complementarity, std::abs(s.lambda_power * gap(total, p.caps.total_cap)));
    for (std::size_t l = 0; l < p.caps.aci_caps.size(); ++l) {
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            used += s.powers[i] * p.caps.aci_weights.weights[l][i];
        rep.primal = std::max(rep.primal, violation(used, p.caps.aci_caps[l]));
        rep.complementarity = std::max(rep.complementarity, std::abs(s.lambda_aci[l] * gap(used, p.caps.aci_caps[l])));
    }

    rep.pass = rep.stationarity_power < tol.stationarity && rep.stationarity_bits < tol.stationarity &&
               rep.primal < tol.primal && rep.complementarity < tol.complementarity && rep.dual_sign >= -tol.dual;
    return rep;
}

}  // namespace cogload
