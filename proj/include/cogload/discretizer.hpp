#pragma once

// Integer bit loading from a continuous solution: round to the nearest admissible
// constellation, re-derive the BER-exact power, then strip bits greedily until every
// cap holds again.

#include "cogload/constraints.hpp"
#include "cogload/errors.hpp"
#include "cogload/link_model.hpp"
#include "cogload/solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace cogload {

struct Allocation {
    std::vector<int> bits;       // each in {0} ∪ {2, ..., b_max}
    std::vector<double> powers;  // W
    double objective = 0.0;
    bool feasible = true;
    int repair_steps = 0;

    std::vector<double> bits_as_real() const { return {bits.begin(), bits.end()}; }
    int total_bits() const
    {
        int s = 0;
        for (int b : bits)
            s += b;
        return s;
    }
    double total_power() const
    {
        double s = 0.0;
        for (double p : powers)
            s += p;
        return s;
    }
};

/// Power that puts a b-bit QAM symbol exactly at BER_th: (2^b - 1) K / C.
inline double power_for_bits(int bits, double cnir, double ber_threshold, int max_bits = 16)
{
    if (bits == 0) return 0.0;
    if (bits < 2 || bits > max_bits)
        throw DomainError("power_for_bits: " + std::to_string(bits) + " bits outside {0} ∪ {2.." +
                          std::to_string(max_bits) + "}");
    if (!(cnir > 0.0)) throw DomainError("power_for_bits: CNIR must be positive");
    return (std::exp2(bits) - 1.0) * ber_power_factor(ber_threshold) / cnir;
}

/// Power saved by dropping the last bit: P(b) - P(b - 1), with 2 -> 0 for b = 2.
inline double power_decrement(int bits, double cnir, double ber_threshold, int max_bits = 16)
{
    const int lower = bits == 2 ? 0 : bits - 1;
    return power_for_bits(bits, cnir, ber_threshold, max_bits) -
           power_for_bits(lower, cnir, ber_threshold, max_bits);
}

/// Nearest admissible bit count: [1.5, 2) -> 2, below 1.5 -> 0, clamped to b_max.
inline int round_bits(double continuous_bits, int max_bits)
{
    if (!(continuous_bits >= 1.5)) return 0;
    const double r = std::round(continuous_bits);
    return static_cast<int>(std::min<double>(std::max(r, 2.0), max_bits));
}

inline FeasibilityReport check_feasible(const Allocation& alloc, const ConstraintCaps& caps,
                                        std::span<const double> cnir, std::span<const double> ber_threshold)
{
    const auto bits = alloc.bits_as_real();
    return check_feasible(bits, alloc.powers, caps, cnir, ber_threshold);
}

namespace detail {

inline bool caps_hold(std::span<const double> powers, const ConstraintCaps& caps)
{
    double total = 0.0;
    for (double p : powers)
        total += p;
    if (!within_cap(total, caps.total_cap)) return false;
    for (std::size_t l = 0; l < caps.aci_caps.size(); ++l) {
        double used = 0.0;
        for (std::size_t i = 0; i < powers.size(); ++i)
            used += powers[i] * caps.aci_weights.weights[l][i];
        if (!within_cap(used, caps.aci_caps[l])) return false;
    }
    return true;
}

}  // namespace detail

inline Allocation round_and_repair(const ContinuousSolution& cont, const LoadingProblem& p, int max_bits)
{
    const std::size_t n = p.size();
    if (cont.bits.size() != n) throw DomainError("round_and_repair: dimension mismatch");
    if (max_bits < 2) throw DomainError("round_and_repair: b_max must be at least 2");

    Allocation out;
    out.bits.assign(n, 0);
    out.powers.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p.cnir[i] > 0.0)) continue;
        out.bits[i] = round_bits(cont.bits[i], max_bits);
        out.powers[i] = power_for_bits(out.bits[i], p.cnir[i], p.ber_threshold[i], max_bits);
    }

    while (!detail::caps_hold(out.powers, p.caps)) {
        // Largest ΔP wins; near-equal ΔPs (relative 1e-12) tie and go to the lowest index.
        std::size_t pick = n;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (out.bits[i] == 0) continue;
            const double dp = power_decrement(out.bits[i], p.cnir[i], p.ber_threshold[i], max_bits);
            if (pick == n || dp > best * (1.0 + 1e-12)) {
                pick = i;
                best = dp;
            }
        }
        if (pick == n) break;  // all silent; caps are non-negative so this is feasible
        out.bits[pick] = out.bits[pick] == 2 ? 0 : out.bits[pick] - 1;
        out.powers[pick] = power_for_bits(out.bits[pick], p.cnir[pick], p.ber_threshold[pick], max_bits);
        ++out.repair_steps;
    }

    const auto bits = out.bits_as_real();
    out.objective = objective_value(bits, out.powers, p.alpha);
    out.feasible = check_feasible(bits, out.powers, p.caps, p.cnir, p.ber_threshold).feasible;
    return out;
}

}  // namespace cogload
