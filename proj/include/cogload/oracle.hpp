#pragma once

// Exhaustive search over integer bit vectors for small N: the discrete global optimum
// of the loading problem, used as a baseline for the proposed algorithm.

#include "cogload/constraints.hpp"
#include "cogload/discretizer.hpp"
#include "cogload/errors.hpp"
#include "cogload/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

namespace cogload {

struct OracleOptions {
    int max_bits = 8;
    bool even_bits_only = false;  // restrict to square QAM {0, 2, 4, ...}
    bool prune = true;
    bool parallel = false;  // one task per value of the first subcarrier
    int max_subcarriers = 10;
    double node_budget = 2e9;  // cap on the unpruned leaf count
};

struct OracleResult {
    Allocation best;
    double objective = 0.0;
    std::uint64_t nodes_visited = 0;
    double elapsed = 0.0;  // s
};

namespace detail {

class ExhaustiveSearch {
public:
    ExhaustiveSearch(const LoadingProblem& p, const OracleOptions& opt) : p_(p), opt_(opt), n_(p.size())
    {
        domain_.push_back(0);
        for (int b = 2; b <= opt.max_bits; ++b)
            if (!opt.even_bits_only || b % 2 == 0) domain_.push_back(b);

        power_.assign(n_, std::vector<double>(domain_.size(), 0.0));
        score_.assign(n_, std::vector<double>(domain_.size(), 0.0));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < domain_.size(); ++k) {
                // A dead subcarrier can only stay silent.
                const double pw = domain_[k] == 0 ? 0.0
                                  : p.cnir[i] > 0.0
                                      ? power_for_bits(domain_[k], p.cnir[i], p.ber_threshold[i], opt.max_bits)
                                      : kInf;
                power_[i][k] = pw;
                score_[i][k] = p.alpha * pw - (1.0 - p.alpha) * domain_[k];
            }
        // suffix_min_[i]: best unconstrained score of subcarriers i..n-1.
        suffix_min_.assign(n_ + 1, 0.0);
        for (std::size_t i = n_; i-- > 0;) {
            double m = 0.0;  // b = 0 scores 0
            for (double s : score_[i])
                m = std::min(m, s);
            suffix_min_[i] = suffix_min_[i + 1] + m;
        }
        aci_stack_.assign(n_ + 1, std::vector<double>(p.caps.aci_caps.size(), 0.0));
        bits_.assign(n_, 0);
    }

    std::size_t domain_size() const { return domain_.size(); }

    /// Searches every completion of a fixed first-subcarrier choice (or the full tree).
    void run(int first_choice = -1)
    {
        if (n_ == 0) {
            consider(0.0);
            return;
        }
        if (first_choice < 0) {
            descend(0, 0.0, 0.0);
            return;
        }
        const auto k = static_cast<std::size_t>(first_choice);
        ++nodes;
        if (opt_.prune && !within_cap(power_[0][k], p_.caps.total_cap)) return;
        if (!place(0, k)) return;
        descend(1, power_[0][k], score_[0][k]);
        bits_[0] = 0;
    }

    bool found = false;
    double best_score = kInf;
    std::vector<int> best_bits;
    std::uint64_t nodes = 0;

private:
    /// Sets subcarrier i to domain_[k] and extends the ACI partial sums to depth i + 1.
    bool place(std::size_t i, std::size_t k)
    {
        const double pw = power_[i][k];
        bits_[i] = domain_[k];
        bool ok = true;
        for (std::size_t l = 0; l < p_.caps.aci_caps.size(); ++l) {
            aci_stack_[i + 1][l] = aci_stack_[i][l] + pw * p_.caps.aci_weights.weights[l][i];
            ok = ok && within_cap(aci_stack_[i + 1][l], p_.caps.aci_caps[l]);
        }
        if (opt_.prune && !ok) {
            bits_[i] = 0;
            return false;
        }
        return true;
    }

    void descend(std::size_t i, double power_sum, double score)
    {
        if (i == n_) {
            consider(score);
            return;
        }
        for (std::size_t k = 0; k < domain_.size(); ++k) {
            const double ps = power_sum + power_[i][k];
            const double sc = score + score_[i][k];
            if (opt_.prune) {
                if (!within_cap(ps, p_.caps.total_cap)) break;  // powers grow with k
                const double bound = sc + suffix_min_[i + 1];
                if (found && bound > best_score + 1e-12 * (std::abs(best_score) + 1.0)) continue;
            }
            ++nodes;
            if (!place(i, k)) continue;
            descend(i + 1, ps, sc);
            bits_[i] = 0;
        }
    }

    void consider(double score)
    {
        if (!opt_.prune) {
            // Recheck every constraint at the leaf.
            double total = 0.0;
            for (std::size_t i = 0; i < n_; ++i)
                total += power_[i][index_of(bits_[i])];
            if (!within_cap(total, p_.caps.total_cap)) return;
            for (std::size_t l = 0; l < p_.caps.aci_caps.size(); ++l)
                if (!within_cap(aci_stack_[n_][l], p_.caps.aci_caps[l])) return;
        }
        // Leaves arrive in lexicographic order, so a strict improvement test keeps
        // the lexicographically smallest of equal-score allocations.
        if (!found || score < best_score) {
            found = true;
            best_score = score;
            best_bits = bits_;
        }
    }

    std::size_t index_of(int bits) const
    {
        for (std::size_t k = 0; k < domain_.size(); ++k)
            if (domain_[k] == bits) return k;
        return 0;
    }

    const LoadingProblem& p_;
    OracleOptions opt_;
    std::size_t n_;
    std::vector<int> domain_;
    std::vector<std::vector<double>> power_;
    std::vector<std::vector<double>> score_;
    std::vector<double> suffix_min_;
    std::vector<std::vector<double>> aci_stack_;  // [depth][pu] partial ACI sums
    std::vector<int> bits_;
};

}  // namespace detail

inline OracleResult exhaustive_search(const LoadingProblem& p, const OracleOptions& opt = {})
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = p.size();
    if (static_cast<int>(n) > opt.max_subcarriers)
        throw DomainError("exhaustive_search: " + std::to_string(n) + " subcarriers exceeds the limit of " +
                          std::to_string(opt.max_subcarriers) + "; the search grows as (b_max)^N");
    if (opt.max_bits < 2) throw DomainError("exhaustive_search: b_max must be at least 2");
    if (p.caps.aci_caps.size() != p.caps.aci_weights.num_pus())
        throw DomainError("exhaustive_search: one ACI cap per adjacent PU required");

    detail::ExhaustiveSearch probe(p, opt);
    const double leaves = std::pow(static_cast<double>(probe.domain_size()), static_cast<double>(n));
    if (leaves > opt.node_budget)
        throw DomainError("exhaustive_search: " + std::to_string(leaves) + " leaves exceed the node budget");

    bool found = false;
    double best = kInf;
    std::vector<int> bits;
    std::uint64_t nodes = 0;
    if (opt.parallel && n > 0) {
        std::vector<std::future<detail::ExhaustiveSearch>> tasks;
        for (std::size_t k = 0; k < probe.domain_size(); ++k)
            tasks.push_back(std::async(std::launch::async, [&p, &opt, k] {
                detail::ExhaustiveSearch s(p, opt);
                s.run(static_cast<int>(k));
                return s;
            }));
        // Branches are merged in domain order: ties keep the lexicographically smaller bits.
        for (auto& t : tasks) {
            auto s = t.get();
            nodes += s.nodes;
            if (s.found && (!found || s.best_score < best)) {
                found = true;
                best = s.best_score;
                bits = s.best_bits;
            }
        }
    } else {
        probe.run();
        found = probe.found;
        best = probe.best_score;
        bits = probe.best_bits;
        nodes = probe.nodes;
    }
    if (!found) throw SolverError("exhaustive_search: no feasible allocation (the all-zero vector should be)");

    OracleResult out;
    out.best.bits = bits;
    out.best.powers.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (bits[i] > 0) out.best.powers[i] = power_for_bits(bits[i], p.cnir[i], p.ber_threshold[i], opt.max_bits);
    const auto real_bits = out.best.bits_as_real();
    out.best.objective = objective_value(real_bits, out.best.powers, p.alpha);
    out.best.feasible = check_feasible(real_bits, out.best.powers, p.caps, p.cnir, p.ber_threshold).feasible;
    out.objective = out.best.objective;
    out.nodes_visited = nodes;
    out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace cogload
