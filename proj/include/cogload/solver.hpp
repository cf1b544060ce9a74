#pragma once

// Continuous joint bit/power loading.
//
// Minimizes  F = α ΣP_i - (1 - α) Σb_i  subject to BER_i = BER_th,i on every active
// subcarrier, ΣP_i <= total_cap and, for each adjacent PU ℓ, Σ P_i ϖ_i^ℓ <= aci_cap^ℓ.
// On the active set every regime shares one closed form:
//
//     μ_i  = α + λ_power + Σ_ℓ ϖ_i^ℓ λ_aci^ℓ
//     P_i  = (1 - α) / (ln2 μ_i) - K_i / C_i,     K_i = -ln(5 BER_th,i) / 1.6
//     b_i  = log2[(1 - α) C_i / (ln2 μ_i K_i)]
//
// and the regimes differ only in which multipliers are non-zero:
//   case 5  no cap binds (closed form)
//   case 6  total/CCI cap binds (λ_power in closed form)
//   case 7  ACI caps bind (Newton on λ_aci)
//   case 8  both bind (joint Newton)
// Subcarriers whose b_i would fall below 2 (the smallest M-QAM) are nulled.

#include "cogload/channel.hpp"
#include "cogload/constraints.hpp"
#include "cogload/errors.hpp"
#include "cogload/link_model.hpp"
#include "cogload/scenario.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace cogload {

/// Inputs of one loading problem (one channel realization).
struct LoadingProblem {
    std::vector<double> cnir;
    std::vector<double> ber_threshold;  // per subcarrier
    double alpha = 0.5;
    ConstraintCaps caps;

    std::size_t size() const { return cnir.size(); }
};

struct ContinuousSolution {
    std::vector<double> bits;    // 0 on nulled subcarriers, otherwise >= 2
    std::vector<double> powers;  // W
    double lambda_power = 0.0;
    std::vector<double> lambda_aci;  // one per adjacent PU
    std::vector<int> active_set;
    int case_id = 5;
    double objective = 0.0;
};

inline LoadingProblem make_problem(std::span<const double> cnir, double alpha, double ber_threshold,
                                   ConstraintCaps caps = {})
{
    LoadingProblem p;
    p.cnir.assign(cnir.begin(), cnir.end());
    p.ber_threshold.assign(cnir.size(), ber_threshold);
    p.alpha = alpha;
    p.caps = std::move(caps);
    return p;
}

inline LoadingProblem make_problem(const ChannelRealization& realization, const ConstraintCaps& caps,
                                   const SuParams& su)
{
    LoadingProblem p;
    p.cnir = realization.cnir;
    p.ber_threshold = su.ber_threshold;
    if (p.ber_threshold.size() != p.cnir.size())
        throw DomainError("make_problem: ber_threshold and CNIR sizes differ");
    p.alpha = su.alpha;
    p.caps = caps;
    return p;
}

/// Smallest CNIR for which the unconstrained optimum carries at least 2 bits.
inline double cnir_threshold(double alpha, double ber_threshold)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("cnir_threshold: alpha out of range (0, 1)");
    if (!(ber_threshold > 0.0 && ber_threshold <= 0.2))
        throw DomainError("cnir_threshold: ber threshold out of range (0, 0.2]");
    return -(4.0 / 1.6) * (alpha * std::numbers::ln2 / (1.0 - alpha)) * std::log(5.0 * ber_threshold);
}

inline double objective_value(std::span<const double> bits, std::span<const double> powers, double alpha)
{
    double p = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        p += powers[i];
        b += bits[i];
    }
    return alpha * p - (1.0 - alpha) * b;
}

/// Multiplier of the total-power/CCI constraint that makes Σ_{active} P_i equal `cap`:
/// |A| (1-α)/ln2 / (cap + Σ_A K_i/C_i) - α. A negative value means the cap is slack.
inline double lambda_total_power(std::span<const int> active_set, std::span<const double> cnir, double alpha,
                                 std::span<const double> ber_threshold, double cap)
{
    if (active_set.empty()) throw DomainError("lambda_total_power: empty active set");
    double denom = cap;
    for (int i : active_set) {
        const auto k = static_cast<std::size_t>(i);
        denom += ber_power_factor(ber_threshold[k]) / cnir[k];
    }
    if (!(denom > 0.0)) throw DomainError("lambda_total_power: cap incompatible with active set");
    return static_cast<double>(active_set.size()) * (1.0 - alpha) / std::numbers::ln2 / denom - alpha;
}

inline double lambda_total_power(std::span<const int> active_set, std::span<const double> cnir, double alpha,
                                 double ber_threshold, double cap)
{
    const std::vector<double> ber(cnir.size(), ber_threshold);
    return lambda_total_power(active_set, cnir, alpha, ber, cap);
}

namespace detail {

// Tolerances of the multiplier solve, relative to each constraint's scale.
inline constexpr double kResidualTarget = 1e-13;
inline constexpr double kResidualAccept = 1e-11;
inline constexpr double kBitsFloorTol = 1e-12;

/// Active-set multiplier solver for a fixed problem and a chosen subset of constraint
/// families. Row 0 (if present) is the total cap with unit weights; the other rows are
/// ACI caps.
class LoadingSolver {
public:
    LoadingSolver(const LoadingProblem& p, bool use_total, bool use_aci)
        : p_(p), n_(p.size()), scale_((1.0 - p.alpha) / std::numbers::ln2)
    {
        if (p.ber_threshold.size() != n_) throw DomainError("LoadingProblem: ber_threshold size mismatch");
        if (p.caps.aci_caps.size() != p.caps.aci_weights.num_pus())
            throw DomainError("LoadingProblem: one ACI cap per adjacent PU required");
        for (const auto& col : p.caps.aci_weights.weights)
            if (col.size() != n_) throw DomainError("LoadingProblem: ACI weight dimension mismatch");
        if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw DomainError("LoadingProblem: alpha out of range (0, 1)");

        kc_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double k = ber_power_factor(p.ber_threshold[i]);
            kc_[i] = k / p.cnir[i];
            if (p.cnir[i] > 0.0 && p.cnir[i] >= cnir_threshold(p.alpha, p.ber_threshold[i]))
                active_.push_back(static_cast<int>(i));
        }
        std::vector<Row> rows;
        if (use_total && std::isfinite(p.caps.total_cap)) rows.push_back(Row{nullptr, p.caps.total_cap, -1});
        if (use_aci)
            for (std::size_t l = 0; l < p.caps.aci_caps.size(); ++l)
                if (std::isfinite(p.caps.aci_caps[l]))
                    rows.push_back(Row{&p.caps.aci_weights.weights[l], p.caps.aci_caps[l], static_cast<int>(l)});
        // A zero cap admits no power on any subcarrier it weighs; those are nulled up front
        // and the row, now identically satisfied, leaves the multiplier solve.
        for (const Row& row : rows) {
            if (row.cap > 0.0) {
                rows_.push_back(row);
                continue;
            }
            std::erase_if(active_, [&](int i) {
                return !row.weights || (*row.weights)[static_cast<std::size_t>(i)] > 0.0;
            });
        }
        lambda_.assign(rows_.size(), 0.0);
        in_set_.assign(rows_.size(), false);
    }

    ContinuousSolution solve()
    {
        for (std::size_t r = 0; r < rows_.size(); ++r)
            in_set_[r] = residual(r) > kResidualAccept * row_scale(r);

        // Each round nulls at most one subcarrier, so N + 1 rounds always suffice.
        for (std::size_t round = 0; round <= n_ + 1; ++round) {
            solve_multipliers();
            if (active_.empty()) break;
            std::size_t worst = 0;
            double worst_bits = kInf;
            for (std::size_t a = 0; a < active_.size(); ++a) {
                const double b = bits_of(static_cast<std::size_t>(active_[a]));
                if (b < worst_bits) {
                    worst_bits = b;
                    worst = a;
                }
            }
            if (worst_bits >= 2.0 - kBitsFloorTol) return build();
            active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(worst));
        }
        if (active_.empty()) {
            std::fill(lambda_.begin(), lambda_.end(), 0.0);
            return build();
        }
        throw SolverError("solve_continuous: active-set iteration did not settle");
    }

private:
    struct Row {
        const std::vector<double>* weights;  // nullptr: unit weights (total cap)
        double cap;
        int aci_index;  // -1 for the total cap
    };

    double weight(std::size_t r, std::size_t i) const
    {
        return rows_[r].weights ? (*rows_[r].weights)[i] : 1.0;
    }

    double mu(std::size_t i, std::span<const double> lambda) const
    {
        double m = p_.alpha;
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (lambda[r] != 0.0) m += lambda[r] * weight(r, i);
        return m;
    }

    double power_of(std::size_t i, std::span<const double> lambda) const
    {
        return scale_ / mu(i, lambda) - kc_[i];
    }
    double bits_of(std::size_t i) const { return std::log2(scale_ / mu(i, lambda_) / kc_[i]); }

    double residual(std::size_t r, std::span<const double> lambda) const
    {
        double s = 0.0;
        for (int ii : active_) {
            const auto i = static_cast<std::size_t>(ii);
            s += weight(r, i) * power_of(i, lambda);
        }
        return s - rows_[r].cap;
    }
    double residual(std::size_t r) const { return residual(r, lambda_); }

    double row_scale(std::size_t r) const
    {
        double s = rows_[r].cap;
        for (int ii : active_) {
            const auto i = static_cast<std::size_t>(ii);
            s = std::max(s, weight(r, i) * kc_[i]);
        }
        return s > 0.0 ? s : 1.0;
    }

    bool mu_positive(std::span<const double> lambda) const
    {
        for (int ii : active_)
            if (!(mu(static_cast<std::size_t>(ii), lambda) > 0.0)) return false;
        return true;
    }

    std::vector<std::size_t> set_rows() const
    {
        std::vector<std::size_t> s;
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (in_set_[r]) s.push_back(r);
        return s;
    }

    double scaled_norm(const std::vector<std::size_t>& s, std::span<const double> lambda) const
    {
        double m = 0.0;
        for (std::size_t r : s)
            m = std::max(m, std::abs(residual(r, lambda)) / row_scale(r));
        return m;
    }

    /// Damped Newton on R_S(λ_S) = 0 with the other multipliers at zero.
    bool newton(const std::vector<std::size_t>& s)
    {
        const auto m = static_cast<Eigen::Index>(s.size());
        std::vector<double> trial(lambda_.size());
        double rho = scaled_norm(s, lambda_);
        for (int it = 0; it < 100; ++it) {
            if (rho <= kResidualTarget) return true;
            Eigen::VectorXd rhs(m);
            Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index a = 0; a < m; ++a)
                rhs(a) = -residual(s[static_cast<std::size_t>(a)]);
            for (int ii : active_) {
                const auto i = static_cast<std::size_t>(ii);
                const double mi = mu(i, lambda_);
                const double d = scale_ / (mi * mi);
                for (Eigen::Index a = 0; a < m; ++a)
                    for (Eigen::Index b = 0; b < m; ++b)
                        jac(a, b) -= d * weight(s[static_cast<std::size_t>(a)], i) *
                                     weight(s[static_cast<std::size_t>(b)], i);
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
            qr.setThreshold(1e-12);
            if (qr.rank() < m) return false;
            const Eigen::VectorXd step = qr.solve(rhs);

            double t = 1.0;
            bool accepted = false;
            for (int h = 0; h < 60; ++h, t *= 0.5) {
                trial = lambda_;
                for (Eigen::Index a = 0; a < m; ++a)
                    trial[s[static_cast<std::size_t>(a)]] += t * step(a);
                if (!mu_positive(trial)) continue;
                const double rho_trial = scaled_norm(s, trial);
                if (rho_trial < (1.0 - 1e-4 * t) * rho) {
                    lambda_ = trial;
                    rho = rho_trial;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) return rho <= kResidualAccept;
        }
        return rho <= kResidualAccept;
    }

    /// Solves R_r(λ_r) = 0 for one multiplier with the others fixed, clamping at 0.
    void coordinate_solve(std::size_t r)
    {
        const double sc = row_scale(r);
        lambda_[r] = 0.0;
        if (residual(r) <= 0.0) return;
        double lo = 0.0;
        double hi = 1.0;
        for (int k = 0; k < 2000; ++k) {
            lambda_[r] = hi;
            if (residual(r) < 0.0) break;
            lo = hi;
            hi *= 2.0;
        }
        double x = lo;
        for (int k = 0; k < 300; ++k) {
            lambda_[r] = x;
            const double f = residual(r);
            if (std::abs(f) <= kResidualTarget * sc) return;
            if (f > 0.0) lo = x;
            else hi = x;
            double deriv = 0.0;
            for (int ii : active_) {
                const auto i = static_cast<std::size_t>(ii);
                const double mi = mu(i, lambda_);
                deriv -= scale_ * weight(r, i) * weight(r, i) / (mi * mi);
            }
            double next = deriv < 0.0 ? x - f / deriv : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo <= 1e-16 * hi) {
                lambda_[r] = next;
                return;
            }
            x = next;
        }
        lambda_[r] = x;
    }

    bool complementarity_holds(double tol) const
    {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const double f = residual(r) / row_scale(r);
            if (lambda_[r] > 0.0 ? std::abs(f) > tol : f > tol) return false;
        }
        return true;
    }

    void coordinate_fallback()
    {
        for (int sweep = 0; sweep < 20000; ++sweep) {
            for (std::size_t r = 0; r < rows_.size(); ++r)
                coordinate_solve(r);
            if (complementarity_holds(kResidualAccept)) break;
        }
        for (std::size_t r = 0; r < rows_.size(); ++r)
            in_set_[r] = lambda_[r] > 0.0;
        // Polish the binding rows jointly; keep the coordinate result if that fails.
        const auto saved = lambda_;
        const auto s = set_rows();
        if (!s.empty() && !newton(s)) lambda_ = saved;
        for (double l : lambda_)
            if (l < 0.0) {
                lambda_ = saved;
                break;
            }
        if (!complementarity_holds(1e-9)) {
            std::ostringstream msg;
            msg << "multiplier solve did not converge; scaled residuals:";
            for (std::size_t r = 0; r < rows_.size(); ++r)
                msg << ' ' << residual(r) / row_scale(r);
            throw SolverError(msg.str());
        }
    }

    /// Finds λ >= 0 with complementary slackness on the current active subcarriers.
    void solve_multipliers()
    {
        if (rows_.empty()) return;
        if (active_.empty()) {
            std::fill(lambda_.begin(), lambda_.end(), 0.0);
            return;
        }
        for (int outer = 0; outer < 64; ++outer) {
            for (std::size_t r = 0; r < rows_.size(); ++r)
                if (!in_set_[r]) lambda_[r] = 0.0;
            const auto s = set_rows();
            if (s.size() == 1 && rows_[s[0]].weights == nullptr) {
                lambda_[s[0]] = lambda_total_power(active_, p_.cnir, p_.alpha, p_.ber_threshold, rows_[s[0]].cap);
            } else if (!s.empty()) {
                if (!newton(s)) return coordinate_fallback();
            }

            // Drop the most negative multiplier, if any.
            std::size_t drop = rows_.size();
            double most_negative = 0.0;
            for (std::size_t r : s)
                if (lambda_[r] < most_negative) {
                    most_negative = lambda_[r];
                    drop = r;
                }
            if (drop < rows_.size()) {
                in_set_[drop] = false;
                continue;
            }
            // Add the most violated constraint, if any.
            std::size_t add = rows_.size();
            double worst = kResidualAccept;
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                if (in_set_[r]) continue;
                const double f = residual(r) / row_scale(r);
                if (f > worst) {
                    worst = f;
                    add = r;
                }
            }
            if (add < rows_.size()) {
                in_set_[add] = true;
                continue;
            }
            return;
        }
        coordinate_fallback();
    }

    /// Removes the residual gap left on binding rows by the minimum-norm power correction,
    /// then recomputes bits from powers so the BER target stays exact. The correction is
    /// at rounding level, so stationarity is unaffected beyond that.
    void project_onto_binding_rows(ContinuousSolution& out) const
    {
        std::vector<std::size_t> s;
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (lambda_[r] > 0.0) s.push_back(r);
        if (s.empty() || active_.empty()) return;
        const auto m = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd gap(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            const std::size_t ra = s[static_cast<std::size_t>(a)];
            double used = 0.0;
            for (int ii : active_) {
                const auto i = static_cast<std::size_t>(ii);
                used += weight(ra, i) * out.powers[i];
                for (Eigen::Index b = 0; b < m; ++b)
                    gram(a, b) += weight(ra, i) * weight(s[static_cast<std::size_t>(b)], i);
            }
            gap(a) = rows_[ra].cap - used;
            if (std::abs(gap(a)) > kResidualAccept * 10.0 * row_scale(ra)) return;
        }
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success) return;
        const Eigen::VectorXd y = ldlt.solve(gap);
        for (int ii : active_) {
            const auto i = static_cast<std::size_t>(ii);
            double delta = 0.0;
            for (Eigen::Index a = 0; a < m; ++a)
                delta += weight(s[static_cast<std::size_t>(a)], i) * y(a);
            out.powers[i] += delta;
            out.bits[i] = std::log2(1.0 + out.powers[i] / kc_[i]);
        }
    }

    ContinuousSolution build() const
    {
        ContinuousSolution out;
        out.bits.assign(n_, 0.0);
        out.powers.assign(n_, 0.0);
        out.lambda_aci.assign(p_.caps.aci_caps.size(), 0.0);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].aci_index < 0) out.lambda_power = lambda_[r];
            else out.lambda_aci[static_cast<std::size_t>(rows_[r].aci_index)] = lambda_[r];
        }
        for (int ii : active_) {
            const auto i = static_cast<std::size_t>(ii);
            out.bits[i] = bits_of(i);
            out.powers[i] = power_of(i, lambda_);
        }
        project_onto_binding_rows(out);
        out.active_set = active_;
        const bool power_binds = out.lambda_power > 0.0;
        const bool aci_binds = std::any_of(out.lambda_aci.begin(), out.lambda_aci.end(), [](double l) { return l > 0.0; });
        out.case_id = power_binds ? (aci_binds ? 8 : 6) : (aci_binds ? 7 : 5);
        out.objective = objective_value(out.bits, out.powers, p_.alpha);
        return out;
    }

    const LoadingProblem& p_;
    std::size_t n_;
    double scale_;  // (1 - α) / ln 2
    std::vector<double> kc_;
    std::vector<int> active_;
    std::vector<Row> rows_;
    std::vector<double> lambda_;
    std::vector<bool> in_set_;
};

}  // namespace detail

/// No cap binds: closed form on every subcarrier with C_i >= C_th, the rest nulled.
inline ContinuousSolution solve_case5(const LoadingProblem& p)
{
    return detail::LoadingSolver(p, false, false).solve();
}

/// Only the total-power/CCI cap is enforced (ACI caps ignored).
inline ContinuousSolution solve_case6(const LoadingProblem& p)
{
    return detail::LoadingSolver(p, true, false).solve();
}

/// Only the ACI caps are enforced (total cap ignored).
inline ContinuousSolution solve_case7(const LoadingProblem& p)
{
    if (p.caps.aci_caps.empty()) throw DomainError("solve_case7: no adjacent PU");
    return detail::LoadingSolver(p, false, true).solve();
}

/// Total and ACI caps enforced jointly.
inline ContinuousSolution solve_case8(const LoadingProblem& p)
{
    return detail::LoadingSolver(p, true, true).solve();
}

inline ContinuousSolution solve_case5(std::span<const double> cnir, double alpha, double ber_threshold)
{
    return solve_case5(make_problem(cnir, alpha, ber_threshold));
}

inline ContinuousSolution solve_case6(std::span<const double> cnir, double alpha, double ber_threshold,
                                      double total_cap)
{
    ConstraintCaps caps;
    caps.total_cap = total_cap;
    return solve_case6(make_problem(cnir, alpha, ber_threshold, std::move(caps)));
}

inline ContinuousSolution solve_case7(std::span<const double> cnir, double alpha, double ber_threshold,
                                      AciFactors weights, std::vector<double> aci_caps)
{
    ConstraintCaps caps;
    caps.aci_caps = std::move(aci_caps);
    caps.aci_weights = std::move(weights);
    return solve_case7(make_problem(cnir, alpha, ber_threshold, std::move(caps)));
}

inline ContinuousSolution solve_case8(std::span<const double> cnir, double alpha, double ber_threshold,
                                      double total_cap, AciFactors weights, std::vector<double> aci_caps)
{
    ConstraintCaps caps;
    caps.total_cap = total_cap;
    caps.aci_caps = std::move(aci_caps);
    caps.aci_weights = std::move(weights);
    return solve_case8(make_problem(cnir, alpha, ber_threshold, std::move(caps)));
}

/// Full continuous stage: solve the unconstrained case, dispatch on which cap families
/// its powers violate, then escalate to the joint solve if the chosen regime's output
/// violates the other family.
inline ContinuousSolution solve_continuous(const LoadingProblem& p)
{
    auto violations = [&](const ContinuousSolution& s) {
        const auto rep = check_feasible(s.bits, s.powers, p.caps, p.cnir, p.ber_threshold);
        const bool aci = std::any_of(rep.aci_ok.begin(), rep.aci_ok.end(), [](bool ok) { return !ok; });
        return std::pair{!rep.total_ok, aci};
    };

    ContinuousSolution s = solve_case5(p);
    const auto [total_violated, aci_violated] = violations(s);
    if (!total_violated && !aci_violated) return s;
    if (total_violated && !aci_violated) s = solve_case6(p);
    else if (!total_violated && aci_violated) s = solve_case7(p);
    else return solve_case8(p);

    const auto [t2, a2] = violations(s);
    if (t2 || a2) s = solve_case8(p);
    return s;
}

inline ContinuousSolution solve_continuous(const ChannelRealization& realization, const ConstraintCaps& caps,
                                           const SuParams& su)
{
    return solve_continuous(make_problem(realization, caps, su));
}

}  // namespace cogload
