#pragma once

// Monte Carlo harness: per-trial channel draw -> continuous solve -> discretize, plus
// realized CCI/ACI events from freshly drawn SU->PU gains. Sweeps, oracle comparison and
// runtime scaling are built on top.

#include "cogload/channel.hpp"
#include "cogload/constraints.hpp"
#include "cogload/discretizer.hpp"
#include "cogload/errors.hpp"
#include "cogload/oracle.hpp"
#include "cogload/rng.hpp"
#include "cogload/scenario.hpp"
#include "cogload/solver.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace cogload {

/// Scenario with everything that does not depend on the channel draw precomputed.
struct PreparedScenario {
    ScenarioConfig cfg;
    ConstraintCaps caps;
    std::vector<double> pu_path_gain;  // 10^(-L/10) per PU (co-channel use), config order
    std::vector<int> aci_column;       // column of caps.aci_weights per PU, -1 for co-channel
};

inline PreparedScenario prepare(const ScenarioConfig& cfg, double quad_tol = 1e-10)
{
    validate(cfg);
    PreparedScenario out;
    out.cfg = cfg;
    out.caps = make_caps(cfg, aci_factors(cfg, quad_tol));
    int col = 0;
    for (const auto& pu : cfg.pus) {
        out.pu_path_gain.push_back(std::pow(10.0, -0.1 * path_loss_db(pu.distance, cfg.path_loss)));
        out.aci_column.push_back(pu.kind == PuKind::adjacent ? col++ : -1);
    }
    return out;
}

struct TrialRecord {
    int total_bits = 0;
    double total_power = 0.0;
    double objective = 0.0;
    bool cci_violated = false;
    bool aci_violated = false;
    bool feasible = true;
    int case_id = 5;
    std::vector<double> aci_load;  // Σ P_i ϖ_i per adjacent PU (W), before the SU->PU gain
};

struct AggregateStats {
    double avg_throughput = 0.0;  // bits per OFDM symbol
    double avg_power = 0.0;       // W
    double cci_violation_rate = 0.0;
    double aci_violation_rate = 0.0;
    int trials = 0;
    double ci95_throughput = 0.0;
    double ci95_power = 0.0;
    double ci95_cci = 0.0;
    double ci95_aci = 0.0;
    int infeasible_allocations = 0;
    std::array<int, 4> case_counts{};  // cases 5, 6, 7, 8

    bool operator==(const AggregateStats&) const = default;
};

inline TrialRecord run_trial(const PreparedScenario& sc, std::uint64_t master_seed, std::uint64_t trial_index)
{
    Rng rng = make_trial_rng(master_seed, trial_index);
    const ChannelRealization ch = sample_su_channel(sc.cfg, rng);
    const LoadingProblem problem = make_problem(ch, sc.caps, sc.cfg.su);
    const ContinuousSolution cont = solve_continuous(problem);
    const Allocation alloc = round_and_repair(cont, problem, sc.cfg.su.max_bits);

    TrialRecord rec;
    rec.total_bits = alloc.total_bits();
    rec.total_power = alloc.total_power();
    rec.objective = alloc.objective;
    rec.feasible = alloc.feasible;
    rec.case_id = cont.case_id;

    // Realized interference with an independent draw of every SU->PU gain.
    for (std::size_t k = 0; k < sc.cfg.pus.size(); ++k) {
        const PuDescriptor& pu = sc.cfg.pus[k];
        const double gain = sample_sp_gain(pu.fading_rate, rng);
        if (pu.kind == PuKind::cochannel) {
            const double cci = gain * sc.pu_path_gain[k] * rec.total_power;
            rec.cci_violated = rec.cci_violated || cci > pu.interference_cap;
        } else {
            const auto& w = sc.caps.aci_weights.weights[static_cast<std::size_t>(sc.aci_column[k])];
            double weighted = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                weighted += alloc.powers[i] * w[i];
            rec.aci_load.push_back(weighted);
            rec.aci_violated = rec.aci_violated || gain * weighted > pu.interference_cap;
        }
    }
    return rec;
}

/// Runs trials [0, trials) on `threads` workers (0 = hardware concurrency). The result
/// vector is indexed by trial, so it does not depend on the schedule.
inline std::vector<TrialRecord> run_trials(const PreparedScenario& sc, int trials, std::uint64_t master_seed,
                                           unsigned threads = 1)
{
    if (trials < 1) throw DomainError("run_trials: trials must be at least 1");
    std::vector<TrialRecord> out(static_cast<std::size_t>(trials));
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t)
            out[static_cast<std::size_t>(t)] = run_trial(sc, master_seed, static_cast<std::uint64_t>(t));
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int t = next++; t < trials; t = next++) {
                try {
                    out[static_cast<std::size_t>(t)] = run_trial(sc, master_seed, static_cast<std::uint64_t>(t));
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

inline AggregateStats aggregate(const std::vector<TrialRecord>& records)
{
    AggregateStats s;
    s.trials = static_cast<int>(records.size());
    if (records.empty()) return s;
    const double n = static_cast<double>(records.size());
    double sb = 0.0, sb2 = 0.0, sp = 0.0, sp2 = 0.0, cci = 0.0, aci = 0.0;
    for (const auto& r : records) {
        sb += r.total_bits;
        sb2 += static_cast<double>(r.total_bits) * r.total_bits;
        sp += r.total_power;
        sp2 += r.total_power * r.total_power;
        cci += r.cci_violated ? 1.0 : 0.0;
        aci += r.aci_violated ? 1.0 : 0.0;
        s.infeasible_allocations += r.feasible ? 0 : 1;
        if (r.case_id >= 5 && r.case_id <= 8) ++s.case_counts[static_cast<std::size_t>(r.case_id - 5)];
    }
    s.avg_throughput = sb / n;
    s.avg_power = sp / n;
    s.cci_violation_rate = cci / n;
    s.aci_violation_rate = aci / n;
    constexpr double z = 1.959963984540054;
    auto half_width = [&](double sum, double sum2) {
        if (records.size() < 2) return 0.0;
        const double mean = sum / n;
        const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
        return z * std::sqrt(var / n);
    };
    s.ci95_throughput = half_width(sb, sb2);
    s.ci95_power = half_width(sp, sp2);
    s.ci95_cci = z * std::sqrt(s.cci_violation_rate * (1.0 - s.cci_violation_rate) / n);
    s.ci95_aci = z * std::sqrt(s.aci_violation_rate * (1.0 - s.aci_violation_rate) / n);
    return s;
}

inline AggregateStats run_monte_carlo(const ScenarioConfig& cfg, int trials, std::uint64_t master_seed,
                                      unsigned threads = 1)
{
    return aggregate(run_trials(prepare(cfg), trials, master_seed, threads));
}

/// Copy of `cfg` with one swept parameter set to `value` (validated).
inline ScenarioConfig with_sweep_value(const ScenarioConfig& cfg, SweepParam param, double value)
{
    ScenarioConfig out = cfg;
    switch (param) {
    case SweepParam::psi:
        for (auto& pu : out.pus)
            pu.probability = value;
        break;
    case SweepParam::alpha: out.su.alpha = value; break;
    case SweepParam::p_aci:
        for (auto& pu : out.pus)
            if (pu.kind == PuKind::adjacent) pu.interference_cap = value;
        break;
    case SweepParam::p_cci:
        for (auto& pu : out.pus)
            if (pu.kind == PuKind::cochannel) pu.interference_cap = value;
        break;
    }
    validate(out);
    return out;
}

struct SweepRow {
    double value = 0.0;
    AggregateStats stats;
};

/// One aggregate per value; every value reuses the same trial seeds (common random numbers).
inline std::vector<SweepRow> sweep(const ScenarioConfig& cfg, SweepParam param, const std::vector<double>& values,
                                   int trials, std::uint64_t master_seed, unsigned threads = 1)
{
    if (values.empty()) throw ConfigError("sweep: no values");
    std::vector<SweepRow> rows;
    for (double v : values)
        rows.push_back({v, run_monte_carlo(with_sweep_value(cfg, param, v), trials, master_seed, threads)});
    return rows;
}

/// Seconds per call of f, averaged over enough repetitions to fill `min_seconds`.
template <class F>
double time_per_call(F&& f, double min_seconds = 2e-3)
{
    using clock = std::chrono::steady_clock;
    long reps = 0;
    const auto t0 = clock::now();
    double elapsed = 0.0;
    do {
        f();
        ++reps;
        elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    } while (elapsed < min_seconds);
    return elapsed / static_cast<double>(reps);
}

inline double median(std::vector<double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct OracleComparisonRow {
    std::uint64_t seed = 0;
    double f_proposed = 0.0;
    double f_opt = 0.0;
    double relative_gap = 0.0;
    double proposed_seconds = 0.0;
    double oracle_seconds = 0.0;
    std::uint64_t oracle_nodes = 0;
};

struct OracleComparison {
    std::vector<OracleComparisonRow> rows;
    double median_gap = 0.0;
    double max_gap = 0.0;
    double median_proposed_seconds = 0.0;
    double median_oracle_seconds = 0.0;
};

/// (F_proposed - F_opt) / |F_opt|; 0 when both vanish.
inline double relative_gap(double f_proposed, double f_opt)
{
    const double diff = f_proposed - f_opt;
    if (f_opt == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std::abs(f_opt);
}

/// Proposed algorithm vs exhaustive search on `instances` channel draws of a small scenario.
/// Instance k uses the trial stream (seed, k); both sides share b_max = opt.max_bits.
inline OracleComparison compare_with_oracle(const ScenarioConfig& cfg, int instances, std::uint64_t seed,
                                            OracleOptions opt = {}, bool time_proposed = true)
{
    if (cfg.su.num_subcarriers > opt.max_subcarriers)
        throw DomainError("compare_with_oracle: too many subcarriers for exhaustive search");
    const PreparedScenario sc = prepare(cfg);
    OracleComparison out;
    std::vector<double> gaps, tp, to;
    for (int k = 0; k < instances; ++k) {
        Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(k));
        const LoadingProblem problem = make_problem(sample_su_channel(sc.cfg, rng), sc.caps, sc.cfg.su);

        auto propose = [&] { return round_and_repair(solve_continuous(problem), problem, opt.max_bits); };
        const Allocation alloc = propose();
        const double t_prop = time_proposed ? time_per_call([&] { (void)propose(); }) : 0.0;
        const OracleResult best = exhaustive_search(problem, opt);

        OracleComparisonRow row;
        row.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
        row.f_proposed = alloc.objective;
        row.f_opt = best.objective;
        row.relative_gap = relative_gap(alloc.objective, best.objective);
        row.proposed_seconds = t_prop;
        row.oracle_seconds = best.elapsed;
        row.oracle_nodes = best.nodes_visited;
        out.rows.push_back(row);
        gaps.push_back(row.relative_gap);
        tp.push_back(t_prop);
        to.push_back(best.elapsed);
    }
    out.median_gap = median(gaps);
    out.max_gap = gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
    out.median_proposed_seconds = median(tp);
    out.median_oracle_seconds = median(to);
    return out;
}

struct RuntimeRow {
    int num_subcarriers = 0;
    double median_seconds = 0.0;
};

struct RuntimeTable {
    std::vector<RuntimeRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();  // d log t / d log N
};

/// Least-squares slope of log(t) against log(N); NaN with fewer than two points.
inline double loglog_slope(const std::vector<RuntimeRow>& rows)
{
    if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.num_subcarriers));
        const double y = std::log(r.median_seconds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Scenario resized to N subcarriers (BER broadcast from the first entry, J override dropped).
inline ScenarioConfig resized(const ScenarioConfig& cfg, int num_subcarriers)
{
    ScenarioConfig out = cfg;
    out.su.num_subcarriers = num_subcarriers;
    out.su.ber_threshold.assign(static_cast<std::size_t>(num_subcarriers), cfg.su.ber_threshold.front());
    out.su.pu_interference_per_subcarrier.clear();
    validate(out);
    return out;
}

/// Median wall time of solve_continuous per N over `realizations` channel draws.
inline RuntimeTable runtime_scaling(const ScenarioConfig& cfg, const std::vector<int>& n_values,
                                    int realizations = 5, std::uint64_t seed = 1)
{
    for (std::size_t k = 1; k < n_values.size(); ++k)
        if (n_values[k] <= n_values[k - 1]) throw DomainError("runtime_scaling: N values must increase");
    RuntimeTable table;
    for (int n : n_values) {
        const PreparedScenario sc = prepare(resized(cfg, n));
        std::vector<double> times;
        for (int r = 0; r < realizations; ++r) {
            Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(r));
            const LoadingProblem problem = make_problem(sample_su_channel(sc.cfg, rng), sc.caps, sc.cfg.su);
            times.push_back(time_per_call([&] { (void)solve_continuous(problem); }));
        }
        table.rows.push_back({n, median(times)});
    }
    table.slope = loglog_slope(table.rows);
    return table;
}

}  // namespace cogload
