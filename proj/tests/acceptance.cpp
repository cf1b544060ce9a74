// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "cogload/cogload.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cogload;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 6)
{
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

double sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

PuDescriptor cochannel(double cap_w, double psi = 0.9)
{
    PuDescriptor pu;
    pu.kind = PuKind::cochannel;
    pu.distance = 5000;
    pu.interference_cap = cap_w;
    pu.probability = psi;
    return pu;
}

PuDescriptor adjacent(double cap_w, double psi = 0.9)
{
    PuDescriptor pu;
    pu.kind = PuKind::adjacent;
    pu.distance = 1000;
    pu.bandwidth = 1.25e6;
    pu.center_offset = 625e3;
    pu.interference_cap = cap_w;
    pu.probability = psi;
    return pu;
}

ScenarioConfig base_scenario(int n, double link_gain)
{
    ScenarioConfig cfg;
    cfg.su.num_subcarriers = n;
    cfg.su.ber_threshold.assign(static_cast<std::size_t>(n), 1e-4);
    cfg.su.su_link_gain = link_gain;
    return cfg;
}

/// P_CCI that makes the co-channel power cap equal `cap_w` at the scenario's geometry.
double cci_threshold_for(double cap_w, const ScenarioConfig& cfg, double psi = 0.9)
{
    return cap_w * -std::log1p(-psi) / std::pow(10.0, 0.1 * path_loss_db(5000, cfg.path_loss));
}

// 1. CCI cap calibration.
Outcome calibration()
{
    const double cap = cci_power_cap(1.0, path_loss_db(5000, PathLossParams{4.0, 1.0 / 3.0, 500.0}), 0.9, 1e-14);
    const double rel = std::abs(cap / 15.4307e-3 - 1.0);
    return {rel <= 0.02, "cap " + fmt(cap * 1e3, 8) + " mW, relative error " + fmt(rel, 3)};
}

// 2. Closed-form consistency of the unconstrained case.
Outcome closed_form()
{
    Rng rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_ber = 0.0, worst_bits = 0.0, worst_power = 0.0, worst_threshold = 0.0;
    int active = 0;
    for (int t = 0; t < 10000; ++t) {
        const double alpha = 0.05 + 0.9 * u(rng);
        const double ber = std::pow(10.0, -1.0 - 6.0 * u(rng));
        const double cth = cnir_threshold(alpha, ber);
        const double c = cth * std::pow(10.0, 6.0 * u(rng) - 0.5);
        const std::vector<double> cs{c, cth};
        const auto s = solve_case5(cs, alpha, ber);
        const double k = ber_power_factor(ber);
        worst_threshold = std::max(worst_threshold, std::abs(s.bits[1] - 2.0));
        if (s.bits[0] == 0.0) {
            if (c >= cth) worst_bits = kInf;
            continue;
        }
        ++active;
        worst_ber = std::max(worst_ber, std::abs(bit_error_rate(s.powers[0], s.bits[0], c) / ber - 1.0));
        const double b_ref = std::log2((1.0 - alpha) * c / (std::numbers::ln2 * alpha * k));
        const double p_ref = (1.0 - alpha) / (std::numbers::ln2 * alpha) - k / c;
        worst_bits = std::max(worst_bits, std::abs(s.bits[0] - b_ref) / b_ref);
        worst_power = std::max(worst_power, std::abs(s.powers[0] - p_ref) / p_ref);
    }
    const bool pass = worst_ber <= 1e-9 && worst_bits <= 1e-9 && worst_power <= 1e-9 && worst_threshold <= 1e-9 &&
                      active > 5000;
    return {pass, std::to_string(active) + " active tuples; max rel BER err " + fmt(worst_ber, 3) + ", bits " +
                      fmt(worst_bits, 3) + ", power " + fmt(worst_power, 3) + "; |b(C_th) - 2| " +
                      fmt(worst_threshold, 3)};
}

/// Random instance; `kind` steers which caps are tight (0: none, 1: total, 2: ACI, 3: both).
LoadingProblem random_instance(Rng& rng, int kind)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    const int n = 2 + static_cast<int>(u(rng) * 63);
    const int pus = 1 + static_cast<int>(u(rng) * 2);
    const double alpha = 0.1 + 0.8 * u(rng);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (auto& x : c)
        x = 2000.0 * e(rng);
    ConstraintCaps caps;
    for (int l = 0; l < pus; ++l) {
        std::vector<double> w(c.size());
        for (auto& x : w)
            x = u(rng) * u(rng);
        caps.aci_weights.weights.push_back(std::move(w));
    }
    const auto free = solve_case5(make_problem(c, alpha, 1e-4));
    const double free_total = sum(free.powers);
    caps.total_cap = (kind == 1 || kind == 3) ? (0.2 + 0.6 * u(rng)) * free_total : 2.0 * free_total + 1.0;
    for (int l = 0; l < pus; ++l) {
        const double free_aci = dot(free.powers, caps.aci_weights.weights[static_cast<std::size_t>(l)]);
        const bool tight = (kind == 2 || kind == 3) && (l == 0 || u(rng) < 0.5);
        caps.aci_caps.push_back(tight ? (0.1 + 0.5 * u(rng)) * free_aci : 2.0 * free_aci + 1.0);
    }
    return make_problem(c, alpha, 1e-4, caps);
}

// 3 and 4. KKT verification and binding equalities over random instances.
struct KktSuite {
    Outcome kkt;
    Outcome binding;
};

KktSuite kkt_suite()
{
    Rng rng(3);
    int counts[4] = {0, 0, 0, 0};
    int failures = 0, binding_failures = 0, negative = 0;
    double worst_stationarity = 0.0, worst_binding = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const LoadingProblem p = random_instance(rng, t % 4);
        const ContinuousSolution s = solve_continuous(p);
        ++counts[s.case_id - 5];
        const KktReport rep = kkt_verify(s, p);
        failures += rep.pass ? 0 : 1;
        worst_stationarity = std::max({worst_stationarity, rep.stationarity_power, rep.stationarity_bits});

        bool ok = true;
        if (s.lambda_power < 0.0) ++negative;
        for (double l : s.lambda_aci)
            if (l < 0.0) ++negative;
        if (s.lambda_power > 0.0) {
            const double rel = std::abs(sum(s.powers) / p.caps.total_cap - 1.0);
            worst_binding = std::max(worst_binding, rel);
            ok = ok && rel <= 1e-9;
        }
        bool aci_binds = false;
        for (std::size_t l = 0; l < s.lambda_aci.size(); ++l) {
            if (s.lambda_aci[l] <= 0.0) continue;
            aci_binds = true;
            const double rel = std::abs(dot(s.powers, p.caps.aci_weights.weights[l]) / p.caps.aci_caps[l] - 1.0);
            worst_binding = std::max(worst_binding, rel);
            ok = ok && rel <= 1e-9;
        }
        ok = ok && (s.case_id == 5 || s.case_id == 7 || s.lambda_power > 0.0);
        ok = ok && (s.case_id == 5 || s.case_id == 6 || aci_binds);
        binding_failures += ok ? 0 : 1;
    }
    const bool every_case = std::all_of(std::begin(counts), std::end(counts), [](int c) { return c >= 50; });
    std::string tally = "cases 5/6/7/8 = " + std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + "/" +
                        std::to_string(counts[2]) + "/" + std::to_string(counts[3]);
    KktSuite out;
    out.kkt = {failures == 0 && every_case, std::to_string(1000 - failures) + "/1000 pass, " + tally +
                                                ", max stationarity residual " + fmt(worst_stationarity, 3)};
    out.binding = {binding_failures == 0 && negative == 0,
                   "max relative cap gap " + fmt(worst_binding, 3) + ", negative multipliers " +
                       std::to_string(negative) + ", mismatched instances " + std::to_string(binding_failures)};
    return out;
}

// 5. Empirical violation probabilities.
Outcome statistical_guarantee()
{
    const int trials = 10000;
    bool pass = true;
    std::string detail;
    for (int which = 0; which < 2; ++which) {
        for (double psi : {0.8, 0.9, 0.99}) {
            // Mean CNIR 1e7 keeps bit counts near 8, well below b_max, so the discrete
            // allocation can fill the cap.
            ScenarioConfig cfg = base_scenario(128, 1e-2);
            if (which == 0) cfg.pus = {cochannel(1e-14, psi)};
            else cfg.pus = {adjacent(1e-15, psi)};
            const PreparedScenario sc = prepare(cfg);
            const auto records = run_trials(sc, trials, 5, 0);
            const AggregateStats s = aggregate(records);
            const double cap = which == 0 ? sc.caps.total_cap : sc.caps.aci_caps[0];
            double fill_sum = 0.0;
            bool binds = true;
            for (const auto& r : records) {
                fill_sum += (which == 0 ? r.total_power : r.aci_load[0]) / cap;
                binds = binds && r.case_id != 5;
            }
            const double rate = which == 0 ? s.cci_violation_rate : s.aci_violation_rate;
            const double tol = 3.0 * std::sqrt(psi * (1.0 - psi) / trials);
            const bool ok = std::abs(rate - (1.0 - psi)) <= tol && binds;
            pass = pass && ok;
            detail += std::string(which == 0 ? "CCI" : "ACI") + " psi=" + fmt(psi, 3) + ": " + fmt(rate, 4) +
                      " (target " + fmt(1.0 - psi, 3) + " +/- " + fmt(tol, 2) + ", mean fill " +
                      fmt(fill_sum / trials, 4) + ")" + (ok ? "" : " [out]") + "; ";
        }
    }
    return {pass, detail};
}

// 6. Oracle gap and speed.
Outcome oracle_gap()
{
    bool pass = true;
    std::string detail;
    for (int n : {4, 6, 8}) {
        // Mean CNIR 300 puts the unconstrained optimum at roughly 3-8 bits.
        ScenarioConfig cfg = base_scenario(n, 3e-7);
        cfg.su.max_bits = 8;
        // Caps sized against the unconstrained power (about 1.3 W per subcarrier).
        cfg.pus = {cochannel(cci_threshold_for(0.6 * n, cfg)), adjacent(1.0)};
        const auto aci = aci_factors(cfg);
        const double free_aci = 1.3 * sum(aci.weights[0]);
        cfg.pus[1].interference_cap = 0.5 * free_aci * -std::log1p(-0.9);
        validate(cfg);

        OracleOptions opt;
        opt.max_bits = 8;
        // The speed comparison at N = 8 is against plain enumeration of all 8^8 vectors.
        opt.prune = n != 8;
        const OracleComparison cmp = compare_with_oracle(cfg, 100, 6, opt, n == 8);
        bool never_better = true;
        for (const auto& r : cmp.rows)
            never_better = never_better && r.f_proposed >= r.f_opt - 1e-12 * (1.0 + std::abs(r.f_opt));
        const bool ok = never_better && cmp.median_gap <= 0.05 && cmp.max_gap <= 0.15;
        pass = pass && ok;
        detail += "N=" + std::to_string(n) + ": median gap " + fmt(cmp.median_gap, 3) + ", max " +
                  fmt(cmp.max_gap, 3) + (never_better ? "" : ", proposed beat oracle!");
        if (n == 8) {
            const double speedup = cmp.median_oracle_seconds / cmp.median_proposed_seconds;
            pass = pass && speedup >= 100.0;
            detail += ", proposed " + fmt(cmp.median_proposed_seconds, 3) + " s vs exhaustive " +
                      fmt(cmp.median_oracle_seconds, 3) + " s, speedup " + fmt(speedup, 4) + "x";
        }
        detail += "; ";
    }
    return {pass, detail};
}

bool non_increasing(const std::vector<double>& v)
{
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[k - 1]) return false;
    return true;
}

bool non_decreasing(const std::vector<double>& v)
{
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] < v[k - 1]) return false;
    return true;
}

struct Series {
    std::vector<double> throughput, power;
};

Series run_sweep(const ScenarioConfig& cfg, SweepParam param, const std::vector<double>& values)
{
    Series s;
    for (const auto& row : sweep(cfg, param, values, 1000, 7, 0)) {
        s.throughput.push_back(row.stats.avg_throughput);
        s.power.push_back(row.stats.avg_power);
    }
    return s;
}

// 7. Trend suite.
Outcome trends()
{
    std::string detail;
    bool pass = true;
    auto check = [&](const std::string& name, bool ok) {
        pass = pass && ok;
        detail += name + (ok ? " ok; " : " FAILED; ");
    };

    // Mean CNIR 1000: interior bit counts, so every knob moves the allocation.
    ScenarioConfig open = base_scenario(128, 1e-6);
    open.pus = {cochannel(kInf), adjacent(kInf)};

    // (a) Ψ has no effect without caps.
    const Series a = run_sweep(open, SweepParam::psi, {0.5, 0.7, 0.8, 0.9, 0.95, 0.99});
    check("(a) psi-invariance",
          std::all_of(a.throughput.begin(), a.throughput.end(), [&](double x) { return x == a.throughput[0]; }) &&
              std::all_of(a.power.begin(), a.power.end(), [&](double x) { return x == a.power[0]; }));

    // (b) Both decrease with α.
    const Series b = run_sweep(open, SweepParam::alpha, {0.1, 0.3, 0.5, 0.7, 0.9});
    check("(b) alpha", non_increasing(b.throughput) && non_increasing(b.power) &&
                           b.throughput.back() < b.throughput.front() && b.power.back() < b.power.front());

    // (c) P_ACI with P_th = P_CCI = inf, then P_CCI with P_ACI = inf: rise and saturate.
    const auto cfg_c = [&] {
        ScenarioConfig c = open;
        c.pus[1].interference_cap = 1e-15;
        return c;
    }();
    const double free_aci = [&] {
        const auto sc = prepare(open);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            Rng rng = make_trial_rng(7, static_cast<std::uint64_t>(t));
            const auto p = make_problem(sample_su_channel(sc.cfg, rng), sc.caps, sc.cfg.su);
            const auto alloc = round_and_repair(solve_continuous(p), p, sc.cfg.su.max_bits);
            worst = std::max(worst, dot(alloc.powers, sc.caps.aci_weights.weights[0]));
        }
        return worst;
    }();
    const double tail = -std::log1p(-0.9);
    std::vector<double> p_aci;
    for (double f : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0})
        p_aci.push_back(f * free_aci * tail);
    const Series c1 = run_sweep(cfg_c, SweepParam::p_aci, p_aci);
    check("(c) P_ACI", non_decreasing(c1.throughput) && non_decreasing(c1.power) &&
                           c1.throughput.back() == c1.throughput[c1.throughput.size() - 2] &&
                           c1.throughput.back() > c1.throughput.front());

    std::vector<double> p_cci;
    for (double cap : {2.0, 8.0, 30.0, 100.0, 300.0, 1e4, 1e5})
        p_cci.push_back(cci_threshold_for(cap, open));
    ScenarioConfig cfg_cci = open;
    cfg_cci.pus[0].interference_cap = p_cci.front();
    const Series c2 = run_sweep(cfg_cci, SweepParam::p_cci, p_cci);
    check("(c) P_CCI", non_decreasing(c2.throughput) && non_decreasing(c2.power) &&
                           c2.throughput.back() == c2.throughput[c2.throughput.size() - 2] &&
                           c2.throughput.back() > c2.throughput.front());

    // (d) Finite caps: Ψ tightens the allocation down to nothing at Ψ = 1.
    ScenarioConfig capped = open;
    capped.pus[0].interference_cap = cci_threshold_for(60.0, open);
    capped.pus[1].interference_cap = 0.3 * free_aci * tail;
    const Series d = run_sweep(capped, SweepParam::psi, {0.5, 0.7, 0.9, 0.99, 0.999, 1.0});
    check("(d) psi -> 1", non_increasing(d.throughput) && non_increasing(d.power) && d.throughput.back() == 0.0 &&
                              d.power.back() == 0.0 && d.throughput.front() > 0.0);

    // (e) With P_th = 0.1 mW the P_CCI sweep flattens once the CCI cap exceeds P_th.
    ScenarioConfig pth = base_scenario(128, 1.0);
    pth.su.power_threshold = 1e-4;
    pth.pus = {cochannel(1e-14), adjacent(kInf)};
    std::vector<double> e_caps{1e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3};
    std::vector<double> e_values;
    for (double cap : e_caps)
        e_values.push_back(cci_threshold_for(cap, pth));
    const Series e = run_sweep(pth, SweepParam::p_cci, e_values);
    bool flat = true;
    for (std::size_t k = 0; k < e_caps.size(); ++k)
        if (e_caps[k] >= 1e-4 * (1 + 1e-9)) flat = flat && e.throughput[k] == e.throughput.back();
    check("(e) P_th saturation", non_decreasing(e.throughput) && non_decreasing(e.power) && flat &&
                                     e.throughput.front() < e.throughput.back() &&
                                     e.power.back() <= 1e-4 * (1 + 1e-9));
    return {pass, detail};
}

// 8. Repair correctness against feasibility, BER and the oracle.
Outcome repair()
{
    Rng rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    int infeasible = 0, ber_off = 0, beat_oracle = 0, oracle_runs = 0;
    double worst_ber = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const int n = 1 + static_cast<int>(u(rng) * 6);
        const int b_max = 8;
        std::vector<double> c(static_cast<std::size_t>(n)), w(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = 5.0 + 500.0 * e(rng);
            w[i] = u(rng);
        }
        ConstraintCaps caps;
        caps.total_cap = 1.5 * n * u(rng);
        caps.aci_weights.weights = {w};
        caps.aci_caps = {0.7 * n * u(rng)};
        const LoadingProblem p = make_problem(c, 0.2 + 0.6 * u(rng), std::pow(10.0, -2.0 - 4.0 * u(rng)), caps);
        const Allocation a = round_and_repair(solve_continuous(p), p, b_max);
        if (!check_feasible(a, p.caps, p.cnir, p.ber_threshold).feasible || !a.feasible) ++infeasible;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (a.bits[i] == 0) continue;
            const double rel = std::abs(bit_error_rate(a.powers[i], a.bits[i], c[i]) / p.ber_threshold[i] - 1.0);
            worst_ber = std::max(worst_ber, rel);
            if (rel > 1e-12) ++ber_off;
        }
        OracleOptions opt;
        opt.max_bits = b_max;
        const OracleResult best = exhaustive_search(p, opt);
        ++oracle_runs;
        if (a.objective < best.objective - 1e-12 * (1.0 + std::abs(best.objective))) ++beat_oracle;
    }
    return {infeasible == 0 && ber_off == 0 && beat_oracle == 0,
            "infeasible " + std::to_string(infeasible) + ", BER mismatches " + std::to_string(ber_off) +
                " (max rel " + fmt(worst_ber, 3) + "), below oracle " + std::to_string(beat_oracle) + "/" +
                std::to_string(oracle_runs)};
}

// 9. Spectral-overlap quadrature.
Outcome quadrature()
{
    const double ts = 102.4e-6;
    const double wide = spectral_overlap_factor(0.0, 2e4 / ts, ts, 0.0);

    auto f = [](double x) {
        if (x == 0.0) return 1.0;
        const double s = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        return s * s;
    };
    const double reference = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -0.5, 0.5, 15, 1e-15);
    const double main = spectral_overlap_factor(0.0, 1.0 / ts, ts, 0.0);

    double worst_split = 0.0;
    for (double fc : {0.0, 2e4, 3.3e5, -7e5}) {
        const double bw = 4.1e5;
        const double whole = spectral_overlap_factor(fc, bw, ts, 0.0);
        // Three unequal pieces of [fc - bw/2, fc + bw/2].
        const double lo = fc - bw / 2, m1 = lo + 0.2 * bw, m2 = lo + 0.65 * bw, hi = fc + bw / 2;
        const double parts = spectral_overlap_factor((lo + m1) / 2, m1 - lo, ts, 0.0) +
                             spectral_overlap_factor((m1 + m2) / 2, m2 - m1, ts, 0.0) +
                             spectral_overlap_factor((m2 + hi) / 2, hi - m2, ts, 0.0);
        worst_split = std::max(worst_split, std::abs(parts / whole - 1.0));
    }
    const bool pass = std::abs(wide - 1.0) <= 1e-4 && std::abs(main - reference) <= 1e-6 &&
                      std::abs(main - 0.7737) <= 1e-4 && worst_split <= 1e-9;
    return {pass, "wide band " + fmt(wide, 10) + ", main lobe " + fmt(main, 13) + " vs Gauss-Kronrod " +
                      fmt(reference, 13) + ", max partition error " + fmt(worst_split, 3)};
}

// 10. Runtime scaling of the continuous solver.
Outcome complexity()
{
    ScenarioConfig cfg = base_scenario(64, 1.0);
    cfg.pus = {cochannel(1e-14), adjacent(3e-15)};
    const RuntimeTable t = runtime_scaling(cfg, {64, 128, 256, 512}, 5, 10);
    std::string detail = "median s:";
    for (const auto& r : t.rows)
        detail += " N=" + std::to_string(r.num_subcarriers) + " " + fmt(r.median_seconds, 3);
    detail += "; slope " + fmt(t.slope, 3);
    return {t.slope <= 2.5, detail};
}

}  // namespace

int main()
{
    int failed = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& run) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "CCI cap calibration", calibration);
    report(2, "closed-form consistency", closed_form);
    KktSuite suite;
    report(3, "KKT suite", [&] {
        suite = kkt_suite();
        return suite.kkt;
    });
    report(4, "binding equalities", [&] { return suite.binding; });
    report(5, "statistical guarantee", statistical_guarantee);
    report(6, "oracle gap", oracle_gap);
    report(7, "trend suite", trends);
    report(8, "repair correctness", repair);
    report(9, "quadrature", quadrature);
    report(10, "complexity", complexity);

    std::printf("%d/10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
