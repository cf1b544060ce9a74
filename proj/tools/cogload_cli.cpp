// cogload command-line front end.
//
//   cogload_cli solve          --config F [--seed S] [--trial K]
//   cogload_cli sweep          --config F [--param P --values a,b,...] [--trials T] [--seed S]
//   cogload_cli oracle-compare --config F [--instances K] [--seed S] [--max-bits B]
//   cogload_cli kkt-check      --config F [--instances K] [--seed S]
//   cogload_cli runtime        --config F [--n 64,128,...] [--realizations R]
//
// Exit codes: 0 success, 2 configuration/input error, 3 solver error.

#include "cogload/cogload.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cogload;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

ScenarioConfig read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    return load_scenario(text.str());
}

void cmd_solve(const std::string& path, std::optional<std::uint64_t> seed, std::uint64_t trial)
{
    const ScenarioConfig cfg = read_config(path);
    const PreparedScenario sc = prepare(cfg);
    Rng rng = make_trial_rng(seed.value_or(cfg.experiment.seed), trial);
    const LoadingProblem problem = make_problem(sample_su_channel(cfg, rng), sc.caps, cfg.su);
    const ContinuousSolution cont = solve_continuous(problem);
    const Allocation alloc = round_and_repair(cont, problem, cfg.su.max_bits);

    nlohmann::json out;
    out["cnir"] = problem.cnir;
    out["total_cap_w"] = detail::number_json(sc.caps.total_cap);
    out["aci_caps_w"] = detail::numbers_json(sc.caps.aci_caps);
    out["continuous"] = to_json(cont);
    out["kkt"] = to_json(kkt_verify(cont, problem));
    out["allocation"] = to_json(alloc);
    out["feasibility"] = to_json(check_feasible(alloc, sc.caps, problem.cnir, problem.ber_threshold));
    std::cout << out.dump(2) << '\n';
}

void cmd_sweep(const std::string& path, std::optional<std::string> param, std::vector<double> values,
               std::optional<int> trials, std::optional<std::uint64_t> seed, unsigned threads)
{
    const ScenarioConfig cfg = read_config(path);
    SweepParam p{};
    if (param) {
        p = parse_sweep_param(*param);
    } else if (cfg.experiment.sweep) {
        p = cfg.experiment.sweep->param;
    } else {
        throw ConfigError("sweep: no --param given and the config has no experiment.sweep");
    }
    if (values.empty()) {
        if (!cfg.experiment.sweep || cfg.experiment.sweep->param != p)
            throw ConfigError("sweep: no --values given for " + std::string(to_string(p)));
        values = cfg.experiment.sweep->values;
    }
    const auto rows = sweep(cfg, p, values, trials.value_or(cfg.experiment.trials),
                            seed.value_or(cfg.experiment.seed), threads);
    write_sweep_csv(std::cout, rows);
}

void cmd_oracle(const std::string& path, int instances, std::optional<std::uint64_t> seed, int max_bits,
                bool even_bits, bool parallel)
{
    const ScenarioConfig cfg = read_config(path);
    OracleOptions opt;
    opt.max_bits = max_bits;
    opt.even_bits_only = even_bits;
    opt.parallel = parallel;
    const auto cmp = compare_with_oracle(cfg, instances, seed.value_or(cfg.experiment.seed), opt);
    write_oracle_csv(std::cout, cmp);
    std::cerr << "median gap " << format_double(cmp.median_gap) << ", max gap " << format_double(cmp.max_gap)
              << ", median proposed " << format_double(cmp.median_proposed_seconds) << " s, median oracle "
              << format_double(cmp.median_oracle_seconds) << " s\n";
}

int cmd_kkt(const std::string& path, int instances, std::optional<std::uint64_t> seed)
{
    const ScenarioConfig cfg = read_config(path);
    const PreparedScenario sc = prepare(cfg);
    const std::uint64_t master = seed.value_or(cfg.experiment.seed);
    int passed = 0;
    int counts[4] = {0, 0, 0, 0};
    double worst_stationarity = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng = make_trial_rng(master, static_cast<std::uint64_t>(k));
        const LoadingProblem problem = make_problem(sample_su_channel(cfg, rng), sc.caps, cfg.su);
        const ContinuousSolution s = solve_continuous(problem);
        const KktReport rep = kkt_verify(s, problem);
        passed += rep.pass ? 1 : 0;
        ++counts[s.case_id - 5];
        worst_stationarity = std::max({worst_stationarity, rep.stationarity_power, rep.stationarity_bits});
    }
    const nlohmann::json out = {{"instances", instances},
                                {"passed", passed},
                                {"worst_stationarity", worst_stationarity},
                                {"case_counts", {{"5", counts[0]}, {"6", counts[1]}, {"7", counts[2]}, {"8", counts[3]}}}};
    std::cout << out.dump(2) << '\n';
    return passed == instances ? 0 : kExitSolver;
}

void cmd_runtime(const std::string& path, const std::vector<int>& n_values, int realizations,
                 std::optional<std::uint64_t> seed)
{
    const ScenarioConfig cfg = read_config(path);
    const auto table = runtime_scaling(cfg, n_values, realizations, seed.value_or(cfg.experiment.seed));
    write_runtime_csv(std::cout, table);
    std::cerr << "log-log slope " << format_double(table.slope) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bit and power loading for OFDM cognitive radio"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;

    auto* solve = app.add_subcommand("solve", "Solve one channel realization and print the allocation as JSON");
    std::uint64_t trial = 0;
    solve->add_option("--config", config, "Scenario JSON")->required();
    solve->add_option("--seed", seed, "Master seed (default: experiment.seed)");
    solve->add_option("--trial", trial, "Trial index within the seed's stream");

    auto* sw = app.add_subcommand("sweep", "Monte Carlo sweep of one parameter, CSV on stdout");
    std::optional<std::string> param;
    std::vector<double> values;
    std::optional<int> trials;
    unsigned threads = 1;
    sw->add_option("--config", config, "Scenario JSON")->required();
    sw->add_option("--param", param, "psi, alpha, p_aci or p_cci (powers in W)");
    sw->add_option("--values", values, "Comma-separated values")->delimiter(',');
    sw->add_option("--trials", trials, "Trials per value")->check(CLI::PositiveNumber);
    sw->add_option("--seed", seed, "Master seed");
    sw->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* oc = app.add_subcommand("oracle-compare", "Proposed allocation vs exhaustive search, CSV on stdout");
    int instances = 100;
    int max_bits = 8;
    bool even_bits = false;
    bool parallel = false;
    oc->add_option("--config", config, "Scenario JSON (small N)")->required();
    oc->add_option("--instances", instances, "Channel draws")->check(CLI::PositiveNumber);
    oc->add_option("--seed", seed, "Master seed");
    oc->add_option("--max-bits", max_bits, "Largest constellation for both methods")->check(CLI::Range(2, 16));
    oc->add_flag("--even-bits", even_bits, "Restrict the search to square QAM");
    oc->add_flag("--parallel", parallel, "Split the search over the first subcarrier");

    auto* kk = app.add_subcommand("kkt-check", "Verify optimality conditions on random instances");
    int kkt_instances = 100;
    kk->add_option("--config", config, "Scenario JSON")->required();
    kk->add_option("--instances", kkt_instances, "Channel draws")->check(CLI::PositiveNumber);
    kk->add_option("--seed", seed, "Master seed");

    auto* rt = app.add_subcommand("runtime", "Continuous solver wall time against N, CSV on stdout");
    std::vector<int> n_values{64, 128, 256, 512};
    int realizations = 5;
    rt->add_option("--config", config, "Scenario JSON")->required();
    rt->add_option("--n", n_values, "Comma-separated subcarrier counts")->delimiter(',');
    rt->add_option("--realizations", realizations, "Channel draws per N")->check(CLI::PositiveNumber);
    rt->add_option("--seed", seed, "Master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*solve) cmd_solve(config, seed, trial);
        if (*sw) cmd_sweep(config, param, values, trials, seed, threads);
        if (*oc) cmd_oracle(config, instances, seed, max_bits, even_bits, parallel);
        if (*kk) return cmd_kkt(config, kkt_instances, seed);
        if (*rt) cmd_runtime(config, n_values, realizations, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
