#pragma once

// JSON views of solver outputs and a small CSV writer for experiment tables.

#include "cogload/constraints.hpp"
#include "cogload/discretizer.hpp"
#include "cogload/experiments.hpp"
#include "cogload/kkt.hpp"
#include "cogload/solver.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cogload {

namespace detail {

/// JSON has no infinity; caps may be unbounded.
inline nlohmann::json number_json(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

inline nlohmann::json numbers_json(const std::vector<double>& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (double x : v)
        a.push_back(number_json(x));
    return a;
}

}  // namespace detail

inline nlohmann::json to_json(const ContinuousSolution& s)
{
    return {{"case", s.case_id},
            {"bits", detail::numbers_json(s.bits)},
            {"powers_w", detail::numbers_json(s.powers)},
            {"lambda_power", s.lambda_power},
            {"lambda_aci", detail::numbers_json(s.lambda_aci)},
            {"active_set", s.active_set},
            {"objective", s.objective}};
}

inline nlohmann::json to_json(const Allocation& a)
{
    return {{"bits", a.bits},
            {"powers_w", detail::numbers_json(a.powers)},
            {"total_bits", a.total_bits()},
            {"total_power_w", a.total_power()},
            {"objective", a.objective},
            {"feasible", a.feasible},
            {"repair_steps", a.repair_steps}};
}

inline nlohmann::json to_json(const FeasibilityReport& r)
{
    nlohmann::json aci_ok = nlohmann::json::array();
    for (bool b : r.aci_ok)
        aci_ok.push_back(b);
    return {{"feasible", r.feasible},
            {"ber_ok", r.ber_ok},
            {"total_power_w", r.total_power},
            {"total_cap_w", detail::number_json(r.total_cap)},
            {"total_ok", r.total_ok},
            {"aci_sums_w", detail::numbers_json(r.aci_sums)},
            {"aci_caps_w", detail::numbers_json(r.aci_caps)},
            {"aci_ok", aci_ok},
            {"worst_margin", detail::number_json(r.worst_margin)}};
}

inline nlohmann::json to_json(const KktReport& r)
{
    return {{"pass", r.pass},
            {"stationarity_power", r.stationarity_power},
            {"stationarity_bits", r.stationarity_bits},
            {"primal", r.primal},
            {"complementarity", r.complementarity},
            {"dual_sign", r.dual_sign},
            {"ber_multipliers", detail::numbers_json(r.ber_multipliers)}};
}

inline nlohmann::json to_json(const AggregateStats& s)
{
    return {{"trials", s.trials},
            {"avg_throughput_bits", s.avg_throughput},
            {"ci95_throughput", s.ci95_throughput},
            {"avg_power_w", s.avg_power},
            {"ci95_power", s.ci95_power},
            {"cci_violation_rate", s.cci_violation_rate},
            {"ci95_cci", s.ci95_cci},
            {"aci_violation_rate", s.aci_violation_rate},
            {"ci95_aci", s.ci95_aci},
            {"infeasible_allocations", s.infeasible_allocations},
            {"case_counts", {{"5", s.case_counts[0]}, {"6", s.case_counts[1]}, {"7", s.case_counts[2]},
                             {"8", s.case_counts[3]}}}};
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

/// RFC 4180 rows: fields with commas, quotes or line breaks are quoted, quotes doubled.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k) os_ << ',';
            write_field(fields[k]);
        }
        os_ << "\r\n";
    }

    static std::string field(double v) { return format_double(v); }
    static std::string field(long long v) { return std::to_string(v); }
    static std::string field(std::string_view v) { return std::string(v); }

private:
    void write_field(const std::string& f)
    {
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            os_ << f;
            return;
        }
        os_ << '"';
        for (char c : f) {
            if (c == '"') os_ << '"';
            os_ << c;
        }
        os_ << '"';
    }

    std::ostream& os_;
};

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    CsvWriter w(os);
    w.row({"param_value", "avg_throughput", "avg_power", "cci_violation_rate", "aci_violation_rate",
           "ci95_throughput", "ci95_power", "ci95_cci", "ci95_aci", "trials"});
    for (const auto& r : rows) {
        const auto& s = r.stats;
        w.row({CsvWriter::field(r.value), CsvWriter::field(s.avg_throughput), CsvWriter::field(s.avg_power),
               CsvWriter::field(s.cci_violation_rate), CsvWriter::field(s.aci_violation_rate),
               CsvWriter::field(s.ci95_throughput), CsvWriter::field(s.ci95_power), CsvWriter::field(s.ci95_cci),
               CsvWriter::field(s.ci95_aci), CsvWriter::field(static_cast<long long>(s.trials))});
    }
}

inline void write_oracle_csv(std::ostream& os, const OracleComparison& cmp)
{
    CsvWriter w(os);
    w.row({"seed", "f_proposed", "f_opt", "relative_gap", "proposed_s", "oracle_s", "oracle_nodes"});
    for (const auto& r : cmp.rows)
        w.row({std::to_string(r.seed), CsvWriter::field(r.f_proposed), CsvWriter::field(r.f_opt),
               CsvWriter::field(r.relative_gap), CsvWriter::field(r.proposed_seconds),
               CsvWriter::field(r.oracle_seconds), std::to_string(r.oracle_nodes)});
}

inline void write_runtime_csv(std::ostream& os, const RuntimeTable& t)
{
    CsvWriter w(os);
    w.row({"num_subcarriers", "median_s"});
    for (const auto& r : t.rows)
        w.row({std::to_string(r.num_subcarriers), CsvWriter::field(r.median_seconds)});
}

}  // namespace cogload
