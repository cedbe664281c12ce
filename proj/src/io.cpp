#include "cdflab/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cdflab/errors.hpp"

namespace cdflab
{
namespace
{

using ojson = nlohmann::ordered_json;

std::string format_sig(double x, int digits)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what)
{
    throw ConfigError("line " + std::to_string(line_no) + ": " + what);
}

double parse_number(const std::string& cell, std::size_t line_no)
{
    double value = 0;
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc() || ptr != end)
        bad_line(line_no, "not a number: '" + cell + "'");
    return value;
}

int parse_bit(const std::string& cell, std::size_t line_no)
{
    if (cell == "0")
        return 0;
    if (cell == "1")
        return 1;
    bad_line(line_no, "expected 0 or 1, got '" + cell + "'");
}

std::string strip_cr(std::string line)
{
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return line;
}

ojson interval_json(const Interval& i)
{
    return ojson{{"low", i.low}, {"high", i.high}, {"level", i.level}};
}

ojson optional_json(const std::optional<double>& v)
{
    return v ? ojson(*v) : ojson(nullptr);
}

std::optional<double> optional_from(const ojson& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double x)
{
    for (int digits = 15; digits <= 17; ++digits)
    {
        std::string s = format_sig(x, digits);
        if (std::strtod(s.c_str(), nullptr) == x)
            return s;
    }
    return format_sig(x, 17);
}

void write_event_log_csv(std::ostream& out, const std::vector<EventRecord>& events)
{
    out << event_log_header << '\n';
    for (const EventRecord& e : events)
    {
        out << format_sig(e.time, 9) << ',' << event_kind_tag(e.kind) << ','
            << e.left_limit_flag << ',' << (e.is_damage ? 1 : 0) << ','
            << (e.caused_failure ? 1 : 0) << '\n';
    }
}

std::vector<EventRecord> read_event_log_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != event_log_header)
        bad_line(1, std::string("expected header '") + event_log_header + "'");
    std::vector<EventRecord> events;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != 5)
            bad_line(line_no, "expected 5 columns");
        EventRecord e;
        e.time = parse_number(cells[0], line_no);
        const auto kind = parse_event_kind(cells[1]);
        if (!kind)
            bad_line(line_no, "unknown event kind '" + cells[1] + "'");
        e.kind = *kind;
        e.left_limit_flag = parse_bit(cells[2], line_no);
        e.is_damage = parse_bit(cells[3], line_no) == 1;
        e.caused_failure = parse_bit(cells[4], line_no) == 1;
        events.push_back(e);
    }
    return events;
}

void write_convergence_csv(std::ostream& out, const std::vector<CurvePoint>& curve)
{
    out << convergence_header << '\n';
    for (const CurvePoint& p : curve)
        out << format_double(p.time) << ',' << format_double(p.cdf_hat) << ','
            << format_double(p.rasmussen_hat) << ',' << format_double(p.bias) << ','
            << format_double(p.norm_residual) << '\n';
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != convergence_header)
        bad_line(1, std::string("expected header '") + convergence_header + "'");
    std::vector<ConvergenceRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != 5)
            bad_line(line_no, "expected 5 columns");
        rows.push_back({parse_number(cells[0], line_no), parse_number(cells[1], line_no),
                        parse_number(cells[2], line_no), parse_number(cells[3], line_no),
                        parse_number(cells[4], line_no)});
    }
    return rows;
}

void write_bias_table_csv(std::ostream& out, const std::vector<BiasRow>& rows)
{
    if (rows.empty())
        return;
    for (const auto& [name, value] : rows.front().parameters)
        out << name << ',';
    out << "oracle_cdf,oracle_rasmussen,cdf_hat,cdf_se,rasmussen_hat,rasmussen_se,"
           "bias_hat,bias_se,bias_p_value,replications\n";
    auto se = [](const EstimateReport& r, const char* field) {
        auto it = r.uncertainty.find(field);
        return it == r.uncertainty.end() ? std::string() : format_double(it->second.standard_error);
    };
    for (const BiasRow& row : rows)
    {
        for (const auto& [name, value] : row.parameters)
            out << format_double(value) << ',';
        if (row.oracle)
            out << format_double(row.oracle->true_cdf) << ','
                << format_double(row.oracle->rasmussen_cdf) << ',';
        else
            out << ",,";
        const EstimateReport& p = row.pooled;
        out << format_double(p.cdf_hat) << ',' << se(p, "cdf_hat") << ','
            << format_double(p.rasmussen_hat) << ',' << se(p, "rasmussen_hat") << ','
            << format_double(p.bias_hat) << ',' << se(p, "bias_hat") << ','
            << (p.bias_p_value ? format_double(*p.bias_p_value) : std::string()) << ','
            << p.replications << '\n';
    }
}

CsvTable read_numeric_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        bad_line(1, "missing header");
    table.header = split_csv(strip_cr(line));
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != table.header.size())
            bad_line(line_no, "column count differs from header");
        std::vector<double> row;
        for (const auto& cell : cells)
            row.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : parse_number(cell, line_no));
        table.rows.push_back(std::move(row));
    }
    return table;
}

ojson to_json(const EstimateReport& r)
{
    ojson j;
    j["scenario_id"] = r.scenario_id;
    j["replications"] = r.replications;
    j["horizon"] = r.horizon;
    j["events"] = r.events;
    j["damage_events"] = r.damage_events;
    j["lambda_hat"] = r.lambda_hat;
    j["p_time"] = r.p_time;
    j["p_palm"] = optional_json(r.p_palm);
    j["cdf_hat"] = r.cdf_hat;
    j["rasmussen_hat"] = r.rasmussen_hat;
    j["bias_hat"] = r.bias_hat;
    j["bias_p_value"] = optional_json(r.bias_p_value);
    ojson ci = ojson::object();
    ojson se = ojson::object();
    for (const char* field : estimate_fields)
    {
        auto it = r.uncertainty.find(field);
        if (it != r.uncertainty.end())
        {
            ci[field] = interval_json(it->second.ci);
            se[field] = it->second.standard_error;
        }
        else
        {
            ci[field] = nullptr;
            se[field] = nullptr;
        }
    }
    j["ci"] = std::move(ci);
    j["standard_error"] = std::move(se);
    ojson undefined = ojson::object();
    for (const auto& [field, reason] : r.undefined)
        undefined[field] = reason;
    j["undefined"] = std::move(undefined);
    return j;
}

EstimateReport estimate_from_json(const ojson& j)
{
    EstimateReport r;
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.replications = j.at("replications").get<std::int64_t>();
    r.horizon = j.at("horizon").get<double>();
    r.events = j.at("events").get<std::int64_t>();
    r.damage_events = j.at("damage_events").get<std::int64_t>();
    r.lambda_hat = j.at("lambda_hat").get<double>();
    r.p_time = j.at("p_time").get<double>();
    r.p_palm = optional_from(j, "p_palm");
    r.cdf_hat = j.at("cdf_hat").get<double>();
    r.rasmussen_hat = j.at("rasmussen_hat").get<double>();
    r.bias_hat = j.at("bias_hat").get<double>();
    r.bias_p_value = optional_from(j, "bias_p_value");
    for (const char* field : estimate_fields)
    {
        const ojson& ci = j.at("ci").at(field);
        if (ci.is_null())
            continue;
        r.uncertainty[field] = {j.at("standard_error").at(field).get<double>(),
                                {ci.at("low").get<double>(), ci.at("high").get<double>(),
                                 ci.at("level").get<double>()}};
    }
    for (const auto& [field, reason] : j.at("undefined").items())
        r.undefined[field] = reason.get<std::string>();
    return r;
}

ojson to_json(const DiagnosticsReport& d)
{
    ojson j;
    j["replication_index"] = d.replication_index;
    j["m_total"] = d.m_total;
    j["m_damage"] = d.m_damage;
    j["damage_compensator"] = d.damage_compensator;
    j["normalized_damage_residual"] = d.normalized_damage_residual;
    j["ks_statistic"] = optional_json(d.ks_statistic);
    j["ks_p_value"] = optional_json(d.ks_p_value);
    j["rescaled_count"] = d.rescaled_count;
    ojson undefined = ojson::object();
    if (!d.ks_p_value)
        undefined["ks_p_value"] = d.ks_skipped_reason;
    j["undefined"] = std::move(undefined);
    return j;
}

DiagnosticsReport diagnostics_from_json(const ojson& j)
{
    DiagnosticsReport d;
    d.replication_index = j.at("replication_index").get<std::uint64_t>();
    d.m_total = j.at("m_total").get<double>();
    d.m_damage = j.at("m_damage").get<double>();
    d.damage_compensator = j.at("damage_compensator").get<double>();
    d.normalized_damage_residual = j.at("normalized_damage_residual").get<double>();
    d.ks_statistic = optional_from(j, "ks_statistic");
    d.ks_p_value = optional_from(j, "ks_p_value");
    d.rescaled_count = j.at("rescaled_count").get<std::int64_t>();
    if (j.at("undefined").contains("ks_p_value"))
        d.ks_skipped_reason = j.at("undefined").at("ks_p_value").get<std::string>();
    return d;
}

ojson to_json(const DiagnosticsSummary& s)
{
    ojson j;
    j["replications"] = s.replications;
    j["mean_m_total"] = s.mean_m_total;
    j["sd_m_total"] = s.sd_m_total;
    j["mean_m_damage"] = s.mean_m_damage;
    j["sd_m_damage"] = s.sd_m_damage;
    j["mean_normalized_residual"] = s.mean_normalized_residual;
    j["sd_normalized_residual"] = s.sd_normalized_residual;
    j["strong_law_fraction"] = s.strong_law_fraction;
    j["ks_tested"] = s.ks_tested;
    j["ks_rejections"] = s.ks_rejections;
    j["ks_rejection_rate"] = optional_json(s.ks_rejection_rate);
    return j;
}

ojson to_json(const MarkovCdf& m)
{
    return ojson{{"true_cdf", m.true_cdf},
                 {"rasmussen_cdf", m.rasmussen_cdf},
                 {"unavailability", m.unavailability}};
}

}  // namespace cdflab
