#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdflab/experiment.hpp"
#include "cdflab/inference.hpp"
#include "cdflab/oracles.hpp"
#include "cdflab/simulator.hpp"

namespace cdflab
{

//---------------------------------------------------------------------------//
// Event log CSV
//
//   time,kind,left_limit_flag,is_damage,caused_failure
//   0.512603401,IE,1,0,0
//
// kind is IE, PDOWN or PUP; times carry 9 significant digits; flags are 0/1.
//---------------------------------------------------------------------------//

inline constexpr const char* event_log_header = "time,kind,left_limit_flag,is_damage,caused_failure";

void write_event_log_csv(std::ostream& out, const std::vector<EventRecord>& events);

// Compensator fields of the returned records are zero. Throws ConfigError
// with the offending line number on malformed input.
std::vector<EventRecord> read_event_log_csv(std::istream& in);

//---------------------------------------------------------------------------//
// Convergence CSV: t,cdf_hat,rasmussen_hat,bias,norm_residual
//---------------------------------------------------------------------------//

inline constexpr const char* convergence_header = "t,cdf_hat,rasmussen_hat,bias,norm_residual";

struct ConvergenceRow
{
    double t = 0;
    double cdf_hat = 0;
    double rasmussen_hat = 0;
    double bias = 0;
    double norm_residual = 0;
};

void write_convergence_csv(std::ostream& out, const std::vector<CurvePoint>& curve);
std::vector<ConvergenceRow> read_convergence_csv(std::istream& in);

//---------------------------------------------------------------------------//
// JSON
//---------------------------------------------------------------------------//

nlohmann::ordered_json to_json(const EstimateReport& r);
EstimateReport estimate_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const DiagnosticsReport& d);
DiagnosticsReport diagnostics_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const DiagnosticsSummary& s);
nlohmann::ordered_json to_json(const MarkovCdf& m);

//---------------------------------------------------------------------------//
// Bias study table: one row per sweep point
//
//   <param>...,oracle_cdf,oracle_rasmussen,cdf_hat,cdf_se,rasmussen_hat,
//   rasmussen_se,bias_hat,bias_se,bias_p_value,replications
//
// Oracle columns are empty when no closed form applies.
//---------------------------------------------------------------------------//

struct BiasRow
{
    std::vector<std::pair<std::string, double>> parameters;
    std::optional<MarkovCdf> oracle;
    EstimateReport pooled;
};

void write_bias_table_csv(std::ostream& out, const std::vector<BiasRow>& rows);

// Header names and numeric cells (empty cells become NaN).
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_numeric_csv(std::istream& in);

// Shortest round-trip decimal for a double ("%.17g" trimmed).
std::string format_double(double x);

}  // namespace cdflab
