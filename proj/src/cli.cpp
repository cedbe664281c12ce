#include "cdflab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cdflab/config.hpp"
#include "cdflab/errors.hpp"
#include "cdflab/experiment.hpp"
#include "cdflab/io.hpp"
#include "cdflab/oracles.hpp"

namespace cdflab
{
namespace
{

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct CommonArgs
{
    std::string config;
    std::string out_dir = ".";
    int threads = 0;
    bool allow_nonstationary = false;
};

struct PointOutcome
{
    SweepPoint parameters;
    Scenario scenario;
    ExperimentResult result;
    std::optional<MarkovCdf> oracle;
};

ojson oracle_json(const Scenario& s, std::optional<MarkovCdf>& markov)
{
    ojson j;
    ojson undefined = ojson::object();
    try
    {
        markov = markov_cdf(markov_params(s));
        j["markov"] = to_json(*markov);
    }
    catch (const UnsupportedScenario& e)
    {
        j["markov"] = nullptr;
        undefined["markov"] = e.what();
    }
    if (s.intensity.is<HawkesIntensity>())
    {
        const auto& h = s.intensity.as<HawkesIntensity>();
        if (h.jump / h.decay < 1.0)
            j["hawkes_stationary_rate"] = hawkes_stationary_rate(h.baseline, h.jump, h.decay);
        else
        {
            j["hawkes_stationary_rate"] = nullptr;
            undefined["hawkes_stationary_rate"] = "branching ratio >= 1";
        }
    }
    else
    {
        j["hawkes_stationary_rate"] = nullptr;
        undefined["hawkes_stationary_rate"] = "not a Hawkes scenario";
    }
    j["undefined"] = std::move(undefined);
    return j;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

ojson point_json(PointOutcome& p)
{
    ojson j;
    if (!p.parameters.empty())
    {
        ojson params = ojson::object();
        for (const auto& [name, value] : p.parameters)
            params[name] = value;
        j["parameters"] = std::move(params);
    }
    j["scenario"] = scenario_to_json(p.scenario);
    j["scenario_id"] = scenario_identity(p.scenario);
    j["estimate"] = to_json(p.result.pooled);
    j["diagnostics"] = to_json(p.result.diagnostics);
    j["compensator_check"] = {{"max_relative_error", p.result.max_compensator_relative_error},
                              {"tolerance", compensator_tolerance},
                              {"failures", p.result.compensator_failures}};
    j["oracle"] = oracle_json(p.scenario, p.oracle);
    return j;
}

std::vector<PointOutcome> execute(const ExperimentConfig& cfg, const CommonArgs& args,
                                  const fs::path& out_dir, std::ostream& err)
{
    const ConfigOptions options{args.allow_nonstationary};
    const bool swept = !cfg.sweep.empty();
    const auto grid = swept ? sweep_grid(cfg.sweep) : std::vector<SweepPoint>{{}};

    std::vector<PointOutcome> outcomes;
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        Scenario scenario = swept ? apply_sweep_point(cfg.scenario, grid[k], options)
                                  : cfg.scenario;
        if (scenario.intensity.branching_ratio() >= 1.0)
            err << "warning: non-stationary Hawkes intensity (alpha/beta = "
                << scenario.intensity.branching_ratio()
                << "); long-run rates and CDF do not exist for this scenario\n";

        ExperimentOptions eo;
        eo.replications = cfg.replications;
        eo.checkpoints = cfg.checkpoints;
        eo.threads = args.threads;
        const std::string prefix = swept ? "p" + std::to_string(k) + "_" : "";
        if (cfg.outputs.event_log)
        {
            eo.on_trajectory = [&out_dir, prefix](const Trajectory& t) {
                std::ostringstream csv;
                write_event_log_csv(csv, t.events);
                write_text(out_dir / ("events_" + prefix + "r"
                                      + std::to_string(t.replication_index) + ".csv"),
                           csv.str());
            };
        }
        PointOutcome p{grid[k], scenario, run_experiment(scenario, eo), std::nullopt};
        if (cfg.outputs.convergence_csv && !p.result.curve.empty())
        {
            std::ostringstream csv;
            write_convergence_csv(csv, p.result.curve);
            write_text(out_dir / ("convergence" + (swept ? "_p" + std::to_string(k) : "") + ".csv"),
                       csv.str());
        }
        outcomes.push_back(std::move(p));
    }
    return outcomes;
}

std::vector<BiasRow> bias_rows(const std::vector<PointOutcome>& outcomes)
{
    std::vector<BiasRow> rows;
    for (const auto& p : outcomes)
        rows.push_back({p.parameters, p.oracle, p.result.pooled});
    return rows;
}

void check_all(const std::vector<PointOutcome>& outcomes)
{
    for (const auto& p : outcomes)
        check_invariants(p.result, !p.scenario.damage_on_caused_failure);
}

int do_validate(const CommonArgs& args, std::ostream& out)
{
    const ExperimentConfig cfg = load_config(args.config, {args.allow_nonstationary});
    out << "config OK: " << sweep_grid(cfg.sweep).size() << " scenario(s), "
        << cfg.replications << " replication(s) each\n";
    out << config_to_json(cfg).dump(2) << '\n';
    return exit_success;
}

int do_run(const CommonArgs& args, std::ostream& out, std::ostream& err)
{
    const ExperimentConfig cfg = load_config(args.config, {args.allow_nonstationary});
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    auto outcomes = execute(cfg, args, out_dir, err);

    ojson report;
    report["tool"] = "cdflab";
    report["format_version"] = 1;
    report["config"] = config_to_json(cfg);
    report["base_seed"] = cfg.scenario.base_seed;
    if (cfg.sweep.empty())
    {
        const ojson point = point_json(outcomes.front());
        for (const auto& [key, value] : point.items())
            report[key] = value;
    }
    else
    {
        ojson points = ojson::array();
        for (auto& p : outcomes)
            points.push_back(point_json(p));
        report["points"] = std::move(points);
        std::ostringstream table;
        write_bias_table_csv(table, bias_rows(outcomes));
        write_text(out_dir / "bias_study.csv", table.str());
    }
    if (cfg.outputs.report)
        write_text(out_dir / "report.json", report.dump(2) + "\n");

    for (const auto& p : outcomes)
    {
        const EstimateReport& e = p.result.pooled;
        for (const auto& [name, value] : p.parameters)
            out << name << '=' << value << ' ';
        out << "cdf_hat=" << e.cdf_hat << " rasmussen_hat=" << e.rasmussen_hat
            << " bias_hat=" << e.bias_hat;
        if (auto it = e.uncertainty.find("bias_hat"); it != e.uncertainty.end())
            out << " (se " << it->second.standard_error << ")";
        out << '\n';
    }
    check_all(outcomes);
    return exit_success;
}

int do_bias_study(const CommonArgs& args, std::ostream& out, std::ostream& err)
{
    const ExperimentConfig cfg = load_config(args.config, {args.allow_nonstationary});
    if (cfg.sweep.empty())
    {
        err << "usage error: bias-study needs a 'sweep' block in the config\n";
        return exit_config_error;
    }
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    ExperimentConfig quiet = cfg;
    quiet.outputs.event_log = false;
    quiet.outputs.convergence_csv = false;
    auto outcomes = execute(quiet, args, out_dir, err);
    for (auto& p : outcomes)
        oracle_json(p.scenario, p.oracle);

    std::ostringstream table;
    write_bias_table_csv(table, bias_rows(outcomes));
    write_text(out_dir / "bias_study.csv", table.str());
    out << table.str();
    check_all(outcomes);
    return exit_success;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Coupled counting-process laboratory for core damage frequency estimation",
                 "cdflab"};
    app.require_subcommand(1);
    CommonArgs common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Experiment config (YAML)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out-dir", common.out_dir, "Directory for reports and CSVs");
        sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--allow-nonstationary", common.allow_nonstationary,
                      "Accept Hawkes branching ratios >= 1 (warns)");
    };
    CLI::App* run = app.add_subcommand("run", "Simulate replications and write reports");
    CLI::App* study = app.add_subcommand("bias-study", "Tabulate Rasmussen bias over a sweep");
    CLI::App* check = app.add_subcommand("validate", "Check a config without simulating");
    for (CLI::App* sub : {run, study, check})
        add_common(sub);

    std::vector<std::string> storage = args;
    storage.insert(storage.begin(), "cdflab");
    std::vector<char*> argv;
    for (auto& a : storage)
        argv.push_back(a.data());

    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_success : exit_config_error;
    }

    try
    {
        if (run->parsed())
            return do_run(common, out, err);
        if (study->parsed())
            return do_bias_study(common, out, err);
        return do_validate(common, out);
    }
    catch (const ConfigError& e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (const ValidationError& e)
    {
        err << "validation error: " << e.what() << '\n';
        return exit_validation_error;
    }
    catch (const InvariantViolation& e)
    {
        err << "invariant violation: " << e.what() << '\n';
        return exit_invariant_violation;
    }
    catch (const ContractViolation& e)
    {
        err << "invariant violation: " << e.what() << '\n';
        return exit_invariant_violation;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_internal;
    }
}

}  // namespace cdflab
