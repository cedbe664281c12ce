#include <doctest.h>

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdflab/cli.hpp"
#include "cdflab/io.hpp"

using namespace cdflab;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
    fs::path path;
    TempDir()
    {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path()
               / ("cdflab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text)
{
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string small_pasta = R"(scenario:
  horizon: 2000
  base_seed: 99
  intensity: {kind: poisson, lambda: 2.0}
  protection:
    coupling_q: 0.0
    up:   {kind: exponential, rate: 0.1}
    down: {kind: exponential, rate: 10.0}
replications: 40
checkpoints: 128
outputs: {event_log: true, report: true, convergence_csv: true}
)";

const std::string hawkes_sweep = R"(scenario:
  horizon: 1000
  base_seed: 5
  intensity: {kind: hawkes, mu: 1.0, alpha: 0.8, beta: 2.0}
  protection:
    up:   {kind: exponential, rate: 0.05}
    down: {kind: exponential, rate: 2.0}
replications: 40
checkpoints: 64
outputs: {event_log: false, report: true, convergence_csv: false}
sweep:
  protection.coupling_q: [0.0, 0.05, 0.1, 0.2]
)";

}  // namespace

TEST_CASE("run writes a report, convergence CSV and event logs")
{
    TempDir dir;
    const auto cfg = write_config(dir.path, "pasta.yaml", small_pasta);
    const auto out = dir.path / "out";
    const auto r = cli({"run", "--config", cfg.string(), "--out-dir", out.string()});
    REQUIRE(r.code == exit_success);

    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["tool"] == "cdflab");
    CHECK(report["base_seed"] == 99);
    const auto& est = report["estimate"];
    CHECK(est["replications"] == 40);
    const double bias = est["bias_hat"];
    const double se = est["standard_error"]["bias_hat"];
    CHECK(std::abs(bias) <= 3 * se);
    CHECK(report["oracle"]["markov"]["true_cdf"].get<double>()
          == doctest::Approx(0.019801980198019802));
    CHECK(report["compensator_check"]["failures"] == 0);

    std::ifstream conv(out / "convergence.csv");
    CHECK(read_convergence_csv(conv).size() == 128);

    int logs = 0;
    for (const auto& entry : fs::directory_iterator(out))
    {
        if (entry.path().filename().string().rfind("events_", 0) != 0)
            continue;
        std::ifstream log(entry.path());
        CHECK_NOTHROW(read_event_log_csv(log));
        ++logs;
    }
    CHECK(logs == 40);
}

TEST_CASE("reports are byte-identical across reruns and thread counts")
{
    TempDir dir;
    const auto cfg = write_config(dir.path, "pasta.yaml", small_pasta);
    const auto a = dir.path / "a";
    const auto b = dir.path / "b";
    REQUIRE(cli({"run", "--config", cfg.string(), "--out-dir", a.string(), "--threads", "1"}).code
            == 0);
    REQUIRE(cli({"run", "--config", cfg.string(), "--out-dir", b.string(), "--threads", "3"}).code
            == 0);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "convergence.csv") == slurp(b / "convergence.csv"));
    CHECK(slurp(a / "events_r7.csv") == slurp(b / "events_r7.csv"));
}

TEST_CASE("exit codes")
{
    TempDir dir;
    SUBCASE("non-stationary Hawkes is a validation error")
    {
        const auto cfg = write_config(dir.path, "ns.yaml", R"(scenario:
  horizon: 50
  intensity: {kind: hawkes, mu: 1.0, alpha: 2.4, beta: 2.0}
  protection: {always_down: true}
replications: 2
)");
        const auto r = cli({"run", "--config", cfg.string(), "--out-dir", dir.path.string()});
        CHECK(r.code == exit_validation_error);
        CHECK(r.err.find("non-stationary Hawkes") != std::string::npos);
        CHECK(r.err.find("scenario.intensity.alpha") != std::string::npos);

        const auto allowed = cli({"validate", "--config", cfg.string(), "--allow-nonstationary"});
        CHECK(allowed.code == exit_success);
    }
    SUBCASE("malformed YAML is a config error with a line number")
    {
        const auto cfg = write_config(dir.path, "bad.yaml", "scenario:\n  horizon: [1, 2\n");
        const auto r = cli({"validate", "--config", cfg.string()});
        CHECK(r.code == exit_config_error);
        CHECK(r.err.find("line") != std::string::npos);
    }
    SUBCASE("unknown sweep parameter is a validation error")
    {
        const auto cfg = write_config(dir.path, "sw.yaml",
                                      small_pasta + "sweep:\n  protection.warp: [1]\n");
        CHECK(cli({"validate", "--config", cfg.string()}).code == exit_validation_error);
    }
    SUBCASE("usage errors")
    {
        CHECK(cli({}).code == exit_config_error);
        CHECK(cli({"run"}).code == exit_config_error);
        CHECK(cli({"run", "--config", (dir.path / "missing.yaml").string()}).code
              == exit_config_error);
        const auto cfg = write_config(dir.path, "pasta.yaml", small_pasta);
        const auto r = cli({"bias-study", "--config", cfg.string()});
        CHECK(r.code == exit_config_error);
        CHECK(r.err.find("sweep") != std::string::npos);
    }
    SUBCASE("validate reports the resolved config")
    {
        const auto cfg = write_config(dir.path, "pasta.yaml", small_pasta);
        const auto r = cli({"validate", "--config", cfg.string()});
        CHECK(r.code == exit_success);
        CHECK(r.out.find("config OK") != std::string::npos);
    }
}

TEST_CASE("bias study over the coupling probability")
{
    TempDir dir;
    const auto cfg = write_config(dir.path, "sweep.yaml", hawkes_sweep);
    const auto r = cli({"bias-study", "--config", cfg.string(), "--out-dir", dir.path.string()});
    REQUIRE(r.code == exit_success);
    std::ifstream in(dir.path / "bias_study.csv");
    const auto table = read_numeric_csv(in);
    REQUIRE(table.rows.size() == 4);
    CHECK(table.header.front() == "protection.coupling_q");
    auto column = [&](const std::string& name) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        REQUIRE(it != table.header.end());
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const auto bias = column("bias_hat");
    const auto se = column("bias_se");
    const auto oracle = column("oracle_cdf");
    for (std::size_t i = 1; i < table.rows.size(); ++i)
    {
        const double combined =
            std::hypot(table.rows[i][se], table.rows[i - 1][se]);
        CHECK(table.rows[i][bias] >= table.rows[i - 1][bias] - 3 * combined);
        CHECK(std::isnan(table.rows[i][oracle]));
    }
    CHECK(table.rows.back()[bias] > 0);
}

TEST_CASE("shipped configs validate and show nonnegative bias")
{
    const fs::path configs(CDFLAB_CONFIG_DIR);
    for (const char* name : {"pasta.yaml", "coupled.yaml", "modulated.yaml", "hawkes_sweep.yaml",
                             "hawkes_event_log.yaml"})
    {
        CAPTURE(name);
        CHECK(cli({"validate", "--config", (configs / name).string()}).code == exit_success);
    }
    CHECK(cli({"validate", "--config", (configs / "nonstationary.yaml").string()}).code
          == exit_validation_error);

    TempDir dir;
    const auto r = cli({"run", "--config", (configs / "hawkes_event_log.yaml").string(),
                        "--out-dir", dir.path.string()});
    REQUIRE(r.code == exit_success);
    const auto report = nlohmann::json::parse(slurp(dir.path / "report.json"));
    const double bias = report["estimate"]["bias_hat"];
    const double se = report["estimate"]["standard_error"]["bias_hat"];
    CHECK(bias >= -3 * se);
}
