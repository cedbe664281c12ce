#include "cdflab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cdflab/errors.hpp"

namespace cdflab
{
namespace
{

using ojson = nlohmann::ordered_json;

std::string where(const YAML::Node& node)
{
    const YAML::Mark mark = node.Mark();
    if (mark.is_null())
        return "";
    return "line " + std::to_string(mark.line + 1) + ": ";
}

[[noreturn]] void config_error(const YAML::Node& node, const std::string& what)
{
    throw ConfigError(where(node) + what);
}

// Wraps a YAML mapping and tracks which keys were consumed so leftovers can
// be reported as unknown.
class Table
{
  public:
    Table(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.IsMap())
            config_error(node_, "'" + path_ + "' must be a table");
    }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    YAML::Node get(const std::string& key)
    {
        seen_.insert(key);
        return node_[key];
    }

    YAML::Node require(const std::string& key)
    {
        YAML::Node n = get(key);
        if (!n)
            config_error(node_, "missing key '" + qualified(key) + "'");
        return n;
    }

    template <class T>
    T scalar(const std::string& key)
    {
        return convert<T>(require(key), key);
    }

    template <class T>
    T scalar_or(const std::string& key, T fallback)
    {
        YAML::Node n = get(key);
        return n ? convert<T>(n, key) : fallback;
    }

    std::string qualified(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    void reject_unknown() const
    {
        for (const auto& kv : node_)
        {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key))
                config_error(kv.first, "unknown key '" + qualified(key) + "'");
        }
    }

  private:
    template <class T>
    T convert(const YAML::Node& n, const std::string& key) const
    {
        if (!n.IsScalar())
            config_error(n, "'" + qualified(key) + "' must be a scalar");
        try
        {
            return n.as<T>();
        }
        catch (const YAML::BadConversion&)
        {
            config_error(n, "'" + qualified(key) + "' has the wrong type");
        }
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

// Re-label validation errors from model factories with the config path.
template <class F>
auto with_field(const std::string& prefix, F&& make) -> decltype(make())
{
    try
    {
        return make();
    }
    catch (const ValidationError& e)
    {
        std::string field = e.field();
        std::string what = e.what();
        const std::string strip = field + ": ";
        if (what.rfind(strip, 0) == 0)
            what = what.substr(strip.size());
        // Factories name fields either bare ("rate") or scenario-relative
        // ("intensity.alpha").
        const auto dot = field.find('.');
        const std::string leaf = dot == std::string::npos ? field : field.substr(dot + 1);
        throw ValidationError(prefix + "." + leaf, what);
    }
}

Distribution parse_distribution(const YAML::Node& node, const std::string& path)
{
    Table t(node, path);
    const auto kind = t.scalar<std::string>("kind");
    Distribution d = Distribution::deterministic(0.0);
    if (kind == "exponential")
    {
        const double rate = t.scalar<double>("rate");
        d = with_field(path, [&] { return Distribution::exponential(rate); });
    }
    else if (kind == "weibull")
    {
        const double shape = t.scalar<double>("shape");
        const double scale = t.scalar<double>("scale");
        d = with_field(path, [&] { return Distribution::weibull(shape, scale); });
    }
    else if (kind == "deterministic")
    {
        const double value = t.scalar<double>("value");
        d = with_field(path, [&] { return Distribution::deterministic(value); });
    }
    else
    {
        config_error(node["kind"], "'" + path + ".kind' must be exponential, weibull or "
                                            "deterministic");
    }
    t.reject_unknown();
    return d;
}

struct ParsedIntensity
{
    IntensityModel model;
    std::vector<double> mixture_rates;
};

ParsedIntensity parse_intensity(const YAML::Node& node, const ConfigOptions& options)
{
    const std::string path = "scenario.intensity";
    Table t(node, path);
    const auto kind = t.scalar<std::string>("kind");
    std::vector<double> mixture;
    auto model = [&]() -> IntensityModel {
        if (kind == "poisson")
        {
            const double lambda = t.scalar<double>("lambda");
            if (YAML::Node mix = t.get("mixture_rates"))
            {
                if (!mix.IsSequence())
                    config_error(mix, "'" + path + ".mixture_rates' must be a list");
                for (const auto& v : mix)
                {
                    try
                    {
                        mixture.push_back(v.as<double>());
                    }
                    catch (const YAML::BadConversion&)
                    {
                        config_error(v, "'" + path + ".mixture_rates' entries must be numbers");
                    }
                }
            }
            return with_field(path, [&] { return IntensityModel::poisson(lambda); });
        }
        if (kind == "hawkes")
        {
            const double mu = t.scalar<double>("mu");
            const double alpha = t.scalar<double>("alpha");
            const double beta = t.scalar<double>("beta");
            const auto stationarity = options.allow_nonstationary
                                          ? IntensityModel::Stationarity::relaxed
                                          : IntensityModel::Stationarity::required;
            return with_field(path,
                              [&] { return IntensityModel::hawkes(mu, alpha, beta, stationarity); });
        }
        if (kind == "state_modulated")
        {
            const double up = t.scalar<double>("lambda_up");
            const double down = t.scalar<double>("lambda_down");
            return with_field(path, [&] { return IntensityModel::state_modulated(up, down); });
        }
        config_error(node["kind"],
                     "'" + path + ".kind' must be poisson, hawkes or state_modulated");
    }();
    t.reject_unknown();
    return {model, mixture};
}

ProtectionModel parse_protection(const YAML::Node& node)
{
    const std::string path = "scenario.protection";
    Table t(node, path);
    const bool always_down = t.scalar_or<bool>("always_down", false);
    const double q = t.scalar_or<double>("coupling_q", 0.0);
    if (always_down)
    {
        // Durations may be given but are unused.
        if (YAML::Node up = t.get("up"))
            parse_distribution(up, path + ".up");
        if (YAML::Node down = t.get("down"))
            parse_distribution(down, path + ".down");
        if (!(q >= 0 && q <= 1))
            throw ValidationError(path + ".coupling_q", "must lie in [0, 1]");
        t.reject_unknown();
        return ProtectionModel::always_down_model();
    }
    const Distribution up = parse_distribution(t.require("up"), path + ".up");
    const Distribution down = parse_distribution(t.require("down"), path + ".down");
    t.reject_unknown();
    return with_field(path, [&] { return ProtectionModel(up, down, q); });
}

Scenario parse_scenario(const YAML::Node& node, const ConfigOptions& options)
{
    Table t(node, "scenario");
    auto intensity = parse_intensity(t.require("intensity"), options);
    auto protection = parse_protection(t.require("protection"));
    Scenario s{intensity.model, protection};
    s.mixture_rates = std::move(intensity.mixture_rates);
    s.horizon = t.scalar<double>("horizon");
    s.damage_on_caused_failure = t.scalar_or<bool>("damage_on_caused_failure", false);
    s.base_seed = t.scalar_or<std::uint64_t>("base_seed", 0);
    t.reject_unknown();
    try
    {
        validate(s);
    }
    catch (const ValidationError& e)
    {
        throw ValidationError("scenario." + e.field(),
                              std::string(e.what()).substr(e.field().size() + 2));
    }
    return s;
}

ojson distribution_json(const Distribution& d)
{
    ojson j;
    j["kind"] = d.kind_name();
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>)
                j["rate"] = law.rate;
            else if constexpr (std::is_same_v<T, Weibull>)
            {
                j["shape"] = law.shape;
                j["scale"] = law.scale;
            }
            else
                j["value"] = law.value;
        },
        d.law());
    return j;
}

// Address of a dotted path inside a JSON object, or nullptr.
ojson* find_path(ojson& root, const std::string& dotted)
{
    ojson* node = &root;
    std::istringstream parts(dotted);
    std::string part;
    while (std::getline(parts, part, '.'))
    {
        if (!node->is_object() || !node->contains(part))
            return nullptr;
        node = &(*node)[part];
    }
    return node;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const ConfigOptions& options)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException& e)
    {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root || root.IsNull())
        throw ConfigError("empty config");

    Table t(root, "");
    ExperimentConfig c{parse_scenario(t.require("scenario"), options)};
    c.replications = t.scalar_or<int>("replications", 200);
    c.checkpoints = t.scalar_or<int>("checkpoints", 512);
    if (c.replications < 1)
        throw ValidationError("replications", "must be >= 1");
    if (c.checkpoints < 0)
        throw ValidationError("checkpoints", "must be >= 0");

    if (YAML::Node outputs = t.get("outputs"))
    {
        Table o(outputs, "outputs");
        c.outputs.event_log = o.scalar_or<bool>("event_log", c.outputs.event_log);
        c.outputs.report = o.scalar_or<bool>("report", c.outputs.report);
        c.outputs.convergence_csv = o.scalar_or<bool>("convergence_csv", c.outputs.convergence_csv);
        o.reject_unknown();
    }

    if (YAML::Node sweep = t.get("sweep"))
    {
        if (!sweep.IsMap())
            config_error(sweep, "'sweep' must be a table of parameter: [values]");
        for (const auto& kv : sweep)
        {
            SweepAxis axis{kv.first.as<std::string>(), {}};
            if (!kv.second.IsSequence() || kv.second.size() == 0)
                config_error(kv.second, "sweep parameter '" + axis.parameter
                                            + "' needs a nonempty list of values");
            for (const auto& v : kv.second)
            {
                try
                {
                    axis.values.push_back(v.as<double>());
                }
                catch (const YAML::BadConversion&)
                {
                    config_error(v, "sweep values for '" + axis.parameter + "' must be numbers");
                }
            }
            c.sweep.push_back(std::move(axis));
        }
        // Fail early on names that do not exist in this scenario.
        for (const auto& point : sweep_grid(c.sweep))
            apply_sweep_point(c.scenario, point, options);
    }
    t.reject_unknown();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOptions& options)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), options);
}

ojson scenario_to_json(const Scenario& s)
{
    ojson intensity;
    intensity["kind"] = s.intensity.kind_name();
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PoissonIntensity>)
            {
                intensity["lambda"] = k.rate;
            }
            else if constexpr (std::is_same_v<T, HawkesIntensity>)
            {
                intensity["mu"] = k.baseline;
                intensity["alpha"] = k.jump;
                intensity["beta"] = k.decay;
            }
            else
            {
                intensity["lambda_up"] = k.rate_up;
                intensity["lambda_down"] = k.rate_down;
            }
        },
        s.intensity.kind());
    if (!s.mixture_rates.empty())
        intensity["mixture_rates"] = s.mixture_rates;

    ojson protection;
    protection["always_down"] = s.protection.always_down();
    protection["coupling_q"] = s.protection.coupling_q();
    if (!s.protection.always_down())
    {
        protection["up"] = distribution_json(s.protection.up_duration());
        protection["down"] = distribution_json(s.protection.down_duration());
    }

    ojson j;
    j["intensity"] = std::move(intensity);
    j["protection"] = std::move(protection);
    j["horizon"] = s.horizon;
    j["damage_on_caused_failure"] = s.damage_on_caused_failure;
    j["base_seed"] = s.base_seed;
    return j;
}

ojson config_to_json(const ExperimentConfig& c)
{
    ojson j;
    j["scenario"] = scenario_to_json(c.scenario);
    j["replications"] = c.replications;
    j["checkpoints"] = c.checkpoints;
    j["outputs"] = {{"event_log", c.outputs.event_log},
                    {"report", c.outputs.report},
                    {"convergence_csv", c.outputs.convergence_csv}};
    if (!c.sweep.empty())
    {
        ojson sweep = ojson::object();
        for (const auto& axis : c.sweep)
            sweep[axis.parameter] = axis.values;
        j["sweep"] = std::move(sweep);
    }
    return j;
}

Scenario scenario_from_json(const ojson& j, const ConfigOptions& options)
{
    // JSON is a YAML subset; reuse the YAML parser and its validation.
    return parse_scenario(YAML::Load(j.dump()), options);
}

std::vector<SweepPoint> sweep_grid(const std::vector<SweepAxis>& axes)
{
    std::vector<SweepPoint> grid{{}};
    for (const auto& axis : axes)
    {
        std::vector<SweepPoint> next;
        for (const auto& prefix : grid)
            for (double v : axis.values)
            {
                SweepPoint p = prefix;
                p.emplace_back(axis.parameter, v);
                next.push_back(std::move(p));
            }
        grid = std::move(next);
    }
    return grid;
}

Scenario apply_sweep_point(const Scenario& base, const SweepPoint& point,
                           const ConfigOptions& options)
{
    ojson resolved = scenario_to_json(base);
    for (const auto& [name, value] : point)
    {
        ojson* slot = find_path(resolved, name);
        if (slot == nullptr || !slot->is_number())
            throw ValidationError("sweep." + name, "does not name a numeric field of this scenario");
        if (slot->is_number_unsigned() || slot->is_number_integer())
        {
            if (value < 0 || value != static_cast<double>(static_cast<std::uint64_t>(value)))
                throw ValidationError("sweep." + name, "expects nonnegative integer values");
            *slot = static_cast<std::uint64_t>(value);
        }
        else
        {
            *slot = value;
        }
    }
    return scenario_from_json(resolved, options);
}

}  // namespace cdflab
