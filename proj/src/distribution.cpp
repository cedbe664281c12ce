#include "cdflab/distribution.hpp"

#include <cmath>

#include "cdflab/errors.hpp"

namespace cdflab
{
namespace
{
bool positive_finite(double x)
{
    return std::isfinite(x) && x > 0;
}
}  // namespace

Distribution Distribution::exponential(double rate)
{
    if (!positive_finite(rate))
        throw ValidationError("rate", "exponential rate must be positive and finite");
    return Distribution(Exponential{rate});
}

Distribution Distribution::weibull(double shape, double scale)
{
    if (!positive_finite(shape))
        throw ValidationError("shape", "weibull shape must be positive and finite");
    if (!positive_finite(scale))
        throw ValidationError("scale", "weibull scale must be positive and finite");
    return Distribution(Weibull{shape, scale});
}

Distribution Distribution::deterministic(double value)
{
    if (!std::isfinite(value) || value < 0)
        throw ValidationError("value", "deterministic value must be finite and >= 0");
    return Distribution(Deterministic{value});
}

double Distribution::mean() const noexcept
{
    struct Visitor
    {
        double operator()(const Exponential& e) const { return 1.0 / e.rate; }
        double operator()(const Weibull& w) const
        {
            return w.scale * std::tgamma(1.0 + 1.0 / w.shape);
        }
        double operator()(const Deterministic& d) const { return d.value; }
    };
    return std::visit(Visitor{}, law_);
}

std::string Distribution::kind_name() const
{
    struct Visitor
    {
        const char* operator()(const Exponential&) const { return "exponential"; }
        const char* operator()(const Weibull&) const { return "weibull"; }
        const char* operator()(const Deterministic&) const { return "deterministic"; }
    };
    return std::visit(Visitor{}, law_);
}

double sample_exponential(double rate, RngStream& rng)
{
    return -std::log(rng.uniform_open()) / rate;
}

double sample_duration(const Distribution& d, RngStream& rng)
{
    struct Visitor
    {
        RngStream& rng;
        double operator()(const Exponential& e) const
        {
            return sample_exponential(e.rate, rng);
        }
        double operator()(const Weibull& w) const
        {
            return w.scale * std::pow(-std::log(rng.uniform_open()), 1.0 / w.shape);
        }
        double operator()(const Deterministic& v) const { return v.value; }
    };
    return std::visit(Visitor{rng}, d.law());
}

}  // namespace cdflab
