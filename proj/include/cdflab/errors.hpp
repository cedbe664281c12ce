#pragma once

#include <stdexcept>
#include <string>

namespace cdflab
{

// Malformed experiment description (syntax, unknown key, wrong type).
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// A model or scenario parameter is out of its valid domain. Carries the
// dotted name of the offending field.
class ValidationError : public std::invalid_argument
{
  public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

// Caller broke an operation precondition (e.g. a > b for a segment).
class ContractViolation : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

// A simulated or estimated quantity broke one of its invariants.
class InvariantViolation : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// The scenario falls outside what a closed-form oracle can handle.
class UnsupportedScenario : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace cdflab
