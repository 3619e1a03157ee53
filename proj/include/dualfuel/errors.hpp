#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dualfuel {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A command that is not legal for the target unit's current state.
/// Raised only by a policy bug; the engine never emits one.
class InvalidCommand : public Error
{
public:
    using Error::Error;
};

/// Scenario or parameter validation failure. `field` is a dotted path
/// into the scenario document when one applies.
class ConfigError : public Error
{
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class GasSolverError : public Error
{
public:
    enum class Kind { CflViolation, NegativeDensity, NoConvergence };

    GasSolverError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// An episode failed inside an ensemble; carries the offending seed.
class SimulationError : public Error
{
public:
    SimulationError(std::uint64_t seed, const std::string& message)
        : Error("episode with seed " + std::to_string(seed) + " failed: " + message), seed_(seed)
    {
    }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace dualfuel
