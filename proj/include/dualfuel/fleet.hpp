#pragma once

#include "dualfuel/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dualfuel {

/// Operational status of a dual-fuel unit. The four transient statuses
/// carry a countdown of remaining sub-steps in UnitState.
enum class Status : std::uint8_t {
    MainFuel,          // MF
    SecondaryFuel,     // SF
    Offline,           // OFF
    MainToSecondary,   // T_MS
    SecondaryToMain,   // T_SM
    StartingMain,      // OM
    StartingSecondary, // OS
};

std::string_view status_label(Status s);

constexpr bool is_transient(Status s)
{
    return s == Status::MainToSecondary || s == Status::SecondaryToMain ||
           s == Status::StartingMain || s == Status::StartingSecondary;
}

struct UnitState
{
    Status status = Status::Offline;
    int remaining = 0; // sub-steps left; zero for non-transient statuses

    static constexpr UnitState main_fuel() { return {Status::MainFuel, 0}; }
    static constexpr UnitState secondary_fuel() { return {Status::SecondaryFuel, 0}; }
    static constexpr UnitState offline() { return {Status::Offline, 0}; }
    static constexpr UnitState transient(Status s, int remaining) { return {s, remaining}; }

    friend bool operator==(const UnitState&, const UnitState&) = default;
};

using FleetState = std::vector<UnitState>;

enum class Region : std::uint8_t { North, Center, South };

std::string_view region_name(Region r);
Region parse_region(std::string_view name);

/// Outcome probabilities of fuel transitions and startups. The first three
/// partition the outcome of a fuel transition; p_start is the success
/// probability of a startup.
struct ReliabilityClass
{
    double p_abort = 0.0;
    double p_succ = 1.0;
    double p_fail = 0.0;
    double p_start = 1.0;

    /// Throws ConfigError unless all four lie in [0,1] and the transition
    /// row sums to one.
    void validate() const;

    static ReliabilityClass super_reliable() { return {0.01, 0.98, 0.01, 0.98}; }
    static ReliabilityClass reliable() { return {0.05, 0.90, 0.05, 0.90}; }
    static ReliabilityClass fairly_reliable() { return {0.10, 0.80, 0.10, 0.80}; }
    static ReliabilityClass unreliable() { return {0.15, 0.70, 0.15, 0.70}; }

    /// "super_reliable", "reliable", "fairly_reliable" or "unreliable".
    static ReliabilityClass named(std::string_view name);

    friend bool operator==(const ReliabilityClass&, const ReliabilityClass&) = default;
};

/// Fuel intake f = a0 + a1 (p/p_max) + a2 (p/p_max)^2, in MW of fuel.
struct HeatRate
{
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    /// Linear curve f = p / efficiency.
    static HeatRate from_efficiency(double p_max, double efficiency) { return {0.0, p_max / efficiency, 0.0}; }

    friend bool operator==(const HeatRate&, const HeatRate&) = default;
};

struct GeneratorSpec
{
    std::size_t id = 0;
    double p_max = 150.0;
    double p_min = 30.0;
    std::string gas_node;
    Region region = Region::Center;
    ReliabilityClass reliability;
    HeatRate heat_rate;
};

void validate_roster(std::span<const GeneratorSpec> specs);

enum class CommandKind : std::uint8_t {
    NoOp,
    TransitionToSecondary,
    TransitionToMain,
    StartupMain,
    StartupSecondary,
    Shutdown,
};

std::string_view command_label(CommandKind kind);

struct Command
{
    CommandKind kind = CommandKind::NoOp;
    std::size_t unit = 0;

    friend bool operator==(const Command&, const Command&) = default;
};

bool command_is_valid(const UnitState& state, CommandKind kind);

/// Number of sub-steps a transient lasts: transition time over step length.
/// Throws ConfigError unless the step divides the transition time.
int transition_substeps(double transition_minutes, double dt_minutes);

/// Applies one command. Deterministic; commanded transients start with
/// `substeps` remaining. Throws InvalidCommand on an illegal command.
FleetState apply_command(FleetState fleet, const Command& cmd, int substeps);

/// Counts every transient down by one sub-step and draws the outcome of
/// those reaching zero, in ascending unit order.
FleetState advance_transients(FleetState fleet, std::span<const GeneratorSpec> specs, Rng& rng);

struct OutageResult
{
    FleetState fleet;
    std::size_t forced_off = 0;
};

/// Gas supply lost everywhere: every MF or T_MS unit goes offline.
OutageResult force_gas_outage(FleetState fleet);

/// Gas supply lost at `nodes`: MF or T_MS units fed from them go offline.
OutageResult force_gas_outage(FleetState fleet, std::span<const GeneratorSpec> specs,
                              const std::set<std::string>& nodes);

/// Sum of p_max over units that are not offline, startups included.
double committed_capacity(const FleetState& fleet, std::span<const GeneratorSpec> specs);

struct StatusCounts
{
    std::size_t main = 0;
    std::size_t secondary = 0;
    std::size_t transition = 0;
    std::size_t offline = 0;

    std::size_t total() const { return main + secondary + transition + offline; }
};

StatusCounts count_statuses(const FleetState& fleet);

} // namespace dualfuel
