#include "dualfuel/fleet.hpp"

#include "dualfuel/errors.hpp"

#include <cmath>
#include <string>

namespace dualfuel {

std::string_view status_label(Status s)
{
    switch (s) {
    case Status::MainFuel: return "MF";
    case Status::SecondaryFuel: return "SF";
    case Status::Offline: return "OFF";
    case Status::MainToSecondary: return "T_MS";
    case Status::SecondaryToMain: return "T_SM";
    case Status::StartingMain: return "OM";
    case Status::StartingSecondary: return "OS";
    }
    return "?";
}

std::string_view region_name(Region r)
{
    switch (r) {
    case Region::North: return "north";
    case Region::Center: return "center";
    case Region::South: return "south";
    }
    return "?";
}

Region parse_region(std::string_view name)
{
    if (name == "north")
        return Region::North;
    if (name == "center")
        return Region::Center;
    if (name == "south")
        return Region::South;
    throw ConfigError("", "unknown region '" + std::string(name) + "' (expected north, center or south)");
}

void ReliabilityClass::validate() const
{
    for (double p : {p_abort, p_succ, p_fail, p_start}) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("", "reliability probabilities must lie in [0, 1]");
    }
    // Table values are decimal fractions; allow only representation error.
    if (std::abs(p_abort + p_succ + p_fail - 1.0) > 1e-12)
        throw ConfigError("", "p_abort + p_succ + p_fail must equal 1");
}

ReliabilityClass ReliabilityClass::named(std::string_view name)
{
    if (name == "super_reliable")
        return super_reliable();
    if (name == "reliable")
        return reliable();
    if (name == "fairly_reliable")
        return fairly_reliable();
    if (name == "unreliable")
        return unreliable();
    throw ConfigError("", "unknown reliability class '" + std::string(name) + "'");
}

void validate_roster(std::span<const GeneratorSpec> specs)
{
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& g = specs[i];
        const std::string where = "unit " + std::to_string(g.id);
        if (g.id != i)
            throw ConfigError(where, "unit ids must be 0..n-1 in roster order");
        if (!(g.p_min >= 0.0 && g.p_min < g.p_max))
            throw ConfigError(where, "requires 0 <= p_min < p_max");
        const double full = g.heat_rate.a0 + g.heat_rate.a1 + g.heat_rate.a2;
        if (!(full > 0.0))
            throw ConfigError(where, "heat rate at p_max must be positive");
        try {
            g.reliability.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(where, e.what());
        }
    }
}

std::string_view command_label(CommandKind kind)
{
    switch (kind) {
    case CommandKind::NoOp: return "noop";
    case CommandKind::TransitionToSecondary: return "to_secondary";
    case CommandKind::TransitionToMain: return "to_main";
    case CommandKind::StartupMain: return "startup_main";
    case CommandKind::StartupSecondary: return "startup_secondary";
    case CommandKind::Shutdown: return "shutdown";
    }
    return "?";
}

bool command_is_valid(const UnitState& state, CommandKind kind)
{
    switch (kind) {
    case CommandKind::NoOp: return true;
    case CommandKind::TransitionToSecondary: return state.status == Status::MainFuel;
    case CommandKind::TransitionToMain: return state.status == Status::SecondaryFuel;
    case CommandKind::StartupMain:
    case CommandKind::StartupSecondary: return state.status == Status::Offline;
    case CommandKind::Shutdown:
        return state.status == Status::MainFuel || state.status == Status::SecondaryFuel;
    }
    return false;
}

int transition_substeps(double transition_minutes, double dt_minutes)
{
    if (!(dt_minutes > 0.0))
        throw ConfigError("run.dt_minutes", "must be positive");
    if (!(transition_minutes >= dt_minutes))
        throw ConfigError("run.transition_minutes", "must be at least one time step");
    const double ratio = transition_minutes / dt_minutes;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9)
        throw ConfigError("run.dt_minutes", "time step must divide the transition time");
    return static_cast<int>(rounded);
}

FleetState apply_command(FleetState fleet, const Command& cmd, int substeps)
{
    if (cmd.unit >= fleet.size())
        throw InvalidCommand("command targets unknown unit " + std::to_string(cmd.unit));
    if (cmd.kind == CommandKind::NoOp)
        return fleet;
    UnitState& unit = fleet[cmd.unit];
    if (!command_is_valid(unit, cmd.kind)) {
        throw InvalidCommand("command " + std::string(command_label(cmd.kind)) + " invalid for unit " +
                             std::to_string(cmd.unit) + " in state " + std::string(status_label(unit.status)));
    }
    switch (cmd.kind) {
    case CommandKind::TransitionToSecondary: unit = UnitState::transient(Status::MainToSecondary, substeps); break;
    case CommandKind::TransitionToMain: unit = UnitState::transient(Status::SecondaryToMain, substeps); break;
    case CommandKind::StartupMain: unit = UnitState::transient(Status::StartingMain, substeps); break;
    case CommandKind::StartupSecondary: unit = UnitState::transient(Status::StartingSecondary, substeps); break;
    case CommandKind::Shutdown: unit = UnitState::offline(); break;
    case CommandKind::NoOp: break;
    }
    return fleet;
}

namespace {

// Three-way draw of a fuel-transition outcome.
UnitState resolve_transition(const ReliabilityClass& rc, double u, UnitState success, UnitState origin)
{
    if (u < rc.p_succ)
        return success;
    if (u < rc.p_succ + rc.p_fail)
        return UnitState::offline();
    return origin;
}

} // namespace

FleetState advance_transients(FleetState fleet, std::span<const GeneratorSpec> specs, Rng& rng)
{
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        UnitState& unit = fleet[i];
        if (!is_transient(unit.status))
            continue;
        if (--unit.remaining > 0)
            continue;
        const ReliabilityClass& rc = specs[i].reliability;
        const double u = rng.uniform();
        switch (unit.status) {
        case Status::MainToSecondary:
            unit = resolve_transition(rc, u, UnitState::secondary_fuel(), UnitState::main_fuel());
            break;
        case Status::SecondaryToMain:
            unit = resolve_transition(rc, u, UnitState::main_fuel(), UnitState::secondary_fuel());
            break;
        case Status::StartingMain:
            unit = u < rc.p_start ? UnitState::main_fuel() : UnitState::offline();
            break;
        case Status::StartingSecondary:
            unit = u < rc.p_start ? UnitState::secondary_fuel() : UnitState::offline();
            break;
        default: break;
        }
    }
    return fleet;
}

namespace {

bool draws_gas(Status s)
{
    return s == Status::MainFuel || s == Status::MainToSecondary;
}

} // namespace

OutageResult force_gas_outage(FleetState fleet)
{
    std::size_t count = 0;
    for (auto& unit : fleet) {
        if (draws_gas(unit.status)) {
            unit = UnitState::offline();
            ++count;
        }
    }
    return {std::move(fleet), count};
}

OutageResult force_gas_outage(FleetState fleet, std::span<const GeneratorSpec> specs,
                              const std::set<std::string>& nodes)
{
    std::size_t count = 0;
    if (nodes.empty())
        return {std::move(fleet), count};
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        if (draws_gas(fleet[i].status) && nodes.contains(specs[i].gas_node)) {
            fleet[i] = UnitState::offline();
            ++count;
        }
    }
    return {std::move(fleet), count};
}

double committed_capacity(const FleetState& fleet, std::span<const GeneratorSpec> specs)
{
    double total = 0.0;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        if (fleet[i].status != Status::Offline)
            total += specs[i].p_max;
    }
    return total;
}

StatusCounts count_statuses(const FleetState& fleet)
{
    StatusCounts c;
    for (const auto& unit : fleet) {
        switch (unit.status) {
        case Status::MainFuel: ++c.main; break;
        case Status::SecondaryFuel: ++c.secondary; break;
        case Status::Offline: ++c.offline; break;
        default: ++c.transition; break;
        }
    }
    return c;
}

} // namespace dualfuel
