#pragma once

#include "dualfuel/fleet.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace dualfuel {

struct UnitLimits
{
    double p_min = 0.0;
    double p_max = 0.0;
};

/// Copperplate dispatch: every producing unit runs at
/// p = eps * p_max + (1 - eps) * p_min for one global eps in [0, 1].
struct DispatchResult
{
    double epsilon = 0.0;
    std::vector<double> unit_power; // MW, aligned with the producing set
    double shed = 0.0;              // MW of unserved demand
    double surplus = 0.0;           // MW forced above demand by p_min floors

    double served() const;
};

DispatchResult dispatch(double demand, std::span<const UnitLimits> producing);

/// Units that generate: MF, SF and the two fuel transitions. Startups do not.
constexpr bool is_producing(Status s)
{
    return s == Status::MainFuel || s == Status::SecondaryFuel || s == Status::MainToSecondary ||
           s == Status::SecondaryToMain;
}

constexpr bool burns_gas(Status s) { return s == Status::MainFuel || s == Status::MainToSecondary; }
constexpr bool burns_diesel(Status s) { return s == Status::SecondaryFuel || s == Status::SecondaryToMain; }

/// Dispatch of a whole fleet; `units[k]` is the roster index of the unit
/// producing `result.unit_power[k]`.
struct FleetDispatch
{
    DispatchResult result;
    std::vector<std::size_t> units;
};

FleetDispatch dispatch_fleet(double demand, const FleetState& fleet, std::span<const GeneratorSpec> specs);

/// Fuel intake of `spec` at output p, in MW of fuel. Throws ConfigError
/// when the curve turns negative.
double heat_rate(double p, const GeneratorSpec& spec);

/// Linear prices in $/MWh.
struct CostBook
{
    double main = 30.0;
    double secondary = 420.0;
    double voll = 20000.0;

    /// Throws ConfigError on negative prices.
    void validate() const;
    /// Non-fatal findings, e.g. diesel priced below gas.
    std::vector<std::string> warnings() const;
};

/// Cost of one step of length dt_hours: fuel by burn type plus VOLL on shed.
double step_cost(const FleetDispatch& dispatch, const FleetState& fleet, const CostBook& book, double dt_hours);

/// Fuel power drawn from each gas node by MF and T_MS units. Nodes with no
/// gas-burning unit are absent.
std::map<std::string, double> gas_demand_by_node(const FleetState& fleet, const FleetDispatch& dispatch,
                                                 std::span<const GeneratorSpec> specs);

} // namespace dualfuel
