#pragma once

#include "dualfuel/fleet.hpp"
#include "dualfuel/gas_network.hpp"
#include "dualfuel/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dualfuel {

enum class StrategyKind : std::uint8_t {
    NoTransition,      // 1A
    Random,            // 1B
    RegionFirst,       // 2A north, 2B south, 2C center
    PressureLowFirst,  // 3A
    PressureHighFirst, // 3B
};

/// How the policy picks units. Also steers the choice of offline units to
/// start, so a strategy prefers the same units in both branches.
struct Strategy
{
    StrategyKind kind = StrategyKind::Random;
    Region region = Region::North; // RegionFirst only

    static Strategy no_transition() { return {StrategyKind::NoTransition}; }
    static Strategy random() { return {StrategyKind::Random}; }
    static Strategy region_first(Region r) { return {StrategyKind::RegionFirst, r}; }
    static Strategy pressure_low_first() { return {StrategyKind::PressureLowFirst}; }
    static Strategy pressure_high_first() { return {StrategyKind::PressureHighFirst}; }

    /// Accepts the tags 1A, 1B, 2A, 2B, 2C, 3A, 3B and the long names
    /// no_transition, random, north_first, south_first, center_first,
    /// low_pressure_first, high_pressure_first.
    static Strategy parse(std::string_view text);
    std::string tag() const;

    bool needs_pressures() const
    {
        return kind == StrategyKind::PressureLowFirst || kind == StrategyKind::PressureHighFirst;
    }

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct PolicyParams
{
    int max_actions = 5;      // K
    double reserve_mw = 0.0;  // R
    Strategy strategy;

    void validate() const;
};

/// What the operator sees at the start of the decision phase of a step.
struct Observation
{
    std::span<const UnitState> fleet;
    std::span<const GeneratorSpec> specs;
    double demand_mw = 0.0;
    double committed_mw = 0.0;
    const NodePressures* pressures = nullptr; // gas-network model only
    std::optional<double> linepack_gwh;       // copperplate model only
};

/// One step of the emergency plan. While fewer than K actions are issued:
/// start an offline unit on secondary fuel if committed capacity is below
/// demand plus reserve, otherwise move a main-fuel unit to secondary fuel
/// (unless the strategy forbids transitions), otherwise stop.
std::vector<Command> plan_actions(const Observation& obs, const PolicyParams& params, Rng& rng);

/// Picks one unit among `candidates` (roster indices) per the strategy.
/// Throws std::invalid_argument on an empty candidate set.
std::size_t select_unit(std::span<const std::size_t> candidates, const Strategy& strategy, const Observation& obs,
                        Rng& rng);

} // namespace dualfuel
