#include "dualfuel/policy.hpp"

#include "dualfuel/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace dualfuel {

Strategy Strategy::parse(std::string_view text)
{
    if (text == "1A" || text == "no_transition")
        return no_transition();
    if (text == "1B" || text == "random")
        return random();
    if (text == "2A" || text == "north_first")
        return region_first(Region::North);
    if (text == "2B" || text == "south_first")
        return region_first(Region::South);
    if (text == "2C" || text == "center_first")
        return region_first(Region::Center);
    if (text == "3A" || text == "low_pressure_first")
        return pressure_low_first();
    if (text == "3B" || text == "high_pressure_first")
        return pressure_high_first();
    throw ConfigError("policy.strategy", "unknown strategy '" + std::string(text) + "'");
}

std::string Strategy::tag() const
{
    switch (kind) {
    case StrategyKind::NoTransition: return "1A";
    case StrategyKind::Random: return "1B";
    case StrategyKind::RegionFirst:
        switch (region) {
        case Region::North: return "2A";
        case Region::South: return "2B";
        case Region::Center: return "2C";
        }
        break;
    case StrategyKind::PressureLowFirst: return "3A";
    case StrategyKind::PressureHighFirst: return "3B";
    }
    return "?";
}

void PolicyParams::validate() const
{
    if (max_actions < 0)
        throw ConfigError("policy.K", "must be non-negative");
    if (!(reserve_mw >= 0.0))
        throw ConfigError("policy.R", "must be non-negative");
}

namespace {

std::size_t pick_by_pressure(std::span<const std::size_t> candidates, const Observation& obs, bool lowest, Rng& rng)
{
    if (obs.pressures == nullptr)
        throw ConfigError("policy.strategy", "pressure-based strategies need the gas-network model");

    // Extreme pressure among the candidates' nodes, ties kept together.
    std::vector<std::string> tied;
    double best = 0.0;
    for (auto unit : candidates) {
        const std::string& node = obs.specs[unit].gas_node;
        const double p = obs.pressures->at(node);
        if (tied.empty() || (lowest ? p < best : p > best)) {
            best = p;
            tied.assign(1, node);
        } else if (p == best && std::find(tied.begin(), tied.end(), node) == tied.end()) {
            tied.push_back(node);
        }
    }
    std::sort(tied.begin(), tied.end());
    const std::string& node = tied.size() == 1 ? tied.front() : tied[rng.index(tied.size())];

    std::vector<std::size_t> at_node;
    for (auto unit : candidates) {
        if (obs.specs[unit].gas_node == node)
            at_node.push_back(unit);
    }
    return at_node[rng.index(at_node.size())];
}

} // namespace

std::size_t select_unit(std::span<const std::size_t> candidates, const Strategy& strategy, const Observation& obs,
                        Rng& rng)
{
    if (candidates.empty())
        throw std::invalid_argument("select_unit: no candidates");

    switch (strategy.kind) {
    case StrategyKind::RegionFirst: {
        std::vector<std::size_t> preferred;
        for (auto unit : candidates) {
            if (obs.specs[unit].region == strategy.region)
                preferred.push_back(unit);
        }
        if (!preferred.empty())
            return preferred[rng.index(preferred.size())];
        return candidates[rng.index(candidates.size())];
    }
    case StrategyKind::PressureLowFirst: return pick_by_pressure(candidates, obs, true, rng);
    case StrategyKind::PressureHighFirst: return pick_by_pressure(candidates, obs, false, rng);
    case StrategyKind::NoTransition:
    case StrategyKind::Random: break;
    }
    return candidates[rng.index(candidates.size())];
}

std::vector<Command> plan_actions(const Observation& obs, const PolicyParams& params, Rng& rng)
{
    std::vector<Command> commands;
    if (params.max_actions <= 0)
        return commands;

    std::vector<std::size_t> offline;
    std::vector<std::size_t> on_main;
    for (std::size_t i = 0; i < obs.fleet.size(); ++i) {
        if (obs.fleet[i].status == Status::Offline)
            offline.push_back(i);
        else if (obs.fleet[i].status == Status::MainFuel)
            on_main.push_back(i);
    }

    const bool may_transition = params.strategy.kind != StrategyKind::NoTransition;
    double capacity = obs.committed_mw;
    auto take = [](std::vector<std::size_t>& pool, std::size_t unit) {
        pool.erase(std::find(pool.begin(), pool.end(), unit));
    };

    while (static_cast<int>(commands.size()) < params.max_actions) {
        if (capacity < obs.demand_mw + params.reserve_mw && !offline.empty()) {
            const auto unit = select_unit(offline, params.strategy, obs, rng);
            take(offline, unit);
            capacity += obs.specs[unit].p_max;
            commands.push_back({CommandKind::StartupSecondary, unit});
        } else if (may_transition && !on_main.empty()) {
            const auto unit = select_unit(on_main, params.strategy, obs, rng);
            take(on_main, unit);
            commands.push_back({CommandKind::TransitionToSecondary, unit});
        } else {
            break;
        }
    }
    return commands;
}

} // namespace dualfuel
