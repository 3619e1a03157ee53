#include "dualfuel/dispatch.hpp"

#include "dualfuel/errors.hpp"

#include <algorithm>
#include <numeric>

namespace dualfuel {

double DispatchResult::served() const
{
    return std::accumulate(unit_power.begin(), unit_power.end(), 0.0);
}

DispatchResult dispatch(double demand, std::span<const UnitLimits> producing)
{
    DispatchResult r;
    r.unit_power.reserve(producing.size());
    if (producing.empty()) {
        r.shed = std::max(0.0, demand);
        return r;
    }

    double sum_min = 0.0;
    double sum_max = 0.0;
    for (const auto& u : producing) {
        sum_min += u.p_min;
        sum_max += u.p_max;
    }

    const double span = sum_max - sum_min;
    r.epsilon = span > 0.0 ? std::clamp((demand - sum_min) / span, 0.0, 1.0) : 1.0;
    for (const auto& u : producing)
        r.unit_power.push_back(r.epsilon * u.p_max + (1.0 - r.epsilon) * u.p_min);
    r.shed = std::max(0.0, demand - sum_max);
    r.surplus = std::max(0.0, sum_min - demand);
    return r;
}

FleetDispatch dispatch_fleet(double demand, const FleetState& fleet, std::span<const GeneratorSpec> specs)
{
    FleetDispatch out;
    std::vector<UnitLimits> limits;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        if (is_producing(fleet[i].status)) {
            out.units.push_back(i);
            limits.push_back({specs[i].p_min, specs[i].p_max});
        }
    }
    out.result = dispatch(demand, limits);
    return out;
}

double heat_rate(double p, const GeneratorSpec& spec)
{
    const double x = p / spec.p_max;
    const auto& c = spec.heat_rate;
    const double fuel = c.a0 + c.a1 * x + c.a2 * x * x;
    if (fuel < 0.0)
        throw ConfigError("unit " + std::to_string(spec.id), "heat rate curve yields negative fuel");
    return fuel;
}

void CostBook::validate() const
{
    if (main < 0.0 || secondary < 0.0 || voll < 0.0)
        throw ConfigError("costs", "prices must be non-negative");
}

std::vector<std::string> CostBook::warnings() const
{
    std::vector<std::string> w;
    if (secondary < main)
        w.emplace_back("secondary fuel is priced below main fuel");
    if (voll < secondary)
        w.emplace_back("value of lost load is below the secondary fuel price");
    return w;
}

double step_cost(const FleetDispatch& d, const FleetState& fleet, const CostBook& book, double dt_hours)
{
    double gas_mw = 0.0;
    double diesel_mw = 0.0;
    for (std::size_t k = 0; k < d.units.size(); ++k) {
        const Status s = fleet[d.units[k]].status;
        if (burns_gas(s))
            gas_mw += d.result.unit_power[k];
        else if (burns_diesel(s))
            diesel_mw += d.result.unit_power[k];
    }
    return dt_hours * (book.main * gas_mw + book.secondary * diesel_mw + book.voll * d.result.shed);
}

std::map<std::string, double> gas_demand_by_node(const FleetState& fleet, const FleetDispatch& d,
                                                 std::span<const GeneratorSpec> specs)
{
    std::map<std::string, double> by_node;
    for (std::size_t k = 0; k < d.units.size(); ++k) {
        const std::size_t i = d.units[k];
        if (burns_gas(fleet[i].status))
            by_node[specs[i].gas_node] += heat_rate(d.result.unit_power[k], specs[i]);
    }
    return by_node;
}

} // namespace dualfuel
