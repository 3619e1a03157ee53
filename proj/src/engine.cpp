#include "dualfuel/engine.hpp"

#include "dualfuel/errors.hpp"
#include "dualfuel/linepack.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace dualfuel {

// ---------------------------------------------------------------------------
// Demand
// ---------------------------------------------------------------------------

double DemandProfile::at(double minutes) const
{
    if (samples_mw.empty())
        return 0.0;
    const double pos = std::max(0.0, minutes / sample_minutes);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= samples_mw.size())
        return samples_mw.back();
    const double frac = pos - static_cast<double>(lo);
    return samples_mw[lo] + frac * (samples_mw[lo + 1] - samples_mw[lo]);
}

void DemandProfile::validate() const
{
    if (samples_mw.empty())
        throw ConfigError("demand", "at least one demand sample is required");
    if (!(sample_minutes > 0.0))
        throw ConfigError("demand.sample_minutes", "must be positive");
    for (double d : samples_mw) {
        if (!(d >= 0.0))
            throw ConfigError("demand", "demand samples must be non-negative");
    }
}

DemandProfile DemandProfile::named(std::string_view name)
{
    // Hourly samples over eight hours; amplitudes are synthetic.
    if (name == "nighttime")
        return {"nighttime", {8400, 7700, 7000, 6500, 6300, 6600, 7300, 8100, 8700}, 60.0};
    if (name == "noon")
        return {"noon", {8600, 9200, 9600, 9700, 9400, 8900, 8300, 7800, 7500}, 60.0};
    if (name == "morning")
        return {"morning", {5400, 6200, 7000, 7800, 8500, 9000, 9400, 9700, 9800}, 60.0};
    throw ConfigError("demand.profile", "unknown profile '" + std::string(name) + "' (nighttime, noon, morning)");
}

DemandProfile DemandProfile::constant(double mw)
{
    return {"constant", {mw}, 60.0};
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

std::vector<GeneratorSpec> homogeneous_roster(std::span<const std::pair<std::string, std::size_t>> node_counts,
                                              const GasTopology& topology, double p_max, double p_min,
                                              const ReliabilityClass& reliability, const HeatRate& heat_rate)
{
    std::vector<std::size_t> left;
    for (const auto& [node, count] : node_counts) {
        if (!topology.has_node(node))
            throw ConfigError("fleet.template.nodes", "unknown gas node '" + node + "'");
        left.push_back(count);
    }

    std::vector<GeneratorSpec> roster;
    bool placed = true;
    while (placed) {
        placed = false;
        for (std::size_t k = 0; k < node_counts.size(); ++k) {
            if (left[k] == 0)
                continue;
            --left[k];
            placed = true;
            GeneratorSpec g;
            g.id = roster.size();
            g.p_max = p_max;
            g.p_min = p_min;
            g.gas_node = node_counts[k].first;
            g.region = topology.nodes[topology.node_index(g.gas_node)].region;
            g.reliability = reliability;
            g.heat_rate = heat_rate;
            roster.push_back(std::move(g));
        }
    }
    return roster;
}

std::vector<std::pair<std::string, std::size_t>> default_node_counts()
{
    return {{"N1", 10}, {"N2", 9}, {"N3", 8}, {"C1", 12}, {"C2", 11},
            {"C3", 9},  {"S1", 9}, {"S2", 8}, {"S3", 7}};
}

ScenarioConfig default_scenario()
{
    ScenarioConfig c;
    c.name = "default";
    const auto counts = default_node_counts();
    c.roster = homogeneous_roster(counts, c.gas.topology, 150.0, 30.0, ReliabilityClass::reliable(),
                                  HeatRate::from_efficiency(150.0, 0.40));
    c.policy = {5, 500.0, Strategy::random()};
    return c;
}

void ScenarioConfig::validate() const
{
    if (roster.empty())
        throw ConfigError("fleet", "the fleet must contain at least one unit");
    validate_roster(roster);
    for (const auto& g : roster) {
        if (!gas.topology.has_node(g.gas_node))
            throw ConfigError("fleet", "unit " + std::to_string(g.id) + " references unknown gas node '" +
                                           g.gas_node + "'");
    }
    if (initial_online && *initial_online > roster.size())
        throw ConfigError("fleet.initial_online", "exceeds the fleet size");
    if (gas.model == GasModelKind::Network)
        gas.topology.validate();
    if (!(gas.linepack_gwh >= 0.0))
        throw ConfigError("gas.linepack_gwh", "must be non-negative");
    if (!(gas.pi_min_bar >= 0.0))
        throw ConfigError("gas.pi_min_bar", "must be non-negative");
    if (!(gas.gcv_mj_per_kg > 0.0))
        throw ConfigError("gas.gcv_mj_per_kg", "must be positive");
    demand.validate();
    policy.validate();
    if (policy.strategy.needs_pressures() && gas.model != GasModelKind::Network)
        throw ConfigError("policy.strategy", "strategy " + policy.strategy.tag() + " needs the gas-network model");
    costs.validate();
    transition_substeps(run.transition_minutes, run.dt_minutes);
    if (run.horizon_steps < 0)
        throw ConfigError("run.horizon_steps", "must be non-negative");
    if (run.ensemble < 1)
        throw ConfigError("run.ensemble", "must be at least 1");
}

// ---------------------------------------------------------------------------
// Simulator
// ---------------------------------------------------------------------------

Simulator::Simulator(ScenarioConfig config) : config_(std::move(config))
{
    config_.validate();
    substeps_ = transition_substeps(config_.run.transition_minutes, config_.run.dt_minutes);

    const auto& roster = config_.roster;
    std::size_t online = roster.size();
    if (config_.initial_online) {
        online = *config_.initial_online;
    } else {
        const double target = config_.demand.at(0.0) + config_.policy.reserve_mw;
        double capacity = 0.0;
        online = 0;
        while (online < roster.size() && capacity < target)
            capacity += roster[online++].p_max;
    }
    initial_fleet_.assign(roster.size(), UnitState::offline());
    for (std::size_t i = 0; i < online; ++i)
        initial_fleet_[i] = UnitState::main_fuel();

    if (config_.gas.model == GasModelKind::Network) {
        const auto& gas = config_.gas;
        network_ = std::make_unique<GasNetwork>(gas.topology, gas.solver);
        if (gas.init.mode == GasInitMode::Uniform) {
            const double p = gas.init.pressure_bar ? *gas.init.pressure_bar
                                                   : network_->uniform_pressure_for_linepack(gas.linepack_gwh,
                                                                                            gas.gcv_mj_per_kg);
            initial_gas_ = network_->uniform_state(p);
        } else {
            std::map<std::string, double> withdrawals;
            if (gas.init.withdrawals_kg_s) {
                withdrawals = *gas.init.withdrawals_kg_s;
            } else {
                const auto d = dispatch_fleet(config_.demand.at(0.0), initial_fleet_, roster);
                for (const auto& [node, mw] : gas_demand_by_node(initial_fleet_, d, roster))
                    withdrawals[node] = energy_to_massflow(mw, gas.gcv_mj_per_kg);
            }
            initial_gas_ = gas.init.supply_pressure_bar
                               ? network_->steady_state(withdrawals, *gas.init.supply_pressure_bar)
                               : network_->steady_state_for_linepack(withdrawals, gas.linepack_gwh, gas.gcv_mj_per_kg);
        }
    }
}

RunTrace Simulator::run(std::uint64_t seed, const StepObserver& observer) const
{
    const auto& cfg = config_;
    const std::span<const GeneratorSpec> specs = cfg.roster;
    const double dt_hours = cfg.run.dt_minutes / 60.0;
    const bool networked = network_ != nullptr;

    RunTrace trace;
    trace.seed = seed;
    trace.steps.reserve(static_cast<std::size_t>(cfg.run.horizon_steps));

    Rng rng(seed);
    FleetState fleet = initial_fleet_;
    double linepack = cfg.gas.linepack_gwh;
    GasGridState gas;
    NodePressures pressures;
    std::vector<double> withdrawals;
    if (networked) {
        gas = initial_gas_;
        linepack = network_->total_linepack_energy_gwh(gas, cfg.gas.gcv_mj_per_kg);
        withdrawals.assign(network_->node_count(), 0.0);
    }

    for (int t = 0; t < cfg.run.horizon_steps; ++t) {
        StepRecord rec;
        rec.step = t + 1;

        // (1) gas condition observed at the start of the step
        OutageResult outage;
        if (networked) {
            pressures = network_->node_pressures(gas);
            auto cut = pressure_violations(pressures, cfg.gas.pi_min_bar);
            cut.merge(network_->starved_nodes(gas));
            outage = force_gas_outage(std::move(fleet), specs, cut);
        } else if (linepack <= 0.0) {
            outage = force_gas_outage(std::move(fleet));
        } else {
            outage.fleet = std::move(fleet);
        }
        fleet = std::move(outage.fleet);
        rec.forced_off = outage.forced_off;

        // (2)
        fleet = advance_transients(std::move(fleet), specs, rng);

        // (3)
        rec.demand_mw = cfg.demand.at(t * cfg.run.dt_minutes);
        Observation obs;
        obs.fleet = fleet;
        obs.specs = specs;
        obs.demand_mw = rec.demand_mw;
        obs.committed_mw = committed_capacity(fleet, specs);
        if (networked)
            obs.pressures = &pressures;
        else
            obs.linepack_gwh = linepack;
        const auto commands = plan_actions(obs, cfg.policy, rng);
        for (const auto& cmd : commands) {
            try {
                fleet = apply_command(std::move(fleet), cmd, substeps_);
            } catch (const InvalidCommand& e) {
                throw InvalidCommand("policy emitted an invalid command at step " + std::to_string(t + 1) + ": " +
                                     e.what());
            }
        }
        rec.commands = commands.size();
        if (observer)
            observer(t + 1, fleet);

        // (4) + (5)
        const auto d = dispatch_fleet(rec.demand_mw, fleet, specs);
        rec.served_mw = d.result.served();
        rec.shed_mw = d.result.shed;
        rec.surplus_mw = d.result.surplus;
        rec.epsilon = d.result.epsilon;
        rec.cost = step_cost(d, fleet, cfg.costs, dt_hours);
        trace.cumulative_cost += rec.cost;
        rec.cumulative_cost = trace.cumulative_cost;
        trace.energy_not_served_gwh += rec.shed_mw * dt_hours / 1000.0;

        // (6)
        const auto fuel = gas_demand_by_node(fleet, d, specs);
        if (networked) {
            std::fill(withdrawals.begin(), withdrawals.end(), 0.0);
            for (const auto& [node, mw] : fuel)
                withdrawals[network_->topology().node_index(node)] = energy_to_massflow(mw, cfg.gas.gcv_mj_per_kg);
            gas = network_->advance(std::move(gas), withdrawals, cfg.run.dt_minutes * 60.0);
            linepack = network_->total_linepack_energy_gwh(gas, cfg.gas.gcv_mj_per_kg);
            rec.node_pressure_bar.reserve(network_->node_count());
            for (double p : gas.node_pressure_pa)
                rec.node_pressure_bar.push_back(p / 1e5);
        } else {
            double total = 0.0;
            for (const auto& [node, mw] : fuel)
                total += mw;
            linepack = linepack_step(linepack, total, dt_hours).linepack_gwh;
        }

        // (7)
        rec.counts = count_statuses(fleet);
        rec.linepack_gwh = linepack;
        trace.steps.push_back(std::move(rec));
    }
    trace.final_linepack_gwh = linepack;
    return trace;
}

std::vector<std::string> Simulator::series_names() const
{
    std::vector<std::string> names{"main",   "secondary", "transition", "offline",         "demand_mw",
                                   "served_mw", "shed_mw",  "cost",       "cumulative_cost", "linepack_gwh"};
    if (network_) {
        for (const auto& node : network_->topology().nodes)
            names.push_back("pressure_bar_" + node.id);
    }
    return names;
}

std::vector<std::vector<double>> Simulator::series_values(const RunTrace& trace) const
{
    const auto names = series_names();
    std::vector<std::vector<double>> out(names.size());
    for (auto& v : out)
        v.reserve(trace.steps.size());
    for (const auto& s : trace.steps) {
        out[0].push_back(static_cast<double>(s.counts.main));
        out[1].push_back(static_cast<double>(s.counts.secondary));
        out[2].push_back(static_cast<double>(s.counts.transition));
        out[3].push_back(static_cast<double>(s.counts.offline));
        out[4].push_back(s.demand_mw);
        out[5].push_back(s.served_mw);
        out[6].push_back(s.shed_mw);
        out[7].push_back(s.cost);
        out[8].push_back(s.cumulative_cost);
        out[9].push_back(s.linepack_gwh);
        for (std::size_t k = 0; k < s.node_pressure_bar.size(); ++k)
            out[10 + k].push_back(s.node_pressure_bar[k]);
    }
    return out;
}

RunTrace run_episode(const ScenarioConfig& config, std::uint64_t seed)
{
    return Simulator(config).run(seed);
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

std::vector<double> EnsembleStats::energy_not_served() const
{
    std::vector<double> v;
    for (const auto& r : runs)
        v.push_back(r.energy_not_served_gwh);
    return v;
}

std::vector<double> EnsembleStats::cumulative_costs() const
{
    std::vector<double> v;
    for (const auto& r : runs)
        v.push_back(r.cumulative_cost);
    return v;
}

std::vector<double> EnsembleStats::final_linepacks() const
{
    std::vector<double> v;
    for (const auto& r : runs)
        v.push_back(r.final_linepack_gwh);
    return v;
}

unsigned default_threads()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers. Rethrows the
// failure with the lowest index so the reported error is deterministic.
template <typename Job>
void parallel_for(std::size_t n, unsigned threads, Job job)
{
    if (threads == 0)
        threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_index = n;
    std::exception_ptr failure;

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
}

RunScalars scalars_of(const RunTrace& trace)
{
    return {trace.seed, trace.energy_not_served_gwh, trace.cumulative_cost, trace.final_linepack_gwh};
}

template <typename Job>
void guarded_run(const ScenarioConfig& config, std::size_t i, Job job)
{
    const auto seed = episode_seed(config.run.seed, i);
    try {
        job(seed);
    } catch (const SimulationError&) {
        throw;
    } catch (const std::exception& e) {
        throw SimulationError(seed, e.what());
    }
}

} // namespace

EnsembleStats run_ensemble(const ScenarioConfig& config, unsigned threads)
{
    const Simulator sim(config);
    const auto n = static_cast<std::size_t>(config.run.ensemble);
    const auto names = sim.series_names();

    EnsembleStats stats;
    stats.runs.resize(n);
    std::vector<std::vector<std::vector<double>>> series(n);
    parallel_for(n, threads, [&](std::size_t i) {
        guarded_run(config, i, [&](std::uint64_t seed) {
            const auto trace = sim.run(seed);
            stats.runs[i] = scalars_of(trace);
            series[i] = sim.series_values(trace);
        });
    });

    const auto steps = static_cast<std::size_t>(config.run.horizon_steps);
    std::vector<double> samples(n);
    for (std::size_t s = 0; s < names.size(); ++s) {
        SeriesStats ss;
        ss.name = names[s];
        ss.steps.reserve(steps);
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t i = 0; i < n; ++i)
                samples[i] = series[i][s][t];
            ss.steps.push_back(quantile_bands(samples));
        }
        stats.series.push_back(std::move(ss));
    }
    return stats;
}

std::vector<RunScalars> run_scalars(const ScenarioConfig& config, unsigned threads)
{
    const Simulator sim(config);
    const auto n = static_cast<std::size_t>(config.run.ensemble);
    std::vector<RunScalars> runs(n);
    parallel_for(n, threads, [&](std::size_t i) {
        guarded_run(config, i, [&](std::uint64_t seed) { runs[i] = scalars_of(sim.run(seed)); });
    });
    return runs;
}

SweepCell summarize_cell(int max_actions, double reserve_mw, std::span<const RunScalars> runs)
{
    std::vector<double> cost;
    std::vector<double> linepack;
    std::vector<double> ens;
    std::size_t clean = 0;
    for (const auto& r : runs) {
        cost.push_back(r.cumulative_cost);
        linepack.push_back(r.final_linepack_gwh);
        ens.push_back(r.energy_not_served_gwh);
        if (r.energy_not_served_gwh == 0.0)
            ++clean;
    }
    SweepCell cell;
    cell.max_actions = max_actions;
    cell.reserve_mw = reserve_mw;
    cell.mean_cost = mean_of(cost);
    cell.se_cost = standard_error(cost);
    cell.mean_final_linepack_gwh = mean_of(linepack);
    cell.se_final_linepack_gwh = standard_error(linepack);
    cell.mean_ens_gwh = mean_of(ens);
    cell.share_without_shedding = runs.empty() ? 0.0 : static_cast<double>(clean) / static_cast<double>(runs.size());
    return cell;
}

std::vector<SweepCell> sweep(const ScenarioConfig& config, std::span<const int> ks, std::span<const double> rs,
                             unsigned threads)
{
    if (ks.empty() || rs.empty())
        throw ConfigError("sweep", "K and R lists must not be empty");
    std::vector<SweepCell> grid;
    for (int k : ks) {
        for (double r : rs) {
            ScenarioConfig cell = config;
            cell.policy.max_actions = k;
            cell.policy.reserve_mw = r;
            const auto runs = run_scalars(cell, threads);
            grid.push_back(summarize_cell(k, r, runs));
        }
    }
    return grid;
}

std::vector<StrategyOutcome> compare_strategies(const ScenarioConfig& config, std::span<const Strategy> strategies,
                                                unsigned threads)
{
    if (strategies.empty())
        throw ConfigError("strategies", "at least one strategy is required");
    for (const auto& s : strategies) {
        if (s.needs_pressures() && config.gas.model != GasModelKind::Network)
            throw ConfigError("strategies", "strategy " + s.tag() + " needs the gas-network model");
    }
    std::vector<StrategyOutcome> out;
    for (const auto& s : strategies) {
        ScenarioConfig cfg = config;
        cfg.policy.strategy = s;
        StrategyOutcome o;
        o.strategy = s;
        o.runs = run_scalars(cfg, threads);
        std::vector<double> ens;
        for (const auto& r : o.runs)
            ens.push_back(r.energy_not_served_gwh);
        o.ens_curve = exceedance_curve(std::move(ens));
        out.push_back(std::move(o));
    }
    return out;
}

} // namespace dualfuel
