#pragma once

#include "dualfuel/dispatch.hpp"
#include "dualfuel/fleet.hpp"
#include "dualfuel/gas_network.hpp"
#include "dualfuel/policy.hpp"
#include "dualfuel/statistics.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dualfuel {

enum class GasModelKind : std::uint8_t { Copperplate, Network };

/// Demand sampled every `sample_minutes`, linearly interpolated, held at
/// the last sample beyond the end.
struct DemandProfile
{
    std::string name = "custom";
    std::vector<double> samples_mw;
    double sample_minutes = 60.0;

    double at(double minutes) const;
    void validate() const;

    /// Synthetic shapes over eight hours: "nighttime" falls then rises,
    /// "noon" rises then falls, "morning" rises throughout.
    static DemandProfile named(std::string_view name);
    static DemandProfile constant(double mw);
};

enum class GasInitMode : std::uint8_t { Uniform, Steady };

struct GasInit
{
    GasInitMode mode = GasInitMode::Uniform;
    /// Uniform mode: explicit pressure. Unset: match the linepack target.
    std::optional<double> pressure_bar;
    /// Steady mode: explicit supply pressure. Unset: match the linepack target.
    std::optional<double> supply_pressure_bar;
    /// Steady mode: pre-emergency withdrawals in kg/s. Unset: the initial
    /// fleet's gas draw at the first demand sample.
    std::optional<std::map<std::string, double>> withdrawals_kg_s;
};

struct GasConfig
{
    GasModelKind model = GasModelKind::Copperplate;
    double linepack_gwh = 60.0; // l_0, and the network's initial stored energy
    double pi_min_bar = 50.0;
    double gcv_mj_per_kg = 50.0;
    GasTopology topology = GasTopology::synthetic_default();
    SolverOptions solver;
    GasInit init;
};

struct RunConfig
{
    double dt_minutes = 5.0;
    double transition_minutes = 20.0;
    int horizon_steps = 96;
    int ensemble = 10000;
    std::uint64_t seed = 1;
};

struct ScenarioConfig
{
    std::string name = "scenario";
    std::vector<GeneratorSpec> roster;
    /// Units on main fuel at the start, taken in roster order. Unset:
    /// as many as needed to cover the first demand sample plus R.
    std::optional<std::size_t> initial_online;
    GasConfig gas;
    DemandProfile demand = DemandProfile::named("noon");
    PolicyParams policy;
    CostBook costs;
    RunConfig run;

    void validate() const;
};

/// `count` identical units spread over (node, units) groups by round-robin,
/// so a prefix of the roster samples every node.
std::vector<GeneratorSpec> homogeneous_roster(std::span<const std::pair<std::string, std::size_t>> node_counts,
                                              const GasTopology& topology, double p_max, double p_min,
                                              const ReliabilityClass& reliability, const HeatRate& heat_rate);

/// Unit counts per node of the synthetic 83-unit fleet.
std::vector<std::pair<std::string, std::size_t>> default_node_counts();

/// 83 x 150 MW units on the synthetic topology, reliable class, noon demand.
ScenarioConfig default_scenario();

struct StepRecord
{
    int step = 0; // 1-based
    StatusCounts counts;
    double demand_mw = 0.0;
    double served_mw = 0.0;
    double shed_mw = 0.0;
    double surplus_mw = 0.0;
    double epsilon = 0.0;
    double cost = 0.0;
    double cumulative_cost = 0.0;
    double linepack_gwh = 0.0;               // after the gas advance
    std::vector<double> node_pressure_bar;   // network model, topology order, after the advance
    std::size_t commands = 0;
    std::size_t forced_off = 0;
};

struct RunTrace
{
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    double energy_not_served_gwh = 0.0;
    double cumulative_cost = 0.0;
    double final_linepack_gwh = 0.0;
};

/// Called once per step after the commands are applied.
using StepObserver = std::function<void(int step, const FleetState& fleet)>;

/// A validated scenario prepared for repeated episodes.
class Simulator
{
public:
    explicit Simulator(ScenarioConfig config);

    const ScenarioConfig& config() const { return config_; }
    const GasNetwork* network() const { return network_.get(); }
    int substeps() const { return substeps_; }

    FleetState initial_fleet() const { return initial_fleet_; }
    const GasGridState& initial_gas() const { return initial_gas_; }

    /// Episode loop. Each step: (1) force gas units offline where gas is
    /// gone, (2) resolve transients, (3) plan and apply commands,
    /// (4) dispatch, (5) accrue cost, (6) advance the gas model, (7) record.
    RunTrace run(std::uint64_t seed, const StepObserver& observer = {}) const;

    /// Column names of the per-step series, in the order of series_values.
    std::vector<std::string> series_names() const;
    std::vector<std::vector<double>> series_values(const RunTrace& trace) const;

private:
    ScenarioConfig config_;
    int substeps_ = 1;
    std::unique_ptr<GasNetwork> network_;
    FleetState initial_fleet_;
    GasGridState initial_gas_;
};

RunTrace run_episode(const ScenarioConfig& config, std::uint64_t seed);

struct RunScalars
{
    std::uint64_t seed = 0;
    double energy_not_served_gwh = 0.0;
    double cumulative_cost = 0.0;
    double final_linepack_gwh = 0.0;
};

struct SeriesStats
{
    std::string name;
    std::vector<QuantileBands> steps;
};

struct EnsembleStats
{
    std::vector<SeriesStats> series;
    std::vector<RunScalars> runs; // in ensemble index order

    std::vector<double> energy_not_served() const;
    std::vector<double> cumulative_costs() const;
    std::vector<double> final_linepacks() const;
};

/// Threads used when the caller passes 0.
unsigned default_threads();

/// Runs config.run.ensemble episodes with seeds episode_seed(seed, i).
/// Output does not depend on `threads`. Throws SimulationError naming the
/// lowest-index failing seed.
EnsembleStats run_ensemble(const ScenarioConfig& config, unsigned threads = 0);

/// As run_ensemble, scalars only.
std::vector<RunScalars> run_scalars(const ScenarioConfig& config, unsigned threads = 0);

struct SweepCell
{
    int max_actions = 0;
    double reserve_mw = 0.0;
    double mean_cost = 0.0;
    double se_cost = 0.0;
    double mean_final_linepack_gwh = 0.0;
    double se_final_linepack_gwh = 0.0;
    double mean_ens_gwh = 0.0;
    double share_without_shedding = 0.0;
};

SweepCell summarize_cell(int max_actions, double reserve_mw, std::span<const RunScalars> runs);

/// One ensemble per (K, R), all with the same base seed. Rows ordered by
/// K then R.
std::vector<SweepCell> sweep(const ScenarioConfig& config, std::span<const int> ks, std::span<const double> rs,
                             unsigned threads = 0);

struct StrategyOutcome
{
    Strategy strategy;
    std::vector<RunScalars> runs;
    std::vector<CurvePoint> ens_curve; // energy not served, GWh
};

/// Paired-seed ensembles, one per strategy. Throws ConfigError when a
/// pressure strategy is requested under the copperplate model.
std::vector<StrategyOutcome> compare_strategies(const ScenarioConfig& config, std::span<const Strategy> strategies,
                                                unsigned threads = 0);

} // namespace dualfuel
