#include "cli.hpp"

#include "dualfuel/errors.hpp"
#include "dualfuel/results.hpp"
#include "dualfuel/scenario.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace dualfuel {

namespace {

using nlohmann::json;

struct CommonArgs
{
    std::string scenario;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out = "results";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_outputs)
{
    cmd->add_option("scenario", args.scenario, "Scenario JSON, or a manifest.json from an earlier run")->required();
    cmd->add_option("--set", args.overrides, "Override a scenario field, e.g. policy.K=3")->take_all();
    if (with_outputs) {
        cmd->add_option("--seed", args.seed, "Base seed (replaces run.seed)");
        cmd->add_option("--threads", args.threads, "Worker threads, 0 for all cores");
    }
    cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
}

/// A loaded input: the scenario document plus any lists a manifest carried.
struct Input
{
    json scenario;
    json manifest_lists = json::object();
};

Input load_input(const CommonArgs& args)
{
    Input in;
    json doc = load_json_file(args.scenario);
    if (doc.is_object() && doc.contains("tool") && doc.contains("scenario")) {
        in.scenario = doc.at("scenario");
        for (const char* key : {"K", "R", "strategies"}) {
            if (doc.contains(key))
                in.manifest_lists[key] = doc.at(key);
        }
    } else {
        in.scenario = std::move(doc);
    }
    for (const auto& o : args.overrides)
        apply_override(in.scenario, o);
    if (args.seed) {
        if (!in.scenario.is_object())
            throw ConfigError("", "scenario must be a JSON object");
        in.scenario["run"]["seed"] = *args.seed;
    }
    return in;
}

json manifest(const std::string& command, const ScenarioConfig& config, const json& scenario)
{
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = config.run.seed;
    m["scenario"] = scenario;
    return m;
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

template <typename T>
std::vector<T> list_from(const std::vector<T>& cli, const json& lists, const char* key, std::vector<T> fallback)
{
    if (!cli.empty())
        return cli;
    if (lists.contains(key)) {
        try {
            return lists.at(key).get<std::vector<T>>();
        } catch (const json::exception&) {
            throw ConfigError(key, "manifest list has the wrong type");
        }
    }
    return fallback;
}

void print_summary(std::ostream& out, std::string_view label, const std::vector<RunScalars>& runs)
{
    const auto cell = summarize_cell(0, 0.0, runs);
    out << label << "runs=" << runs.size() << " mean_ens_gwh=" << format_double(cell.mean_ens_gwh)
        << " mean_cost=" << format_double(cell.mean_cost)
        << " mean_final_linepack_gwh=" << format_double(cell.mean_final_linepack_gwh) << "\n";
}

int cmd_run(const CommonArgs& args, std::ostream& out)
{
    const Input in = load_input(args);
    const ScenarioConfig config = parse_scenario(in.scenario);
    const EnsembleStats stats = run_ensemble(config, args.threads);

    std::map<std::string, std::string> files;
    files["manifest.json"] = dump(manifest("run", config, in.scenario));
    files["timeseries.csv"] = timeseries_csv(stats, config.run.dt_minutes);
    files["scalars.csv"] = scalars_csv(stats.runs);
    write_bundle(args.out, files);

    print_summary(out, "", stats.runs);
    out << "wrote " << args.out << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::vector<int>& k_arg, const std::vector<double>& r_arg,
              std::ostream& out)
{
    const Input in = load_input(args);
    const ScenarioConfig config = parse_scenario(in.scenario);
    const auto ks = list_from<int>(k_arg, in.manifest_lists, "K", {1, 2, 3, 5, 10});
    const auto rs = list_from<double>(r_arg, in.manifest_lists, "R", {0.0, 250.0, 500.0, 1000.0});
    for (int k : ks) {
        if (k < 1)
            throw ConfigError("K", "every K must be at least 1");
    }
    for (double r : rs) {
        if (!(r >= 0.0))
            throw ConfigError("R", "every R must be non-negative");
    }

    std::vector<SweepCell> grid;
    std::vector<std::pair<SweepCell, std::vector<RunScalars>>> cells;
    for (int k : ks) {
        for (double r : rs) {
            ScenarioConfig cell = config;
            cell.policy.max_actions = k;
            cell.policy.reserve_mw = r;
            auto runs = run_scalars(cell, args.threads);
            grid.push_back(summarize_cell(k, r, runs));
            cells.emplace_back(grid.back(), std::move(runs));
        }
    }

    json m = manifest("sweep", config, in.scenario);
    m["K"] = ks;
    m["R"] = rs;
    std::map<std::string, std::string> files;
    files["manifest.json"] = dump(m);
    files["grid.csv"] = grid_csv(grid);
    files["scalars.csv"] = sweep_scalars_csv(cells);
    write_bundle(args.out, files);

    for (const auto& c : grid) {
        out << "K=" << c.max_actions << " R=" << format_double(c.reserve_mw)
            << " mean_cost=" << format_double(c.mean_cost) << " mean_ens_gwh=" << format_double(c.mean_ens_gwh)
            << "\n";
    }
    out << "wrote " << args.out << "\n";
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::vector<std::string>& s_arg, std::ostream& out)
{
    const Input in = load_input(args);
    const ScenarioConfig config = parse_scenario(in.scenario);
    const auto names = list_from<std::string>(s_arg, in.manifest_lists, "strategies", {});
    if (names.empty())
        throw ConfigError("strategies", "give at least one strategy with --strategies");
    std::vector<Strategy> strategies;
    std::vector<std::string> tags;
    for (const auto& n : names) {
        try {
            strategies.push_back(Strategy::parse(n));
        } catch (const ConfigError& e) {
            throw ConfigError("strategies", e.what());
        }
        tags.push_back(strategies.back().tag());
    }
    const auto outcomes = compare_strategies(config, strategies, args.threads);

    json m = manifest("compare", config, in.scenario);
    m["strategies"] = tags;
    std::map<std::string, std::string> files;
    files["manifest.json"] = dump(m);
    files["curves.csv"] = curves_csv(outcomes);
    files["scalars.csv"] = compare_scalars_csv(outcomes);
    write_bundle(args.out, files);

    for (const auto& o : outcomes)
        print_summary(out, o.strategy.tag() + " ", o.runs);
    out << "wrote " << args.out << "\n";
    return 0;
}

int cmd_validate(const CommonArgs& args, std::ostream& out)
{
    const Input in = load_input(args);
    const ScenarioConfig config = parse_scenario(in.scenario);
    for (const auto& w : config.costs.warnings())
        out << "warning: " << w << "\n";
    out << config.name << ": ok (" << config.roster.size() << " units, "
        << (config.gas.model == GasModelKind::Network ? "network" : "copperplate") << " gas model)\n";
    return 0;
}

int cmd_steady(const CommonArgs& args, std::ostream& out)
{
    const Input in = load_input(args);
    ScenarioConfig config = parse_scenario(in.scenario);
    if (config.gas.model != GasModelKind::Network)
        throw ConfigError("gas.model", "steady needs the \"network\" gas model");
    if (config.gas.init.mode != GasInitMode::Steady) {
        config.gas.init.mode = GasInitMode::Steady;
        config.gas.init.pressure_bar.reset();
    }
    const Simulator sim(config);
    const auto pressures = sim.network()->node_pressures(sim.initial_gas());

    std::map<std::string, std::string> files;
    files["manifest.json"] = dump(manifest("steady", config, in.scenario));
    files["steady.csv"] = pressures_csv(pressures);
    write_bundle(args.out, files);

    for (const auto& [node, bar] : pressures)
        out << node << " " << format_double(bar) << " bar\n";
    out << "linepack_gwh " << format_double(sim.network()->total_linepack_energy_gwh(sim.initial_gas(), config.gas.gcv_mj_per_kg)) << "\n";
    out << "wrote " << args.out << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dual-fuel generator fleet simulator for gas supply emergencies", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonArgs args;
    std::vector<int> ks;
    std::vector<double> rs;
    std::vector<std::string> strategies;

    auto* run = app.add_subcommand("run", "Run one ensemble and write timeseries and scalars");
    add_common(run, args, true);
    auto* sweep_cmd = app.add_subcommand("sweep", "Run one ensemble per (K, R) and write grid.csv");
    add_common(sweep_cmd, args, true);
    sweep_cmd->add_option("--K", ks, "Action limits, comma separated")->delimiter(',');
    sweep_cmd->add_option("--R", rs, "Reserves in MW, comma separated")->delimiter(',');
    auto* compare = app.add_subcommand("compare", "Run paired ensembles per strategy and write curves.csv");
    add_common(compare, args, true);
    compare->add_option("--strategies", strategies, "Strategy tags such as 1B,2A,3A")->delimiter(',');
    auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
    add_common(validate, args, false);
    validate->remove_option(validate->get_option("--out"));
    auto* steady = app.add_subcommand("steady", "Solve and write the gas network's initial steady state");
    add_common(steady, args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (run->parsed())
            return cmd_run(args, out);
        if (sweep_cmd->parsed())
            return cmd_sweep(args, ks, rs, out);
        if (compare->parsed())
            return cmd_compare(args, strategies, out);
        if (validate->parsed())
            return cmd_validate(args, out);
        return cmd_steady(args, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        err << "simulation failed (seed " << e.seed() << "): " << e.what() << "\n";
        return 3;
    } catch (const GasSolverError& e) {
        err << "gas solver failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace dualfuel
