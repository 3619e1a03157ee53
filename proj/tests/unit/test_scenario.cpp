#include "dualfuel/errors.hpp"
#include "dualfuel/results.hpp"
#include "dualfuel/scenario.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <cstring>
#include <sstream>

using namespace dualfuel;
using nlohmann::json;

namespace {

std::string field_of(const json& doc)
{
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

std::vector<std::vector<std::string>> split_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(Scenario, EmptyDocumentGivesDefaults)
{
    const auto c = parse_scenario(json::object());
    const auto d = default_scenario();
    EXPECT_EQ(c.roster.size(), d.roster.size());
    EXPECT_EQ(c.policy.max_actions, d.policy.max_actions);
    EXPECT_EQ(c.gas.linepack_gwh, 60.0);
    EXPECT_EQ(c.costs.voll, 20000.0);
    EXPECT_EQ(c.run.dt_minutes, 5.0);
    EXPECT_EQ(c.gas.model, GasModelKind::Copperplate);
}

TEST(Scenario, FullDocument)
{
    const json doc = json::parse(R"({
      "name": "x",
      "fleet": {"class": "unreliable", "template": {"p_max": 100, "p_min": 20, "efficiency": 0.5,
                "nodes": [{"node": "C1", "count": 3}, {"node": "S2", "count": 2}]}, "initial_online": 4},
      "gas": {"model": "network", "linepack_gwh": 50, "pi_min_bar": 45, "gcv_mj_per_kg": 48,
              "solver": {"dx_km": 2.5}, "init": {"mode": "steady", "supply_pressure_bar": 80}},
      "demand": {"samples_mw": [300, 400], "sample_minutes": 30, "scale": 2},
      "policy": {"K": 2, "R": 100, "strategy": "3A"},
      "costs": {"main": 20, "secondary": 300, "voll": 10000},
      "run": {"dt_minutes": 10, "transition_minutes": 30, "horizon_steps": 12, "ensemble": 7, "seed": 99}
    })");
    const auto c = parse_scenario(doc);
    ASSERT_EQ(c.roster.size(), 5u);
    EXPECT_EQ(c.roster[1].gas_node, "S2");
    EXPECT_EQ(c.roster[1].region, Region::South);
    EXPECT_EQ(c.roster[0].reliability, ReliabilityClass::unreliable());
    EXPECT_DOUBLE_EQ(heat_rate(100.0, c.roster[0]), 200.0);
    EXPECT_EQ(c.initial_online, 4u);
    EXPECT_EQ(c.gas.model, GasModelKind::Network);
    EXPECT_EQ(c.gas.solver.dx_km, 2.5);
    EXPECT_EQ(c.gas.init.supply_pressure_bar, 80.0);
    EXPECT_DOUBLE_EQ(c.demand.at(15.0), 700.0);
    EXPECT_EQ(c.policy.strategy, Strategy::pressure_low_first());
    EXPECT_EQ(c.costs.voll, 10000.0);
    EXPECT_EQ(c.run.seed, 99u);
}

TEST(Scenario, ExplicitUnitsAndTopology)
{
    const json doc = json::parse(R"({
      "fleet": {"class": {"p_abort": 0, "p_succ": 1, "p_fail": 0, "p_start": 1},
                "units": [{"node": "B", "p_max": 200, "p_min": 50, "heat_rate": [10, 400, 20]},
                          {"node": "A", "class": "reliable"}]},
      "gas": {"model": "network", "pipe_defaults": {"diameter_m": 0.6},
              "nodes": [{"id": "A", "region": "north", "injection": true}, {"id": "B", "region": "south"}],
              "pipes": [{"from": "A", "to": "B", "length_km": 30}]}
    })");
    const auto c = parse_scenario(doc);
    ASSERT_EQ(c.roster.size(), 2u);
    EXPECT_EQ(c.roster[0].heat_rate, (HeatRate{10, 400, 20}));
    EXPECT_EQ(c.roster[0].reliability.p_succ, 1.0);
    EXPECT_EQ(c.roster[1].reliability, ReliabilityClass::reliable());
    EXPECT_EQ(c.roster[1].region, Region::North);
    EXPECT_EQ(c.gas.topology.pipes[0].diameter_m, 0.6);
    EXPECT_TRUE(c.gas.topology.nodes[0].injection);
}

TEST(Scenario, TemplateCountSpreadsOverConsumerNodes)
{
    const auto c = parse_scenario(json::parse(R"({"fleet": {"template": {"count": 20}}})"));
    ASSERT_EQ(c.roster.size(), 20u);
    for (const auto& g : c.roster)
        EXPECT_NE(g.gas_node.front(), 'P');
}

TEST(Scenario, ErrorsNameTheField)
{
    EXPECT_EQ(field_of(json::parse(R"({"policy": {"k": 3}})")), "policy.k");
    EXPECT_EQ(field_of(json::parse(R"({"policy": {"K": "three"}})")), "policy.K");
    EXPECT_EQ(field_of(json::parse(R"({"extra": 1})")), "extra");
    EXPECT_EQ(field_of(json::parse(R"({"gas": {"model": "pipes"}})")), "gas.model");
    EXPECT_EQ(field_of(json::parse(R"({"fleet": {"class": "shaky"}})")), "fleet.class");
    EXPECT_EQ(field_of(json::parse(R"({"fleet": {"class": {"p_abort": 0.5, "p_succ": 0.9, "p_fail": 0, "p_start": 1}}})")),
              "fleet.class");
    EXPECT_EQ(field_of(json::parse(R"({"fleet": {"units": [{"node": "C1"}, {"node": "Q9"}]}})")),
              "fleet.units[1].node");
    EXPECT_EQ(field_of(json::parse(R"({"policy": {"strategy": "3A"}})")), "policy.strategy");
    EXPECT_EQ(field_of(json::parse(R"({"run": {"dt_minutes": 7}})")), "run.dt_minutes");
    EXPECT_EQ(field_of(json::parse(R"({"demand": {"profile": "evening"}})")), "demand.profile");
    EXPECT_EQ(field_of(json::parse(R"({"gas": {"pipes": []}})")), "gas.nodes");
    EXPECT_EQ(field_of(json::parse(R"({"gas": {"init": {"mode": "uniform", "supply_pressure_bar": 70}}})")),
              "gas.init.mode");
    EXPECT_EQ(field_of(json::parse("[1, 2]")), "");
}

TEST(Scenario, SyntaxErrorsCarryPosition)
{
    try {
        parse_json_text("{\n  \"policy\": {\"K\": 3,}\n}", "s.json");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("s.json:2:"), std::string::npos) << e.what();
    }
}

TEST(Scenario, Overrides)
{
    json doc = json::object();
    apply_override(doc, "policy.K=1");
    apply_override(doc, "fleet.class=super_reliable");
    apply_override(doc, "demand.samples_mw=[1,2]");
    EXPECT_EQ(doc["policy"]["K"], 1);
    EXPECT_EQ(doc["fleet"]["class"], "super_reliable");
    EXPECT_EQ(doc["demand"]["samples_mw"].size(), 2u);
    apply_override(doc, "demand.samples_mw.1=5");
    EXPECT_EQ(doc["demand"]["samples_mw"][1], 5);
    EXPECT_THROW(apply_override(doc, "policy.K"), ConfigError);
    EXPECT_THROW(apply_override(doc, "policy.K.x=1"), ConfigError);
    EXPECT_THROW(apply_override(doc, "demand.samples_mw.9=1"), ConfigError);
}

TEST(Results, DoublesRoundTrip)
{
    Rng rng(6);
    for (int i = 0; i < 10000; ++i) {
        double x = 0;
        std::uint64_t bits = rng.index(std::numeric_limits<std::uint64_t>::max());
        std::memcpy(&x, &bits, sizeof x);
        if (!std::isfinite(x))
            continue;
        const auto s = format_double(x);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        ASSERT_EQ(back, x) << s;
    }
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_THROW(format_double(std::nan("")), std::domain_error);
}

TEST(Results, CsvShapes)
{
    auto c = default_scenario();
    c.run.ensemble = 5;
    c.run.horizon_steps = 10;
    const auto stats = run_ensemble(c, 1);
    const auto ts = split_csv(timeseries_csv(stats, 5.0));
    ASSERT_EQ(ts.size(), 11u);
    EXPECT_EQ(ts[0].size(), 2u + 9u * stats.series.size());
    EXPECT_EQ(ts[0][2], "main_mean");
    EXPECT_EQ(ts[0][7], "main_p998_lo");
    for (const auto& row : ts) {
        ASSERT_EQ(row.size(), ts[0].size());
        for (const auto& cell : row)
            ASSERT_EQ(cell.find("nan"), std::string::npos);
    }
    EXPECT_EQ(ts[3][1], "15");

    const auto sc = split_csv(scalars_csv(stats.runs));
    ASSERT_EQ(sc.size(), 6u);
    EXPECT_EQ(sc[0], (std::vector<std::string>{"run", "seed", "ens_gwh", "cumulative_cost", "final_linepack_gwh"}));
    EXPECT_EQ(sc[1][1], std::to_string(episode_seed(c.run.seed, 0)));

    const std::vector<SweepCell> cells{summarize_cell(3, 250.0, stats.runs)};
    const auto g = split_csv(grid_csv(cells));
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].size(), 8u);
    EXPECT_EQ(g[1][0], "3");
    EXPECT_EQ(g[1][1], "250");

    StrategyOutcome o{Strategy::random(), stats.runs, exceedance_curve(stats.energy_not_served())};
    const auto cv = split_csv(curves_csv({o}));
    ASSERT_EQ(cv.size(), 6u);
    EXPECT_EQ(cv[5][0], "1B");
    EXPECT_EQ(cv[5][2], "1");
}
