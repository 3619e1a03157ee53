#include "dualfuel/dispatch.hpp"
#include "dualfuel/errors.hpp"
#include "dualfuel/linepack.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dualfuel;

namespace {

std::vector<UnitLimits> units(std::size_t n, double p_min = 30.0, double p_max = 150.0)
{
    return std::vector<UnitLimits>(n, UnitLimits{p_min, p_max});
}

GeneratorSpec spec(std::size_t id, const std::string& node, HeatRate hr = HeatRate::from_efficiency(150.0, 0.4))
{
    GeneratorSpec g;
    g.id = id;
    g.gas_node = node;
    g.heat_rate = hr;
    return g;
}

} // namespace

TEST(Dispatch, InteriorBalance)
{
    const auto r = dispatch(6000.0, units(50));
    EXPECT_DOUBLE_EQ(r.epsilon, 0.75);
    for (double p : r.unit_power)
        EXPECT_DOUBLE_EQ(p, 120.0);
    EXPECT_EQ(r.shed, 0.0);
    EXPECT_EQ(r.surplus, 0.0);
}

TEST(Dispatch, CapacityShortfallSheds)
{
    const auto r = dispatch(2000.0, units(10));
    EXPECT_EQ(r.epsilon, 1.0);
    for (double p : r.unit_power)
        EXPECT_EQ(p, 150.0);
    EXPECT_DOUBLE_EQ(r.shed, 500.0);
    EXPECT_DOUBLE_EQ(r.served(), 1500.0);
}

TEST(Dispatch, FloorsCreateSurplus)
{
    const auto r = dispatch(1000.0, units(50));
    EXPECT_EQ(r.epsilon, 0.0);
    for (double p : r.unit_power)
        EXPECT_EQ(p, 30.0);
    EXPECT_DOUBLE_EQ(r.surplus, 500.0);
    EXPECT_EQ(r.shed, 0.0);
}

TEST(Dispatch, EmptyFleetShedsEverything)
{
    const auto r = dispatch(700.0, {});
    EXPECT_EQ(r.epsilon, 0.0);
    EXPECT_TRUE(r.unit_power.empty());
    EXPECT_EQ(r.shed, 700.0);
    EXPECT_EQ(dispatch(0.0, {}).shed, 0.0);
}

TEST(Dispatch, ZeroSpanMeansFullOutput)
{
    const auto r = dispatch(100.0, units(2, 80.0, 80.0));
    EXPECT_EQ(r.epsilon, 1.0);
    EXPECT_EQ(r.unit_power[0], 80.0);
    EXPECT_DOUBLE_EQ(r.surplus, 60.0);
}

TEST(Dispatch, RandomizedBalanceIdentity)
{
    Rng rng(77);
    for (int c = 0; c < 1000; ++c) {
        std::vector<UnitLimits> u(1 + rng.index(80));
        double sum_min = 0.0;
        double sum_max = 0.0;
        for (auto& x : u) {
            x.p_min = 100.0 * rng.uniform();
            x.p_max = x.p_min + 1.0 + 200.0 * rng.uniform();
            sum_min += x.p_min;
            sum_max += x.p_max;
        }
        const double demand = 1.3 * sum_max * rng.uniform();
        const auto r = dispatch(demand, u);
        ASSERT_GE(r.epsilon, 0.0);
        ASSERT_LE(r.epsilon, 1.0);
        ASSERT_GE(r.shed, 0.0);
        ASSERT_GE(r.surplus, 0.0);
        ASSERT_EQ(r.shed * r.surplus, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            ASSERT_GE(r.unit_power[i], u[i].p_min * (1 - 1e-12));
            ASSERT_LE(r.unit_power[i], u[i].p_max * (1 + 1e-12));
            total += r.unit_power[i];
        }
        if (sum_min <= demand) {
            ASSERT_NEAR(total + r.shed, demand, 1e-9 * demand);
        }
    }
}

TEST(Dispatch, ScalingLeavesEpsilonUnchanged)
{
    std::vector<UnitLimits> u{{10, 50}, {20, 90}, {5, 25}};
    const auto base = dispatch(120.0, u);
    for (auto& x : u) {
        x.p_min *= 3.5;
        x.p_max *= 3.5;
    }
    const auto scaled = dispatch(420.0, u);
    EXPECT_NEAR(scaled.epsilon, base.epsilon, 1e-15);
    for (std::size_t i = 0; i < u.size(); ++i)
        EXPECT_NEAR(scaled.unit_power[i], 3.5 * base.unit_power[i], 1e-12);
}

TEST(Dispatch, ShedNonIncreasingInFleetSize)
{
    double previous = 1e300;
    for (std::size_t n = 0; n <= 60; ++n) {
        const double shed = dispatch(6000.0, units(n)).shed;
        EXPECT_LE(shed, previous);
        previous = shed;
    }
}

TEST(Dispatch, FleetDispatchUsesProducingUnits)
{
    std::vector<GeneratorSpec> specs{spec(0, "A"), spec(1, "A"), spec(2, "B"), spec(3, "B"), spec(4, "B")};
    const FleetState f{UnitState::main_fuel(), UnitState::transient(Status::StartingSecondary, 2),
                       UnitState::transient(Status::MainToSecondary, 1), UnitState::offline(),
                       UnitState::secondary_fuel()};
    const auto d = dispatch_fleet(300.0, f, specs);
    EXPECT_EQ(d.units, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_NEAR(d.result.served(), 300.0, 1e-9);
}

TEST(Dispatch, HeatRateCurve)
{
    EXPECT_DOUBLE_EQ(heat_rate(150.0, spec(0, "A", {0.0, 375.0, 0.0})), 375.0);
    EXPECT_DOUBLE_EQ(heat_rate(0.0, spec(0, "A", {12.5, 300.0, 60.0})), 12.5);
    EXPECT_DOUBLE_EQ(heat_rate(75.0, spec(0, "A", {10.0, 300.0, 60.0})), 175.0);
    EXPECT_THROW(heat_rate(10.0, spec(0, "A", {-50.0, 100.0, 0.0})), ConfigError);
}

TEST(Dispatch, StepCostComponents)
{
    std::vector<GeneratorSpec> specs{spec(0, "A")};
    const double dt = 1.0 / 12.0;
    const FleetState sf{UnitState::secondary_fuel()};
    const auto d = dispatch_fleet(150.0, sf, specs);
    EXPECT_NEAR(step_cost(d, sf, CostBook{}, dt), 5250.0, 1e-9);

    const FleetState off{UnitState::offline()};
    const auto shed = dispatch_fleet(100.0, off, specs);
    EXPECT_NEAR(step_cost(shed, off, CostBook{}, dt), 100.0 * dt * 20000.0, 1e-6);
    EXPECT_EQ(step_cost(dispatch_fleet(0.0, off, specs), off, CostBook{}, dt), 0.0);

    const FleetState mf{UnitState::main_fuel()};
    const auto gas = dispatch_fleet(150.0, mf, specs);
    EXPECT_NEAR(step_cost(gas, mf, CostBook{}, dt), 150.0 * dt * 30.0, 1e-9);
}

TEST(Dispatch, StepCostIsLinearInDuration)
{
    std::vector<GeneratorSpec> specs{spec(0, "A"), spec(1, "A")};
    const FleetState f{UnitState::main_fuel(), UnitState::transient(Status::SecondaryToMain, 2)};
    const auto d = dispatch_fleet(400.0, f, specs);
    const double one = step_cost(d, f, CostBook{}, 1.0);
    EXPECT_GT(one, 0.0);
    EXPECT_NEAR(step_cost(d, f, CostBook{}, 0.25), one / 4.0, 1e-9 * one);
}

TEST(Dispatch, GasDemandByNode)
{
    std::vector<GeneratorSpec> specs{spec(0, "N3"), spec(1, "N3"), spec(2, "N5"), spec(3, "N5")};
    const FleetState f{UnitState::main_fuel(), UnitState::main_fuel(), UnitState::secondary_fuel(),
                       UnitState::secondary_fuel()};
    // 4 units at eps = 0.75 -> 120 MW each.
    const auto d = dispatch_fleet(480.0, f, specs);
    const auto by_node = gas_demand_by_node(f, d, specs);
    ASSERT_EQ(by_node.size(), 1u);
    EXPECT_NEAR(by_node.at("N3"), 600.0, 1e-9);

    const FleetState all_sf(4, UnitState::secondary_fuel());
    EXPECT_TRUE(gas_demand_by_node(all_sf, dispatch_fleet(480.0, all_sf, specs), specs).empty());

    const FleetState tms{UnitState::offline(), UnitState::offline(), UnitState::transient(Status::MainToSecondary, 2),
                         UnitState::offline()};
    const auto t = gas_demand_by_node(tms, dispatch_fleet(150.0, tms, specs), specs);
    EXPECT_NEAR(t.at("N5"), 375.0, 1e-9);
}

TEST(Dispatch, CostBookChecks)
{
    EXPECT_TRUE(CostBook{}.warnings().empty());
    EXPECT_FALSE((CostBook{500.0, 420.0, 20000.0}.warnings().empty()));
    EXPECT_THROW((CostBook{-1.0, 420.0, 20000.0}.validate()), ConfigError);
}

TEST(Linepack, SingleUnitDraw)
{
    const auto s = linepack_step(60.0, 375.0, 1.0 / 12.0);
    EXPECT_NEAR(s.linepack_gwh, 60.0 - 0.375 / 12.0, 1e-12);
    EXPECT_FALSE(s.depleted);
}

TEST(Linepack, OverdrawClampsAndFlags)
{
    const auto s = linepack_step(0.01, 31125.0, 1.0 / 12.0);
    EXPECT_EQ(s.linepack_gwh, 0.0);
    EXPECT_TRUE(s.depleted);
}

TEST(Linepack, ZeroDrawIsIdentity)
{
    const auto s = linepack_step(42.5, 0.0, 0.5);
    EXPECT_EQ(s.linepack_gwh, 42.5);
    EXPECT_FALSE(s.depleted);
}

TEST(Linepack, FullFleetDepletesInStepTwentyFour)
{
    double l = 60.0;
    int depleted_at = 0;
    for (int step = 1; step <= 40 && depleted_at == 0; ++step) {
        const auto s = linepack_step(l, 83 * 150.0 / 0.4, 5.0 / 60.0);
        l = s.linepack_gwh;
        if (s.depleted)
            depleted_at = step;
    }
    // 60 / 31.125 h = 115.66 min falls in the step covering (115, 120].
    EXPECT_EQ(depleted_at, 24);
}

TEST(Linepack, Telescoping)
{
    Rng rng(5);
    double l = 60.0;
    double drawn = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double p = 20000.0 * rng.uniform();
        l = linepack_step(l, p, 1.0 / 12.0).linepack_gwh;
        drawn += p / 12.0 / 1000.0;
    }
    EXPECT_NEAR(l, std::max(0.0, 60.0 - drawn), 1e-9);
}
