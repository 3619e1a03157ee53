#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("dualfuel_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text)
    {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "dualfuel");
        std::vector<const char*> argv;
        for (const auto& a : args)
            argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return dualfuel::run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const char* kSmall = R"({"name": "small", "fleet": {"class": "fairly_reliable"},
  "policy": {"K": 3, "R": 250}, "run": {"ensemble": 20, "horizon_steps": 24}})";

} // namespace

TEST_F(CliTest, RunWritesBundleAndEchoesOverrides)
{
    const auto s = write("s.json", kSmall);
    const auto out = dir_ / "out";
    ASSERT_EQ(run({"run", s.string(), "--set", "policy.K=1", "--out", out.string()}), 0) << err_.str();
    for (const char* f : {"manifest.json", "timeseries.csv", "scalars.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m["scenario"]["policy"]["K"], 1);
    EXPECT_EQ(m["command"], "run");
    EXPECT_EQ(m["seed"], 1);
    EXPECT_EQ(m["tool"], "dualfuel");
}

TEST_F(CliTest, ManifestRerunIsByteIdentical)
{
    const auto s = write("s.json", kSmall);
    const auto a = dir_ / "a";
    const auto b = dir_ / "b";
    ASSERT_EQ(run({"run", s.string(), "--seed", "77", "--threads", "1", "--out", a.string()}), 0) << err_.str();
    ASSERT_EQ(run({"run", (a / "manifest.json").string(), "--threads", "3", "--out", b.string()}), 0) << err_.str();
    for (const char* f : {"manifest.json", "timeseries.csv", "scalars.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST_F(CliTest, SweepManifestRerunIsByteIdentical)
{
    const auto s = write("s.json", kSmall);
    const auto a = dir_ / "a";
    const auto b = dir_ / "b";
    ASSERT_EQ(run({"sweep", s.string(), "--K", "1,3", "--R", "0,500", "--out", a.string()}), 0) << err_.str();
    ASSERT_EQ(run({"sweep", (a / "manifest.json").string(), "--threads", "2", "--out", b.string()}), 0);
    for (const char* f : {"manifest.json", "grid.csv", "scalars.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    std::istringstream grid(slurp(a / "grid.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(grid, line))
        ++rows;
    EXPECT_EQ(rows, 5);
}

TEST_F(CliTest, DefaultSweepGridHasTwentyCells)
{
    const auto s = write("s.json", R"({"run": {"ensemble": 2, "horizon_steps": 6}})");
    ASSERT_EQ(run({"sweep", s.string(), "--out", (dir_ / "g").string()}), 0) << err_.str();
    std::istringstream grid(slurp(dir_ / "g" / "grid.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(grid, line))
        ++rows;
    EXPECT_EQ(rows, 21);
}

TEST_F(CliTest, CompareWritesOneCurvePerStrategy)
{
    const auto s = write("s.json", kSmall);
    const auto out = dir_ / "c";
    ASSERT_EQ(run({"compare", s.string(), "--strategies", "1B,2A,south_first", "--out", out.string()}), 0)
        << err_.str();
    const auto curves = slurp(out / "curves.csv");
    EXPECT_NE(curves.find("\n2B,20,1,"), std::string::npos);
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m["strategies"], (nlohmann::json{"1B", "2A", "2B"}));
}

TEST_F(CliTest, MalformedJsonExitsTwoWithoutOutputs)
{
    const auto s = write("bad.json", "{\"policy\": {\"K\": 3,,}}");
    const auto out = dir_ / "never";
    EXPECT_EQ(run({"run", s.string(), "--out", out.string()}), 2);
    EXPECT_NE(err_.str().find("bad.json:1:"), std::string::npos) << err_.str();
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, UnknownFieldExitsTwo)
{
    const auto s = write("s.json", R"({"policy": {"K": 3, "reserve": 10}})");
    EXPECT_EQ(run({"validate", s.string()}), 2);
    EXPECT_NE(err_.str().find("policy.reserve"), std::string::npos) << err_.str();
}

TEST_F(CliTest, PressureStrategyOnCopperplateExitsTwo)
{
    const auto s = write("s.json", kSmall);
    EXPECT_EQ(run({"compare", s.string(), "--strategies", "3A", "--out", (dir_ / "x").string()}), 2);
    EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, SimulationFailureExitsThreeWithSeed)
{
    const auto s = write("s.json", R"({"gas": {"model": "network", "solver": {"substep_seconds": 1000}},
        "run": {"ensemble": 3, "horizon_steps": 4}})");
    EXPECT_EQ(run({"run", s.string(), "--out", (dir_ / "x").string()}), 3);
    EXPECT_NE(err_.str().find("seed"), std::string::npos) << err_.str();
    EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, ValidateAndSteady)
{
    const auto s = write("s.json", kSmall);
    EXPECT_EQ(run({"validate", s.string()}), 0);
    EXPECT_NE(out_.str().find("small: ok"), std::string::npos);
    EXPECT_EQ(run({"steady", s.string(), "--out", (dir_ / "st").string()}), 2);

    const auto n = write("n.json", R"({"gas": {"model": "network"}})");
    ASSERT_EQ(run({"steady", n.string(), "--out", (dir_ / "st").string()}), 0) << err_.str();
    const auto csv = slurp(dir_ / "st" / "steady.csv");
    EXPECT_EQ(csv.rfind("node,pressure_bar\n", 0), 0u);
    EXPECT_NE(csv.find("\nN3,"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo)
{
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"launch"}), 2);
    EXPECT_EQ(run({"run"}), 2);
    EXPECT_EQ(run({"--help"}), 0);
}
