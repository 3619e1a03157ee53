#include "dualfuel/results.hpp"

#include "dualfuel/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

namespace dualfuel {

std::string format_double(double x)
{
    if (!std::isfinite(x))
        throw std::domain_error("non-finite value in output");
    if (x == 0.0)
        x = 0.0; // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

class Csv
{
public:
    Csv() = default;
    explicit Csv(std::initializer_list<std::string_view> header)
    {
        for (auto h : header)
            cell(h);
        end();
    }

    Csv& cell(std::string_view s)
    {
        if (!first_)
            out_ += ',';
        out_ += s;
        first_ = false;
        return *this;
    }
    Csv& num(double x) { return cell(format_double(x)); }
    Csv& integer(std::uint64_t x) { return cell(std::to_string(x)); }
    void end()
    {
        out_ += '\n';
        first_ = true;
    }
    std::string str() { return std::move(out_); }

private:
    std::string out_;
    bool first_ = true;
};

void scalar_cells(Csv& csv, std::size_t run, const RunScalars& r)
{
    csv.integer(run).integer(r.seed).num(r.energy_not_served_gwh).num(r.cumulative_cost).num(r.final_linepack_gwh);
}

} // namespace

std::string timeseries_csv(const EnsembleStats& stats, double dt_minutes)
{
    std::string header = "step,time_min";
    for (const auto& s : stats.series) {
        header += "," + s.name + "_mean";
        for (const char* level : {"p90", "p98", "p998"})
            header += "," + s.name + "_" + level + "_lo," + s.name + "_" + level + "_hi";
        header += "," + s.name + "_min," + s.name + "_max";
    }
    std::string out = header + "\n";
    const std::size_t steps = stats.series.empty() ? 0 : stats.series.front().steps.size();
    for (std::size_t t = 0; t < steps; ++t) {
        Csv row;
        row.integer(t + 1).num(static_cast<double>(t + 1) * dt_minutes);
        for (const auto& s : stats.series) {
            const auto& b = s.steps[t];
            row.num(b.mean);
            for (const auto& band : b.central)
                row.num(band.lo).num(band.hi);
            row.num(b.range.lo).num(b.range.hi);
        }
        row.end();
        out += row.str();
    }
    return out;
}

std::string scalars_csv(const std::vector<RunScalars>& runs)
{
    Csv csv({"run", "seed", "ens_gwh", "cumulative_cost", "final_linepack_gwh"});
    for (std::size_t i = 0; i < runs.size(); ++i) {
        scalar_cells(csv, i, runs[i]);
        csv.end();
    }
    return csv.str();
}

std::string sweep_scalars_csv(const std::vector<std::pair<SweepCell, std::vector<RunScalars>>>& cells)
{
    Csv csv({"K", "R", "run", "seed", "ens_gwh", "cumulative_cost", "final_linepack_gwh"});
    for (const auto& [cell, runs] : cells) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            csv.integer(static_cast<std::uint64_t>(cell.max_actions)).num(cell.reserve_mw);
            scalar_cells(csv, i, runs[i]);
            csv.end();
        }
    }
    return csv.str();
}

std::string compare_scalars_csv(const std::vector<StrategyOutcome>& outcomes)
{
    Csv csv({"strategy", "run", "seed", "ens_gwh", "cumulative_cost", "final_linepack_gwh"});
    for (const auto& o : outcomes) {
        for (std::size_t i = 0; i < o.runs.size(); ++i) {
            csv.cell(o.strategy.tag());
            scalar_cells(csv, i, o.runs[i]);
            csv.end();
        }
    }
    return csv.str();
}

std::string grid_csv(const std::vector<SweepCell>& cells)
{
    Csv csv({"K", "R", "mean_cost", "se_cost", "mean_final_linepack_gwh", "se_final_linepack_gwh", "mean_ens_gwh",
             "share_without_shedding"});
    for (const auto& c : cells) {
        csv.integer(static_cast<std::uint64_t>(c.max_actions))
            .num(c.reserve_mw)
            .num(c.mean_cost)
            .num(c.se_cost)
            .num(c.mean_final_linepack_gwh)
            .num(c.se_final_linepack_gwh)
            .num(c.mean_ens_gwh)
            .num(c.share_without_shedding);
        csv.end();
    }
    return csv.str();
}

std::string curves_csv(const std::vector<StrategyOutcome>& outcomes)
{
    Csv csv({"strategy", "rank", "fraction", "ens_gwh"});
    for (const auto& o : outcomes) {
        for (std::size_t i = 0; i < o.ens_curve.size(); ++i) {
            csv.cell(o.strategy.tag()).integer(i + 1).num(o.ens_curve[i].fraction).num(o.ens_curve[i].value);
            csv.end();
        }
    }
    return csv.str();
}

std::string pressures_csv(const NodePressures& pressures)
{
    Csv csv({"node", "pressure_bar"});
    for (const auto& [node, bar] : pressures) {
        csv.cell(node).num(bar);
        csv.end();
    }
    return csv.str();
}

void write_bundle(const std::filesystem::path& dir, const std::map<std::string, std::string>& files)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files) {
        const auto target = dir / name;
        auto tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            if (!out)
                throw Error("cannot write " + tmp.string());
        }
        std::filesystem::rename(tmp, target, ec);
        if (ec)
            throw Error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

} // namespace dualfuel
