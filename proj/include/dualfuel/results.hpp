#pragma once

#include "dualfuel/engine.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dualfuel {

/// Shortest form that reads back to the same double, at most 17
/// significant digits.
std::string format_double(double x);

/// timeseries.csv: step, time_min, then per series
/// <name>_mean, <name>_p90_lo, <name>_p90_hi, <name>_p98_lo, <name>_p98_hi,
/// <name>_p998_lo, <name>_p998_hi, <name>_min, <name>_max.
std::string timeseries_csv(const EnsembleStats& stats, double dt_minutes);

/// scalars.csv: run, seed, ens_gwh, cumulative_cost, final_linepack_gwh.
std::string scalars_csv(const std::vector<RunScalars>& runs);

/// Sweep scalars: K, R, then the scalars.csv columns.
std::string sweep_scalars_csv(const std::vector<std::pair<SweepCell, std::vector<RunScalars>>>& cells);

/// Compare scalars: strategy, then the scalars.csv columns.
std::string compare_scalars_csv(const std::vector<StrategyOutcome>& outcomes);

/// grid.csv: K, R, mean_cost, se_cost, mean_final_linepack_gwh,
/// se_final_linepack_gwh, mean_ens_gwh, share_without_shedding.
std::string grid_csv(const std::vector<SweepCell>& cells);

/// curves.csv: strategy, rank, fraction, ens_gwh.
std::string curves_csv(const std::vector<StrategyOutcome>& outcomes);

/// steady.csv: node, pressure_bar.
std::string pressures_csv(const NodePressures& pressures);

/// Writes every file into `dir` (created if needed). Each file goes to a
/// temporary name first and is renamed into place.
void write_bundle(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

} // namespace dualfuel
