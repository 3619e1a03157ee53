#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace dualfuel {

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    bool contains(const Interval& inner) const { return lo <= inner.lo && inner.hi <= hi; }
};

/// Coverage levels of the shaded fan-chart bands.
inline constexpr std::array<double, 3> kBandLevels{0.90, 0.98, 0.998};

/// Quantile of ascending-sorted samples, linear interpolation between
/// order statistics at position (n - 1) q.
double sorted_quantile(std::span<const double> sorted, double q);

struct QuantileBands
{
    double mean = 0.0;
    std::vector<Interval> central; // one per requested level, same order
    Interval range;
};

/// Central intervals [(1-q)/2, (1+q)/2] for each level plus the full range.
QuantileBands quantile_bands(std::vector<double> samples, std::span<const double> levels = kBandLevels);

struct CurvePoint
{
    double fraction = 0.0; // share of observations at or below value
    double value = 0.0;
};

/// Samples sorted ascending with fraction i/N for the i-th (1-based).
std::vector<CurvePoint> exceedance_curve(std::vector<double> samples);

double mean_of(std::span<const double> samples);
/// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(std::span<const double> samples);

} // namespace dualfuel
