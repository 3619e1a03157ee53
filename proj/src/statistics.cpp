#include "dualfuel/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualfuel {

double sorted_quantile(std::span<const double> sorted, double q)
{
    if (sorted.empty())
        throw std::invalid_argument("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi])
        return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

QuantileBands quantile_bands(std::vector<double> samples, std::span<const double> levels)
{
    if (samples.empty())
        throw std::invalid_argument("quantile bands need at least one sample");
    QuantileBands b;
    b.mean = mean_of(samples);
    std::sort(samples.begin(), samples.end());
    b.range = {samples.front(), samples.back()};
    for (double q : levels)
        b.central.push_back({sorted_quantile(samples, (1.0 - q) / 2.0), sorted_quantile(samples, (1.0 + q) / 2.0)});
    // Summation rounding may nudge the mean of a constant sample.
    b.mean = std::clamp(b.mean, b.range.lo, b.range.hi);
    return b;
}

std::vector<CurvePoint> exceedance_curve(std::vector<double> samples)
{
    std::sort(samples.begin(), samples.end());
    std::vector<CurvePoint> curve;
    curve.reserve(samples.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        curve.push_back({static_cast<double>(i + 1) / n, samples[i]});
    return curve;
}

double mean_of(std::span<const double> samples)
{
    if (samples.empty())
        return 0.0;
    double sum = 0.0;
    for (double x : samples)
        sum += x;
    return sum / static_cast<double>(samples.size());
}

double standard_error(std::span<const double> samples)
{
    if (samples.size() < 2)
        return 0.0;
    const double m = mean_of(samples);
    double ss = 0.0;
    for (double x : samples)
        ss += (x - m) * (x - m);
    const double n = static_cast<double>(samples.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

} // namespace dualfuel
