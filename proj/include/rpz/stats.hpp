#ifndef RPZ_STATS_HPP
#define RPZ_STATS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "rpz/error.hpp"

namespace rpz::stats {

/// Linear interpolated quantile (type 7), q in [0, 1].
inline double quantile(std::vector<double> v, double q)
{
    if (v.empty()) throw domain_error("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double f = pos - static_cast<double>(i);
    if (i + 1 >= v.size()) return v.back();
    return v[i] + f * (v[i + 1] - v[i]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

struct line_fit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept.
inline line_fit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw domain_error("fit_line needs at least two paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw domain_error("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

} // namespace rpz::stats

#endif // RPZ_STATS_HPP
