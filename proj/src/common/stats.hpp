#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cddp {

// Quantile with linear interpolation between order statistics (R type 7),
// the convention the experiment tables use. `p` in [0,1], data need not be
// sorted.
inline double quantile(std::vector<double> data, double p) {
    if (data.empty()) throw std::invalid_argument("quantile: empty data");
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    std::sort(data.begin(), data.end());
    const double h = (static_cast<double>(data.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= data.size()) return data.back();
    const double frac = h - static_cast<double>(lo);
    return data[lo] + frac * (data[lo + 1] - data[lo]);
}

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline FiveNumberSummary five_number_summary(const std::vector<double>& data) {
    FiveNumberSummary s;
    s.min = quantile(data, 0.0);
    s.q1 = quantile(data, 0.25);
    s.median = quantile(data, 0.5);
    s.q3 = quantile(data, 0.75);
    s.max = quantile(data, 1.0);
    return s;
}

inline double mean(const std::vector<double>& data) {
    if (data.empty()) throw std::invalid_argument("mean: empty data");
    double acc = 0.0;
    for (double v : data) acc += v;
    return acc / static_cast<double>(data.size());
}

}  // namespace cddp
