#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdyn {

using Series = std::vector<double>;

// Base class for everything this library throws.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, out-of-range parameters, inconsistent data.
struct validation_error : error {
    using error::error;
};

// Numerical blow-up detected during integration.
struct divergence_error : error {
    using error::error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

inline bool all_finite(const Series& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline double mean(const Series& x) {
    if (x.empty()) throw validation_error("mean of empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Population standard deviation (divide by n).
inline double stddev_pop(const Series& x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

// Value of a sampled series at fractional index, linear between samples.
inline double interp_at(const Series& y, double idx) {
    if (y.empty()) throw validation_error("interp_at on empty series");
    if (idx <= 0.0) return y.front();
    const double last = static_cast<double>(y.size() - 1);
    if (idx >= last) return y.back();
    const auto i = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(i);
    return y[i] + frac * (y[i + 1] - y[i]);
}

// Pearson correlation of two equal-length series.
inline double pearson(const Series& a, const Series& b) {
    require(a.size() == b.size() && a.size() >= 2, "pearson needs two equal series, n >= 2");
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw validation_error("pearson: zero-variance input");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace vdyn
