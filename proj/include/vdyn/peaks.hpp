#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "vdyn/common.hpp"

namespace vdyn {

struct ExtremumHit {
    std::size_t index;
    double value;       // value in the original series
    double prominence;  // topographic prominence
};

namespace detail {

// Interior local maxima; a flat run counts once, at its midpoint, and only
// when both sides eventually drop. Runs touching either end are excluded.
inline std::vector<std::size_t> local_maxima(const Series& x) {
    std::vector<std::size_t> out;
    const std::size_t n = x.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i] > x[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && x[j + 1] == x[i]) ++j;
            if (j + 1 < n && x[j + 1] < x[i]) {
                out.push_back((i + j) / 2);
                i = j;
            } else {
                i = j;  // plateau runs to the edge or keeps rising
            }
        }
        ++i;
    }
    return out;
}

// Topographic prominence: height above the higher of the two key saddles,
// where each saddle is the minimum between the peak and the nearest
// strictly-higher sample (or the series end).
inline double prominence_at(const Series& x, std::size_t p) {
    double left_min = x[p];
    for (std::size_t i = p; i-- > 0;) {
        if (x[i] > x[p]) break;
        left_min = std::min(left_min, x[i]);
    }
    double right_min = x[p];
    for (std::size_t i = p + 1; i < x.size(); ++i) {
        if (x[i] > x[p]) break;
        right_min = std::min(right_min, x[i]);
    }
    return x[p] - std::max(left_min, right_min);
}

}  // namespace detail

// Interior local maxima with prominence >= min_prominence, in time order.
inline std::vector<ExtremumHit> find_peaks(const Series& x, double min_prominence) {
    require(x.size() >= 3, "find_peaks: series must have at least 3 samples");
    std::vector<ExtremumHit> hits;
    for (std::size_t p : detail::local_maxima(x)) {
        const double prom = detail::prominence_at(x, p);
        if (prom >= min_prominence) hits.push_back({p, x[p], prom});
    }
    return hits;
}

// Interior local minima, prominence measured on the negated series.
inline std::vector<ExtremumHit> find_troughs(const Series& x, double min_prominence) {
    Series neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    auto hits = find_peaks(neg, min_prominence);
    for (auto& h : hits) h.value = x[h.index];
    return hits;
}

}  // namespace vdyn
