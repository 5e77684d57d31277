#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "vdyn/common.hpp"

namespace vdyn {

// One second-order IIR section, denominator normalized (a0 = 1).
struct BiquadSection {
    double b0, b1, b2;
    double a1, a2;

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

// Even-order Butterworth low-pass as a cascade of biquads.
// Analog prototype poles are mapped with the bilinear transform after
// prewarping the cutoff, so the digital response is exactly -3 dB at fc.
inline std::vector<BiquadSection> butterworth_lowpass(int order, double cutoff_hz,
                                                      double sample_rate_hz) {
    require(order >= 2 && order % 2 == 0, "butterworth_lowpass: order must be a positive even number");
    require(sample_rate_hz > 0.0, "butterworth_lowpass: sample rate must be > 0");
    require(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0,
            "butterworth_lowpass: cutoff must lie in (0, Nyquist)");

    const double warped = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    const double w2 = warped * warped;
    std::vector<BiquadSection> sections;
    sections.reserve(static_cast<std::size_t>(order) / 2);
    for (int k = 0; k < order / 2; ++k) {
        // conjugate pole pair at angle theta in (pi/2, pi) on the warped circle
        const double theta =
            std::numbers::pi * (2 * k + 1) / (2.0 * order) + std::numbers::pi / 2.0;
        const double re = std::cos(theta) * warped;
        const double a0 = 1.0 - 2.0 * re + w2;
        sections.push_back({w2 / a0, 2.0 * w2 / a0, w2 / a0,
                            (2.0 * w2 - 2.0) / a0, (1.0 + 2.0 * re + w2) / a0});
    }
    return sections;
}

namespace detail {

// Initial state that keeps the section's output steady for a constant input of 1.
inline std::array<double, 2> steady_state(const BiquadSection& s) {
    const double h = s.dc_gain();
    return {h - s.b0, s.b2 - s.a2 * h};
}

// Direct form II transposed, in place.
inline void run_section(const BiquadSection& s, Series& x, std::array<double, 2> z) {
    for (double& xi : x) {
        const double yi = s.b0 * xi + z[0];
        z[0] = s.b1 * xi - s.a1 * yi + z[1];
        z[1] = s.b2 * xi - s.a2 * yi;
        xi = yi;
    }
}

inline void one_pass(const std::vector<BiquadSection>& sections, Series& x) {
    for (const auto& s : sections) {
        auto z = steady_state(s);
        z[0] *= x.front();
        z[1] *= x.front();
        run_section(s, x, z);
    }
}

}  // namespace detail

// Zero-phase filtering: forward pass, backward pass, with odd-reflection
// padding of 3x the filter order at both ends and steady-state section
// initialization scaled to the first padded sample.
inline Series filtfilt(const std::vector<BiquadSection>& sections, const Series& x) {
    require(!sections.empty(), "filtfilt: no filter sections");
    const int order = 2 * static_cast<int>(sections.size());
    const std::size_t n = x.size();
    require(n >= static_cast<std::size_t>(3 * order),
            "filtfilt: series shorter than 3x filter order");
    require(all_finite(x), "filtfilt: input contains non-finite samples");

    const std::size_t padlen = std::min<std::size_t>(3 * order, n - 1);
    Series ext;
    ext.reserve(n + 2 * padlen);
    for (std::size_t j = padlen; j >= 1; --j) ext.push_back(2.0 * x.front() - x[j]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t j = 1; j <= padlen; ++j) ext.push_back(2.0 * x.back() - x[n - 1 - j]);

    detail::one_pass(sections, ext);
    std::reverse(ext.begin(), ext.end());
    detail::one_pass(sections, ext);
    std::reverse(ext.begin(), ext.end());

    return Series(ext.begin() + static_cast<std::ptrdiff_t>(padlen),
                  ext.begin() + static_cast<std::ptrdiff_t>(padlen + n));
}

}  // namespace vdyn
