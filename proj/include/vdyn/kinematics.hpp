#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vdyn/butterworth.hpp"
#include "vdyn/common.hpp"
#include "vdyn/peaks.hpp"

namespace vdyn {

// Multichannel recording of one token: EMA sensor coordinates or formant
// tracks, one series per named channel.
struct Trajectory {
    double sample_rate_hz = 0.0;
    std::vector<std::string> channel_names;
    std::vector<Series> channels;
    std::string speaker;
    std::string item;
    std::string token_id;

    std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().size(); }
    double end_s() const {
        return n_samples() < 2 ? 0.0 : static_cast<double>(n_samples() - 1) / sample_rate_hz;
    }

    bool has_channel(const std::string& name) const {
        return std::find(channel_names.begin(), channel_names.end(), name) != channel_names.end();
    }
    const Series& channel(const std::string& name) const {
        for (std::size_t i = 0; i < channel_names.size(); ++i)
            if (channel_names[i] == name) return channels[i];
        throw validation_error("trajectory " + token_id + " has no channel " + name);
    }
    Series& channel(const std::string& name) {
        for (std::size_t i = 0; i < channel_names.size(); ++i)
            if (channel_names[i] == name) return channels[i];
        throw validation_error("trajectory " + token_id + " has no channel " + name);
    }

    void validate() const {
        require(sample_rate_hz > 0.0, "trajectory " + token_id + ": sample rate must be > 0");
        require(channel_names.size() == channels.size(),
                "trajectory " + token_id + ": channel name/series count mismatch");
        require(!channels.empty(), "trajectory " + token_id + ": no channels");
        for (const auto& c : channels) {
            require(c.size() == channels.front().size(),
                    "trajectory " + token_id + ": channels differ in length");
            require(all_finite(c), "trajectory " + token_id + ": non-finite sample");
        }
    }
};

struct VowelToken {
    Trajectory trajectory;
    double vowel_onset_s = 0.0;
    double vowel_offset_s = 0.0;
    double tail_s = 0.0;  // post-offset material kept for analysis

    void validate() const {
        trajectory.validate();
        require(vowel_onset_s >= 0.0, "token " + trajectory.token_id + ": vowel onset must be >= 0");
        require(vowel_onset_s < vowel_offset_s,
                "token " + trajectory.token_id + ": vowel onset must precede offset");
        require(vowel_offset_s <= trajectory.end_s() - tail_s + 1e-9,
                "token " + trajectory.token_id + ": vowel window plus tail exceeds trajectory");
    }
};

inline double vowel_duration(const VowelToken& token) {
    return token.vowel_offset_s - token.vowel_onset_s;
}

// Standardizes one channel to mean 0, SD 1 per speaker, pooling every sample
// of every token that speaker contributes. Population SD (divide by n).
inline std::vector<VowelToken> zscore_by_speaker(std::vector<VowelToken> tokens,
                                                 const std::string& channel) {
    std::map<std::string, std::vector<std::size_t>> by_speaker;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        by_speaker[tokens[i].trajectory.speaker].push_back(i);

    for (const auto& [speaker, idxs] : by_speaker) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i : idxs) {
            const Series& c = tokens[i].trajectory.channel(channel);
            for (double v : c) sum += v;
            n += c.size();
        }
        require(n >= 2, "zscore_by_speaker: speaker " + speaker + " has fewer than 2 samples");
        const double m = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i : idxs)
            for (double v : tokens[i].trajectory.channel(channel)) ss += (v - m) * (v - m);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (sd == 0.0)
            throw validation_error("zscore_by_speaker: zero variance for speaker " + speaker);
        for (std::size_t i : idxs)
            for (double& v : tokens[i].trajectory.channel(channel)) v = (v - m) / sd;
    }
    return tokens;
}

// Zero-phase 4th-order Butterworth low-pass.
inline Series lowpass(const Series& x, double sample_rate_hz, double cutoff_hz = 10.0) {
    require(sample_rate_hz > 2.0 * cutoff_hz, "lowpass: sample rate must exceed 2x cutoff");
    return filtfilt(butterworth_lowpass(4, cutoff_hz, sample_rate_hz), x);
}

// Central differences with one-sided endpoints.
inline Series central_difference(const Series& x, double sample_rate_hz) {
    require(x.size() >= 2, "central_difference: need at least 2 samples");
    require(sample_rate_hz > 0.0, "central_difference: sample rate must be > 0");
    const std::size_t n = x.size();
    Series v(n);
    v[0] = (x[1] - x[0]) * sample_rate_hz;
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (x[i + 1] - x[i - 1]) * sample_rate_hz / 2.0;
    v[n - 1] = (x[n - 1] - x[n - 2]) * sample_rate_hz;
    return v;
}

// Per-sample Euclidean norm of the channel derivatives.
inline Series tangential_velocity(std::span<const Series> channels, double sample_rate_hz) {
    require(channels.size() >= 2, "tangential_velocity: need at least 2 channels");
    for (const auto& c : channels)
        require(c.size() == channels.front().size(), "tangential_velocity: channel length mismatch");

    std::vector<Series> derivs;
    derivs.reserve(channels.size());
    for (const auto& c : channels) derivs.push_back(central_difference(c, sample_rate_hz));

    Series speed(channels.front().size(), 0.0);
    for (const auto& d : derivs)
        for (std::size_t i = 0; i < speed.size(); ++i) speed[i] += d[i] * d[i];
    for (double& s : speed) s = std::sqrt(s);
    return speed;
}

// Straight-line distance between the positions at two fractional times of
// the vowel interval, over the named channels. Positions are linearly
// interpolated between samples.
inline double euclidean_displacement(const VowelToken& token,
                                     std::span<const std::string> channels,
                                     double lo_frac = 0.10, double hi_frac = 0.90) {
    token.validate();
    require(!channels.empty(), "euclidean_displacement: no channels named");
    require(lo_frac > 0.0 && hi_frac < 1.0 && lo_frac < hi_frac,
            "euclidean_displacement: fractions must satisfy 0 < lo < hi < 1");

    const double fs = token.trajectory.sample_rate_hz;
    const double dur = vowel_duration(token);
    const double idx_lo = (token.vowel_onset_s + lo_frac * dur) * fs;
    const double idx_hi = (token.vowel_onset_s + hi_frac * dur) * fs;

    double ss = 0.0;
    for (const auto& name : channels) {
        const Series& c = token.trajectory.channel(name);
        const double d = interp_at(c, idx_hi) - interp_at(c, idx_lo);
        ss += d * d;
    }
    return std::sqrt(ss);
}

// Linear resampling onto n_points equally spaced positions across the
// series; first and last samples are preserved exactly.
inline Series resample_normalized(const Series& x, int n_points) {
    require(x.size() >= 2, "resample_normalized: need at least 2 samples");
    require(n_points >= 2, "resample_normalized: need at least 2 output points");
    Series out(static_cast<std::size_t>(n_points));
    const double last = static_cast<double>(x.size() - 1);
    for (int j = 0; j < n_points; ++j)
        out[static_cast<std::size_t>(j)] =
            interp_at(x, last * static_cast<double>(j) / static_cast<double>(n_points - 1));
    out.front() = x.front();
    out.back() = x.back();
    return out;
}

// Interior local minima of a speed series whose topographic prominence is at
// least prominence_frac times the series maximum, in time order.
inline std::vector<ExtremumHit> find_speed_minima(const Series& speed,
                                                      double prominence_frac = 0.05) {
    require(speed.size() >= 3, "find_speed_minima: need at least 3 samples");
    const double mx = *std::max_element(speed.begin(), speed.end());
    return find_troughs(speed, prominence_frac * mx);
}

// Interior local maxima under the same prominence rule.
inline std::vector<ExtremumHit> find_speed_peaks(const Series& speed,
                                                 double prominence_frac = 0.05) {
    require(speed.size() >= 3, "find_speed_peaks: need at least 3 samples");
    const double mx = *std::max_element(speed.begin(), speed.end());
    return find_peaks(speed, prominence_frac * mx);
}

// Copies the samples whose times fall inside [t0, t1].
inline Series slice_window(const Series& x, double sample_rate_hz, double t0, double t1) {
    require(sample_rate_hz > 0.0, "slice_window: sample rate must be > 0");
    require(t0 < t1, "slice_window: empty window");
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(t0 * sample_rate_hz - 1e-9)));
    const auto hi_raw = std::floor(t1 * sample_rate_hz + 1e-9);
    require(hi_raw >= static_cast<double>(lo), "slice_window: window contains no samples");
    const std::size_t hi = std::min(x.size() - 1, static_cast<std::size_t>(hi_raw));
    require(lo < x.size(), "slice_window: window starts past the series end");
    return Series(x.begin() + static_cast<std::ptrdiff_t>(lo),
                  x.begin() + static_cast<std::ptrdiff_t>(hi + 1));
}

}  // namespace vdyn
