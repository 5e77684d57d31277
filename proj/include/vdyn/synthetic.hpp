#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "vdyn/common.hpp"
#include "vdyn/coordination.hpp"
#include "vdyn/gesture.hpp"
#include "vdyn/kinematics.hpp"

namespace vdyn {

// Box-Muller over mt19937_64. std::normal_distribution is implementation
// defined, so identical seeds would not give identical corpora across
// standard libraries; this generator does.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    // uniform draw in (0, 1]
    double uniform() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double th = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct SyntheticItem {
    std::string name;
    double nucleus_target;
    double offglide_target;
    std::string vowel_class;  // monophthong | diphthong | intermediate
};

struct SyntheticConfig {
    int n_speakers = 2;
    double noise_sd_frac = 0.05;  // noise SD as a fraction of each channel's peak
    std::uint64_t seed = 1;
    double stiffness_k = 2000.0;
    double cubic_d = 600.0;
    double strength_ratio = 100.0;  // offglide blending strength : nucleus 1
    double activation_s = 0.250;
    double frequency_hz = 4.0;
    double art_rate_hz = 250.0;
    double ac_rate_hz = 500.0;
    double art_tail_s = 0.075;
    double sim_tail_s = 0.080;  // simulated past the vowel so every window fits

    void validate() const {
        require(n_speakers >= 1, "gen-synthetic: need at least 1 speaker");
        require(noise_sd_frac >= 0.0, "gen-synthetic: noise fraction must be >= 0");
        require(sim_tail_s >= art_tail_s, "gen-synthetic: simulated tail shorter than analysis tail");
    }
};

struct SyntheticCorpus {
    std::vector<VowelToken> art_tokens;  // TDx, TDy, ULx at art_rate_hz
    std::vector<VowelToken> ac_tokens;   // F1, F2 at ac_rate_hz
    std::vector<SyntheticItem> items;
};

// Nine test items: three monophthongs (identical nucleus and offglide
// targets), three canonical diphthongs, and three intermediates from the
// nucleus sweep against a fixed 0.9 offglide.
inline std::vector<SyntheticItem> synthetic_item_set() {
    return {
        {"mono_a", 0.30, 0.30, "monophthong"},  {"mono_b", 0.35, 0.35, "monophthong"},
        {"mono_c", 0.40, 0.40, "monophthong"},  {"di_a", 0.30, 0.90, "diphthong"},
        {"di_b", 0.25, 0.95, "diphthong"},      {"di_c", 0.35, 1.00, "diphthong"},
        {"sweep_08", 0.80, 0.90, "intermediate"}, {"sweep_07", 0.70, 0.90, "intermediate"},
        {"sweep_06", 0.60, 0.90, "intermediate"},
    };
}

namespace detail {

inline Series stride_series(const Series& x, std::size_t step) {
    Series out;
    out.reserve(x.size() / step + 1);
    for (std::size_t i = 0; i < x.size(); i += step) out.push_back(x[i]);
    return out;
}

inline Series noisy_channel(const Series& clean, double sd_frac, GaussianRng& rng) {
    double peak = 0.0;
    for (double v : clean) peak = std::max(peak, std::abs(v));
    const double sd = sd_frac * (peak > 0.0 ? peak : 1.0);
    Series out(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) out[i] = clean[i] + sd * rng.normal();
    return out;
}

}  // namespace detail

// Every item is a two-gesture anti-phase vowel with blending favouring the
// offglide; channels are per-speaker gains applied to the simulated tract
// variable plus Gaussian noise. Deterministic for a fixed seed.
inline SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config = {}) {
    config.validate();

    auto graph = CouplingGraph::make(2, config.frequency_hz);
    graph.set_pair(0, 1, PhaseRelation::AntiPhase);
    const auto solution = integrate_oscillators(graph, {0.0, 1.0});
    const auto intervals = schedule_from_phases(
        solution, {config.activation_s, config.activation_s});

    SyntheticCorpus corpus;
    corpus.items = synthetic_item_set();

    const double vowel_onset = 0.0;
    double vowel_offset = 0.0;
    for (const auto& iv : intervals) vowel_offset = std::max(vowel_offset, iv.offset_s);

    std::vector<SimOutput> sims;
    sims.reserve(corpus.items.size());
    for (const auto& item : corpus.items) {
        GestureScore score;
        score.gestures = {
            {"TBCD", {item.nucleus_target, config.stiffness_k, config.cubic_d, 1.0},
             intervals[0].onset_s, config.activation_s, "nucleus"},
            {"TBCD", {item.offglide_target, config.stiffness_k, config.cubic_d, config.strength_ratio},
             intervals[1].onset_s, config.activation_s, "offglide"},
        };
        SimulationConfig sim;
        sim.tail_after_last_offset = config.sim_tail_s;
        sims.push_back(simulate_score(score, sim));
    }

    const auto art_step = static_cast<std::size_t>(std::llround(1.0 / (0.001 * config.art_rate_hz)));
    const auto ac_step = static_cast<std::size_t>(std::llround(1.0 / (0.001 * config.ac_rate_hz)));

    for (int s = 0; s < config.n_speakers; ++s) {
        GaussianRng rng(config.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(s + 1));
        const double si = static_cast<double>(s);
        const double g_tdx = 8.0 + 0.5 * si;
        const double g_tdy = 12.0 - 0.4 * si;
        const double g_ulx = 2.0 + 0.2 * si;
        const double g_f1 = -(300.0 + 10.0 * si);
        const double g_f2 = 900.0 + 25.0 * si;

        char spk[16];
        std::snprintf(spk, sizeof spk, "s%02d", s);

        for (std::size_t it = 0; it < corpus.items.size(); ++it) {
            const Series art_pos = detail::stride_series(sims[it].position, art_step);
            const Series ac_pos = detail::stride_series(sims[it].position, ac_step);
            const std::string token_id = std::string(spk) + "_" + corpus.items[it].name;

            const auto scaled = [](const Series& x, double g) {
                Series out(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) out[i] = g * x[i];
                return out;
            };

            VowelToken art;
            art.trajectory.sample_rate_hz = config.art_rate_hz;
            art.trajectory.speaker = spk;
            art.trajectory.item = corpus.items[it].name;
            art.trajectory.token_id = token_id;
            art.trajectory.channel_names = {"TDx", "TDy", "ULx"};
            art.trajectory.channels = {
                detail::noisy_channel(scaled(art_pos, g_tdx), config.noise_sd_frac, rng),
                detail::noisy_channel(scaled(art_pos, g_tdy), config.noise_sd_frac, rng),
                detail::noisy_channel(scaled(art_pos, g_ulx), config.noise_sd_frac, rng)};
            art.vowel_onset_s = vowel_onset;
            art.vowel_offset_s = vowel_offset;
            art.tail_s = config.art_tail_s;
            art.validate();
            corpus.art_tokens.push_back(std::move(art));

            VowelToken ac;
            ac.trajectory.sample_rate_hz = config.ac_rate_hz;
            ac.trajectory.speaker = spk;
            ac.trajectory.item = corpus.items[it].name;
            ac.trajectory.token_id = token_id;
            ac.trajectory.channel_names = {"F1", "F2"};
            ac.trajectory.channels = {
                detail::noisy_channel(scaled(ac_pos, g_f1), config.noise_sd_frac, rng),
                detail::noisy_channel(scaled(ac_pos, g_f2), config.noise_sd_frac, rng)};
            ac.vowel_onset_s = vowel_onset;
            ac.vowel_offset_s = vowel_offset;
            ac.tail_s = 0.0;
            ac.validate();
            corpus.ac_tokens.push_back(std::move(ac));
        }
    }
    return corpus;
}

}  // namespace vdyn
