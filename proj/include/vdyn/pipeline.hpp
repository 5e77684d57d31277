#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vdyn/clustering.hpp"
#include "vdyn/common.hpp"
#include "vdyn/coordination.hpp"
#include "vdyn/fpca.hpp"
#include "vdyn/gesture.hpp"
#include "vdyn/kinematics.hpp"
#include "vdyn/peaks.hpp"

namespace vdyn {

// Parameters shared by the built-in simulation studies.
struct StudyConfig {
    double stiffness_k = 2000.0;
    double cubic_d = 600.0;
    double strength_ratio = 100.0;  // offglide : nucleus blending strengths
    double activation_s = 0.250;
    double frequency_hz = 4.0;
    double tail_s = 0.075;
    double prominence_frac = 0.05;
};

struct PipelineConfig {
    double cutoff_hz = 10.0;
    int grid_size = 101;
    double retain_fraction = 0.99;
    double lo_frac = 0.10;
    double hi_frac = 0.90;
    double mid_keep_frac = 0.90;  // acoustic branch analyzes the mid 90% of the vowel
    std::vector<std::string> art_channels{"TDx", "TDy", "ULx"};
    std::vector<std::string> ac_channels{"F1", "F2"};
    // canonical diphthong used to orient PC1 (positive = second peak present)
    double ref_nucleus = 0.30;
    double ref_offglide = 0.90;
    StudyConfig reference;
};

struct DiphthongMeasures {
    std::string token_id;
    std::string speaker;
    std::string item;
    double art_euclidean = 0.0;
    double art_pc1 = 0.0;
    double ac_euclidean = 0.0;
    double ac_pc1 = 0.0;
    double duration_s = 0.0;
};

struct SkipNote {
    std::string token_id;
    std::string reason;
};

struct MeasuresTable {
    std::vector<DiphthongMeasures> rows;
    std::vector<SkipNote> skipped;   // tokens that produced no row
    std::vector<SkipNote> warnings;  // degraded but still measured
    FpcaModel art_model;
    FpcaModel ac_model;
    std::vector<std::string> art_token_ids;  // row order of art_model.scores
    std::vector<std::string> ac_token_ids;   // row order of ac_model.scores
};

inline const std::vector<std::string>& measure_names() {
    static const std::vector<std::string> names{"art_euclidean", "art_pc1", "ac_euclidean",
                                                "ac_pc1"};
    return names;
}

namespace detail {

// Builds the canonical two-gesture anti-phase score used both by the studies
// and as the PC1 orientation reference.
inline GestureScore two_target_score(double nucleus, double offglide, const StudyConfig& cfg) {
    auto graph = CouplingGraph::make(2, cfg.frequency_hz);
    graph.set_pair(0, 1, PhaseRelation::AntiPhase);
    const auto intervals = schedule_from_phases(integrate_oscillators(graph, {0.0, 1.0}),
                                                {cfg.activation_s, cfg.activation_s});
    GestureScore score;
    score.gestures = {
        {"TBCD", {nucleus, cfg.stiffness_k, cfg.cubic_d, 1.0}, intervals[0].onset_s,
         cfg.activation_s, "nucleus"},
        {"TBCD", {offglide, cfg.stiffness_k, cfg.cubic_d, cfg.strength_ratio},
         intervals[1].onset_s, cfg.activation_s, "offglide"},
    };
    return score;
}

inline GestureScore one_target_score(double target, double duration_s, const StudyConfig& cfg) {
    GestureScore score;
    score.gestures = {
        {"TBCD", {target, cfg.stiffness_k, cfg.cubic_d, 1.0}, 0.0, duration_s, "single"}};
    return score;
}

// Time-normalized speed curve of the canonical diphthong, passed through the
// same transform as the data curves of the given branch: standardization,
// smoothing, tangential speed over the branch's channel count, window,
// resampling. Living in the data units makes its projection onto PC1 a
// usable orientation probe.
inline Series reference_speed_curve(const PipelineConfig& cfg, bool articulatory) {
    const GestureScore score = two_target_score(cfg.ref_nucleus, cfg.ref_offglide, cfg.reference);
    SimulationConfig sim;
    sim.tail_after_last_offset = cfg.reference.tail_s + 0.005;
    const SimOutput out = simulate_score(score, sim);
    const double fs = 1.0 / out.dt;
    const double off = score.last_offset_s();

    double m = 0.0;
    for (double v : out.position) m += v;
    m /= static_cast<double>(out.position.size());
    double ss = 0.0;
    for (double v : out.position) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(out.position.size()));
    require(sd > 0.0, "reference curve is constant");
    Series z(out.position.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (out.position[i] - m) / sd;

    const Series smooth = lowpass(z, fs, cfg.cutoff_hz);
    const std::size_t n_channels =
        (articulatory ? cfg.art_channels : cfg.ac_channels).size();
    const std::vector<Series> chans(n_channels, smooth);
    const Series speed = tangential_velocity(chans, fs);

    Series window;
    if (articulatory) {
        window = slice_window(speed, fs, 0.0, off + cfg.reference.tail_s);
    } else {
        const double trim = 0.5 * (1.0 - cfg.mid_keep_frac) * off;
        window = slice_window(speed, fs, trim, off - trim);
    }
    return resample_normalized(window, cfg.grid_size);
}

struct BranchRow {
    std::string speaker;
    std::string item;
    double euclidean = 0.0;
    double pc1 = 0.0;
    double duration_s = 0.0;
};

// Per-speaker standardization with a documented degradation: a zero-variance
// speaker-channel is centered to all-zero deviations instead of aborting the
// whole analysis, so constant test tokens yield all-zero measures.
inline void zscore_lenient(std::vector<VowelToken>& tokens, const std::string& channel,
                           std::vector<SkipNote>& warnings) {
    std::map<std::string, std::vector<std::size_t>> by_speaker;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        by_speaker[tokens[i].trajectory.speaker].push_back(i);
    for (const auto& [speaker, idxs] : by_speaker) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i : idxs) {
            for (double v : tokens[i].trajectory.channel(channel)) sum += v;
            n += tokens[i].trajectory.channel(channel).size();
        }
        const double m = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i : idxs)
            for (double v : tokens[i].trajectory.channel(channel)) ss += (v - m) * (v - m);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (sd == 0.0) {
            for (std::size_t i : idxs)
                for (double& v : tokens[i].trajectory.channel(channel)) v = 0.0;
            warnings.push_back({speaker, "zero variance in channel " + channel +
                                             " for speaker " + speaker + "; deviations set to 0"});
        } else {
            for (std::size_t i : idxs)
                for (double& v : tokens[i].trajectory.channel(channel)) v = (v - m) / sd;
        }
    }
}

// One measurement branch: z-score, smooth, tangential speed, window,
// resample, fPCA, plus the 10-90% Euclidean displacement on unsmoothed
// z-scored channels.
inline std::map<std::string, BranchRow> run_branch(
    std::vector<VowelToken> tokens, const std::vector<std::string>& channels, bool articulatory,
    const PipelineConfig& cfg, FpcaModel& model_out, std::vector<std::string>& curve_tokens,
    std::vector<SkipNote>& skipped, std::vector<SkipNote>& warnings) {
    const char* branch = articulatory ? "articulatory" : "acoustic";

    std::vector<VowelToken> usable;
    for (auto& tok : tokens) {
        tok.validate();
        std::string missing;
        for (const auto& c : channels)
            if (!tok.trajectory.has_channel(c)) missing = c;
        if (!missing.empty()) {
            skipped.push_back({tok.trajectory.token_id,
                               std::string("missing ") + branch + " channel " + missing});
            continue;
        }
        usable.push_back(std::move(tok));
    }

    for (const auto& c : channels) zscore_lenient(usable, c, warnings);

    std::map<std::string, BranchRow> rows;
    std::vector<Series> curves;
    std::vector<std::string> curve_ids;
    for (const auto& tok : usable) {
        const std::string& id = tok.trajectory.token_id;
        if (rows.count(id)) {
            skipped.push_back({id, std::string("duplicate token_id in ") + branch + " branch"});
            continue;
        }
        try {
            const double fs = tok.trajectory.sample_rate_hz;
            std::vector<Series> smooth;
            smooth.reserve(channels.size());
            for (const auto& c : channels)
                smooth.push_back(lowpass(tok.trajectory.channel(c), fs, cfg.cutoff_hz));
            const Series speed = tangential_velocity(smooth, fs);

            double t0 = tok.vowel_onset_s, t1 = tok.vowel_offset_s;
            if (articulatory) {
                t1 += tok.tail_s;
            } else {
                const double trim = 0.5 * (1.0 - cfg.mid_keep_frac) * vowel_duration(tok);
                t0 += trim;
                t1 -= trim;
            }
            const Series curve =
                resample_normalized(slice_window(speed, fs, t0, t1), cfg.grid_size);

            BranchRow row;
            row.speaker = tok.trajectory.speaker;
            row.item = tok.trajectory.item;
            row.duration_s = vowel_duration(tok);
            row.euclidean = euclidean_displacement(
                tok, std::span<const std::string>(channels), cfg.lo_frac, cfg.hi_frac);
            rows.emplace(id, row);
            curves.push_back(curve);
            curve_ids.push_back(id);
        } catch (const error& e) {
            skipped.push_back({id, std::string(branch) + " branch failed: " + e.what()});
        }
    }

    if (curves.size() >= 2) {
        model_out = fpca_fit(curves, cfg.retain_fraction);
    } else {
        model_out = FpcaModel{};
        model_out.grid_size = cfg.grid_size;
        if (!curves.empty()) model_out.mean_curve = curves.front();
        model_out.scores.assign(curves.size(), Series{});
        if (!curves.empty())
            warnings.push_back({curve_ids.front(),
                                std::string("fewer than 2 ") + branch +
                                    " curves; PC scores set to 0"});
    }

    if (model_out.n_components() > 0) {
        const Series ref = reference_speed_curve(cfg, articulatory);
        const Series ref_scores = fpca_project(model_out, ref);
        if (ref_scores[0] < 0.0) {
            for (double& v : model_out.components[0]) v = -v;
            for (auto& s : model_out.scores) s[0] = -s[0];
        }
    }

    for (std::size_t i = 0; i < curve_ids.size(); ++i) {
        auto& row = rows.at(curve_ids[i]);
        row.pc1 = model_out.scores[i].empty() ? 0.0 : model_out.scores[i][0];
    }
    curve_tokens = curve_ids;
    return rows;
}

}  // namespace detail

// The four diphthongization measures per token. Tokens are joined across
// branches on token_id; tokens present in only one branch are skipped with a
// logged reason.
inline MeasuresTable compute_measures(const std::vector<VowelToken>& art_tokens,
                                      const std::vector<VowelToken>& ac_tokens,
                                      const PipelineConfig& cfg = {}) {
    MeasuresTable table;
    const auto art_rows =
        detail::run_branch(art_tokens, cfg.art_channels, true, cfg, table.art_model,
                           table.art_token_ids, table.skipped, table.warnings);
    const auto ac_rows =
        detail::run_branch(ac_tokens, cfg.ac_channels, false, cfg, table.ac_model,
                           table.ac_token_ids, table.skipped, table.warnings);

    std::set<std::string> emitted;
    for (const auto& tok : art_tokens) {
        const std::string& id = tok.trajectory.token_id;
        if (emitted.count(id)) continue;
        const auto a = art_rows.find(id);
        if (a == art_rows.end()) continue;
        const auto c = ac_rows.find(id);
        if (c == ac_rows.end()) {
            table.skipped.push_back({id, "no acoustic counterpart"});
            continue;
        }
        if (a->second.speaker != c->second.speaker || a->second.item != c->second.item) {
            table.skipped.push_back({id, "speaker/item mismatch between branches"});
            continue;
        }
        emitted.insert(id);
        table.rows.push_back({id, a->second.speaker, a->second.item, a->second.euclidean,
                              a->second.pc1, c->second.euclidean, c->second.pc1,
                              a->second.duration_s});
    }
    for (const auto& [id, row] : ac_rows)
        if (!emitted.count(id) && art_rows.find(id) == art_rows.end())
            table.skipped.push_back({id, "no articulatory counterpart"});
    return table;
}

struct ByItemMeans {
    std::vector<std::string> items;    // sorted lexicographically
    std::vector<Series> columns;       // one per measure, aligned with measure_names()
};

inline ByItemMeans by_item_means(const MeasuresTable& table) {
    require(!table.rows.empty(), "by_item_means: empty measures table");
    std::map<std::string, std::vector<const DiphthongMeasures*>> groups;
    for (const auto& r : table.rows) groups[r.item].push_back(&r);

    ByItemMeans out;
    out.columns.assign(measure_names().size(), Series{});
    for (const auto& [item, rows] : groups) {
        out.items.push_back(item);
        const double n = static_cast<double>(rows.size());
        double sums[4] = {0, 0, 0, 0};
        for (const auto* r : rows) {
            sums[0] += r->art_euclidean;
            sums[1] += r->art_pc1;
            sums[2] += r->ac_euclidean;
            sums[3] += r->ac_pc1;
        }
        for (std::size_t m = 0; m < 4; ++m) out.columns[m].push_back(sums[m] / n);
    }
    return out;
}

// Pearson correlations between the by-item mean measures; unit diagonal.
inline std::vector<std::vector<double>> correlation_matrix(const std::vector<Series>& columns) {
    require(columns.size() >= 2, "correlation_matrix: need at least 2 columns");
    for (const auto& c : columns)
        require(c.size() == columns.front().size() && c.size() >= 3,
                "correlation_matrix: columns must share length >= 3");
    std::vector<std::vector<double>> m(columns.size(), std::vector<double>(columns.size(), 1.0));
    for (std::size_t i = 0; i < columns.size(); ++i)
        for (std::size_t j = i + 1; j < columns.size(); ++j)
            m[i][j] = m[j][i] = pearson(columns[i], columns[j]);
    return m;
}

inline Series ranks(const Series& x) {
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Series r(x.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank, 1-based
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(const Series& a, const Series& b) {
    return pearson(ranks(a), ranks(b));
}

enum class MeasureSubset { Combined, Articulatory, Acoustic };

// By-item feature vectors for clustering: selected measure columns,
// z-scored across items so no measure dominates the distances.
inline std::pair<std::vector<std::string>, std::vector<Series>> cluster_features(
    const ByItemMeans& means, MeasureSubset subset = MeasureSubset::Combined) {
    std::vector<std::size_t> cols;
    switch (subset) {
        case MeasureSubset::Combined: cols = {0, 1, 2, 3}; break;
        case MeasureSubset::Articulatory: cols = {0, 1}; break;
        case MeasureSubset::Acoustic: cols = {2, 3}; break;
    }
    require(means.items.size() >= 2, "cluster_features: need at least 2 items");
    std::vector<Series> z;
    for (std::size_t c : cols) {
        const Series& col = means.columns[c];
        const double m = mean(col), sd = stddev_pop(col);
        require(sd > 0.0, "cluster_features: zero variance in measure " + measure_names()[c]);
        Series zc(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) zc[i] = (col[i] - m) / sd;
        z.push_back(std::move(zc));
    }
    std::vector<Series> points(means.items.size(), Series(cols.size(), 0.0));
    for (std::size_t i = 0; i < means.items.size(); ++i)
        for (std::size_t c = 0; c < cols.size(); ++c) points[i][c] = z[c][i];
    return {means.items, points};
}

struct ClusterSummary {
    int cluster_id = 0;
    std::vector<std::string> items;
    std::map<std::string, Series> measure_values;  // per measure, pooled member-token values
    double mean_art_pc1 = 0.0;
    double mean_ac_pc1 = 0.0;
    Series art_curve;  // reconstruction from the cluster-mean articulatory PC1
    Series ac_curve;
};

inline std::vector<ClusterSummary> summarize_clusters(const MeasuresTable& table,
                                                      const std::map<std::string, int>& assignment) {
    const ByItemMeans means = by_item_means(table);
    std::map<int, ClusterSummary> acc;
    for (std::size_t i = 0; i < means.items.size(); ++i) {
        const auto it = assignment.find(means.items[i]);
        require(it != assignment.end(),
                "summarize_clusters: item " + means.items[i] + " missing from assignment");
        auto& cs = acc[it->second];
        cs.cluster_id = it->second;
        cs.items.push_back(means.items[i]);
        cs.mean_art_pc1 += means.columns[1][i];
        cs.mean_ac_pc1 += means.columns[3][i];
    }
    for (auto& [id, cs] : acc) {
        cs.mean_art_pc1 /= static_cast<double>(cs.items.size());
        cs.mean_ac_pc1 /= static_cast<double>(cs.items.size());
    }
    for (const auto& r : table.rows) {
        const auto it = assignment.find(r.item);
        if (it == assignment.end()) continue;
        auto& cs = acc[it->second];
        cs.measure_values["art_euclidean"].push_back(r.art_euclidean);
        cs.measure_values["art_pc1"].push_back(r.art_pc1);
        cs.measure_values["ac_euclidean"].push_back(r.ac_euclidean);
        cs.measure_values["ac_pc1"].push_back(r.ac_pc1);
        cs.measure_values["duration_s"].push_back(r.duration_s);
    }
    std::vector<ClusterSummary> out;
    for (auto& [id, cs] : acc) {
        if (table.art_model.n_components() > 0)
            cs.art_curve = fpca_reconstruct(table.art_model, {cs.mean_art_pc1}, 1);
        else
            cs.art_curve = table.art_model.mean_curve;
        if (table.ac_model.n_components() > 0)
            cs.ac_curve = fpca_reconstruct(table.ac_model, {cs.mean_ac_pc1}, 1);
        else
            cs.ac_curve = table.ac_model.mean_curve;
        out.push_back(std::move(cs));
    }
    return out;
}

struct SimulationRun {
    std::string label;  // unique within the study
    std::string item;
    GestureScore score;
    SimulationConfig config;
    SimOutput output;
    double duration_s = 0.0;  // activation span
    std::vector<ExtremumHit> speed_peaks;
    std::vector<ExtremumHit> speed_minima;
};

struct SimulationStudy {
    std::string name;
    std::vector<SimulationRun> runs;
};

namespace detail {

inline SimulationRun make_run(std::string label, std::string item, GestureScore score,
                              const StudyConfig& cfg) {
    SimulationRun run;
    run.label = std::move(label);
    run.item = std::move(item);
    run.score = std::move(score);
    run.config.tail_after_last_offset = cfg.tail_s;
    run.output = simulate_score(run.score, run.config);
    run.duration_s = run.score.last_offset_s();
    const Series speed = run.output.speed();
    run.speed_peaks = find_speed_peaks(speed, cfg.prominence_frac);
    run.speed_minima = find_speed_minima(speed, cfg.prominence_frac);
    return run;
}

}  // namespace detail

// Three model variants for a one-peak vowel ("bar") and a two-peak vowel
// ("buy"): (a) one short target vs two anti-phase targets, (b) one long
// target, (c) two identical anti-phase targets vs the two-target vowel.
inline SimulationStudy run_target_structure_study(const StudyConfig& cfg = {}) {
    SimulationStudy study;
    study.name = "fig14-variants";
    const GestureScore buy = detail::two_target_score(0.3, 0.9, cfg);
    const double lag = buy.gestures[1].onset_s;
    study.runs.push_back(
        detail::make_run("a-bar-one-target", "bar",
                         detail::one_target_score(0.3, cfg.activation_s, cfg), cfg));
    study.runs.push_back(detail::make_run("a-buy-two-target", "buy", buy, cfg));
    study.runs.push_back(
        detail::make_run("b-bar-long-target", "bar",
                         detail::one_target_score(0.3, cfg.activation_s + lag, cfg), cfg));
    study.runs.push_back(
        detail::make_run("c-bar-two-identical", "bar", detail::two_target_score(0.3, 0.3, cfg), cfg));
    study.runs.push_back(detail::make_run("c-buy-two-target", "buy", buy, cfg));
    return study;
}

// Nucleus target swept over {0.9, 0.8, 0.7, 0.6} against a fixed 0.9
// offglide; the second speed peak grows as the nucleus moves away.
inline SimulationStudy run_nucleus_sweep_study(const StudyConfig& cfg = {}) {
    SimulationStudy study;
    study.name = "fig16-sweep";
    for (double nucleus : {0.9, 0.8, 0.7, 0.6}) {
        char label[32];
        std::snprintf(label, sizeof label, "nucleus-%.1f", nucleus);
        study.runs.push_back(
            detail::make_run(label, label, detail::two_target_score(nucleus, 0.9, cfg), cfg));
    }
    return study;
}

struct DurationStats {
    int n = 0;
    double mean_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};

namespace detail {

inline std::map<std::string, DurationStats> duration_stats(
    const std::vector<std::pair<std::string, double>>& samples) {
    require(!samples.empty(), "duration_table: nothing to summarize");
    std::map<std::string, DurationStats> out;
    for (const auto& [key, dur] : samples) {
        auto& st = out[key];
        if (st.n == 0) {
            st = {1, dur, dur, dur};
        } else {
            st.mean_s = (st.mean_s * st.n + dur) / (st.n + 1);
            st.min_s = std::min(st.min_s, dur);
            st.max_s = std::max(st.max_s, dur);
            ++st.n;
        }
    }
    return out;
}

}  // namespace detail

inline std::map<std::string, DurationStats> duration_table(const std::vector<VowelToken>& tokens) {
    std::vector<std::pair<std::string, double>> samples;
    for (const auto& t : tokens) samples.emplace_back(t.trajectory.item, vowel_duration(t));
    return detail::duration_stats(samples);
}

inline std::map<std::string, DurationStats> duration_table(const SimulationStudy& study) {
    std::vector<std::pair<std::string, double>> samples;
    for (const auto& r : study.runs) samples.emplace_back(r.label, r.duration_s);
    return detail::duration_stats(samples);
}

}  // namespace vdyn
