#pragma once

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "vdyn/clustering.hpp"
#include "vdyn/common.hpp"
#include "vdyn/coordination.hpp"
#include "vdyn/fpca.hpp"
#include "vdyn/gesture.hpp"
#include "vdyn/kinematics.hpp"
#include "vdyn/pipeline.hpp"

namespace vdyn {

using json = nlohmann::json;

// Shortest round-trip decimal representation; identical doubles always
// print identically, which is what makes re-runs byte-comparable.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw validation_error(context + ": not a number: '" + std::string(s) + "'");
    return v;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

inline void require_plain_field(const std::string& s, const std::string& context) {
    require(s.find(',') == std::string::npos && s.find('\n') == std::string::npos,
            context + ": field may not contain commas or newlines: '" + s + "'");
}

}  // namespace detail

// Collects every output in memory; nothing touches the filesystem until
// write_all, so a failing command leaves no partial files behind.
class OutputBundle {
  public:
    void add(std::string name, std::string content) {
        for (const auto& [n, c] : files_)
            if (n == name) throw error("duplicate output file: " + name);
        files_.emplace_back(std::move(name), std::move(content));
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(files_.size());
        for (const auto& [n, c] : files_) out.push_back(n);
        std::sort(out.begin(), out.end());
        return out;
    }

    void write_all(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : files_) {
            std::ofstream f(dir / name, std::ios::binary);
            if (!f) throw error("cannot open output file: " + (dir / name).string());
            f << content;
            if (!f) throw error("failed writing output file: " + (dir / name).string());
        }
    }

  private:
    std::vector<std::pair<std::string, std::string>> files_;
};

// ---- gesture score JSON ----------------------------------------------------

inline PhaseRelation relation_from_string(const std::string& s) {
    if (s == "in-phase") return PhaseRelation::InPhase;
    if (s == "anti-phase") return PhaseRelation::AntiPhase;
    if (s == "none") return PhaseRelation::None;
    throw validation_error("unknown phase relation: '" + s + "'");
}

inline std::string relation_to_string(PhaseRelation r) {
    switch (r) {
        case PhaseRelation::InPhase: return "in-phase";
        case PhaseRelation::AntiPhase: return "anti-phase";
        default: return "none";
    }
}

// A score as written in a file: gestures plus either explicit onsets or a
// coupling block from which onsets are derived.
struct ScoreDocument {
    GestureScore score;
    bool has_coupling = false;
    struct Pair {
        int i = 0;
        int j = 0;
        PhaseRelation relation = PhaseRelation::None;
        double strength = 2.0;
    };
    std::vector<Pair> pairs;
    double frequency_hz = 4.0;
    std::vector<bool> onset_given;
};

inline ScoreDocument score_document_from_json(const json& doc) {
    ScoreDocument out;
    require(doc.is_object() && doc.contains("gestures") && doc["gestures"].is_array(),
            "score JSON must be an object with a 'gestures' array");
    for (const auto& g : doc["gestures"]) {
        require(g.is_object(), "each gesture must be a JSON object");
        Gesture gest;
        require(g.contains("target"), "gesture is missing 'target'");
        gest.params.target = g["target"].get<double>();
        if (g.contains("tract_variable")) gest.tract_variable = g["tract_variable"].get<std::string>();
        if (g.contains("k")) gest.params.stiffness_k = g["k"].get<double>();
        if (g.contains("d")) gest.params.cubic_d = g["d"].get<double>();
        if (g.contains("blending_strength"))
            gest.params.blending_strength = g["blending_strength"].get<double>();
        if (g.contains("duration_s")) gest.duration_s = g["duration_s"].get<double>();
        if (g.contains("role")) gest.role = g["role"].get<std::string>();
        out.onset_given.push_back(g.contains("onset_s"));
        if (g.contains("onset_s")) gest.onset_s = g["onset_s"].get<double>();
        out.score.gestures.push_back(std::move(gest));
    }
    if (doc.contains("coupling")) {
        const auto& c = doc["coupling"];
        require(c.is_object() && c.contains("pairs") && c["pairs"].is_array(),
                "'coupling' must be an object with a 'pairs' array");
        out.has_coupling = true;
        if (c.contains("frequency_hz")) out.frequency_hz = c["frequency_hz"].get<double>();
        for (const auto& p : c["pairs"]) {
            ScoreDocument::Pair pair;
            require(p.contains("i") && p.contains("j") && p.contains("relation"),
                    "coupling pair needs 'i', 'j' and 'relation'");
            pair.i = p["i"].get<int>();
            pair.j = p["j"].get<int>();
            pair.relation = relation_from_string(p["relation"].get<std::string>());
            if (p.contains("strength")) pair.strength = p["strength"].get<double>();
            out.pairs.push_back(pair);
        }
    }
    return out;
}

inline json score_document_to_json(const ScoreDocument& doc) {
    json j;
    j["gestures"] = json::array();
    for (std::size_t i = 0; i < doc.score.gestures.size(); ++i) {
        const auto& g = doc.score.gestures[i];
        json gj{{"tract_variable", g.tract_variable}, {"target", g.params.target},
                {"k", g.params.stiffness_k},          {"d", g.params.cubic_d},
                {"blending_strength", g.params.blending_strength},
                {"duration_s", g.duration_s},         {"role", g.role}};
        const bool given = i >= doc.onset_given.size() || doc.onset_given[i];
        if (given) gj["onset_s"] = g.onset_s;
        j["gestures"].push_back(std::move(gj));
    }
    if (doc.has_coupling) {
        json pairs = json::array();
        for (const auto& p : doc.pairs)
            pairs.push_back(json{{"i", p.i},
                                 {"j", p.j},
                                 {"relation", relation_to_string(p.relation)},
                                 {"strength", p.strength}});
        j["coupling"] = json{{"pairs", std::move(pairs)}, {"frequency_hz", doc.frequency_hz}};
    }
    return j;
}

// Turns a document into a runnable score. With a coupling block present the
// onsets come from the settled oscillator phases; mixing the two onset
// sources is rejected.
inline GestureScore resolve_score(const ScoreDocument& doc) {
    GestureScore score = doc.score;
    if (!doc.has_coupling) {
        score.validate();
        return score;
    }
    for (std::size_t i = 0; i < doc.onset_given.size(); ++i)
        require(!doc.onset_given[i],
                "gesture " + std::to_string(i) +
                    " has an explicit onset_s but the score also has a coupling block");
    require(!doc.pairs.empty(), "coupling block has no pairs");

    auto graph = CouplingGraph::make(static_cast<int>(score.gestures.size()), doc.frequency_hz);
    for (const auto& p : doc.pairs) {
        require(p.relation != PhaseRelation::None, "coupling pair relation may not be 'none'");
        graph.set_pair(p.i, p.j, p.relation, p.strength);
    }
    // Distinct starting phases so the integration never sits on an unstable
    // symmetric equilibrium.
    std::vector<double> init(score.gestures.size(), 0.0);
    for (std::size_t i = 0; i < init.size(); ++i) init[i] = static_cast<double>(i);
    const auto solution = integrate_oscillators(graph, init);
    require(solution.converged, "coupling graph did not settle; cannot derive onsets");
    std::vector<double> durations;
    durations.reserve(score.gestures.size());
    for (const auto& g : score.gestures) durations.push_back(g.duration_s);
    const auto intervals = schedule_from_phases(solution, durations);
    for (std::size_t i = 0; i < score.gestures.size(); ++i)
        score.gestures[i].onset_s = intervals[i].onset_s;
    score.validate();
    return score;
}

inline ScoreDocument load_score_document(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open score file: " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw validation_error("score file " + path.string() + ": " + e.what());
    }
    return score_document_from_json(doc);
}

// ---- simulation output CSV -------------------------------------------------

inline std::string sim_output_csv(const SimOutput& out) {
    std::string s = "time_s,position,velocity,active_count\n";
    for (std::size_t i = 0; i < out.time.size(); ++i) {
        s += format_double(out.time[i]);
        s += ',';
        s += format_double(out.position[i]);
        s += ',';
        s += format_double(out.velocity[i]);
        s += ',';
        s += std::to_string(out.active_gesture_count[i]);
        s += '\n';
    }
    return s;
}

// Reads a reference speed curve. Column 1 is time; the speed column is one
// named "speed", or |velocity| when the file is a simulation output, or
// column 2 as a fallback.
inline std::pair<Series, Series> load_time_series_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open reference file: " + path.string());
    std::string line;
    require(static_cast<bool>(std::getline(f, line)), path.string() + ": empty file");
    const auto header = detail::split_csv_line(line);
    require(header.size() >= 2, path.string() + ": need at least 2 columns");
    std::size_t value_col = 1;
    bool magnitude = false;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == "speed") {
            value_col = c;
            break;
        }
        if (header[c] == "velocity") {
            value_col = c;
            magnitude = true;
        }
    }
    Series time, value;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        require(fields.size() > value_col, path.string() + " line " + std::to_string(lineno) +
                                               ": too few columns");
        const std::string ctx = path.string() + " line " + std::to_string(lineno);
        time.push_back(parse_double(fields[0], ctx));
        const double v = parse_double(fields[value_col], ctx);
        value.push_back(magnitude ? std::abs(v) : v);
    }
    require(time.size() >= 3, path.string() + ": need at least 3 samples");
    return {std::move(time), std::move(value)};
}

// ---- trajectory CSV + sidecar ----------------------------------------------

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string s;
    for (std::size_t c = 0; c < traj.channel_names.size(); ++c) {
        if (c) s += ',';
        detail::require_plain_field(traj.channel_names[c], "channel name");
        s += traj.channel_names[c];
    }
    s += '\n';
    for (std::size_t i = 0; i < traj.n_samples(); ++i) {
        for (std::size_t c = 0; c < traj.channels.size(); ++c) {
            if (c) s += ',';
            s += format_double(traj.channels[c][i]);
        }
        s += '\n';
    }
    return s;
}

inline json sidecar_json(const VowelToken& token) {
    return json{{"sample_rate_hz", token.trajectory.sample_rate_hz},
                {"speaker", token.trajectory.speaker},
                {"item", token.trajectory.item},
                {"token_id", token.trajectory.token_id},
                {"vowel_onset_s", token.vowel_onset_s},
                {"vowel_offset_s", token.vowel_offset_s}};
}

// Reads one CSV+sidecar pair. The tail is an analysis parameter, not data,
// so the caller supplies it.
inline VowelToken load_token(const std::filesystem::path& csv_path, double tail_s) {
    std::ifstream f(csv_path);
    if (!f) throw validation_error("cannot open trajectory file: " + csv_path.string());
    std::string line;
    require(static_cast<bool>(std::getline(f, line)), csv_path.string() + ": empty file");

    VowelToken token;
    token.trajectory.channel_names = detail::split_csv_line(line);
    require(!token.trajectory.channel_names.empty(), csv_path.string() + ": no header");
    token.trajectory.channels.assign(token.trajectory.channel_names.size(), Series{});
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        require(fields.size() == token.trajectory.channel_names.size(),
                csv_path.string() + " line " + std::to_string(lineno) + ": expected " +
                    std::to_string(token.trajectory.channel_names.size()) + " fields, got " +
                    std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c)
            token.trajectory.channels[c].push_back(parse_double(
                fields[c], csv_path.string() + " line " + std::to_string(lineno)));
    }

    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    std::ifstream sf(sidecar);
    if (!sf) throw validation_error("missing sidecar: " + sidecar.string());
    json meta;
    try {
        meta = json::parse(sf);
    } catch (const json::parse_error& e) {
        throw validation_error("sidecar " + sidecar.string() + ": " + e.what());
    }
    for (const char* field :
         {"sample_rate_hz", "speaker", "item", "token_id", "vowel_onset_s", "vowel_offset_s"})
        require(meta.contains(field), "sidecar " + sidecar.string() + " is missing '" +
                                          std::string(field) + "'");
    token.trajectory.sample_rate_hz = meta["sample_rate_hz"].get<double>();
    token.trajectory.speaker = meta["speaker"].get<std::string>();
    token.trajectory.item = meta["item"].get<std::string>();
    token.trajectory.token_id = meta["token_id"].get<std::string>();
    token.vowel_onset_s = meta["vowel_onset_s"].get<double>();
    token.vowel_offset_s = meta["vowel_offset_s"].get<double>();
    token.tail_s = tail_s;
    token.validate();
    return token;
}

// ---- measures CSV ------------------------------------------------------------

inline std::string measures_csv(const MeasuresTable& table) {
    std::string s = "token_id,speaker,item,art_euclidean,art_pc1,ac_euclidean,ac_pc1,duration_s\n";
    for (const auto& r : table.rows) {
        detail::require_plain_field(r.token_id, "token_id");
        detail::require_plain_field(r.speaker, "speaker");
        detail::require_plain_field(r.item, "item");
        s += r.token_id + ',' + r.speaker + ',' + r.item + ',' + format_double(r.art_euclidean) +
             ',' + format_double(r.art_pc1) + ',' + format_double(r.ac_euclidean) + ',' +
             format_double(r.ac_pc1) + ',' + format_double(r.duration_s) + '\n';
    }
    return s;
}

inline std::vector<DiphthongMeasures> load_measures_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open measures file: " + path.string());
    std::string line;
    require(static_cast<bool>(std::getline(f, line)), path.string() + ": empty file");
    const auto header = detail::split_csv_line(line);
    const std::vector<std::string> expected{"token_id", "speaker", "item", "art_euclidean",
                                            "art_pc1",  "ac_euclidean", "ac_pc1", "duration_s"};
    require(header == expected, path.string() + ": unexpected header");
    std::vector<DiphthongMeasures> rows;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        const std::string ctx = path.string() + " line " + std::to_string(lineno);
        require(fields.size() == expected.size(), ctx + ": wrong field count");
        DiphthongMeasures r;
        r.token_id = fields[0];
        r.speaker = fields[1];
        r.item = fields[2];
        r.art_euclidean = parse_double(fields[3], ctx);
        r.art_pc1 = parse_double(fields[4], ctx);
        r.ac_euclidean = parse_double(fields[5], ctx);
        r.ac_pc1 = parse_double(fields[6], ctx);
        r.duration_s = parse_double(fields[7], ctx);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---- fPCA model JSON ---------------------------------------------------------

inline json fpca_model_json(const FpcaModel& model) {
    return json{{"grid_size", model.grid_size},
                {"mean", model.mean_curve},
                {"components", model.components},
                {"eigenvalues", model.eigenvalues},
                {"variance_explained", model.variance_explained}};
}

inline FpcaModel load_fpca_model(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open model file: " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw validation_error("model " + path.string() + ": " + e.what());
    }
    FpcaModel model;
    model.grid_size = doc.at("grid_size").get<int>();
    model.mean_curve = doc.at("mean").get<Series>();
    model.components = doc.at("components").get<std::vector<Series>>();
    model.eigenvalues = doc.at("eigenvalues").get<Series>();
    model.variance_explained = doc.at("variance_explained").get<Series>();
    return model;
}

inline std::string scores_csv(const FpcaModel& model, const std::vector<std::string>& token_ids) {
    require(token_ids.size() == model.scores.size(), "scores_csv: token/score count mismatch");
    std::string s = "token_id";
    for (int j = 0; j < model.n_components(); ++j) s += ",pc" + std::to_string(j + 1);
    s += '\n';
    for (std::size_t i = 0; i < token_ids.size(); ++i) {
        detail::require_plain_field(token_ids[i], "token_id");
        s += token_ids[i];
        for (double v : model.scores[i]) {
            s += ',';
            s += format_double(v);
        }
        s += '\n';
    }
    return s;
}

inline std::string perturbations_csv(const FpcaModel& model, const Series& multipliers,
                                     int max_components = 4) {
    std::string s = "component,multiplier,grid_index,t_norm,value\n";
    const int n = std::min(max_components, model.n_components());
    for (int c = 0; c < n; ++c) {
        const auto family = perturbation_curves(model, c, multipliers);
        for (std::size_t m = 0; m < multipliers.size(); ++m) {
            for (std::size_t g = 0; g < family[m].size(); ++g) {
                const double t =
                    static_cast<double>(g) / static_cast<double>(family[m].size() - 1);
                s += std::to_string(c + 1) + ',' + format_double(multipliers[m]) + ',' +
                     std::to_string(g) + ',' + format_double(t) + ',' +
                     format_double(family[m][g]) + '\n';
            }
        }
    }
    return s;
}

// ---- clustering outputs --------------------------------------------------------

inline json dendrogram_json(const Dendrogram& tree) {
    json merges = json::array();
    for (const auto& m : tree.merges)
        merges.push_back(json{{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
    return json{{"leaves", tree.leaf_labels}, {"merges", std::move(merges)}};
}

inline std::string merge_heights_csv(const Dendrogram& tree) {
    std::string s = "step,cluster_a,cluster_b,height,size\n";
    for (std::size_t t = 0; t < tree.merges.size(); ++t) {
        const auto& m = tree.merges[t];
        s += std::to_string(t) + ',' + std::to_string(m.a) + ',' + std::to_string(m.b) + ',' +
             format_double(m.height) + ',' + std::to_string(m.size) + '\n';
    }
    return s;
}

inline std::string assignment_csv(const std::map<std::string, int>& assignment) {
    std::string s = "item,cluster\n";
    for (const auto& [item, cluster] : assignment) {
        detail::require_plain_field(item, "item");
        s += item + ',' + std::to_string(cluster) + '\n';
    }
    return s;
}

inline json cluster_summaries_json(const std::vector<ClusterSummary>& summaries) {
    json out = json::array();
    for (const auto& cs : summaries) {
        json j{{"cluster", cs.cluster_id},
               {"items", cs.items},
               {"mean_art_pc1", cs.mean_art_pc1},
               {"mean_ac_pc1", cs.mean_ac_pc1},
               {"measures", cs.measure_values},
               {"art_curve", cs.art_curve},
               {"ac_curve", cs.ac_curve}};
        out.push_back(std::move(j));
    }
    return out;
}

// ---- misc tables ---------------------------------------------------------------

inline std::string duration_table_csv(const std::map<std::string, DurationStats>& table) {
    std::string s = "item,n,mean_s,min_s,max_s\n";
    for (const auto& [item, st] : table) {
        detail::require_plain_field(item, "item");
        s += item + ',' + std::to_string(st.n) + ',' + format_double(st.mean_s) + ',' +
             format_double(st.min_s) + ',' + format_double(st.max_s) + '\n';
    }
    return s;
}

inline std::string peaks_csv(const SimulationStudy& study) {
    std::string s = "run,kind,index,time_s,value,prominence\n";
    for (const auto& run : study.runs) {
        for (const auto& p : run.speed_peaks)
            s += run.label + ",peak," + std::to_string(p.index) + ',' +
                 format_double(run.output.time[p.index]) + ',' + format_double(p.value) + ',' +
                 format_double(p.prominence) + '\n';
        for (const auto& m : run.speed_minima)
            s += run.label + ",minimum," + std::to_string(m.index) + ',' +
                 format_double(run.output.time[m.index]) + ',' + format_double(m.value) + ',' +
                 format_double(m.prominence) + '\n';
    }
    return s;
}

inline std::string correlation_csv(const std::vector<std::vector<double>>& m,
                                   const std::vector<std::string>& names) {
    require(m.size() == names.size(), "correlation_csv: name/matrix size mismatch");
    std::string s = "measure";
    for (const auto& n : names) s += ',' + n;
    s += '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        s += names[i];
        for (double v : m[i]) {
            s += ',';
            s += format_double(v);
        }
        s += '\n';
    }
    return s;
}

inline std::string skip_notes_csv(const std::vector<SkipNote>& notes) {
    std::string s = "token_id,reason\n";
    for (const auto& n : notes) {
        detail::require_plain_field(n.token_id, "token_id");
        std::string reason = n.reason;
        for (char& ch : reason)
            if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
        s += n.token_id + ',' + reason + '\n';
    }
    return s;
}

// ---- manifest --------------------------------------------------------------------

// The manifest records the command, every effective parameter, and the seed,
// but not output locations: re-running it into any directory must reproduce
// the same bytes.
inline json make_manifest(const std::string& command, json parameters,
                          const std::vector<std::string>& output_names) {
    return json{{"command", command}, {"parameters", std::move(parameters)},
                {"outputs", output_names}};
}

inline json load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open manifest: " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw validation_error("manifest " + path.string() + ": " + e.what());
    }
    require(doc.is_object() && doc.contains("command") && doc.contains("parameters"),
            "manifest " + path.string() + " must contain 'command' and 'parameters'");
    return doc;
}

}  // namespace vdyn
