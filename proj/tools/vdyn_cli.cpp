// Command-line front end: simulate gesture scores, analyze trajectory
// corpora, cluster measures, fit the cubic detuning term, and generate the
// synthetic corpus. Every command collects its outputs in memory and writes
// them in one pass together with a manifest that reproduces the run.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "vdyn/io.hpp"
#include "vdyn/synthetic.hpp"

namespace fs = std::filesystem;
using vdyn::json;
using vdyn::OutputBundle;
using vdyn::validation_error;

namespace {

std::string abs_path(const std::string& p) {
    return fs::absolute(fs::path(p)).lexically_normal().string();
}

void finalize_manifest(OutputBundle& bundle, const std::string& command, const json& params) {
    auto names = bundle.names();
    names.push_back("manifest.json");
    std::sort(names.begin(), names.end());
    bundle.add("manifest.json", vdyn::make_manifest(command, params, names).dump(2) + "\n");
}

// ---- simulate ----------------------------------------------------------------

vdyn::StudyConfig study_config_from(const json& p) {
    vdyn::StudyConfig cfg;
    cfg.stiffness_k = p.at("stiffness_k").get<double>();
    cfg.cubic_d = p.at("cubic_d").get<double>();
    cfg.strength_ratio = p.at("strength_ratio").get<double>();
    cfg.activation_s = p.at("activation_s").get<double>();
    cfg.frequency_hz = p.at("frequency_hz").get<double>();
    cfg.tail_s = p.at("tail_s").get<double>();
    cfg.prominence_frac = p.at("prominence_frac").get<double>();
    return cfg;
}

OutputBundle run_simulate(const json& p) {
    OutputBundle out;
    const std::string mode = p.at("mode").get<std::string>();
    if (mode == "study") {
        const vdyn::StudyConfig cfg = study_config_from(p);
        const std::string study = p.at("study").get<std::string>();
        vdyn::SimulationStudy st;
        if (study == "fig14")
            st = vdyn::run_target_structure_study(cfg);
        else if (study == "fig16")
            st = vdyn::run_nucleus_sweep_study(cfg);
        else
            throw validation_error("unknown study '" + study + "' (expected fig14 or fig16)");
        for (const auto& run : st.runs)
            out.add("sim_" + run.label + ".csv", vdyn::sim_output_csv(run.output));
        out.add("peaks.csv", vdyn::peaks_csv(st));
        out.add("durations.csv", vdyn::duration_table_csv(vdyn::duration_table(st)));
        std::cout << st.name << ": " << st.runs.size() << " runs\n";
    } else if (mode == "score") {
        const vdyn::ScoreDocument doc = vdyn::score_document_from_json(p.at("score"));
        const vdyn::GestureScore score = vdyn::resolve_score(doc);
        vdyn::SimulationConfig cfg;
        cfg.dt = p.at("dt").get<double>();
        cfg.initial_position = p.at("initial_position").get<double>();
        cfg.initial_velocity = p.at("initial_velocity").get<double>();
        cfg.tail_after_last_offset = p.at("tail_s").get<double>();
        const double prominence = p.at("prominence_frac").get<double>();

        vdyn::SimulationStudy st;
        st.name = "score";
        vdyn::SimulationRun run;
        run.label = "score";
        run.item = "score";
        run.score = score;
        run.config = cfg;
        run.output = vdyn::simulate_score(score, cfg);
        run.duration_s = score.last_offset_s();
        const vdyn::Series speed = run.output.speed();
        run.speed_peaks = vdyn::find_speed_peaks(speed, prominence);
        run.speed_minima = vdyn::find_speed_minima(speed, prominence);
        st.runs.push_back(std::move(run));

        out.add("simulation.csv", vdyn::sim_output_csv(st.runs.front().output));
        out.add("peaks.csv", vdyn::peaks_csv(st));
        std::cout << "score: " << st.runs.front().output.time.size() << " samples, "
                  << st.runs.front().speed_peaks.size() << " speed peaks\n";
    } else {
        throw validation_error("unknown simulate mode '" + mode + "'");
    }
    finalize_manifest(out, "simulate", p);
    return out;
}

// ---- analyze -----------------------------------------------------------------

bool has_all_channels(const vdyn::Trajectory& traj, const std::vector<std::string>& names) {
    for (const auto& n : names)
        if (!traj.has_channel(n)) return false;
    return true;
}

OutputBundle run_analyze(const json& p) {
    const fs::path data_dir = p.at("data_dir").get<std::string>();
    vdyn::PipelineConfig cfg;
    cfg.cutoff_hz = p.at("cutoff_hz").get<double>();
    cfg.grid_size = p.at("grid_size").get<int>();
    cfg.retain_fraction = p.at("retain_fraction").get<double>();
    cfg.lo_frac = p.at("lo_frac").get<double>();
    cfg.hi_frac = p.at("hi_frac").get<double>();
    cfg.mid_keep_frac = p.at("mid_keep_frac").get<double>();
    const double art_tail = p.at("art_tail_s").get<double>();

    if (!fs::is_directory(data_dir))
        throw validation_error("data directory not found: " + data_dir.string());
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(data_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty())
        throw validation_error("no trajectory files (*.csv) in " + data_dir.string());

    std::vector<vdyn::VowelToken> art_tokens, ac_tokens;
    std::vector<vdyn::SkipNote> ingest_skips;
    for (const auto& csv : csvs) {
        vdyn::VowelToken token;
        try {
            token = vdyn::load_token(csv, 0.0);
        } catch (const vdyn::error& e) {
            ingest_skips.push_back({csv.filename().string(), e.what()});
            continue;
        }
        bool used = false;
        if (has_all_channels(token.trajectory, cfg.art_channels)) {
            vdyn::VowelToken art = token;
            art.tail_s = art_tail;
            try {
                art.validate();
                art_tokens.push_back(std::move(art));
                used = true;
            } catch (const vdyn::error& e) {
                ingest_skips.push_back({token.trajectory.token_id, e.what()});
            }
        }
        if (has_all_channels(token.trajectory, cfg.ac_channels)) {
            ac_tokens.push_back(token);
            used = true;
        }
        if (!used && (ingest_skips.empty() || ingest_skips.back().token_id != token.trajectory.token_id))
            ingest_skips.push_back(
                {token.trajectory.token_id, "unrecognized channel set; token feeds no branch"});
    }

    vdyn::MeasuresTable table = vdyn::compute_measures(art_tokens, ac_tokens, cfg);
    std::vector<vdyn::SkipNote> skipped = ingest_skips;
    skipped.insert(skipped.end(), table.skipped.begin(), table.skipped.end());

    OutputBundle out;
    out.add("measures.csv", vdyn::measures_csv(table));
    out.add("fpca_art.json", vdyn::fpca_model_json(table.art_model).dump(2) + "\n");
    out.add("fpca_ac.json", vdyn::fpca_model_json(table.ac_model).dump(2) + "\n");
    out.add("scores_art.csv", vdyn::scores_csv(table.art_model, table.art_token_ids));
    out.add("scores_ac.csv", vdyn::scores_csv(table.ac_model, table.ac_token_ids));
    const vdyn::Series multipliers{-2.0, -1.0, 0.0, 1.0, 2.0};
    out.add("perturbations_art.csv", vdyn::perturbations_csv(table.art_model, multipliers));
    out.add("perturbations_ac.csv", vdyn::perturbations_csv(table.ac_model, multipliers));
    out.add("durations.csv", vdyn::duration_table_csv(vdyn::duration_table(art_tokens)));
    out.add("skipped.csv", vdyn::skip_notes_csv(skipped));
    out.add("warnings.csv", vdyn::skip_notes_csv(table.warnings));

    if (!table.rows.empty()) {
        const auto means = vdyn::by_item_means(table);
        bool usable = means.items.size() >= 3;
        for (const auto& col : means.columns)
            if (usable && vdyn::stddev_pop(col) == 0.0) usable = false;
        if (usable)
            out.add("correlations.csv",
                    vdyn::correlation_csv(vdyn::correlation_matrix(means.columns),
                                          vdyn::measure_names()));
    }

    finalize_manifest(out, "analyze", p);
    std::cout << "rows: " << table.rows.size() << "\n"
              << "warnings: " << skipped.size() + table.warnings.size() << "\n";
    return out;
}

// ---- cluster -----------------------------------------------------------------

OutputBundle run_cluster(const json& p) {
    vdyn::MeasuresTable table;
    table.rows = vdyn::load_measures_csv(p.at("measures_csv").get<std::string>());
    const std::string art_model = p.at("art_model").get<std::string>();
    const std::string ac_model = p.at("ac_model").get<std::string>();
    if (!art_model.empty()) table.art_model = vdyn::load_fpca_model(art_model);
    if (!ac_model.empty()) table.ac_model = vdyn::load_fpca_model(ac_model);

    const int k = p.at("k").get<int>();
    const std::string subset_name = p.at("subset").get<std::string>();
    vdyn::MeasureSubset subset;
    if (subset_name == "combined")
        subset = vdyn::MeasureSubset::Combined;
    else if (subset_name == "articulatory")
        subset = vdyn::MeasureSubset::Articulatory;
    else if (subset_name == "acoustic")
        subset = vdyn::MeasureSubset::Acoustic;
    else
        throw validation_error("unknown subset '" + subset_name +
                               "' (expected combined, articulatory or acoustic)");

    const auto means = vdyn::by_item_means(table);
    vdyn::require(means.items.size() >= 2, "clustering needs at least 2 items, got " +
                                               std::to_string(means.items.size()));
    vdyn::require(k >= 1, "k must be >= 1");
    vdyn::require(k <= static_cast<int>(means.items.size()),
                  "k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(means.items.size()) + " available items");

    const auto [labels, points] = vdyn::cluster_features(means, subset);
    const vdyn::Dendrogram tree = vdyn::ward_linkage(labels, points);
    const auto assignment = vdyn::cut_tree(tree, k);
    const auto summaries = vdyn::summarize_clusters(table, assignment);

    OutputBundle out;
    out.add("dendrogram.json", vdyn::dendrogram_json(tree).dump(2) + "\n");
    out.add("merge_heights.csv", vdyn::merge_heights_csv(tree));
    out.add("assignment.csv", vdyn::assignment_csv(assignment));
    out.add("summaries.json", vdyn::cluster_summaries_json(summaries).dump(2) + "\n");
    finalize_manifest(out, "cluster", p);
    std::cout << "clusters: " << k << " over " << means.items.size() << " items\n";
    return out;
}

// ---- fit-d -------------------------------------------------------------------

OutputBundle run_fit_d(const json& p) {
    const auto [ref_time, ref_speed] =
        vdyn::load_time_series_csv(p.at("reference_csv").get<std::string>());
    const vdyn::ScoreDocument doc = vdyn::score_document_from_json(p.at("score"));
    const vdyn::GestureScore score = vdyn::resolve_score(doc);
    vdyn::SimulationConfig cfg;
    cfg.dt = p.at("dt").get<double>();
    cfg.initial_position = p.at("initial_position").get<double>();
    cfg.initial_velocity = p.at("initial_velocity").get<double>();
    cfg.tail_after_last_offset = p.at("tail_s").get<double>();

    const double reference_ratio = vdyn::time_to_peak_ratio(ref_time, ref_speed);
    const double d = vdyn::fit_cubic_d(reference_ratio, score, cfg,
                                       p.at("d_lo").get<double>(), p.at("d_hi").get<double>());

    vdyn::GestureScore fitted = score;
    for (auto& g : fitted.gestures) g.params.cubic_d = d;
    const vdyn::SimOutput sim = vdyn::simulate_score(fitted, cfg);
    const double achieved = vdyn::time_to_peak_ratio(sim);

    OutputBundle out;
    out.add("fit.json", json{{"cubic_d", d},
                             {"reference_ratio", reference_ratio},
                             {"achieved_ratio", achieved}}
                                .dump(2) +
                            "\n");
    out.add("fitted_simulation.csv", vdyn::sim_output_csv(sim));
    finalize_manifest(out, "fit-d", p);
    std::cout << "cubic_d: " << vdyn::format_double(d) << "\n";
    return out;
}

// ---- gen-synthetic -------------------------------------------------------------

OutputBundle run_gen_synthetic(const json& p) {
    vdyn::SyntheticConfig cfg;
    cfg.n_speakers = p.at("speakers").get<int>();
    cfg.noise_sd_frac = p.at("noise_sd_frac").get<double>();
    cfg.seed = p.at("seed").get<std::uint64_t>();
    cfg.stiffness_k = p.at("stiffness_k").get<double>();
    cfg.cubic_d = p.at("cubic_d").get<double>();
    cfg.strength_ratio = p.at("strength_ratio").get<double>();
    cfg.activation_s = p.at("activation_s").get<double>();
    cfg.frequency_hz = p.at("frequency_hz").get<double>();
    cfg.art_rate_hz = p.at("art_rate_hz").get<double>();
    cfg.ac_rate_hz = p.at("ac_rate_hz").get<double>();
    cfg.art_tail_s = p.at("art_tail_s").get<double>();
    cfg.sim_tail_s = p.at("sim_tail_s").get<double>();

    const vdyn::SyntheticCorpus corpus = vdyn::generate_synthetic_corpus(cfg);
    OutputBundle out;
    for (const auto& tok : corpus.art_tokens) {
        out.add(tok.trajectory.token_id + "_art.csv", vdyn::trajectory_csv(tok.trajectory));
        out.add(tok.trajectory.token_id + "_art.json", vdyn::sidecar_json(tok).dump(2) + "\n");
    }
    for (const auto& tok : corpus.ac_tokens) {
        out.add(tok.trajectory.token_id + "_ac.csv", vdyn::trajectory_csv(tok.trajectory));
        out.add(tok.trajectory.token_id + "_ac.json", vdyn::sidecar_json(tok).dump(2) + "\n");
    }
    finalize_manifest(out, "gen-synthetic", p);
    std::cout << "tokens: " << corpus.art_tokens.size() << " articulatory, "
              << corpus.ac_tokens.size() << " acoustic\n";
    return out;
}

// ---- dispatch ------------------------------------------------------------------

OutputBundle dispatch(const std::string& command, const json& params) {
    if (command == "simulate") return run_simulate(params);
    if (command == "analyze") return run_analyze(params);
    if (command == "cluster") return run_cluster(params);
    if (command == "fit-d") return run_fit_d(params);
    if (command == "gen-synthetic") return run_gen_synthetic(params);
    throw validation_error("unknown command in manifest: '" + command + "'");
}

struct PendingRun {
    std::string command;
    json params;
    std::string out_dir;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"articulatory gesture dynamics: simulation and vowel measurement pipeline"};
    app.require_subcommand(0, 1);

    std::string manifest_path, manifest_out;
    app.add_option("--from-manifest", manifest_path,
                   "re-run a previous command from its manifest file");
    app.add_option("--out", manifest_out, "output directory for --from-manifest");

    PendingRun pending;

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a gesture score or a built-in study");
    std::string sim_study, sim_score_file, sim_out;
    double sim_k = 2000.0, sim_d = 600.0, sim_ratio = 100.0, sim_act = 0.250, sim_freq = 4.0;
    double sim_tail = 0.075, sim_prom = 0.05, sim_dt = 0.001, sim_x0 = 0.0, sim_v0 = 0.0;
    sim->add_option("--study", sim_study, "built-in study: fig14 or fig16");
    sim->add_option("--score", sim_score_file, "gesture score JSON file");
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--k", sim_k, "gesture stiffness (studies)");
    sim->add_option("--cubic-d", sim_d, "cubic detuning coefficient (studies)");
    sim->add_option("--ratio", sim_ratio, "offglide:nucleus blending strength ratio (studies)");
    sim->add_option("--activation", sim_act, "per-gesture activation duration, s (studies)");
    sim->add_option("--frequency", sim_freq, "timing oscillator frequency, Hz (studies)");
    sim->add_option("--tail", sim_tail, "simulated tail past the last offset, s");
    sim->add_option("--prominence", sim_prom, "peak prominence threshold, fraction of max");
    sim->add_option("--dt", sim_dt, "integration step, s (score mode)");
    sim->add_option("--x0", sim_x0, "initial position (score mode)");
    sim->add_option("--v0", sim_v0, "initial velocity (score mode)");
    sim->callback([&] {
        const bool study = !sim_study.empty(), score = !sim_score_file.empty();
        if (study == score)
            throw validation_error("simulate needs exactly one of --study or --score");
        json p;
        if (study) {
            p = json{{"mode", "study"},          {"study", sim_study},
                     {"stiffness_k", sim_k},     {"cubic_d", sim_d},
                     {"strength_ratio", sim_ratio}, {"activation_s", sim_act},
                     {"frequency_hz", sim_freq}, {"tail_s", sim_tail},
                     {"prominence_frac", sim_prom}};
        } else {
            const auto doc = vdyn::load_score_document(sim_score_file);
            p = json{{"mode", "score"},
                     {"score", vdyn::score_document_to_json(doc)},
                     {"dt", sim_dt},
                     {"initial_position", sim_x0},
                     {"initial_velocity", sim_v0},
                     {"tail_s", sim_tail},
                     {"prominence_frac", sim_prom}};
        }
        pending = {"simulate", std::move(p), sim_out};
    });

    // analyze
    auto* ana = app.add_subcommand("analyze", "compute diphthongisation measures for a corpus");
    std::string ana_data, ana_out;
    double ana_cutoff = 10.0, ana_retain = 0.99, ana_tail = 0.075;
    double ana_lo = 0.10, ana_hi = 0.90, ana_mid = 0.90;
    int ana_grid = 101;
    ana->add_option("--data", ana_data, "directory of trajectory CSV + sidecar JSON pairs")
        ->required();
    ana->add_option("--out", ana_out, "output directory")->required();
    ana->add_option("--cutoff", ana_cutoff, "low-pass cutoff, Hz");
    ana->add_option("--grid", ana_grid, "normalized time grid size");
    ana->add_option("--retain", ana_retain, "fPCA retained variance fraction");
    ana->add_option("--tail", ana_tail, "articulatory window tail past vowel offset, s");
    ana->add_option("--lo", ana_lo, "displacement window start, fraction of vowel");
    ana->add_option("--hi", ana_hi, "displacement window end, fraction of vowel");
    ana->add_option("--mid-keep", ana_mid, "acoustic branch kept mid fraction of the vowel");
    ana->callback([&] {
        json p{{"data_dir", abs_path(ana_data)},
               {"cutoff_hz", ana_cutoff},
               {"grid_size", ana_grid},
               {"retain_fraction", ana_retain},
               {"art_tail_s", ana_tail},
               {"lo_frac", ana_lo},
               {"hi_frac", ana_hi},
               {"mid_keep_frac", ana_mid}};
        pending = {"analyze", std::move(p), ana_out};
    });

    // cluster
    auto* clu = app.add_subcommand("cluster", "Ward clustering of by-item mean measures");
    std::string clu_measures, clu_subset = "combined", clu_art_model, clu_ac_model, clu_out;
    int clu_k = 0;
    clu->add_option("--measures", clu_measures, "measures CSV from analyze")->required();
    clu->add_option("--k", clu_k, "number of clusters")->required();
    clu->add_option("--subset", clu_subset, "combined, articulatory or acoustic");
    clu->add_option("--art-model", clu_art_model, "articulatory fPCA model JSON (for summaries)");
    clu->add_option("--ac-model", clu_ac_model, "acoustic fPCA model JSON (for summaries)");
    clu->add_option("--out", clu_out, "output directory")->required();
    clu->callback([&] {
        json p{{"measures_csv", abs_path(clu_measures)},
               {"k", clu_k},
               {"subset", clu_subset},
               {"art_model", clu_art_model.empty() ? std::string() : abs_path(clu_art_model)},
               {"ac_model", clu_ac_model.empty() ? std::string() : abs_path(clu_ac_model)}};
        pending = {"cluster", std::move(p), clu_out};
    });

    // fit-d
    auto* fit = app.add_subcommand("fit-d", "fit the cubic detuning term to a reference speed curve");
    std::string fit_ref, fit_score, fit_out;
    double fit_dlo = 0.0, fit_dhi = 0.0, fit_dt = 0.001, fit_x0 = 0.0, fit_v0 = 0.0,
           fit_tail = 0.075;
    fit->add_option("--reference", fit_ref, "CSV with time and speed columns")->required();
    fit->add_option("--score", fit_score, "gesture score JSON file")->required();
    fit->add_option("--out", fit_out, "output directory")->required();
    fit->add_option("--d-lo", fit_dlo, "lower search bound");
    fit->add_option("--d-hi", fit_dhi, "upper search bound (0 = automatic)");
    fit->add_option("--dt", fit_dt, "integration step, s");
    fit->add_option("--x0", fit_x0, "initial position");
    fit->add_option("--v0", fit_v0, "initial velocity");
    fit->add_option("--tail", fit_tail, "simulated tail past the last offset, s");
    fit->callback([&] {
        const auto doc = vdyn::load_score_document(fit_score);
        json p{{"reference_csv", abs_path(fit_ref)},
               {"score", vdyn::score_document_to_json(doc)},
               {"d_lo", fit_dlo},
               {"d_hi", fit_dhi},
               {"dt", fit_dt},
               {"initial_position", fit_x0},
               {"initial_velocity", fit_v0},
               {"tail_s", fit_tail}};
        pending = {"fit-d", std::move(p), fit_out};
    });

    // gen-synthetic
    auto* gen = app.add_subcommand("gen-synthetic", "generate the synthetic vowel corpus");
    std::string gen_out;
    int gen_speakers = 2;
    std::uint64_t gen_seed = 1;
    double gen_noise = 0.05, gen_k = 2000.0, gen_d = 600.0, gen_ratio = 100.0, gen_act = 0.250,
           gen_freq = 4.0, gen_art_rate = 250.0, gen_ac_rate = 500.0, gen_art_tail = 0.075,
           gen_sim_tail = 0.080;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--speakers", gen_speakers, "number of pseudo-speakers");
    gen->add_option("--seed", gen_seed, "noise RNG seed");
    gen->add_option("--noise", gen_noise, "noise SD as a fraction of channel peak");
    gen->add_option("--k", gen_k, "gesture stiffness");
    gen->add_option("--cubic-d", gen_d, "cubic detuning coefficient");
    gen->add_option("--ratio", gen_ratio, "offglide:nucleus blending strength ratio");
    gen->add_option("--activation", gen_act, "per-gesture activation duration, s");
    gen->add_option("--frequency", gen_freq, "timing oscillator frequency, Hz");
    gen->add_option("--art-rate", gen_art_rate, "articulatory sample rate, Hz");
    gen->add_option("--ac-rate", gen_ac_rate, "acoustic sample rate, Hz");
    gen->add_option("--art-tail", gen_art_tail, "articulatory analysis tail, s");
    gen->add_option("--sim-tail", gen_sim_tail, "simulated tail past the vowel, s");
    gen->callback([&] {
        json p{{"speakers", gen_speakers},
               {"seed", gen_seed},
               {"noise_sd_frac", gen_noise},
               {"stiffness_k", gen_k},
               {"cubic_d", gen_d},
               {"strength_ratio", gen_ratio},
               {"activation_s", gen_act},
               {"frequency_hz", gen_freq},
               {"art_rate_hz", gen_art_rate},
               {"ac_rate_hz", gen_ac_rate},
               {"art_tail_s", gen_art_tail},
               {"sim_tail_s", gen_sim_tail}};
        pending = {"gen-synthetic", std::move(p), gen_out};
    });

    try {
        app.parse(argc, argv);

        if (pending.command.empty()) {
            if (manifest_path.empty()) {
                std::cerr << app.help();
                return 2;
            }
            if (manifest_out.empty())
                throw validation_error("--from-manifest needs --out for the new output directory");
            const json doc = vdyn::load_manifest(manifest_path);
            pending = {doc.at("command").get<std::string>(), doc.at("parameters"), manifest_out};
        } else if (!manifest_path.empty()) {
            throw validation_error("--from-manifest cannot be combined with a subcommand");
        }

        const OutputBundle bundle = dispatch(pending.command, pending.params);
        bundle.write_all(pending.out_dir);
        std::cout << "wrote " << bundle.names().size() << " files to " << pending.out_dir << "\n";
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
