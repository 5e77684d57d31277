// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fail. argv[1] is the path to the command-line binary,
// used by the manifest-replay criterion.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <vdyn/clustering.hpp>
#include <vdyn/io.hpp>
#include <vdyn/pipeline.hpp>
#include <vdyn/synthetic.hpp>

using namespace vdyn;
namespace fs = std::filesystem;

namespace {

int failed = 0;

void report(int n, const std::string& what, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const SimulationRun& run_by_label(const SimulationStudy& study, const std::string& label) {
    for (const auto& r : study.runs)
        if (r.label == label) return r;
    throw std::runtime_error("no run labeled " + label);
}

// Criteria 1 and 2: target-count contrasts at the default settings.
void criterion_1_and_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationStudy study = run_target_structure_study();
    const double elapsed = seconds_since(t0);

    const auto& bar = run_by_label(study, "a-bar-one-target");
    const auto& buy = run_by_label(study, "a-buy-two-target");
    std::ostringstream d1;
    d1 << "bar " << bar.duration_s << " s/" << bar.speed_peaks.size() << " peak(s), buy "
       << buy.duration_s << " s/" << buy.speed_peaks.size() << " peak(s), " << elapsed << " s";
    report(1, "one- vs two-target items differ in duration and peak count",
           std::abs(bar.duration_s - 0.250) <= 0.001 + 1e-12 &&
               std::abs(buy.duration_s - 0.375) <= 0.001 &&
               bar.speed_peaks.size() == 1 && buy.speed_peaks.size() == 2 && elapsed < 1.0,
           d1.str());

    const auto& cbar = run_by_label(study, "c-bar-two-identical");
    std::ostringstream d2;
    d2 << "duration " << cbar.duration_s << " s, " << cbar.speed_peaks.size() << " peak(s)";
    report(2, "two identical anti-phase targets act as one long target",
           cbar.speed_peaks.size() == 1 && std::abs(cbar.duration_s - 0.375) <= 0.001, d2.str());
}

// Criterion 3: the second speed peak grows as the nucleus target recedes.
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationStudy study = run_nucleus_sweep_study();
    const double elapsed = seconds_since(t0);

    bool ok = run_by_label(study, "nucleus-0.9").speed_peaks.size() < 2 && elapsed < 1.0;
    std::vector<double> second;
    for (const auto& label : {"nucleus-0.8", "nucleus-0.7", "nucleus-0.6"}) {
        const auto& run = run_by_label(study, label);
        if (run.speed_peaks.size() != 2) ok = false;
        second.push_back(run.speed_peaks.size() == 2 ? run.speed_peaks[1].value : 0.0);
    }
    ok = ok && second[0] < second[1] && second[1] < second[2];
    std::ostringstream d;
    d << "second peaks " << second[0] << ", " << second[1] << ", " << second[2] << ", "
      << elapsed << " s";
    report(3, "second speed peak grows as the nucleus target recedes", ok, d.str());
}

// Criterion 4: settled lags from a spread of starting phases.
void criterion_4() {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double f = 4.0;
    bool ok = true;
    double worst = 0.0;
    for (double phi0 : {0.1, 0.5, 1.0, 1.5707963, 2.0, 2.5, 3.0}) {
        for (bool anti : {true, false}) {
            auto graph = CouplingGraph::make(2, f);
            graph.set_pair(0, 1, anti ? PhaseRelation::AntiPhase : PhaseRelation::InPhase);
            const auto sol = integrate_oscillators(graph, {0.0, phi0});
            const double lag = circular_distance(sol.settled_phase_rad[1][0], 0.0) / (two_pi * f);
            const double err = std::abs(lag - (anti ? 0.125 : 0.0));
            worst = std::max(worst, err);
            if (!sol.converged || err > 0.001) ok = false;
        }
    }
    std::ostringstream d;
    d << "worst lag error " << worst << " s";
    report(4, "anti-phase settles to a quarter-period lag from any start", ok, d.str());
}

// Criterion 5: with no cubic term the step response is the critically damped
// closed form.
void criterion_5() {
    GestureScore score;
    score.gestures = {{"TBCD", {0.3, 2000.0, 0.0, 1.0}, 0.0, 0.4, "nucleus"}};
    SimulationConfig cfg;
    cfg.dt = 0.001;
    cfg.tail_after_last_offset = 0.0;
    const SimOutput out = simulate_score(score, cfg);

    const double w = std::sqrt(2000.0);
    double max_err = 0.0;
    for (std::size_t i = 0; i < out.time.size(); ++i) {
        const double t = out.time[i];
        const double expected = 0.3 * (1.0 - (1.0 + w * t) * std::exp(-w * t));
        max_err = std::max(max_err, std::abs(out.position[i] - expected));
    }
    std::ostringstream d;
    d << "max abs error " << max_err;
    report(5, "linear-regime simulation matches the closed-form response", max_err < 1e-6,
           d.str());
}

// Criterion 6: fPCA basis quality on a seeded random curve family.
void criterion_6() {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Series> curves;
    for (int i = 0; i < 30; ++i) {
        Series c(61);
        const double a = uni(rng), b = uni(rng), ph = uni(rng);
        for (int t = 0; t < 61; ++t) {
            const double x = t / 60.0;
            c[t] = a * std::sin(4.0 * x + ph) + b * x + 0.01 * uni(rng);
        }
        curves.push_back(std::move(c));
    }
    const FpcaModel model = fpca_fit(curves, 1.0);

    double gram_err = 0.0;
    for (std::size_t i = 0; i < model.components.size(); ++i)
        for (std::size_t j = 0; j < model.components.size(); ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < model.components[i].size(); ++t)
                dot += model.components[i][t] * model.components[j][t];
            gram_err = std::max(gram_err, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }

    double sq_sum = 0.0;
    std::size_t n_vals = 0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const Series rec = fpca_reconstruct(model, model.scores[i], model.n_components());
        for (std::size_t t = 0; t < rec.size(); ++t) {
            const double e = rec[t] - curves[i][t];
            sq_sum += e * e;
            ++n_vals;
        }
    }
    const double rmse = std::sqrt(sq_sum / static_cast<double>(n_vals));

    double var_err = 0.0;
    for (std::size_t j = 0; j < model.eigenvalues.size(); ++j) {
        double mean = 0.0;
        for (const auto& s : model.scores) mean += s[j];
        mean /= static_cast<double>(model.scores.size());
        double var = 0.0;
        for (const auto& s : model.scores) var += (s[j] - mean) * (s[j] - mean);
        var /= static_cast<double>(model.scores.size());
        var_err = std::max(var_err, std::abs(var - model.eigenvalues[j]) /
                                        std::max(1.0, model.eigenvalues[j]));
    }

    double ve_sum = 0.0;
    for (double v : model.variance_explained) ve_sum += v;

    std::ostringstream d;
    d << "gram " << gram_err << ", rmse " << rmse << ", var err " << var_err << ", ve sum "
      << ve_sum;
    report(6, "fPCA basis is orthonormal and reconstruction is exact",
           gram_err < 1e-10 && rmse < 1e-8 && var_err <= 1e-8 &&
               std::abs(ve_sum - 1.0) < 1e-10,
           d.str());
}

// Criterion 7: merge heights against exhaustive minimum-variance search.
struct BruteStep {
    int a, b;
    double height;
    double runner_up;
};

double sse(const std::vector<Series>& pts, const std::vector<std::size_t>& members) {
    const std::size_t dim = pts.front().size();
    Series centroid(dim, 0.0);
    for (std::size_t m : members)
        for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[m][d];
    for (double& c : centroid) c /= static_cast<double>(members.size());
    double s = 0.0;
    for (std::size_t m : members)
        for (std::size_t d = 0; d < dim; ++d) {
            const double dv = pts[m][d] - centroid[d];
            s += dv * dv;
        }
    return s;
}

std::vector<BruteStep> brute_ward(const std::vector<Series>& pts) {
    struct Cluster {
        int id;
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> clusters;
    for (std::size_t i = 0; i < pts.size(); ++i)
        clusters.push_back({static_cast<int>(i), {i}});

    std::vector<BruteStep> steps;
    const std::size_t n = pts.size();
    for (std::size_t t = 0; t + 1 < n; ++t) {
        double best = std::numeric_limits<double>::infinity();
        double second = best;
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                std::vector<std::size_t> joint = clusters[i].members;
                joint.insert(joint.end(), clusters[j].members.begin(),
                             clusters[j].members.end());
                const double h = 2.0 * (sse(pts, joint) - sse(pts, clusters[i].members) -
                                        sse(pts, clusters[j].members));
                const auto cand = std::make_pair(std::min(clusters[i].id, clusters[j].id),
                                                 std::max(clusters[i].id, clusters[j].id));
                const auto cur = std::make_pair(std::min(clusters[bi].id, clusters[bj].id),
                                                std::max(clusters[bi].id, clusters[bj].id));
                if (h < best || (h == best && cand < cur)) {
                    second = best;
                    best = h;
                    bi = i;
                    bj = j;
                } else {
                    second = std::min(second, h);
                }
            }
        }
        steps.push_back({std::min(clusters[bi].id, clusters[bj].id),
                         std::max(clusters[bi].id, clusters[bj].id), best, second});
        clusters[bi].members.insert(clusters[bi].members.end(), clusters[bj].members.begin(),
                                    clusters[bj].members.end());
        clusters[bi].id = static_cast<int>(n + t);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return steps;
}

void criterion_7() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    std::uniform_int_distribution<int> nd(2, 6), dd(1, 3);
    bool ok = true;
    std::string detail;

    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int n = nd(rng), dim = dd(rng);
        std::vector<Series> pts(static_cast<std::size_t>(n),
                                Series(static_cast<std::size_t>(dim), 0.0));
        for (auto& p : pts)
            for (double& v : p) v = uni(rng);
        std::vector<std::string> labels;
        for (int i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));

        const Dendrogram tree = ward_linkage(labels, pts);
        const auto brute = brute_ward(pts);

        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < brute.size(); ++t) {
            const auto& m = tree.merges[t];
            const double tol = 1e-9 * std::max(1.0, brute[t].height);
            if (std::abs(m.height - brute[t].height) > tol) {
                ok = false;
                detail = "height mismatch in trial " + std::to_string(trial);
            }
            if (brute[t].runner_up - brute[t].height > tol &&
                (m.a != brute[t].a || m.b != brute[t].b)) {
                ok = false;
                detail = "pair mismatch in trial " + std::to_string(trial);
            }
            if (m.height < prev - 1e-12) {
                ok = false;
                detail = "heights decreased in trial " + std::to_string(trial);
            }
            prev = m.height;
        }
    }
    report(7, "agglomerative merges match exhaustive minimum-variance search over 1000 trials",
           ok, detail);
}

// Criterion 8: the synthetic corpus clusters into its three vowel classes and
// the articulatory PC1 tracks the nucleus-offglide distance.
void criterion_8() {
    const auto t0 = std::chrono::steady_clock::now();
    SyntheticConfig gen;
    gen.n_speakers = 6;
    gen.seed = 1;
    gen.noise_sd_frac = 0.05;
    const SyntheticCorpus corpus = generate_synthetic_corpus(gen);
    const MeasuresTable table = compute_measures(corpus.art_tokens, corpus.ac_tokens);
    const ByItemMeans means = by_item_means(table);

    const auto [items, points] = cluster_features(means, MeasureSubset::Combined);
    const auto assignment = cut_tree(ward_linkage(items, points), 3);
    const double elapsed = seconds_since(t0);

    std::map<int, std::set<std::string>> groups;
    for (const auto& [item, cid] : assignment) groups[cid].insert(item);
    std::set<std::set<std::string>> sets;
    for (const auto& [cid, members] : groups) sets.insert(members);
    const std::set<std::set<std::string>> expected{
        {"mono_a", "mono_b", "mono_c"},
        {"di_a", "di_b", "di_c"},
        {"sweep_06", "sweep_07", "sweep_08"},
    };

    std::map<std::string, double> pc1;
    for (std::size_t i = 0; i < means.items.size(); ++i) pc1[means.items[i]] = means.columns[1][i];
    const double rho = spearman(
        {0.1, 0.2, 0.3}, {pc1.at("sweep_08"), pc1.at("sweep_07"), pc1.at("sweep_06")});

    std::ostringstream d;
    d << "3-way cut " << (sets == expected ? "exact" : "wrong") << ", spearman " << rho << ", "
      << elapsed << " s";
    report(8, "synthetic corpus clusters into the three vowel classes",
           sets == expected && rho > 0.9 && elapsed < 30.0, d.str());
}

// Criterion 9: filter gains and the constant tangential speed of circular
// motion.
void criterion_9() {
    const double fs = 250.0, fc = 10.0;
    const Series dc(600, 1.0);
    const Series dc_out = lowpass(dc, fs, fc);
    double dc_err = 0.0;
    for (double v : dc_out) dc_err = std::max(dc_err, std::abs(v - 1.0));

    const int n = 1250;
    Series tone(n);
    for (int i = 0; i < n; ++i)
        tone[i] = std::sin(2.0 * std::numbers::pi * 50.0 * i / fs);
    const Series tone_out = lowpass(tone, fs, fc);
    double measured = 0.0;
    for (int i = n / 5; i < 4 * n / 5; ++i) measured = std::max(measured, std::abs(tone_out[i]));
    const double formula = 1.0 / (1.0 + std::pow(50.0 / fc, 8.0));

    const double cfs = 1000.0, cf = 2.0;
    const int cn = 1001;
    std::vector<Series> circle(2, Series(cn));
    for (int i = 0; i < cn; ++i) {
        const double th = 2.0 * std::numbers::pi * cf * i / cfs;
        circle[0][i] = std::cos(th);
        circle[1][i] = std::sin(th);
    }
    const Series speed = tangential_velocity(circle, cfs);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 1; i + 1 < cn; ++i) {
        lo = std::min(lo, speed[i]);
        hi = std::max(hi, speed[i]);
    }
    const double spread = (hi - lo) / hi;

    std::ostringstream d;
    d << "dc err " << dc_err << ", 50 Hz gain " << measured << " vs " << formula
      << ", speed spread " << spread;
    report(9, "filter gain and tangential speed match their references",
           dc_err <= 1e-9 && std::abs(measured - formula) < 0.01 && measured < 0.03 &&
               spread <= 1e-6,
           d.str());
}

// Criterion 10: every command replayed from its manifest writes identical
// bytes.
std::string cli;
fs::path root;

int run_cli(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& why) {
    std::vector<std::string> fa, fb;
    for (const auto& e : fs::directory_iterator(a))
        if (e.is_regular_file()) fa.push_back(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b))
        if (e.is_regular_file()) fb.push_back(e.path().filename().string());
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    if (fa != fb) {
        why = "different file sets";
        return false;
    }
    for (const auto& name : fa)
        if (slurp(a / name) != slurp(b / name)) {
            why = "bytes differ in " + name;
            return false;
        }
    return true;
}

void criterion_10() {
    root = fs::temp_directory_path() / ("vdyn_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    const fs::path score_path = root / "score.json";
    {
        std::ofstream f(score_path);
        f << R"({
  "gestures": [
    {"tract_variable": "TBCD", "target": 0.3, "k": 2000, "d": 600,
     "blending_strength": 1, "duration_s": 0.25, "role": "nucleus"},
    {"tract_variable": "TBCD", "target": 0.9, "k": 2000, "d": 600,
     "blending_strength": 100, "duration_s": 0.25, "role": "offglide"}
  ],
  "coupling": {"frequency_hz": 4,
               "pairs": [{"i": 0, "j": 1, "relation": "anti-phase", "strength": 2}]}
}
)";
    }

    const fs::path gen = root / "gen", ana = root / "ana", sc = root / "sc";
    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen", "gen-synthetic --speakers 2 --seed 1"},
        {"f14", "simulate --study fig14"},
        {"f16", "simulate --study fig16"},
        {"sc", "simulate --score " + score_path.string()},
        {"ana", "analyze --data " + gen.string()},
        {"clu", "cluster --measures " + (ana / "measures.csv").string() +
                    " --art-model " + (ana / "fpca_art.json").string() + " --ac-model " +
                    (ana / "fpca_ac.json").string() + " --k 3"},
        {"fit", "fit-d --reference " + (sc / "simulation.csv").string() + " --score " +
                    score_path.string()},
    };

    bool ok = true;
    std::string detail;
    for (const auto& [name, args] : commands) {
        const fs::path a = root / name;
        const fs::path b = root / (name + "_replay");
        if (run_cli(args + " --out " + a.string()) != 0) {
            ok = false;
            detail = name + " failed to run";
            break;
        }
        if (run_cli("--from-manifest " + (a / "manifest.json").string() + " --out " +
                    b.string()) != 0) {
            ok = false;
            detail = name + " replay failed";
            break;
        }
        std::string why;
        if (!dirs_identical(a, b, why)) {
            ok = false;
            detail = name + ": " + why;
            break;
        }
    }
    report(10, "every command replayed from its manifest is bit-identical", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-binary>\n";
        return 2;
    }
    cli = argv[1];

    const std::vector<std::pair<int, void (*)()>> criteria{
        {1, criterion_1_and_2}, {3, criterion_3}, {4, criterion_4},  {5, criterion_5},
        {6, criterion_6},       {7, criterion_7}, {8, criterion_8},  {9, criterion_9},
        {10, criterion_10},
    };
    for (const auto& [n, fn] : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(n, "criterion threw", false, e.what());
        }
    }
    return failed == 0 ? 0 : 1;
}
