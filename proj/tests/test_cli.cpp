// Exercises the command-line contract: exit codes, error text, and the
// no-partial-output rule. argv[1] is the path to the built binary.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

static int failures = 0;

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            ++failures;                                                  \
            std::cout << "FAIL " << __LINE__ << ": " << #cond << "\n";   \
        }                                                                \
    } while (0)

namespace {

std::string cli;
fs::path root;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::size_t count_files(const fs::path& dir) {
    if (!fs::exists(dir)) return 0;
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) ++n;
    return n;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli <path-to-binary>\n";
        return 2;
    }
    cli = argv[1];
    root = fs::temp_directory_path() / ("vdyn_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    // Bare invocation prints help and signals misuse; --help succeeds.
    CHECK(run("") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("simulate --help") == 0);
    CHECK(run("frobnicate") == 2);

    // A malformed score is rejected up front and leaves no partial output.
    const fs::path bad_dir = root / "bad_score";
    fs::create_directories(bad_dir);
    {
        std::ofstream f(bad_dir / "score.json");
        f << "{ \"gestures\": [ nope\n";
    }
    CHECK(run("simulate --score " + (bad_dir / "score.json").string() + " --out " +
              (bad_dir / "out").string()) == 2);
    CHECK(count_files(bad_dir / "out") == 0);

    // Valid study run produces its files.
    const fs::path study_dir = root / "study";
    CHECK(run("simulate --study fig14 --out " + study_dir.string()) == 0);
    CHECK(fs::exists(study_dir / "peaks.csv"));
    CHECK(fs::exists(study_dir / "durations.csv"));
    CHECK(fs::exists(study_dir / "manifest.json"));
    CHECK(fs::exists(study_dir / "sim_a-bar-one-target.csv"));
    CHECK(run("simulate --study nonesuch --out " + (root / "nx").string()) == 2);
    CHECK(count_files(root / "nx") == 0);

    // Synthetic corpus: 9 tokens x 2 branches x (csv + sidecar) + manifest.
    const fs::path data = root / "data";
    CHECK(run("gen-synthetic --speakers 1 --out " + data.string()) == 0);
    CHECK(count_files(data) == 37);

    // Full analysis over that corpus.
    const fs::path ana = root / "ana";
    CHECK(run("analyze --data " + data.string() + " --out " + ana.string()) == 0);
    CHECK(fs::exists(ana / "measures.csv"));
    CHECK(fs::exists(ana / "fpca_art.json"));
    CHECK(fs::exists(ana / "fpca_ac.json"));
    CHECK(count_lines(slurp(ana / "measures.csv")) == 10);

    // Empty or csv-free data directories are input errors.
    const fs::path empty = root / "empty";
    fs::create_directories(empty);
    CHECK(run("analyze --data " + empty.string() + " --out " + (root / "e1").string()) == 2);
    {
        std::ofstream f(empty / "readme.txt");
        f << "nothing here\n";
    }
    CHECK(run("analyze --data " + empty.string() + " --out " + (root / "e2").string()) == 2);
    CHECK(run("analyze --data " + (root / "missing_dir").string() + " --out " +
              (root / "e3").string()) == 2);
    CHECK(count_files(root / "e1") + count_files(root / "e2") + count_files(root / "e3") == 0);

    // A missing sidecar skips just that token and names it in the log.
    fs::remove(data / "s00_di_a_ac.json");
    const fs::path ana2 = root / "ana2";
    CHECK(run("analyze --data " + data.string() + " --out " + ana2.string()) == 0);
    const std::string skipped = slurp(ana2 / "skipped.csv");
    CHECK(skipped.find("s00_di_a_ac.csv") != std::string::npos);
    CHECK(skipped.find("missing sidecar") != std::string::npos);
    CHECK(count_lines(slurp(ana2 / "measures.csv")) == 9);

    // Clustering: valid cut, oversized k, bogus subset.
    const fs::path clu = root / "clu";
    const std::string measures = (ana / "measures.csv").string();
    CHECK(run("cluster --measures " + measures + " --k 3 --out " + clu.string()) == 0);
    CHECK(count_lines(slurp(clu / "assignment.csv")) == 10);
    CHECK(fs::exists(clu / "dendrogram.json"));
    CHECK(run("cluster --measures " + measures + " --k 10 --out " + (root / "c1").string()) == 2);
    CHECK(run("cluster --measures " + measures + " --k 3 --subset sideways --out " +
              (root / "c2").string()) == 2);
    CHECK(run("cluster --measures " + measures + " --k 3 --subset articulatory --out " +
              (root / "c3").string()) == 0);
    CHECK(count_files(root / "c1") + count_files(root / "c2") == 0);

    // Manifest replay needs the manifest alone, not a subcommand.
    const fs::path replay = root / "replay";
    CHECK(run("--from-manifest " + (study_dir / "manifest.json").string() + " --out " +
              replay.string()) == 0);
    CHECK(fs::exists(replay / "peaks.csv"));
    CHECK(run("simulate --from-manifest " + (study_dir / "manifest.json").string() +
              " --out " + (root / "r2").string()) != 0);
    CHECK(run("--from-manifest " + (root / "no_such.json").string() + " --out " +
              (root / "r3").string()) == 2);

    if (failures == 0) {
        std::cout << "all cli checks passed\n";
        return 0;
    }
    std::cout << failures << " cli check(s) failed\n";
    return 1;
}
