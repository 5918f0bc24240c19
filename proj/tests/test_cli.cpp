// End-to-end checks of the command-line tool. The binary path arrives via
// the SPECDIFF_CLI environment variable (set by CTest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <map>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "specdiff/io.hpp"

using namespace specdiff;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* p = std::getenv("SPECDIFF_CLI");
    REQUIRE_MESSAGE(p != nullptr, "SPECDIFF_CLI must point at the built binary");
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() /
              ("specdiff_cli_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

} // namespace

TEST_CASE("synth-speaker writes spectrogram and image files") {
    TempDir tmp;
    const std::string out = tmp / "a.spgr";
    const std::string pgm = tmp / "a.pgm";
    CHECK(run("synth-speaker --f0 220 --bins 128 --frames 32 --out " + out + " --pgm " + pgm) == 0);
    const Spectrogram s = read_spectrogram(out);
    CHECK(s.n_freq() == 128);
    CHECK(s.n_time() == 32);
    CHECK(slurp(pgm).substr(0, 3) == "P5\n");
}

TEST_CASE("convert is deterministic and exits cleanly") {
    TempDir tmp;
    const std::string ref = tmp / "ref.spgr";
    REQUIRE(run("synth-speaker --f0 110 --bins 128 --frames 32 --out " + ref) == 0);
    const std::string out1 = tmp / "x1.spgr";
    const std::string out2 = tmp / "x2.spgr";
    const std::string trace = tmp / "trace.csv";
    const std::string base = "convert --template f0=220,bins=128,frames=32 --reference " + ref +
                             " --seed 7 ";
    CHECK(run(base + "--out " + out1 + " --trace " + trace) == 0);
    CHECK(run(base + "--out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK_FALSE(slurp(out1).empty());

    std::ifstream tr(trace);
    std::string header;
    std::getline(tr, header);
    CHECK(header == "step,t,drift_norm,ilvr_active,lowpass_residual");
    int rows = 0;
    std::string line;
    while (std::getline(tr, line)) ++rows;
    CHECK(rows == 50);
}

TEST_CASE("convert validation and I/O failures use distinct exit codes") {
    TempDir tmp;
    const std::string ref = tmp / "ref.spgr";
    REQUIRE(run("synth-speaker --f0 110 --bins 128 --frames 32 --out " + ref) == 0);

    // mismatched frequency bins -> validation (1)
    CHECK(run("convert --template f0=220,bins=64,frames=32 --reference " + ref + " --out " +
              (tmp / "x.spgr")) == 1);
    // missing reference -> I/O (2)
    CHECK(run("convert --template f0=220,bins=128,frames=32 --reference " + (tmp / "none.spgr") +
              " --out " + (tmp / "x.spgr")) == 2);
    // corrupt reference -> I/O (2)
    const std::string junk = tmp / "junk.spgr";
    std::ofstream(junk) << "XXXXnotaspectrogram";
    CHECK(run("convert --template f0=220,bins=128,frames=32 --reference " + junk + " --out " +
              (tmp / "x.spgr")) == 2);
    // both --prior and --template -> validation (1)
    CHECK(run("convert --prior " + ref + " --template f0=220 --reference " + ref + " --out " +
              (tmp / "x.spgr")) == 1);
}

TEST_CASE("config file controls the run and rejects bad keys") {
    TempDir tmp;
    const std::string ref = tmp / "ref.spgr";
    REQUIRE(run("synth-speaker --f0 110 --bins 128 --frames 32 --out " + ref) == 0);
    const std::string cfg = tmp / "run.cfg";
    std::ofstream(cfg) << "[schedule]\nsteps = 12\n[run]\nseed = 5\n";
    const std::string trace = tmp / "t.csv";
    CHECK(run("convert --config " + cfg + " --template f0=220,bins=128,frames=32 --reference " +
              ref + " --out " + (tmp / "x.spgr") + " --trace " + trace) == 0);
    std::ifstream tr(trace);
    int rows = -1; // discount header
    std::string line;
    while (std::getline(tr, line)) ++rows;
    CHECK(rows == 12);

    const std::string bad = tmp / "bad.cfg";
    std::ofstream(bad) << "[schedule]\nbogus = 1\n";
    CHECK(run("convert --config " + bad + " --template f0=220,bins=128,frames=32 --reference " +
              ref + " --out " + (tmp / "y.spgr")) == 1);
}

TEST_CASE("filter-preview and render") {
    TempDir tmp;
    const std::string in = tmp / "in.spgr";
    REQUIRE(run("synth-speaker --f0 220 --bins 128 --frames 64 --vibrato-depth 6 "
                "--vibrato-rate 0.07 --out " + in) == 0);
    const std::string out = tmp / "lp.spgr";
    CHECK(run("filter-preview --in " + in + " --nf 1 --nt 18 --out " + out + " --pgm " +
              (tmp / "lp.pgm")) == 0);
    const Spectrogram x = read_spectrogram(in);
    const Spectrogram lp = read_spectrogram(out);
    CHECK(lp.n_freq() == x.n_freq());
    CHECK(lp.n_time() == x.n_time());
    CHECK(run("render --in " + out + " --out " + (tmp / "img.pgm")) == 0);
    CHECK(slurp(tmp / "img.pgm").substr(0, 3) == "P5\n");
}

TEST_CASE("eval handles missing files as per-row errors") {
    TempDir tmp;
    const std::string a = tmp / "a.spgr";
    const std::string b = tmp / "b.spgr";
    REQUIRE(run("synth-speaker --f0 220 --bins 256 --frames 24 --out " + a) == 0);
    REQUIRE(run("synth-speaker --f0 233.08 --bins 256 --frames 24 --out " + b) == 0);
    const std::string manifest = tmp / "pairs.txt";
    std::ofstream(manifest) << a << " " << a << "\n"
                            << a << " " << b << "\n"
                            << a << " " << (tmp / "missing.spgr") << "\n";
    const std::string report = tmp / "report.csv";
    CHECK(run("eval --pairs " + manifest + " --out " + report) == 0);
    std::ifstream rep(report);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(rep, line)) lines.push_back(line);
    REQUIRE(lines.size() == 5); // header + 3 rows + mean
    CHECK(lines[0] == "pair_id,mcd_db,mae_f0_hz,band_distance,voiced_frames,error");
    // identical pair: zero MCD and MAE
    CHECK(lines[1].substr(0, 2) == "1,");
    CHECK(lines[1].find("1,0,0,0,") == 0);
    // missing file row carries an error message but the command still succeeds
    CHECK(lines[3].find("cannot open") != std::string::npos);
    CHECK(lines[4].substr(0, 5) == "mean,");
}

TEST_CASE("sweep grid runs, seeds cells deterministically") {
    TempDir tmp;
    const std::string ref = tmp / "ref.spgr";
    REQUIRE(run("synth-speaker --f0 110 --bins 128 --frames 48 --out " + ref) == 0);
    const std::string dir = tmp / "sweep";
    CHECK(run("sweep --template f0=220,bins=128,frames=48 --reference " + ref +
              " --nt 4,18 --stop 0,6 --out " + dir + " --seed 9 --jobs 2") == 0);
    CHECK(fs::exists(dir + "/nt4_stop0.spgr"));
    CHECK(fs::exists(dir + "/nt18_stop6.spgr"));
    CHECK(fs::exists(dir + "/nt4_stop0.pgm"));
    std::ifstream csv(dir + "/metrics.csv");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(csv, line)) lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "nt,stop_step,seed,band_distance,mcd_db,mae_f0_hz,error");

    // single-cell sweep: cell (0,0) keeps the root seed, so it matches convert
    const std::string dir2 = tmp / "single";
    CHECK(run("sweep --template f0=220,bins=128,frames=48 --reference " + ref +
              " --nt 18 --stop 6 --out " + dir2 + " --seed 9") == 0);
    const std::string conv = tmp / "conv.spgr";
    CHECK(run("convert --template f0=220,bins=128,frames=48 --reference " + ref + " --seed 9 "
              "--out " + conv) == 0);
    CHECK(slurp(dir2 + "/nt18_stop6.spgr") == slurp(conv));

    // empty list -> validation error
    CHECK(run("sweep --template f0=220,bins=128,frames=48 --reference " + ref +
              " --nt , --stop 0 --out " + (tmp / "x")) == 1);
}

namespace {

// Pulls one named numeric column out of a CSV keyed by the first two columns.
std::map<std::pair<int, int>, double> band_by_cell(const std::string& csv_path) {
    std::ifstream in(csv_path);
    std::string line;
    std::getline(in, line); // header
    std::map<std::pair<int, int>, double> out;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cols;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.size() < 4 || cols[3].empty()) continue;
        out[{std::stoi(cols[0]), std::stoi(cols[1])}] = std::stod(cols[3]);
    }
    return out;
}

} // namespace

TEST_CASE("sweep: near-restoration cell wins the grid") {
    TempDir tmp;
    const std::string ref = tmp / "ref.spgr";
    REQUIRE(run("synth-speaker --f0 110 --bins 256 --frames 48 --vibrato-depth 4 "
                "--vibrato-rate 0.05 --out " + ref) == 0);
    const std::string dir = tmp / "grid";
    REQUIRE(run("sweep --template f0=220,bins=256,frames=48,vibrato_depth=5,vibrato_rate=0.06"
                " --reference " + ref + " --nt 4,18,30 --stop 0,6,49 --out " + dir +
                " --seed 11 --jobs 4") == 0);
    const auto band = band_by_cell(dir + "/metrics.csv");
    REQUIRE(band.size() == 9);
    const double best = band.at({4, 0});
    for (const auto& [cell, value] : band) {
        if (cell != std::pair<int, int>{4, 0}) {
            CHECK(best < value);
        }
    }
}

TEST_CASE("eval: cross-speaker corpus scores above same-speaker control") {
    TempDir tmp;
    const std::string base = tmp / "base.spgr";
    const std::string phase = tmp / "phase.spgr";
    const std::string other = tmp / "other.spgr";
    const std::string synth_base = "--bins 256 --frames 32 --vibrato-depth 5 --vibrato-rate 0.06 ";
    REQUIRE(run("synth-speaker --f0 220 " + synth_base + "--out " + base) == 0);
    REQUIRE(run("synth-speaker --f0 220 " + synth_base + "--vibrato-phase 1.2 --out " + phase) == 0);
    REQUIRE(run("synth-speaker --f0 220 " + synth_base +
                "--formants 700:120,1900:180,3100:240 --out " + other) == 0);

    const auto mean_mcd = [&](const std::string& manifest_body, const std::string& tag) {
        const std::string manifest = tmp / (tag + ".txt");
        std::ofstream(manifest) << manifest_body;
        const std::string report = tmp / (tag + ".csv");
        REQUIRE(run("eval --pairs " + manifest + " --out " + report) == 0);
        std::ifstream in(report);
        std::string line;
        std::string last;
        while (std::getline(in, line)) {
            if (!line.empty()) last = line;
        }
        REQUIRE(last.substr(0, 5) == "mean,");
        std::stringstream ss(last.substr(5));
        std::string cell;
        std::getline(ss, cell, ',');
        return std::stod(cell);
    };
    const double same = mean_mcd(base + " " + phase + "\n", "same");
    const double cross = mean_mcd(base + " " + other + "\n" + phase + " " + other + "\n", "cross");
    CHECK(cross > same);
}
