#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sybilbelief/serialize.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kBin = SYBILBELIEF_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kBin.string() + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string run_capture(const std::string& args, const fs::path& out_file) {
    const std::string cmd = kBin.string() + " " + args + " >" + out_file.string() + " 2>&1";
    if (std::system(cmd.c_str()) != 0)
        throw std::runtime_error("command failed: " + cmd + "\n" +
                                 sybil::read_text_file(out_file));
    return sybil::read_text_file(out_file);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sybilbelief_cli_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli pipeline") {
    TempDir tmp;
    const fs::path cfg_path = tmp.path / "cfg.txt";
    sybil::write_text_file(cfg_path,
                           "metric.family = classification\n"
                           "detector.kind = SB\n"
                           "scenario.benign_nodes = 120\n"
                           "scenario.attack_edges = 25\n"
                           "labels.benign = 12\n"
                           "labels.sybil = 3\n"
                           "metric.size_grid = 40,80\n"
                           "run.trials = 2\n"
                           "run.seed = 33\n"
                           "run.out = " + (tmp.path / "out").string() + "\n");

    SECTION("synth, detect, eval compose to the sweep cell") {
        const fs::path cell = tmp.path / "cell";
        run_capture("synth --config " + cfg_path.string() + " --out " + cell.string(),
                    tmp.path / "synth.log");
        REQUIRE(fs::exists(cell / "edges.txt"));
        REQUIRE(fs::exists(cell / "regions.txt"));
        REQUIRE(fs::exists(cell / "attack_edges.txt"));
        REQUIRE(fs::exists(cell / "labels.txt"));

        run_capture("detect --config " + cfg_path.string() + " --edges " +
                        (cell / "edges.txt").string() + " --labels " +
                        (cell / "labels.txt").string() + " --out " + cell.string(),
                    tmp.path / "detect.log");
        const std::string eval_out =
            run_capture("eval --metric classification --regions " +
                            (cell / "regions.txt").string() + " --beliefs " +
                            (cell / "beliefs.txt").string() + " --labels " +
                            (cell / "labels.txt").string(),
                        tmp.path / "eval.log");

        run_capture("sweep --config " + cfg_path.string(), tmp.path / "sweep.log");
        const std::string detail = sybil::read_text_file(tmp.path / "out" / "detail.csv");
        // cell (attack 25, size 40, trial 0) is the second CSV line
        const auto line_start = detail.find('\n') + 1;
        const auto line = detail.substr(line_start, detail.find('\n', line_start) - line_start);
        const auto fn = line.substr(line.rfind(',', line.rfind(',') - 1) + 1);
        std::string expect = "false_negatives=" + fn.substr(0, fn.find(',')) +
                             " false_positives=" + fn.substr(fn.find(',') + 1);
        REQUIRE(eval_out.find(expect) != std::string::npos);
    }

    SECTION("sweep output is byte-identical across reruns") {
        run_capture("sweep --config " + cfg_path.string(), tmp.path / "s1.log");
        const std::string first = sybil::read_text_file(tmp.path / "out" / "detail.csv");
        run_capture("sweep --config " + cfg_path.string(), tmp.path / "s2.log");
        REQUIRE(sybil::read_text_file(tmp.path / "out" / "detail.csv") == first);
    }

    SECTION("auc eval from scores") {
        const fs::path cell = tmp.path / "cell2";
        run_capture("synth --config " + cfg_path.string() + " --out " + cell.string(),
                    tmp.path / "synth2.log");
        // SR needs a benign-only label file
        std::ofstream bl(cell / "benign_labels.txt");
        {
            std::ifstream lf(cell / "labels.txt");
            const sybil::LabelSet labels = sybil::load_labels(lf);
            sybil::save_labels(bl, labels.subset(sybil::Tag::Benign));
        }
        bl.close();
        run_capture("detect --config " + cfg_path.string() + " --detector SR --edges " +
                        (cell / "edges.txt").string() + " --labels " +
                        (cell / "benign_labels.txt").string() + " --out " + cell.string(),
                    tmp.path / "detect2.log");
        const std::string out = run_capture(
            "eval --metric auc --regions " + (cell / "regions.txt").string() + " --scores " +
                (cell / "scores.txt").string() + " --labels " + (cell / "labels.txt").string(),
            tmp.path / "eval2.log");
        REQUIRE(out.find("auc=") != std::string::npos);
    }

    SECTION("boosting detects without any Sybil labels") {
        const fs::path cell = tmp.path / "cell3";
        run_capture("synth --config " + cfg_path.string() + " --out " + cell.string(),
                    tmp.path / "synth3.log");
        std::ifstream lf(cell / "labels.txt");
        const sybil::LabelSet labels = sybil::load_labels(lf);
        {
            std::ofstream bl(cell / "benign_labels.txt");
            sybil::save_labels(bl, labels.subset(sybil::Tag::Benign));
            std::ofstream sl(cell / "sybil_labels.txt");
            sybil::save_labels(sl, labels.subset(sybil::Tag::Sybil));
        }
        run_capture("detect --config " + cfg_path.string() + " --detector SB-B --edges " +
                        (cell / "edges.txt").string() + " --labels " +
                        (cell / "benign_labels.txt").string() + " --out " + cell.string(),
                    tmp.path / "detect3.log");
        REQUIRE(fs::exists(cell / "beliefs.txt"));
        // SR without a single benign label must fail
        REQUIRE(run("detect --config " + cfg_path.string() + " --detector SR --edges " +
                    (cell / "edges.txt").string() + " --labels " +
                    (cell / "sybil_labels.txt").string() + " --out " + cell.string()) != 0);
    }

    SECTION("bad inputs exit nonzero") {
        REQUIRE(run("sweep --config /no/such/config") != 0);
        REQUIRE(run("detect --config " + cfg_path.string() +
                    " --edges /no/such/file --labels /none") != 0);
        sybil::write_text_file(tmp.path / "bad.txt", "metric.family = classification\n"
                                                     "detector.kind = CIA\n");
        REQUIRE(run("sweep --config " + (tmp.path / "bad.txt").string()) != 0);
    }
}
