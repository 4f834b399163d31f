#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "sybilbelief/experiment.hpp"

using namespace sybil;

namespace {

const char* kSweepConfig =
    "metric.family = classification\n"
    "detector.kind = SB\n"
    "scenario.benign_nodes = 150\n"
    "scenario.attack_edges = 30\n"
    "metric.size_grid = 40,80\n"
    "run.trials = 2\n"
    "run.seed = 11\n";

const char* kCompareConfig =
    "metric.family = auc\n"
    "scenario.benign_nodes = 150\n"
    "scenario.sybil = duplicate\n"
    "scenario.attack_edges = 30,60\n"
    "labels.benign = 10\n"
    "labels.sybil = 10\n"
    "labels.noise_benign = 2\n"
    "labels.noise_sybil = 2\n"
    "metric.detectors = SB,SB-N,SR,SR-N,CIA,CIA-N,Random\n"
    "sybilbelief.boost_samples = 5\n"
    "run.trials = 2\n"
    "run.seed = 12\n";

}  // namespace

TEST_CASE("classification experiment") {
    const ExperimentConfig cfg = parse_config(std::string(kSweepConfig));
    const ExperimentResult res = run_experiment(cfg);
    SECTION("csv structure") {
        REQUIRE(res.detail_csv.rfind("attack_edges,sybil_size,trial,false_negatives,"
                                     "false_positives\n", 0) == 0);
        REQUIRE(res.summary_csv.rfind("attack_edges,trial,accepted_sybils,rejected_benign\n",
                                      0) == 0);
        // 2 sizes x (2 trials + mean) data rows + header
        REQUIRE(std::count(res.detail_csv.begin(), res.detail_csv.end(), '\n') == 7);
        REQUIRE(res.sweeps.size() == 1);
        REQUIRE(res.sweeps[0].points.size() == 2);
    }
    SECTION("byte-identical reruns") {
        const ExperimentResult again = run_experiment(cfg);
        REQUIRE(again.detail_csv == res.detail_csv);
        REQUIRE(again.summary_csv == res.summary_csv);
    }
    SECTION("independent of the worker count") {
        ExperimentConfig par = cfg;
        par.jobs = 4;
        const ExperimentResult again = run_experiment(par);
        REQUIRE(again.detail_csv == res.detail_csv);
    }
}

TEST_CASE("auc experiment") {
    const ExperimentConfig cfg = parse_config(std::string(kCompareConfig));
    const ExperimentResult res = run_experiment(cfg);
    SECTION("csv structure and value sanity") {
        REQUIRE(res.detail_csv.rfind("attack_edges,trial,auc_SB,auc_SB-N,auc_SR,auc_SR-N,"
                                     "auc_CIA,auc_CIA-N,auc_Random\n", 0) == 0);
        REQUIRE(res.auc_values.size() == 2);
        REQUIRE(res.auc_means.size() == 2);
        for (const auto& per_trial : res.auc_values)
            for (const auto& row : per_trial)
                for (double a : row) {
                    REQUIRE(a >= 0.0);
                    REQUIRE(a <= 1.0);
                }
    }
    SECTION("byte-identical reruns, any worker count") {
        ExperimentConfig par = cfg;
        par.jobs = 3;
        const ExperimentResult again = run_experiment(par);
        REQUIRE(again.detail_csv == res.detail_csv);
        REQUIRE(again.summary_csv == res.summary_csv);
    }
    SECTION("seed changes change the cells") {
        ExperimentConfig other = cfg;
        other.seed = 999;
        REQUIRE(run_experiment(other).detail_csv != res.detail_csv);
    }
    SECTION("score dumps land in the requested directory") {
        ExperimentConfig dump_cfg = cfg;
        dump_cfg.dump_beliefs = true;
        const auto dir =
            std::filesystem::temp_directory_path() / "sybilbelief_test_dump";
        std::filesystem::remove_all(dir);
        run_experiment(dump_cfg, dir);
        REQUIRE(std::filesystem::exists(dir / "attack30" / "trial0" / "SB.txt"));
        REQUIRE(std::filesystem::exists(dir / "attack60" / "trial1" / "Random.txt"));
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("pipeline composition identity") {
    // synth + detect + eval on cell (0, si, t) must reproduce the sweep.
    const ExperimentConfig cfg = parse_config(std::string(kSweepConfig));
    const ExperimentResult swept = run_experiment(cfg);
    const Graph benign = build_benign_region(cfg);
    const auto grid = cfg.size_grid;
    for (std::size_t si = 0; si < grid.size(); ++si) {
        for (int t = 0; t < cfg.trials; ++t) {
            const std::uint64_t cs = cell_seed(cfg, 0, si, t);
            const ScenarioGraph scen =
                build_cell_scenario(cfg, benign, grid[si], cfg.attack_edges[0], cs);
            const LabelSet labels = make_labels(scen, label_plan(cfg), cs);
            const Beliefs b = run_sb_beliefs(cfg, scen, labels, derive_seed(cs, "detector"),
                                             false);
            const auto c = confusion(classify(b), scen, labels.nodes());
            REQUIRE(c.false_negatives ==
                    swept.sweeps[0].points[si].trials[t].false_negatives);
            REQUIRE(c.false_positives ==
                    swept.sweeps[0].points[si].trials[t].false_positives);
        }
    }
}

TEST_CASE("roster detectors get the label subset they can use") {
    const ExperimentConfig cfg = parse_config(std::string(kCompareConfig));
    const Graph benign = build_benign_region(cfg);
    const std::uint64_t cs = cell_seed(cfg, 0, 0, 0);
    const ScenarioGraph scen = build_cell_scenario(cfg, benign, 0, 30, cs);
    LabelPlan plan = label_plan(cfg);
    plan.noise_benign = plan.noise_sybil = 0;
    const LabelSet clean = make_labels(scen, plan, cs);
    const LabelSet noisy = inject_noise(clean, 2, 2, derive_seed(cs, "noise"));
    // SR rejects Sybil-tagged labels, so this only passes if it receives
    // the benign subset; same for CIA with the Sybil subset.
    REQUIRE_NOTHROW(run_ranking_detector(DetectorKind::SR, cfg, scen, clean, noisy, 1));
    REQUIRE_NOTHROW(run_ranking_detector(DetectorKind::CIA, cfg, scen, clean, noisy, 1));
    REQUIRE_NOTHROW(run_ranking_detector(DetectorKind::SRN, cfg, scen, clean, noisy, 1));
    const ScoreVector sbb = run_ranking_detector(DetectorKind::SBB, cfg, scen, clean, noisy, 1);
    REQUIRE(sbb.score.size() == scen.graph.node_count());
}
