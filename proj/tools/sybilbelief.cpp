// Experiment harness for structure-based Sybil detection: scenario
// synthesis, detector runs, metric evaluation, and the full sweep /
// comparison studies, all driven by one config file and a master seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sybilbelief/sybilbelief.hpp"

namespace fs = std::filesystem;
using namespace sybil;

namespace {

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    return parse_config(f);
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> jobs;
    std::optional<std::string> out;
};

void apply(const Overrides& ov, ExperimentConfig& cfg) {
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.jobs) cfg.jobs = *ov.jobs;
    if (ov.out) cfg.out_dir = *ov.out;
    validate_config(cfg);
}

void add_overrides(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "master seed override");
    cmd->add_option("--trials", ov.trials, "trial count override");
    cmd->add_option("--jobs", ov.jobs, "worker count override");
    cmd->add_option("--out", ov.out, "output directory override");
}

std::vector<NodeId> effective_grid(const ExperimentConfig& cfg, const Graph& benign) {
    return cfg.size_grid.empty() ? default_size_grid(benign.node_count()) : cfg.size_grid;
}

int cmd_synth(const std::string& config_path, const Overrides& ov, std::size_t attack_index,
              std::size_t size_index, int trial) {
    ExperimentConfig cfg = load_config(config_path);
    apply(ov, cfg);
    if (attack_index >= cfg.attack_edges.size())
        throw std::runtime_error("--attack-index out of range");
    const Graph benign = build_benign_region(cfg);
    NodeId sybil_size = 0;
    if (*cfg.family == MetricFamily::Classification) {
        const auto grid = effective_grid(cfg, benign);
        if (size_index >= grid.size()) throw std::runtime_error("--size-index out of range");
        sybil_size = grid[size_index];
    }
    const std::uint64_t cs = cell_seed(cfg, attack_index, size_index, trial);
    const ScenarioGraph scen =
        build_cell_scenario(cfg, benign, sybil_size, cfg.attack_edges[attack_index], cs);
    const LabelSet labels = make_labels(scen, label_plan(cfg), cs);

    const fs::path out = cfg.out_dir;
    save_scenario(out, scen);
    std::ofstream lf(out / "labels.txt");
    save_labels(lf, labels);
    std::cout << "scenario: " << scen.graph.node_count() << " nodes, "
              << scen.graph.edge_count() << " edges, " << scen.attack_edges.size()
              << " attack edges, " << labels.size() << " labels -> " << out.string() << "\n";
    return 0;
}

int cmd_detect(const std::string& config_path, const Overrides& ov, const std::string& edges_path,
               const std::string& labels_path, const std::string& detector_override,
               std::size_t attack_index, std::size_t size_index, int trial,
               const std::string& noisy_out) {
    ExperimentConfig cfg = load_config(config_path);
    apply(ov, cfg);
    DetectorKind kind = cfg.detector.value_or(DetectorKind::SB);
    if (!detector_override.empty()) kind = parse_detector_kind(detector_override);

    std::ifstream ef(edges_path);
    if (!ef) throw std::runtime_error("cannot open edge list " + edges_path);
    const Graph graph = load_edge_list(ef);
    std::ifstream lf(labels_path);
    if (!lf) throw std::runtime_error("cannot open labels " + labels_path);
    const LabelSet labels = load_labels(lf);

    // Detection never sees ground truth; a region map is only needed by eval.
    ScenarioGraph scen;
    scen.graph = graph;
    scen.region.assign(graph.node_count(), Tag::Benign);

    const std::uint64_t cs = cell_seed(cfg, attack_index, size_index, trial);
    const fs::path out = cfg.out_dir;
    fs::create_directories(out);
    switch (kind) {
        case DetectorKind::SB:
        case DetectorKind::SBN:
        case DetectorKind::SBB: {
            ExperimentConfig run_cfg = cfg;
            run_cfg.detector = kind;
            const Beliefs b =
                run_sb_beliefs(run_cfg, scen, labels, derive_seed(cs, "detector"), true);
            std::ofstream bf(out / "beliefs.txt");
            save_beliefs(bf, b);
            std::cout << "beliefs: " << (b.converged ? "converged" : "not converged") << " after "
                      << b.iterations_run << " iterations (delta "
                      << format_fixed9(b.final_delta) << ") -> "
                      << (out / "beliefs.txt").string() << "\n";
            if (!noisy_out.empty()) {
                if (kind == DetectorKind::SBB)
                    throw std::runtime_error(
                        "--noisy-out needs a plain LBP run (SB or SB-N), not SB-B");
                const MrfModel model(scen.graph, labels, cfg.mrf);
                std::ofstream nf(noisy_out);
                for (NodeId v : detect_noisy_labels(model, b)) nf << v << '\n';
            }
            break;
        }
        default: {
            const ScoreVector s = run_ranking_detector(kind, cfg, scen, labels, labels,
                                                       derive_seed(cs, detector_name(kind)));
            std::ofstream sf(out / "scores.txt");
            save_scores(sf, s);
            std::cout << "scores: " << provenance_name(s.provenance) << " -> "
                      << (out / "scores.txt").string() << "\n";
            break;
        }
    }
    return 0;
}

int cmd_eval(const std::string& metric, const std::string& regions_path,
             const std::string& beliefs_path, const std::string& scores_path,
             const std::string& labels_path, const std::string& out_path) {
    std::ifstream rf(regions_path);
    if (!rf) throw std::runtime_error("cannot open region map " + regions_path);
    // Node count is implied by the region map itself.
    std::vector<std::pair<NodeId, Tag>> entries;
    {
        std::string line;
        NodeId max_id = 0;
        std::size_t line_no = 0;
        while (std::getline(rf, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            NodeId v;
            char c;
            if (!(ls >> v >> c))
                throw std::runtime_error("region map line " + std::to_string(line_no));
            entries.emplace_back(v, parse_tag(c));
            max_id = std::max(max_id, v);
        }
        ScenarioGraph scen;
        scen.region.assign(entries.empty() ? 0 : std::size_t(max_id) + 1, Tag::Benign);
        for (const auto& [v, t] : entries) scen.region[v] = t;
        scen.graph = Graph(NodeId(scen.region.size()), std::vector<Edge>{});

        LabelSet labels;
        if (!labels_path.empty()) {
            std::ifstream lf(labels_path);
            if (!lf) throw std::runtime_error("cannot open labels " + labels_path);
            labels = load_labels(lf);
        }
        const auto excluded = labels.nodes();

        std::ostringstream csv;
        if (metric == "classification") {
            if (beliefs_path.empty())
                throw std::runtime_error("classification eval needs --beliefs");
            std::ifstream bf(beliefs_path);
            if (!bf) throw std::runtime_error("cannot open beliefs " + beliefs_path);
            const Beliefs b = load_beliefs(bf);
            const auto c = confusion(classify(b), scen, excluded);
            std::cout << "false_negatives=" << c.false_negatives
                      << " false_positives=" << c.false_positives << "\n";
            csv << "false_negatives,false_positives\n"
                << c.false_negatives << ',' << c.false_positives << '\n';
        } else if (metric == "auc") {
            ScoreVector s;
            if (!scores_path.empty()) {
                std::ifstream sf(scores_path);
                if (!sf) throw std::runtime_error("cannot open scores " + scores_path);
                s = load_scores(sf);
            } else if (!beliefs_path.empty()) {
                std::ifstream bf(beliefs_path);
                if (!bf) throw std::runtime_error("cannot open beliefs " + beliefs_path);
                s = beliefs_to_scores(load_beliefs(bf));
            } else {
                throw std::runtime_error("auc eval needs --scores or --beliefs");
            }
            s.score.resize(scen.region.size(), 0.0);
            const double a = auc(s, scen, excluded);
            std::cout << "auc=" << format_fixed9(a) << "\n";
            csv << "auc\n" << format_fixed9(a) << '\n';
        } else {
            throw std::runtime_error("unknown metric '" + metric + "'");
        }
        if (!out_path.empty()) write_text_file(out_path, csv.str());
    }
    return 0;
}

int cmd_run(const std::string& config_path, const Overrides& ov, MetricFamily family,
            const char* detail_name, const char* summary_name) {
    ExperimentConfig cfg = load_config(config_path);
    apply(ov, cfg);
    if (*cfg.family != family)
        throw std::runtime_error(family == MetricFamily::Classification
                                     ? "sweep needs metric.family = classification"
                                     : "compare needs metric.family = auc");
    const fs::path out = cfg.out_dir;
    const ExperimentResult res = run_experiment(cfg, out);
    write_text_file(out / detail_name, res.detail_csv);
    write_text_file(out / summary_name, res.summary_csv);
    std::cout << res.summary_csv;
    std::cout << "wrote " << (out / detail_name).string() << " and "
              << (out / summary_name).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SybilBelief experiment harness"};
    app.require_subcommand(1);

    std::string config_path, edges_path, labels_path, detector_override, noisy_out;
    std::string metric, regions_path, beliefs_path, scores_path, eval_out;
    std::size_t attack_index = 0, size_index = 0;
    int trial = 0;
    Overrides ov;

    auto* synth = app.add_subcommand("synth", "emit scenario + label files for one cell");
    synth->add_option("--config", config_path, "experiment config")->required();
    synth->add_option("--attack-index", attack_index, "index into scenario.attack_edges");
    synth->add_option("--size-index", size_index, "index into the Sybil size grid");
    synth->add_option("--trial", trial, "trial index");
    add_overrides(synth, ov);

    auto* detect = app.add_subcommand("detect", "run one detector on a scenario + labels");
    detect->add_option("--config", config_path, "experiment config")->required();
    detect->add_option("--edges", edges_path, "edge-list file")->required();
    detect->add_option("--labels", labels_path, "label file")->required();
    detect->add_option("--detector", detector_override, "detector kind override");
    detect->add_option("--attack-index", attack_index, "index into scenario.attack_edges");
    detect->add_option("--size-index", size_index, "index into the Sybil size grid");
    detect->add_option("--trial", trial, "trial index");
    detect->add_option("--noisy-out", noisy_out, "write detected noisy-label node ids here");
    add_overrides(detect, ov);

    auto* eval = app.add_subcommand("eval", "metrics from dumped files");
    eval->add_option("--metric", metric, "classification|auc")->required();
    eval->add_option("--regions", regions_path, "region map file")->required();
    eval->add_option("--beliefs", beliefs_path, "beliefs dump");
    eval->add_option("--scores", scores_path, "scores dump");
    eval->add_option("--labels", labels_path, "labels to exclude from the metric");
    eval->add_option("--out", eval_out, "optional CSV output path");

    auto* sweep = app.add_subcommand("sweep", "full classification sweep from a config");
    sweep->add_option("--config", config_path, "experiment config")->required();
    add_overrides(sweep, ov);

    auto* compare = app.add_subcommand("compare", "full AUC comparison from a config");
    compare->add_option("--config", config_path, "experiment config")->required();
    add_overrides(compare, ov);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return cmd_synth(config_path, ov, attack_index, size_index, trial);
        if (detect->parsed())
            return cmd_detect(config_path, ov, edges_path, labels_path, detector_override,
                              attack_index, size_index, trial, noisy_out);
        if (eval->parsed())
            return cmd_eval(metric, regions_path, beliefs_path, scores_path, labels_path,
                            eval_out);
        if (sweep->parsed())
            return cmd_run(config_path, ov, MetricFamily::Classification, "detail.csv",
                           "summary.csv");
        if (compare->parsed())
            return cmd_run(config_path, ov, MetricFamily::Auc, "detail.csv", "summary.csv");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
