#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "sybilbelief/config.hpp"
#include "sybilbelief/metrics.hpp"
#include "sybilbelief/serialize.hpp"

namespace sybil {

/// Everything an experiment emits: the CSV tables plus the numbers they
/// were rendered from.
struct ExperimentResult {
    std::string detail_csv;
    std::string summary_csv;
    // classification family: one sweep per attack-edge count
    std::vector<SweepResult> sweeps;
    // auc family: auc_values[attack][trial][roster index], plus per-attack means
    std::vector<std::vector<std::vector<double>>> auc_values;
    std::vector<std::vector<double>> auc_means;
};

/// Builds the benign region named by the config (fresh generators are
/// seeded from run.seed; datasets are reduced to their largest connected
/// component).
inline Graph build_benign_region(const ExperimentConfig& cfg) {
    const std::uint64_t gseed = derive_seed(cfg.seed, "benign-graph");
    switch (cfg.benign_source) {
        case BenignSource::Pa:
            return gen_pa({GraphModel::PreferentialAttachment, cfg.benign_nodes,
                           cfg.benign_avg_degree, gseed});
        case BenignSource::Er:
            return gen_er({GraphModel::ErdosRenyi, cfg.benign_nodes, cfg.benign_avg_degree,
                           gseed});
        case BenignSource::Communities: {
            GeneratorSpec community{GraphModel::PreferentialAttachment,
                                    cfg.benign_nodes / cfg.communities, cfg.benign_avg_degree, 0};
            return community_graph(cfg.communities, community, cfg.inter_edges, gseed);
        }
        case BenignSource::Dataset: {
            std::ifstream f(cfg.dataset_path);
            if (!f) throw std::runtime_error("cannot open dataset " + cfg.dataset_path);
            return largest_connected_component(load_edge_list(f)).graph;
        }
    }
    throw std::logic_error("unreachable");
}

/// Per-cell seed: one attack-edge block per x value, cells enumerated
/// size-major then trial. synth/detect reproduce any cell from the same
/// master seed and indices.
inline std::uint64_t cell_seed(const ExperimentConfig& cfg, std::size_t attack_index,
                               std::size_t size_index, int trial) {
    const std::uint64_t block = derive_seed(cfg.seed, "attack-block", attack_index);
    return derive_seed(block, "cell", size_index * std::size_t(cfg.trials) + std::size_t(trial));
}

inline LabelPlan label_plan(const ExperimentConfig& cfg) {
    LabelPlan plan = cfg.labels;
    if (cfg.cover_communities) {
        plan.cover_communities = cfg.communities;
        plan.community_size = cfg.benign_nodes / cfg.communities;
    }
    return plan;
}

/// Scenario for one cell of the experiment matrix. `sybil_size` of 0 keeps
/// the configured fixed size.
inline ScenarioGraph build_cell_scenario(const ExperimentConfig& cfg, const Graph& benign,
                                         NodeId sybil_size, std::uint64_t attack_count,
                                         std::uint64_t cell_seed_value) {
    if (cfg.sybil_source == SybilSource::Duplicate)
        return duplicate_region_scenario(benign, attack_count,
                                         derive_seed(cell_seed_value, "attack-edges"));
    GeneratorSpec spec{cfg.sybil_source == SybilSource::Er ? GraphModel::ErdosRenyi
                                                           : GraphModel::PreferentialAttachment,
                       sybil_size == 0 ? cfg.sybil_nodes : sybil_size, cfg.sybil_avg_degree,
                       derive_seed(cell_seed_value, "sybil-graph")};
    return compose_regions(benign, generate(spec), attack_count,
                           derive_seed(cell_seed_value, "attack-edges"));
}

inline Beliefs run_sb_beliefs(const ExperimentConfig& cfg, const ScenarioGraph& scen,
                              const LabelSet& labels, std::uint64_t seed, bool keep_messages) {
    LbpOptions opt = cfg.lbp;
    opt.keep_messages = keep_messages;
    if (cfg.detector && *cfg.detector == DetectorKind::SBB) {
        BoostOptions bopt;
        bopt.trials = cfg.boost_trials;
        bopt.samples_per_trial = cfg.boost_samples;
        bopt.include_labeled = cfg.boost_include_labeled;
        bopt.seed = seed;
        bopt.lbp = opt;
        return boosted_lbp(scen.graph, labels, cfg.mrf, bopt);
    }
    const MrfModel model(scen.graph, labels, cfg.mrf);
    return run_lbp(model, opt);
}

/// The configured SB-family detector as a sweep callback.
inline Classifier make_classifier(const ExperimentConfig& cfg) {
    return [cfg](const ScenarioGraph& scen, const LabelSet& labels, std::uint64_t seed) {
        return classify(run_sb_beliefs(cfg, scen, labels, seed, false));
    };
}

/// Scores from one roster detector. `clean` and `noisy` are the shared
/// trial label set and its noise-injected variant; the rank baselines see
/// only the single-tag subset they can use.
inline ScoreVector run_ranking_detector(DetectorKind kind, const ExperimentConfig& cfg,
                                        const ScenarioGraph& scen, const LabelSet& clean,
                                        const LabelSet& noisy, std::uint64_t seed) {
    LbpOptions lbp_opt = cfg.lbp;
    lbp_opt.keep_messages = false;
    switch (kind) {
        case DetectorKind::SB: {
            const MrfModel m(scen.graph, clean, cfg.mrf);
            return beliefs_to_scores(run_lbp(m, lbp_opt));
        }
        case DetectorKind::SBN: {
            const MrfModel m(scen.graph, noisy, cfg.mrf);
            return beliefs_to_scores(run_lbp(m, lbp_opt));
        }
        case DetectorKind::SBB: {
            BoostOptions bopt;
            bopt.trials = cfg.boost_trials;
            bopt.samples_per_trial = cfg.boost_samples;
            bopt.include_labeled = cfg.boost_include_labeled;
            bopt.seed = seed;
            bopt.lbp = lbp_opt;
            return beliefs_to_scores(
                boosted_lbp(scen.graph, clean.subset(Tag::Benign), cfg.mrf, bopt));
        }
        case DetectorKind::SR:
            return sybilrank(scen.graph, clean.subset(Tag::Benign), cfg.sybilrank_opt);
        case DetectorKind::SRN:
            return sybilrank(scen.graph, noisy.subset(Tag::Benign), cfg.sybilrank_opt);
        case DetectorKind::CIA:
            return cia(scen.graph, clean.subset(Tag::Sybil), cfg.cia_opt);
        case DetectorKind::CIAN:
            return cia(scen.graph, noisy.subset(Tag::Sybil), cfg.cia_opt);
        case DetectorKind::Random:
            return random_scores(scen.graph, seed);
    }
    throw std::logic_error("unreachable");
}

namespace detail {

inline std::string format_mean(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

inline ExperimentResult run_classification_experiment(const ExperimentConfig& cfg,
                                                      const Graph& benign) {
    const std::vector<NodeId> grid =
        cfg.size_grid.empty() ? default_size_grid(benign.node_count()) : cfg.size_grid;
    GeneratorSpec sybil_template{cfg.sybil_source == SybilSource::Er
                                     ? GraphModel::ErdosRenyi
                                     : GraphModel::PreferentialAttachment,
                                 0, cfg.sybil_avg_degree, 0};
    const LabelPlan plan = label_plan(cfg);
    const Classifier detector = make_classifier(cfg);

    ExperimentResult res;
    std::ostringstream detail_csv, summary_csv;
    detail_csv << "attack_edges,sybil_size,trial,false_negatives,false_positives\n";
    summary_csv << "attack_edges,trial,accepted_sybils,rejected_benign\n";
    for (std::size_t ax = 0; ax < cfg.attack_edges.size(); ++ax) {
        const std::uint64_t attack = cfg.attack_edges[ax];
        const std::uint64_t block_seed = derive_seed(cfg.seed, "attack-block", ax);
        SweepResult sweep = sweep_accepted_sybils(benign, attack, sybil_template, grid, detector,
                                                  plan, cfg.trials, block_seed, cfg.jobs);
        for (const auto& pt : sweep.points) {
            for (int t = 0; t < cfg.trials; ++t)
                detail_csv << attack << ',' << pt.sybil_size << ',' << t << ','
                           << pt.trials[t].false_negatives << ','
                           << pt.trials[t].false_positives << '\n';
            detail_csv << attack << ',' << pt.sybil_size << ",mean,"
                       << format_mean(pt.mean_false_negatives) << ','
                       << format_mean(pt.mean_false_positives) << '\n';
        }
        for (int t = 0; t < cfg.trials; ++t) {
            std::uint32_t acc = 0, rej = 0;
            for (const auto& pt : sweep.points) {
                acc = std::max(acc, pt.trials[t].false_negatives);
                rej = std::max(rej, pt.trials[t].false_positives);
            }
            summary_csv << attack << ',' << t << ',' << acc << ',' << rej << '\n';
        }
        summary_csv << attack << ",aggregate," << format_mean(sweep.accepted_sybils) << ','
                    << format_mean(sweep.rejected_benign) << '\n';
        res.sweeps.push_back(std::move(sweep));
    }
    res.detail_csv = detail_csv.str();
    res.summary_csv = summary_csv.str();
    return res;
}

inline ExperimentResult run_auc_experiment(const ExperimentConfig& cfg, const Graph& benign,
                                           const std::filesystem::path& dump_dir) {
    const LabelPlan base_plan = label_plan(cfg);
    LabelPlan clean_plan = base_plan;
    clean_plan.noise_benign = clean_plan.noise_sybil = 0;
    const bool want_noise = base_plan.noise_benign + base_plan.noise_sybil > 0;

    ExperimentResult res;
    res.auc_values.assign(cfg.attack_edges.size(),
                          std::vector<std::vector<double>>(
                              cfg.trials, std::vector<double>(cfg.roster.size(), 0.0)));
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t cells = cfg.attack_edges.size() * std::size_t(cfg.trials);
    run_cells(cells, cfg.jobs, [&](std::size_t cell) {
        try {
            const std::size_t ax = cell / cfg.trials;
            const int t = int(cell % cfg.trials);
            const std::uint64_t cs = cell_seed(cfg, ax, 0, t);
            const ScenarioGraph scen =
                build_cell_scenario(cfg, benign, 0, cfg.attack_edges[ax], cs);
            const LabelSet clean = make_labels(scen, clean_plan, cs);
            const LabelSet noisy =
                want_noise ? inject_noise(clean, base_plan.noise_benign, base_plan.noise_sybil,
                                          derive_seed(cs, "noise"))
                           : clean;
            const auto excluded = clean.nodes();
            for (std::size_t d = 0; d < cfg.roster.size(); ++d) {
                const DetectorKind kind = cfg.roster[d];
                const ScoreVector scores = run_ranking_detector(
                    kind, cfg, scen, clean, noisy, derive_seed(cs, detector_name(kind)));
                res.auc_values[ax][t][d] = auc(scores, scen, excluded);
                if (cfg.dump_beliefs && !dump_dir.empty()) {
                    const auto dir = dump_dir / ("attack" + std::to_string(cfg.attack_edges[ax])) /
                                     ("trial" + std::to_string(t));
                    std::filesystem::create_directories(dir);
                    std::ofstream f(dir / (std::string(detector_name(kind)) + ".txt"));
                    save_scores(f, scores);
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);

    std::ostringstream detail_csv, summary_csv;
    detail_csv << "attack_edges,trial";
    summary_csv << "attack_edges,trial";
    for (DetectorKind k : cfg.roster) {
        detail_csv << ",auc_" << detector_name(k);
        summary_csv << ",auc_" << detector_name(k);
    }
    detail_csv << '\n';
    summary_csv << '\n';
    res.auc_means.assign(cfg.attack_edges.size(), std::vector<double>(cfg.roster.size(), 0.0));
    for (std::size_t ax = 0; ax < cfg.attack_edges.size(); ++ax) {
        for (int t = 0; t < cfg.trials; ++t) {
            detail_csv << cfg.attack_edges[ax] << ',' << t;
            for (std::size_t d = 0; d < cfg.roster.size(); ++d) {
                detail_csv << ',' << format_fixed9(res.auc_values[ax][t][d]);
                res.auc_means[ax][d] += res.auc_values[ax][t][d];
            }
            detail_csv << '\n';
        }
        summary_csv << cfg.attack_edges[ax] << ",mean";
        for (std::size_t d = 0; d < cfg.roster.size(); ++d) {
            res.auc_means[ax][d] /= double(cfg.trials);
            summary_csv << ',' << format_fixed9(res.auc_means[ax][d]);
        }
        summary_csv << '\n';
    }
    res.detail_csv = detail_csv.str();
    res.summary_csv = summary_csv.str();
    return res;
}

}  // namespace detail

/// Executes the configured experiment matrix. Cell seeds derive from
/// (run.seed, attack index, size index, trial), so output is byte-stable
/// across reruns and worker counts. `dump_dir` receives per-cell score
/// dumps when run.dump_beliefs is on.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& dump_dir = {}) {
    validate_config(cfg);
    const Graph benign = build_benign_region(cfg);
    if (*cfg.family == MetricFamily::Classification)
        return detail::run_classification_experiment(cfg, benign);
    return detail::run_auc_experiment(cfg, benign, dump_dir);
}

}  // namespace sybil
