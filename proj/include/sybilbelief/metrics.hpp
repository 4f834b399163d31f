#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sybilbelief/generators.hpp"
#include "sybilbelief/graph.hpp"
#include "sybilbelief/labels.hpp"
#include "sybilbelief/rng.hpp"
#include "sybilbelief/walks.hpp"

namespace sybil {

struct ConfusionCounts {
    std::uint32_t false_negatives = 0; // Sybil-region nodes predicted benign
    std::uint32_t false_positives = 0; // benign-region nodes predicted Sybil
};

/// Counts misclassifications against the scenario's ground truth, skipping
/// the excluded (labeled) nodes.
inline ConfusionCounts confusion(std::span<const Tag> predicted, const ScenarioGraph& scen,
                                 std::span<const NodeId> excluded = {}) {
    const NodeId n = scen.graph.node_count();
    if (predicted.size() != n)
        throw std::invalid_argument("confusion: prediction missing for some nodes (" +
                                    std::to_string(predicted.size()) + " of " +
                                    std::to_string(n) + ")");
    std::vector<bool> skip(n, false);
    for (NodeId v : excluded) skip[v] = true;
    ConfusionCounts c;
    for (NodeId v = 0; v < n; ++v) {
        if (skip[v]) continue;
        if (scen.region[v] == Tag::Sybil && predicted[v] == Tag::Benign) ++c.false_negatives;
        if (scen.region[v] == Tag::Benign && predicted[v] == Tag::Sybil) ++c.false_positives;
    }
    return c;
}

/// Probability that a uniformly random benign node outscores a uniformly
/// random Sybil node, ties counting half (Mann-Whitney via average ranks,
/// O(N log N)). Excluded nodes do not participate.
inline double auc(const ScoreVector& scores, const ScenarioGraph& scen,
                  std::span<const NodeId> excluded = {}) {
    const NodeId n = scen.graph.node_count();
    if (scores.score.size() != n) throw std::invalid_argument("auc: score vector size mismatch");
    std::vector<bool> skip(n, false);
    for (NodeId v : excluded) skip[v] = true;
    std::vector<NodeId> ids;
    ids.reserve(n);
    for (NodeId v = 0; v < n; ++v)
        if (!skip[v]) ids.push_back(v);
    std::sort(ids.begin(), ids.end(),
              [&](NodeId x, NodeId y) { return scores.score[x] < scores.score[y]; });
    std::uint64_t n_benign = 0, n_sybil = 0;
    double benign_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < ids.size()) {
        std::size_t j = i;
        while (j < ids.size() && scores.score[ids[j]] == scores.score[ids[i]]) ++j;
        const double avg_rank = 0.5 * double(i + 1 + j); // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (scen.region[ids[k]] == Tag::Benign) {
                ++n_benign;
                benign_rank_sum += avg_rank;
            } else {
                ++n_sybil;
            }
        }
        i = j;
    }
    if (n_benign == 0 || n_sybil == 0)
        throw std::invalid_argument("auc: needs at least one benign and one Sybil node outside "
                                    "the excluded set");
    return (benign_rank_sum - 0.5 * double(n_benign) * double(n_benign + 1)) /
           (double(n_benign) * double(n_sybil));
}

/// How labels are drawn for each trial of an experiment.
struct LabelPlan {
    std::uint32_t n_benign = 1;
    std::uint32_t n_sybil = 1;
    SitePolicy benign_site = SitePolicy::Uniform;
    SitePolicy sybil_site = SitePolicy::Uniform;
    std::uint32_t noise_benign = 0;
    std::uint32_t noise_sybil = 0;
    // When > 0: benign labels must cover this many consecutive id blocks
    // of `community_size` nodes (community_graph layout).
    std::uint32_t cover_communities = 0;
    NodeId community_size = 0;
};

/// Samples a label set per the plan; noise flips are applied last.
inline LabelSet make_labels(const ScenarioGraph& scen, const LabelPlan& plan,
                            std::uint64_t seed) {
    LabelSet labels =
        plan.cover_communities > 0
            ? sample_labels_covering_blocks(scen, plan.n_benign, plan.n_sybil,
                                            plan.cover_communities, plan.community_size,
                                            derive_seed(seed, "labels"))
            : sample_labels(scen, plan.n_benign, plan.n_sybil, plan.benign_site, plan.sybil_site,
                            derive_seed(seed, "labels"));
    if (plan.noise_benign > 0 || plan.noise_sybil > 0)
        labels = inject_noise(std::move(labels), plan.noise_benign, plan.noise_sybil,
                              derive_seed(seed, "noise"));
    return labels;
}

/// A classification detector: scenario + observed labels + seed -> per-node
/// predicted tags.
using Classifier =
    std::function<std::vector<Tag>(const ScenarioGraph&, const LabelSet&, std::uint64_t)>;

struct SweepPoint {
    NodeId sybil_size = 0;
    std::vector<ConfusionCounts> trials;
    double mean_false_negatives = 0.0;
    double mean_false_positives = 0.0;
};

/// Misclassification counts over a grid of Sybil-region sizes. The
/// headline numbers take the worst size for the mean curves.
struct SweepResult {
    std::vector<SweepPoint> points;
    double accepted_sybils = 0.0; // max over sizes of the mean false negatives
    double rejected_benign = 0.0; // max over sizes of the mean false positives
};

/// Geometric size grid bracketing the rise-then-fall of the false-negative
/// curve: {0.1, 0.2, 0.4, 0.8, 1.6, 3.2} x benign size, rounded up.
inline std::vector<NodeId> default_size_grid(NodeId benign_nodes) {
    std::vector<NodeId> grid;
    for (double f : {0.1, 0.2, 0.4, 0.8, 1.6, 3.2})
        grid.push_back(NodeId(std::ceil(f * double(benign_nodes))));
    return grid;
}

namespace detail {

/// Runs `count` independent cells on up to `jobs` threads.
inline void run_cells(std::size_t count, int jobs, const std::function<void(std::size_t)>& cell) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) cell(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = int(std::min<std::size_t>(std::size_t(jobs), count));
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) cell(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// For each size in the grid, builds `trials` fresh scenarios (fixed
/// benign region, new Sybil region + attack edges + labels per trial),
/// runs the detector, and averages the confusion counts. Cell seeds are
/// derived from the master seed, so results do not depend on `jobs`.
inline SweepResult sweep_accepted_sybils(const Graph& benign, std::uint64_t attack_edge_count,
                                         GeneratorSpec sybil_template,
                                         std::span<const NodeId> size_grid,
                                         const Classifier& detector, const LabelPlan& plan,
                                         int trials, std::uint64_t seed, int jobs = 1) {
    if (size_grid.empty()) throw std::invalid_argument("sweep: empty size grid");
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    SweepResult res;
    res.points.resize(size_grid.size());
    for (std::size_t si = 0; si < size_grid.size(); ++si) {
        res.points[si].sybil_size = size_grid[si];
        res.points[si].trials.resize(trials);
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    detail::run_cells(size_grid.size() * std::size_t(trials), jobs, [&](std::size_t cell) {
        try {
            const std::size_t si = cell / trials;
            const int t = int(cell % trials);
            const std::uint64_t cell_seed = derive_seed(seed, "cell", cell);
            GeneratorSpec sybil_spec = sybil_template;
            sybil_spec.node_count = size_grid[si];
            sybil_spec.seed = derive_seed(cell_seed, "sybil-graph");
            const ScenarioGraph scen =
                compose_regions(benign, generate(sybil_spec), attack_edge_count,
                                derive_seed(cell_seed, "attack-edges"));
            const LabelSet labels = make_labels(scen, plan, cell_seed);
            const auto predicted = detector(scen, labels, derive_seed(cell_seed, "detector"));
            res.points[si].trials[t] = confusion(predicted, scen, labels.nodes());
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);
    for (auto& pt : res.points) {
        double fn = 0.0, fp = 0.0;
        for (const auto& c : pt.trials) {
            fn += c.false_negatives;
            fp += c.false_positives;
        }
        pt.mean_false_negatives = fn / double(trials);
        pt.mean_false_positives = fp / double(trials);
        res.accepted_sybils = std::max(res.accepted_sybils, pt.mean_false_negatives);
        res.rejected_benign = std::max(res.rejected_benign, pt.mean_false_positives);
    }
    return res;
}

}  // namespace sybil
