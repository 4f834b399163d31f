#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sybilbelief/belief.hpp"
#include "sybilbelief/graph.hpp"
#include "sybilbelief/labels.hpp"
#include "sybilbelief/rng.hpp"

namespace sybil {

enum class ScoreProvenance : std::uint8_t { SybilRank, Cia, Random, SybilBelief };

inline const char* provenance_name(ScoreProvenance p) {
    switch (p) {
        case ScoreProvenance::SybilRank: return "SybilRank";
        case ScoreProvenance::Cia: return "CIA";
        case ScoreProvenance::Random: return "Random";
        case ScoreProvenance::SybilBelief: return "SybilBelief";
    }
    return "?";
}

/// Per-node reputation scores; higher means more trusted.
struct ScoreVector {
    std::vector<double> score;
    ScoreProvenance provenance = ScoreProvenance::Random;
    int iterations = 0;
    bool converged = true;
};

namespace detail {

/// One step of the simple random walk: mass[u] splits uniformly over u's
/// neighbors. Degree-0 nodes keep their mass in place so total mass is
/// conserved.
inline void walk_step(const Graph& g, const std::vector<double>& p, std::vector<double>& next) {
    std::fill(next.begin(), next.end(), 0.0);
    const auto off = g.offsets();
    const auto adj = g.adjacency();
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const std::uint32_t d = off[u + 1] - off[u];
        if (d == 0) {
            next[u] += p[u];
            continue;
        }
        const double share = p[u] / d;
        for (std::uint32_t j = off[u]; j < off[u + 1]; ++j) next[adj[j]] += share;
    }
}

}  // namespace detail

struct SybilRankOptions {
    int iterations = 0;    // 0: use ceil(log(n)) in the configured base
    bool natural_log = false;
};

/// Early-terminated power iteration from the labeled benign nodes (mass
/// 1/h each), degree-normalized at the end. Degree-0 nodes score 0.
inline ScoreVector sybilrank(const Graph& g, const LabelSet& benign_labels,
                             const SybilRankOptions& opt = {}) {
    if (benign_labels.count(Tag::Sybil) != 0)
        throw std::invalid_argument("sybilrank: accepts benign labels only");
    const auto seeds = benign_labels.nodes_with(Tag::Benign);
    if (seeds.empty()) throw std::invalid_argument("sybilrank: needs at least one benign label");
    for (NodeId v : seeds)
        if (v >= g.node_count())
            throw std::invalid_argument("sybilrank: label on unknown node " + std::to_string(v));

    int iters = opt.iterations;
    if (iters <= 0) {
        const double n = double(std::max<NodeId>(g.node_count(), 2));
        iters = int(std::ceil(opt.natural_log ? std::log(n) : std::log2(n)));
    }
    std::vector<double> p(g.node_count(), 0.0);
    for (NodeId v : seeds) p[v] = 1.0 / double(seeds.size());
    std::vector<double> next(p.size());
    for (int it = 0; it < iters; ++it) {
        detail::walk_step(g, p, next);
        p.swap(next);
    }
    ScoreVector out;
    out.provenance = ScoreProvenance::SybilRank;
    out.iterations = iters;
    out.score.resize(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto d = g.degree(v);
        out.score[v] = d > 0 ? p[v] / d : 0.0;
    }
    return out;
}

struct CiaOptions {
    double alpha = 0.85;
    double tolerance = 1e-6;
    int max_iterations = 1000;
};

/// Random walk with restart from the labeled Sybil nodes, iterated to the
/// fixed point p = (1-alpha) r + alpha W^T p. The reputation of a node is
/// 1 - p_v.
inline ScoreVector cia(const Graph& g, const LabelSet& sybil_labels, const CiaOptions& opt = {}) {
    if (sybil_labels.count(Tag::Benign) != 0)
        throw std::invalid_argument("cia: accepts Sybil labels only");
    const auto seeds = sybil_labels.nodes_with(Tag::Sybil);
    if (seeds.empty()) throw std::invalid_argument("cia: needs at least one Sybil label");
    for (NodeId v : seeds)
        if (v >= g.node_count())
            throw std::invalid_argument("cia: label on unknown node " + std::to_string(v));

    std::vector<double> restart(g.node_count(), 0.0);
    for (NodeId v : seeds) restart[v] = 1.0 / double(seeds.size());
    std::vector<double> p = restart;
    std::vector<double> walked(p.size());
    ScoreVector out;
    out.provenance = ScoreProvenance::Cia;
    out.converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        detail::walk_step(g, p, walked);
        double delta = 0.0;
        for (NodeId v = 0; v < g.node_count(); ++v) {
            const double next = (1.0 - opt.alpha) * restart[v] + opt.alpha * walked[v];
            delta += std::abs(next - p[v]);
            p[v] = next;
        }
        out.iterations = it + 1;
        if (delta < opt.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.score.resize(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) out.score[v] = 1.0 - p[v];
    return out;
}

/// I.i.d. uniform(0,1) reputation scores.
inline ScoreVector random_scores(const Graph& g, std::uint64_t seed) {
    Rng rng(seed);
    ScoreVector out;
    out.provenance = ScoreProvenance::Random;
    out.score.resize(g.node_count());
    for (auto& s : out.score) s = rng.unit();
    return out;
}

/// P(benign) posteriors viewed as reputation scores.
inline ScoreVector beliefs_to_scores(const Beliefs& b) {
    ScoreVector out;
    out.provenance = ScoreProvenance::SybilBelief;
    out.iterations = b.iterations_run;
    out.converged = b.converged;
    out.score.resize(b.posterior.size());
    for (std::size_t v = 0; v < out.score.size(); ++v) out.score[v] = b.posterior[v].benign;
    return out;
}

/// Nodes in descending score order, ties toward the smaller id.
inline std::vector<NodeId> rank_by_score(const ScoreVector& s) {
    std::vector<NodeId> ids(s.score.size());
    for (std::size_t v = 0; v < ids.size(); ++v) ids[v] = NodeId(v);
    std::sort(ids.begin(), ids.end(), [&](NodeId x, NodeId y) {
        if (s.score[x] != s.score[y]) return s.score[x] > s.score[y];
        return x < y;
    });
    return ids;
}

}  // namespace sybil
