#pragma once

// Test-side oracles: exact MRF marginals by direct enumeration of the
// joint, plus small random-structure builders. Deliberately independent of
// the message-passing implementation under test.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sybilbelief/belief.hpp"
#include "sybilbelief/graph.hpp"
#include "sybilbelief/labels.hpp"
#include "sybilbelief/rng.hpp"

namespace oracle {

/// Exact posteriors of the label-clamped pairwise MRF: enumerate all
/// assignments of the unlabeled nodes, weigh each by the product of node
/// and edge potentials, and accumulate per-node marginal mass.
inline std::vector<sybil::Posterior> enumerate_posteriors(const sybil::Graph& g,
                                                          const sybil::LabelSet& labels,
                                                          const sybil::MrfParams& params) {
    const sybil::NodeId n = g.node_count();
    std::vector<int> state(n, 0);
    std::vector<sybil::NodeId> free_nodes;
    for (sybil::NodeId v = 0; v < n; ++v) {
        if (labels.contains(v))
            state[v] = labels.at(v).tag == sybil::Tag::Benign ? +1 : -1;
        else
            free_nodes.push_back(v);
    }
    if (free_nodes.size() > 25)
        throw std::invalid_argument("enumeration oracle: too many unlabeled nodes");

    const auto edges = g.edges();
    std::vector<double> edge_w(edges.size(), params.w_default);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto it = params.per_edge_w.find(edges[i]);
        if (it != params.per_edge_w.end()) edge_w[i] = it->second;
    }

    std::vector<double> benign_mass(n, 0.0);
    double total = 0.0;
    const std::uint64_t count = std::uint64_t(1) << free_nodes.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < free_nodes.size(); ++i)
            state[free_nodes[i]] = (mask >> i) & 1 ? +1 : -1;
        double w = 1.0;
        for (sybil::NodeId v = 0; v < n; ++v) {
            const double theta =
                labels.contains(v) ? params.theta_labeled : params.theta_default;
            w *= state[v] > 0 ? theta : 1.0 - theta;
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const bool same = state[edges[i].first] == state[edges[i].second];
            w *= same ? edge_w[i] : 1.0 - edge_w[i];
        }
        total += w;
        for (sybil::NodeId v = 0; v < n; ++v)
            if (state[v] > 0) benign_mass[v] += w;
    }
    std::vector<sybil::Posterior> out(n);
    for (sybil::NodeId v = 0; v < n; ++v)
        out[v] = {(total - benign_mass[v]) / total, benign_mass[v] / total};
    return out;
}

/// Uniform random recursive tree on n nodes.
inline sybil::Graph random_tree(sybil::NodeId n, sybil::Rng& rng) {
    std::vector<sybil::Edge> edges;
    for (sybil::NodeId v = 1; v < n; ++v)
        edges.push_back(sybil::make_edge(v, sybil::NodeId(rng.below(v))));
    return sybil::Graph(n, edges);
}

/// Random tree plus up to `extra` additional random edges (duplicates and
/// self-pairs dropped); connected by construction.
inline sybil::Graph random_connected_graph(sybil::NodeId n, int extra, sybil::Rng& rng) {
    std::vector<sybil::Edge> edges;
    for (sybil::NodeId v = 1; v < n; ++v)
        edges.push_back(sybil::make_edge(v, sybil::NodeId(rng.below(v))));
    for (int i = 0; i < extra; ++i) {
        const auto u = sybil::NodeId(rng.below(n));
        const auto v = sybil::NodeId(rng.below(n));
        if (u != v) edges.push_back(sybil::make_edge(u, v));
    }
    return sybil::Graph(n, edges);
}

/// Labels a random subset of nodes with random tags.
inline sybil::LabelSet random_labels(const sybil::Graph& g, std::uint32_t count,
                                     sybil::Rng& rng) {
    std::vector<sybil::NodeId> pool(g.node_count());
    for (sybil::NodeId v = 0; v < g.node_count(); ++v) pool[v] = v;
    sybil::LabelSet labels;
    for (sybil::NodeId v : sybil::sample_without_replacement(std::move(pool), count, rng))
        labels.insert(v, rng.bernoulli(0.5) ? sybil::Tag::Benign : sybil::Tag::Sybil);
    return labels;
}

}  // namespace oracle
