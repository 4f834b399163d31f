#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "sybilbelief/graph.hpp"
#include "sybilbelief/rng.hpp"

namespace sybil {

enum class GraphModel : std::uint8_t { ErdosRenyi, PreferentialAttachment };

/// One synthetic region: model, size, target average degree, seed.
/// ER derives the pair probability p = avg_degree / (n - 1); PA derives
/// the per-node attachment count c = round(avg_degree / 2).
struct GeneratorSpec {
    GraphModel kind = GraphModel::PreferentialAttachment;
    NodeId node_count = 1000;
    double avg_degree = 10.0;
    std::uint64_t seed = 0;
};

/// G(n, p) with p = avg_degree/(n-1). Pairs are visited in lexicographic
/// order with geometric gap skipping, so cost is O(n + m).
inline Graph gen_er(const GeneratorSpec& spec) {
    const NodeId n = spec.node_count;
    if (n < 2) return Graph(n, std::vector<Edge>{});
    const double p = spec.avg_degree / double(n - 1);
    if (p <= 0.0) throw std::invalid_argument("gen_er: avg_degree must be positive");
    if (p > 1.0)
        throw std::invalid_argument("gen_er: avg_degree " + std::to_string(spec.avg_degree) +
                                    " exceeds n-1, edge probability > 1");
    std::vector<Edge> edges;
    if (p == 1.0) {
        for (NodeId u = 0; u + 1 < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        return Graph(n, edges);
    }
    Rng rng(spec.seed);
    const double log1mp = std::log1p(-p);
    NodeId u = 0;
    std::uint64_t col = 0; // column offset within row u; 0 means pair (u, u+1)
    bool first = true;
    while (u + 1 < n) {
        const double r = 1.0 - rng.unit(); // in (0, 1]
        const auto gap = std::uint64_t(std::floor(std::log(r) / log1mp));
        col += first ? gap : gap + 1;
        first = false;
        while (u + 1 < n && col >= std::uint64_t(n) - u - 1) {
            col -= std::uint64_t(n) - u - 1;
            ++u;
        }
        if (u + 1 >= n) break;
        edges.emplace_back(u, NodeId(u + 1 + col));
    }
    return Graph(n, edges);
}

/// Preferential attachment with a (c+1)-clique seed; every later node
/// attaches c distinct edges to existing nodes with probability
/// proportional to current degree. Edge count is exactly
/// C(c+1,2) + (n-c-1)*c.
inline Graph gen_pa(const GeneratorSpec& spec) {
    const NodeId n = spec.node_count;
    const long c = std::lround(spec.avg_degree / 2.0);
    if (c < 1) throw std::invalid_argument("gen_pa: avg_degree/2 must round to at least 1");
    if (n <= NodeId(c))
        throw std::invalid_argument("gen_pa: node_count must exceed attachment count " +
                                    std::to_string(c));
    Rng rng(spec.seed);
    std::vector<Edge> edges;
    edges.reserve(std::size_t(c + 1) * c / 2 + std::size_t(n) * c);
    // One entry per endpoint; sampling an index uniformly is
    // degree-proportional sampling of the node.
    std::vector<NodeId> endpoint_pool;
    endpoint_pool.reserve(2 * edges.capacity());
    for (NodeId u = 0; u <= NodeId(c); ++u) {
        for (NodeId v = u + 1; v <= NodeId(c); ++v) {
            edges.emplace_back(u, v);
            endpoint_pool.push_back(u);
            endpoint_pool.push_back(v);
        }
    }
    std::vector<NodeId> targets;
    for (NodeId v = NodeId(c) + 1; v < n; ++v) {
        targets.clear();
        while (targets.size() < std::size_t(c)) {
            const NodeId t = endpoint_pool[rng.below(endpoint_pool.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.push_back(make_edge(v, t));
            endpoint_pool.push_back(v);
            endpoint_pool.push_back(t);
        }
    }
    return Graph(n, edges);
}

inline Graph generate(const GeneratorSpec& spec) {
    return spec.kind == GraphModel::ErdosRenyi ? gen_er(spec) : gen_pa(spec);
}

namespace detail {

/// `count` distinct cross pairs (left, right) from [0,n_left) x [0,n_right),
/// uniform without replacement. Rejection sampling first; if collisions eat
/// the attempt budget (dense regime), falls back to enumerating the
/// remaining pairs.
inline std::vector<std::pair<NodeId, NodeId>> sample_cross_pairs(NodeId n_left, NodeId n_right,
                                                                 std::uint64_t count, Rng& rng) {
    const std::uint64_t total = std::uint64_t(n_left) * n_right;
    if (count > total)
        throw std::invalid_argument("requested " + std::to_string(count) +
                                    " cross edges but only " + std::to_string(total) +
                                    " pairs exist");
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(count * 2);
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 100 * count;
    while (chosen.size() < count && attempts < max_attempts) {
        ++attempts;
        const std::uint64_t key = rng.below(n_left) * n_right + rng.below(n_right);
        chosen.insert(key);
    }
    if (chosen.size() < count) {
        std::vector<std::uint64_t> remaining;
        remaining.reserve(total - chosen.size());
        for (std::uint64_t key = 0; key < total; ++key)
            if (!chosen.contains(key)) remaining.push_back(key);
        for (std::uint64_t key :
             sample_without_replacement(std::move(remaining), count - chosen.size(), rng))
            chosen.insert(key);
    }
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(chosen.size());
    for (std::uint64_t key : chosen)
        out.emplace_back(NodeId(key / n_right), NodeId(key % n_right));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Disjoint union of a benign and a Sybil region (Sybil ids offset by the
/// benign node count) plus `attack_edge_count` distinct cross-region edges
/// sampled uniformly at random.
inline ScenarioGraph compose_regions(const Graph& benign, const Graph& sybil,
                                     std::uint64_t attack_edge_count, std::uint64_t seed) {
    const NodeId nb = benign.node_count();
    const NodeId ns = sybil.node_count();
    Rng rng(seed);
    const auto cross = detail::sample_cross_pairs(nb, ns, attack_edge_count, rng);

    std::vector<Edge> edges = benign.edges();
    edges.reserve(edges.size() + sybil.edge_count() + cross.size());
    for (const auto& [u, v] : sybil.edges()) edges.emplace_back(u + nb, v + nb);

    ScenarioGraph scen;
    scen.attack_edges.reserve(cross.size());
    for (const auto& [b, s] : cross) {
        const Edge e = make_edge(b, s + nb);
        edges.push_back(e);
        scen.attack_edges.push_back(e);
    }
    std::sort(scen.attack_edges.begin(), scen.attack_edges.end());
    scen.graph = Graph(nb + ns, edges);
    scen.region.assign(std::size_t(nb) + ns, Tag::Benign);
    std::fill(scen.region.begin() + nb, scen.region.end(), Tag::Sybil);
    return scen;
}

/// k independent PA communities laid out in consecutive id blocks of
/// community_spec.node_count nodes; community i >= 1 is joined to the
/// union of communities 0..i-1 by `inter_edges` cross edges sampled
/// uniformly without replacement. Connected by construction.
inline Graph community_graph(std::uint32_t k, const GeneratorSpec& community_spec,
                             std::uint32_t inter_edges, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("community_graph: k must be >= 1");
    const NodeId block = community_spec.node_count;
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < k; ++i) {
        GeneratorSpec spec = community_spec;
        spec.seed = derive_seed(seed, "community", i);
        const NodeId off = i * block;
        for (const auto& [u, v] : generate(spec).edges()) edges.emplace_back(u + off, v + off);
        if (i > 0) {
            Rng rng(derive_seed(seed, "community-join", i));
            for (const auto& [prev, inside] :
                 detail::sample_cross_pairs(off, block, inter_edges, rng))
                edges.push_back(make_edge(prev, inside + off));
        }
    }
    return Graph(k * block, edges);
}

/// Scenario whose Sybil region is an exact copy of `base` (ids offset by
/// the base node count), with uniformly random attack edges.
inline ScenarioGraph duplicate_region_scenario(const Graph& base, std::uint64_t attack_edge_count,
                                               std::uint64_t seed) {
    return compose_regions(base, base, attack_edge_count, seed);
}

}  // namespace sybil
