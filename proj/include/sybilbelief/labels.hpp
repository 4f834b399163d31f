#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sybilbelief/graph.hpp"
#include "sybilbelief/rng.hpp"

namespace sybil {

/// Where labeled nodes may be drawn from within a region, relative to the
/// attack edges.
enum class SitePolicy : std::uint8_t {
    Uniform,     // any node in the region
    NonEndpoint, // nodes not incident to any attack edge ("SI")
    Endpoint,    // nodes incident to at least one attack edge ("SII")
};

inline const char* site_policy_name(SitePolicy p) {
    switch (p) {
        case SitePolicy::Uniform: return "uniform";
        case SitePolicy::NonEndpoint: return "si";
        case SitePolicy::Endpoint: return "sii";
    }
    return "?";
}

struct LabelEntry {
    Tag tag;
    bool noisy = false; // true if the tag was deliberately flipped
};

/// Observed label set: node -> tag, with provenance flags for injected
/// noise. At most one entry per node; iteration is in node-id order.
class LabelSet {
public:
    using Map = std::map<NodeId, LabelEntry>;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    bool contains(NodeId v) const { return entries_.count(v) != 0; }

    void insert(NodeId v, Tag tag, bool noisy = false) {
        if (!entries_.emplace(v, LabelEntry{tag, noisy}).second)
            throw std::invalid_argument("node " + std::to_string(v) + " already labeled");
    }

    const LabelEntry& at(NodeId v) const { return entries_.at(v); }

    Map::const_iterator begin() const { return entries_.begin(); }
    Map::const_iterator end() const { return entries_.end(); }

    std::size_t count(Tag t) const {
        std::size_t n = 0;
        for (const auto& [v, e] : entries_) n += (e.tag == t);
        return n;
    }

    std::vector<NodeId> nodes() const {
        std::vector<NodeId> out;
        out.reserve(entries_.size());
        for (const auto& [v, e] : entries_) out.push_back(v);
        return out;
    }

    std::vector<NodeId> nodes_with(Tag t) const {
        std::vector<NodeId> out;
        for (const auto& [v, e] : entries_)
            if (e.tag == t) out.push_back(v);
        return out;
    }

    std::vector<NodeId> noisy_nodes() const {
        std::vector<NodeId> out;
        for (const auto& [v, e] : entries_)
            if (e.noisy) out.push_back(v);
        return out;
    }

    /// Entries carrying the given tag, noise flags preserved.
    LabelSet subset(Tag t) const {
        LabelSet out;
        for (const auto& [v, e] : entries_)
            if (e.tag == t) out.entries_.emplace(v, e);
        return out;
    }

    void flip(NodeId v) {
        auto& e = entries_.at(v);
        e.tag = opposite(e.tag);
        e.noisy = true;
    }

private:
    Map entries_;
};

namespace detail {

inline std::vector<NodeId> eligible_nodes(const ScenarioGraph& scen, Tag region,
                                          SitePolicy policy) {
    std::vector<bool> endpoint(scen.graph.node_count(), false);
    if (policy != SitePolicy::Uniform) {
        for (const auto& [u, v] : scen.attack_edges) {
            endpoint[u] = true;
            endpoint[v] = true;
        }
    }
    std::vector<NodeId> out;
    for (NodeId v = 0; v < scen.graph.node_count(); ++v) {
        if (scen.region[v] != region) continue;
        if (policy == SitePolicy::NonEndpoint && endpoint[v]) continue;
        if (policy == SitePolicy::Endpoint && !endpoint[v]) continue;
        out.push_back(v);
    }
    return out;
}

inline void sample_region(LabelSet& labels, const ScenarioGraph& scen, Tag region,
                          std::uint32_t count, SitePolicy policy, Rng& rng) {
    if (count == 0) return;
    auto eligible = eligible_nodes(scen, region, policy);
    if (eligible.size() < count)
        throw std::runtime_error(std::string("sample_labels: only ") +
                                 std::to_string(eligible.size()) + " eligible " +
                                 (region == Tag::Benign ? "benign" : "Sybil") +
                                 "-region nodes under policy " + site_policy_name(policy) +
                                 ", need " + std::to_string(count));
    for (NodeId v : sample_without_replacement(std::move(eligible), count, rng))
        labels.insert(v, region);
}

}  // namespace detail

/// Draws n_benign labels uniformly from the eligible benign-region nodes
/// and n_sybil from the eligible Sybil-region nodes; the two regions may
/// use different site policies.
inline LabelSet sample_labels(const ScenarioGraph& scen, std::uint32_t n_benign,
                              std::uint32_t n_sybil, SitePolicy benign_policy,
                              SitePolicy sybil_policy, std::uint64_t seed) {
    LabelSet labels;
    Rng rng(seed);
    detail::sample_region(labels, scen, Tag::Benign, n_benign, benign_policy, rng);
    detail::sample_region(labels, scen, Tag::Sybil, n_sybil, sybil_policy, rng);
    return labels;
}

inline LabelSet sample_labels(const ScenarioGraph& scen, std::uint32_t n_benign,
                              std::uint32_t n_sybil, SitePolicy policy, std::uint64_t seed) {
    return sample_labels(scen, n_benign, n_sybil, policy, policy, seed);
}

/// Benign-label variant that guarantees at least one label in each of the
/// k consecutive id blocks of `block_size` nodes (the community layout of
/// community_graph), then fills the remainder uniformly.
inline LabelSet sample_labels_covering_blocks(const ScenarioGraph& scen, std::uint32_t n_benign,
                                              std::uint32_t n_sybil, std::uint32_t k,
                                              NodeId block_size, std::uint64_t seed) {
    if (n_benign < k)
        throw std::runtime_error("sample_labels_covering_blocks: need at least one benign label "
                                 "per community (" +
                                 std::to_string(k) + " communities, " + std::to_string(n_benign) +
                                 " labels)");
    LabelSet labels;
    Rng rng(seed);
    for (std::uint32_t i = 0; i < k; ++i) {
        std::vector<NodeId> block(block_size);
        for (NodeId j = 0; j < block_size; ++j) block[j] = i * block_size + j;
        labels.insert(sample_without_replacement(std::move(block), 1, rng)[0], Tag::Benign);
    }
    std::vector<NodeId> rest;
    for (NodeId v : scen.region_nodes(Tag::Benign))
        if (!labels.contains(v)) rest.push_back(v);
    for (NodeId v : sample_without_replacement(std::move(rest), n_benign - k, rng))
        labels.insert(v, Tag::Benign);
    detail::sample_region(labels, scen, Tag::Sybil, n_sybil, SitePolicy::Uniform, rng);
    return labels;
}

/// Flips n_benign_flips of the benign-tagged entries and n_sybil_flips of
/// the Sybil-tagged entries to the opposite tag, marking them noisy. Entry
/// count is preserved.
inline LabelSet inject_noise(LabelSet labels, std::uint32_t n_benign_flips,
                             std::uint32_t n_sybil_flips, std::uint64_t seed) {
    Rng rng(seed);
    // Snapshot both pools first so the benign flips cannot leak into the
    // Sybil draw.
    auto benign_tagged = labels.nodes_with(Tag::Benign);
    auto sybil_tagged = labels.nodes_with(Tag::Sybil);
    for (auto& [pool, flips, name] :
         {std::tuple{&benign_tagged, n_benign_flips, "benign"},
          std::tuple{&sybil_tagged, n_sybil_flips, "Sybil"}}) {
        if (pool->size() < flips)
            throw std::invalid_argument("inject_noise: asked to flip " + std::to_string(flips) +
                                        " of " + std::to_string(pool->size()) + " " + name +
                                        " labels");
        for (NodeId v : sample_without_replacement(std::move(*pool), flips, rng))
            labels.flip(v);
    }
    return labels;
}

}  // namespace sybil
