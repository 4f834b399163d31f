#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sybil {

using NodeId = std::uint32_t;

/// Undirected edge, stored with the smaller endpoint first.
using Edge = std::pair<NodeId, NodeId>;

inline Edge make_edge(NodeId u, NodeId v) {
    if (u == v) throw std::invalid_argument("self-loop (" + std::to_string(u) + ")");
    return u < v ? Edge{u, v} : Edge{v, u};
}

/// Binary node state used for ground-truth regions, observed labels, and
/// predicted classes alike.
enum class Tag : std::uint8_t { Benign, Sybil };

inline char tag_char(Tag t) { return t == Tag::Benign ? 'B' : 'S'; }

inline Tag parse_tag(char c) {
    if (c == 'B') return Tag::Benign;
    if (c == 'S') return Tag::Sybil;
    throw std::invalid_argument(std::string("unknown tag '") + c + "'");
}

inline Tag opposite(Tag t) { return t == Tag::Benign ? Tag::Sybil : Tag::Benign; }

/// Immutable simple undirected graph over dense 0-based node ids.
/// Adjacency is CSR with per-node sorted neighbor lists; safe to share
/// across threads after construction.
class Graph {
public:
    Graph() = default;

    /// Builds from an edge list. Duplicates (in either orientation)
    /// collapse; self-loops and out-of-range endpoints are rejected.
    Graph(NodeId node_count, std::span<const Edge> edges) {
        std::vector<Edge> canon;
        canon.reserve(edges.size());
        for (const auto& [u, v] : edges) {
            if (u >= node_count || v >= node_count)
                throw std::invalid_argument("edge endpoint out of range: (" +
                                            std::to_string(u) + "," + std::to_string(v) + ")");
            canon.push_back(make_edge(u, v));
        }
        std::sort(canon.begin(), canon.end());
        canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
        build(node_count, canon);
    }

    Graph(NodeId node_count, const std::vector<Edge>& edges)
        : Graph(node_count, std::span<const Edge>(edges)) {}

    NodeId node_count() const { return node_count_; }
    std::size_t edge_count() const { return adjacency_.size() / 2; }

    std::uint32_t degree(NodeId v) const {
        check_node(v);
        return offsets_[v + 1] - offsets_[v];
    }

    std::span<const NodeId> neighbors(NodeId v) const {
        check_node(v);
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }

    bool has_edge(NodeId u, NodeId v) const {
        if (u >= node_count_ || v >= node_count_ || u == v) return false;
        const auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// Canonical sorted edge list (u < v).
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count());
        for (NodeId u = 0; u < node_count_; ++u)
            for (NodeId v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    // CSR internals, exposed for the message-passing kernels.
    std::span<const std::uint32_t> offsets() const { return offsets_; }
    std::span<const NodeId> adjacency() const { return adjacency_; }

private:
    void check_node(NodeId v) const {
        if (v >= node_count_)
            throw std::out_of_range("node id " + std::to_string(v) + " out of range (n=" +
                                    std::to_string(node_count_) + ")");
    }

    // `canon` must be sorted, unique, canonical.
    void build(NodeId node_count, const std::vector<Edge>& canon) {
        if (canon.size() >= (std::size_t(1) << 31))
            throw std::invalid_argument("graph too large for 32-bit adjacency offsets");
        node_count_ = node_count;
        offsets_.assign(std::size_t(node_count) + 1, 0);
        for (const auto& [u, v] : canon) {
            ++offsets_[u + 1];
            ++offsets_[v + 1];
        }
        for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
        adjacency_.resize(std::size_t(2) * canon.size());
        std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [u, v] : canon) {
            adjacency_[cursor[u]++] = v;
            adjacency_[cursor[v]++] = u;
        }
        for (NodeId v = 0; v < node_count_; ++v)
            std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1]);
    }

    NodeId node_count_ = 0;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<NodeId> adjacency_;
};

/// Graph plus ground-truth region assignment and the attack-edge set
/// (exactly the edges crossing the region partition).
struct ScenarioGraph {
    Graph graph;
    std::vector<Tag> region;        // size node_count
    std::vector<Edge> attack_edges; // canonical, sorted

    NodeId count_region(Tag t) const {
        NodeId n = 0;
        for (Tag r : region) n += (r == t);
        return n;
    }

    std::vector<NodeId> region_nodes(Tag t) const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < graph.node_count(); ++v)
            if (region[v] == t) out.push_back(v);
        return out;
    }
};

/// Parses "u v" edge lines. '#' starts a comment, blank lines are skipped,
/// node count is max id + 1. Reverse duplicates collapse to one edge.
inline Graph load_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    NodeId max_id = 0;
    bool any = false;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("edge list line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const char* p = line.data();
        const char* end = p + line.size();
        auto skip_ws = [&] {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        };
        skip_ws();
        if (p == end) continue;
        NodeId ids[2];
        for (int i = 0; i < 2; ++i) {
            if (i == 1) skip_ws();
            if (p == end) fail("expected two node ids");
            auto [next, ec] = std::from_chars(p, end, ids[i]);
            if (ec != std::errc{} || next == p) fail("not a nonnegative integer");
            p = next;
        }
        skip_ws();
        if (p != end) fail("trailing content after edge");
        if (ids[0] == ids[1]) fail("self-loop");
        edges.push_back(make_edge(ids[0], ids[1]));
        max_id = std::max({max_id, ids[0], ids[1]});
        any = true;
    }
    return Graph(any ? max_id + 1 : 0, edges);
}

inline void save_edge_list(std::ostream& out, const Graph& g) {
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

struct LccResult {
    Graph graph;
    std::vector<NodeId> original_ids; // original_ids[new_id] = old id, ascending
};

/// Induced subgraph on the largest connected component, node ids remapped
/// to 0..k-1 preserving original order. Size ties go to the component
/// containing the smallest original id.
inline LccResult largest_connected_component(const Graph& g) {
    const NodeId n = g.node_count();
    if (n == 0) throw std::invalid_argument("largest_connected_component: empty graph");
    std::vector<std::uint32_t> comp(n, UINT32_MAX);
    std::uint32_t comp_count = 0;
    std::vector<NodeId> stack;
    std::vector<std::size_t> comp_size;
    for (NodeId s = 0; s < n; ++s) {
        if (comp[s] != UINT32_MAX) continue;
        const std::uint32_t c = comp_count++;
        comp_size.push_back(0);
        stack.push_back(s);
        comp[s] = c;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            ++comp_size[c];
            for (NodeId w : g.neighbors(u)) {
                if (comp[w] == UINT32_MAX) {
                    comp[w] = c;
                    stack.push_back(w);
                }
            }
        }
    }
    // Components are discovered in order of their smallest node id, so the
    // first maximal one is the tie-break winner.
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < comp_count; ++c)
        if (comp_size[c] > comp_size[best]) best = c;

    LccResult res;
    std::vector<NodeId> remap(n, UINT32_MAX);
    for (NodeId v = 0; v < n; ++v) {
        if (comp[v] == best) {
            remap[v] = NodeId(res.original_ids.size());
            res.original_ids.push_back(v);
        }
    }
    std::vector<Edge> edges;
    for (NodeId v = 0; v < n; ++v) {
        if (comp[v] != best) continue;
        for (NodeId w : g.neighbors(v))
            if (v < w) edges.emplace_back(remap[v], remap[w]);
    }
    res.graph = Graph(NodeId(res.original_ids.size()), edges);
    return res;
}

}  // namespace sybil
