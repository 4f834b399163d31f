#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sybilbelief/graph.hpp"
#include "sybilbelief/labels.hpp"
#include "sybilbelief/rng.hpp"

namespace sybil {

/// Pairwise-MRF parameters. theta_* are prior probabilities of being
/// benign (node potentials), w is the edge coupling: w > 0.5 favors equal
/// states across an edge. theta_labeled never influences posteriors (the
/// evidence clamp overrides the prior of a labeled node); it is kept so
/// the potentials are fully specified.
struct MrfParams {
    double theta_default = 0.5;
    double theta_labeled = 0.5;
    double w_default = 0.90;
    std::map<Edge, double> per_edge_w;

    void validate() const {
        auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
        if (!in_unit(theta_default) || !in_unit(theta_labeled))
            throw std::invalid_argument("MrfParams: theta must lie strictly in (0,1)");
        if (!in_unit(w_default))
            throw std::invalid_argument("MrfParams: w must lie strictly in (0,1)");
        for (const auto& [e, w] : per_edge_w)
            if (!in_unit(w))
                throw std::invalid_argument("MrfParams: per-edge w must lie strictly in (0,1)");
    }

    /// All couplings favor equal states; w <= 0.5 is allowed but breaks
    /// the homophily assumption the detector relies on.
    bool homophilous() const {
        if (w_default <= 0.5) return false;
        for (const auto& [e, w] : per_edge_w)
            if (w <= 0.5) return false;
        return true;
    }
};

/// MRF over a graph with evidence clamps from a label set. References the
/// graph; the caller keeps it alive. The mirror table maps each directed
/// CSR slot to the slot of the reverse direction.
class MrfModel {
public:
    MrfModel(const Graph& g, const LabelSet& labels, MrfParams params)
        : graph_(&g), params_(std::move(params)) {
        params_.validate();
        clamp_.assign(g.node_count(), 0);
        for (const auto& [v, e] : labels) {
            if (v >= g.node_count())
                throw std::invalid_argument("label on unknown node " + std::to_string(v));
            clamp_[v] = (e.tag == Tag::Benign) ? +1 : -1;
        }
        const auto off = g.offsets();
        const auto adj = g.adjacency();
        mirror_.resize(adj.size());
        for (NodeId u = 0; u < g.node_count(); ++u) {
            for (std::uint32_t j = off[u]; j < off[u + 1]; ++j) {
                const NodeId v = adj[j];
                const auto nb = g.neighbors(v);
                const auto it = std::lower_bound(nb.begin(), nb.end(), u);
                mirror_[j] = off[v] + std::uint32_t(it - nb.begin());
            }
        }
        if (!params_.per_edge_w.empty()) {
            edge_w_.assign(adj.size(), params_.w_default);
            for (const auto& [e, w] : params_.per_edge_w) {
                if (!g.has_edge(e.first, e.second))
                    throw std::invalid_argument("per-edge w override on non-edge (" +
                                                std::to_string(e.first) + "," +
                                                std::to_string(e.second) + ")");
                set_slot_w(e.first, e.second, w);
                set_slot_w(e.second, e.first, w);
            }
        }
    }

    const Graph& graph() const { return *graph_; }
    const MrfParams& params() const { return params_; }
    std::size_t directed_count() const { return graph_->adjacency().size(); }
    std::span<const std::uint32_t> mirror() const { return mirror_; }

    /// +1: clamped benign, -1: clamped Sybil, 0: unlabeled.
    int clamp(NodeId v) const { return clamp_[v]; }

    double edge_w(std::uint32_t slot) const {
        return edge_w_.empty() ? params_.w_default : edge_w_[slot];
    }

    /// Slot in v's incoming range holding the message from u.
    std::uint32_t slot_of(NodeId receiver, NodeId sender) const {
        const auto nb = graph_->neighbors(receiver);
        const auto it = std::lower_bound(nb.begin(), nb.end(), sender);
        if (it == nb.end() || *it != sender)
            throw std::invalid_argument("no edge (" + std::to_string(sender) + "," +
                                        std::to_string(receiver) + ")");
        return graph_->offsets()[receiver] + std::uint32_t(it - nb.begin());
    }

private:
    void set_slot_w(NodeId receiver, NodeId sender, double w) {
        edge_w_[slot_of(receiver, sender)] = w;
    }

    const Graph* graph_;
    MrfParams params_;
    std::vector<std::int8_t> clamp_;
    std::vector<std::uint32_t> mirror_;
    std::vector<double> edge_w_; // per directed slot; empty means uniform w_default
};

inline MrfModel build_mrf(const ScenarioGraph& scen, const LabelSet& labels, MrfParams params) {
    return MrfModel(scen.graph, labels, std::move(params));
}

/// Posterior pair for one node; components sum to 1.
struct Posterior {
    double sybil = 0.5;
    double benign = 0.5;
};

/// Two entries per directed CSR slot: value[2j] is the message component
/// toward the Sybil state, value[2j+1] toward Benign. Slot j of node u
/// holds the message into u from u's j-th neighbor.
struct MessageTable {
    std::vector<double> value;
};

inline MessageTable uniform_messages(const MrfModel& m) {
    return MessageTable{std::vector<double>(2 * m.directed_count(), 0.5)};
}

/// Message from `sender` to `receiver` in a table, as (sybil, benign).
inline Posterior message_between(const MrfModel& m, const MessageTable& t, NodeId sender,
                                 NodeId receiver) {
    const auto s = m.slot_of(receiver, sender);
    return {t.value[2 * s], t.value[2 * s + 1]};
}

struct LbpOptions {
    int max_iterations = 10;
    double tolerance = 1e-3; // L1 change summed over all messages
    bool normalize_messages = true;
    int workers = 1;
    bool keep_messages = true;
};

struct Beliefs {
    std::vector<Posterior> posterior;
    int iterations_run = 0;
    bool converged = false;
    double final_delta = std::numeric_limits<double>::infinity();
    MessageTable messages;                   // final table if kept, else empty
    std::vector<std::uint64_t> edge_touches; // directed edges updated, per iteration
};

namespace detail {

/// Synchronous update of all outgoing messages of nodes [begin, end) from
/// the previous table. Each node's incoming products are built once as
/// prefix/suffix arrays, so one pass costs O(degree) per node; pairs are
/// renormalized as they accumulate to keep hubs away from underflow.
inline void lbp_step_range(const MrfModel& m, const double* in, double* out, NodeId begin,
                           NodeId end, bool normalize, std::uint64_t& touches) {
    const auto off = m.graph().offsets();
    const auto mirror = m.mirror();
    const double theta_u = m.params().theta_default;
    const double theta_l = m.params().theta_labeled;
    std::vector<double> pref, suf;
    for (NodeId u = begin; u < end; ++u) {
        const std::uint32_t s0 = off[u], s1 = off[u + 1];
        const std::uint32_t d = s1 - s0;
        if (d == 0) continue;
        const int clamp = m.clamp(u);
        touches += d;
        if (normalize && clamp != 0) {
            // A clamped sender's message reduces to the edge potential row
            // of its observed state, independent of incoming messages.
            for (std::uint32_t j = s0; j < s1; ++j) {
                const double w = m.edge_w(j);
                const std::uint32_t t = mirror[j];
                out[2 * t] = clamp > 0 ? 1.0 - w : w;
                out[2 * t + 1] = clamp > 0 ? w : 1.0 - w;
            }
            continue;
        }
        pref.resize(2 * (d + 1));
        suf.resize(2 * (d + 1));
        pref[0] = pref[1] = 1.0;
        for (std::uint32_t i = 0; i < d; ++i) {
            double a = pref[2 * i] * in[2 * (s0 + i)];
            double b = pref[2 * i + 1] * in[2 * (s0 + i) + 1];
            if (normalize) {
                const double s = a + b;
                a /= s;
                b /= s;
            }
            pref[2 * (i + 1)] = a;
            pref[2 * (i + 1) + 1] = b;
        }
        suf[2 * d] = suf[2 * d + 1] = 1.0;
        for (std::uint32_t i = d; i-- > 0;) {
            double a = suf[2 * (i + 1)] * in[2 * (s0 + i)];
            double b = suf[2 * (i + 1) + 1] * in[2 * (s0 + i) + 1];
            if (normalize) {
                const double s = a + b;
                a /= s;
                b /= s;
            }
            suf[2 * i] = a;
            suf[2 * i + 1] = b;
        }
        for (std::uint32_t i = 0; i < d; ++i) {
            const std::uint32_t j = s0 + i;
            const double prod_s = pref[2 * i] * suf[2 * (i + 1)];
            const double prod_b = pref[2 * i + 1] * suf[2 * (i + 1) + 1];
            double qs, qb;
            if (clamp > 0) {
                qs = 0.0;
                qb = theta_l * prod_b;
            } else if (clamp < 0) {
                qs = (1.0 - theta_l) * prod_s;
                qb = 0.0;
            } else {
                qs = (1.0 - theta_u) * prod_s;
                qb = theta_u * prod_b;
            }
            const double w = m.edge_w(j);
            double ms = w * qs + (1.0 - w) * qb;
            double mb = (1.0 - w) * qs + w * qb;
            if (normalize) {
                const double s = ms + mb;
                ms /= s;
                mb /= s;
            }
            const std::uint32_t t = mirror[j];
            out[2 * t] = ms;
            out[2 * t + 1] = mb;
        }
    }
}

/// Node-range boundaries balancing directed-edge counts across workers.
inline std::vector<NodeId> worker_ranges(const Graph& g, int workers) {
    const auto off = g.offsets();
    const std::uint64_t total = g.adjacency().size();
    std::vector<NodeId> bounds{0};
    for (int k = 1; k < workers; ++k) {
        const std::uint64_t target = total * k / workers;
        const auto it = std::lower_bound(off.begin(), off.end(), target);
        bounds.push_back(std::min<NodeId>(NodeId(it - off.begin()), g.node_count()));
    }
    bounds.push_back(g.node_count());
    return bounds;
}

inline std::uint64_t lbp_step_into(const MrfModel& m, const double* in, double* out,
                                   bool normalize, int workers) {
    std::uint64_t touches = 0;
    if (workers <= 1) {
        lbp_step_range(m, in, out, 0, m.graph().node_count(), normalize, touches);
        return touches;
    }
    const auto bounds = worker_ranges(m.graph(), workers);
    std::vector<std::uint64_t> partial(bounds.size() - 1, 0);
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k)
        pool.emplace_back([&, k] {
            lbp_step_range(m, in, out, bounds[k], bounds[k + 1], normalize, partial[k]);
        });
    for (auto& t : pool) t.join();
    for (auto p : partial) touches += p;
    return touches;
}

inline Posterior node_posterior(const MrfModel& m, const double* msgs, NodeId v) {
    const int clamp = m.clamp(v);
    if (clamp > 0) return {0.0, 1.0};
    if (clamp < 0) return {1.0, 0.0};
    const auto off = m.graph().offsets();
    double a = 1.0 - m.params().theta_default;
    double b = m.params().theta_default;
    for (std::uint32_t j = off[v]; j < off[v + 1]; ++j) {
        a *= msgs[2 * j];
        b *= msgs[2 * j + 1];
        const double s = a + b;
        a /= s;
        b /= s;
    }
    const double s = a + b;
    return {a / s, b / s};
}

}  // namespace detail

/// One synchronous message update: every outgoing message is computed from
/// the previous table only. Touches each directed edge exactly once.
inline MessageTable lbp_step(const MrfModel& m, const MessageTable& in, int workers = 1,
                             bool normalize = true) {
    if (in.value.size() != 2 * m.directed_count())
        throw std::invalid_argument("lbp_step: message table size mismatch");
    MessageTable out{std::vector<double>(in.value.size())};
    detail::lbp_step_into(m, in.value.data(), out.value.data(), normalize, workers);
    return out;
}

/// Iterates synchronous message passing from the uniform table until the
/// summed L1 message change drops below the tolerance or the iteration cap
/// is reached, then reads out per-node posteriors. Non-convergence is
/// reported in the result, never thrown.
inline Beliefs run_lbp(const MrfModel& m, const LbpOptions& opt = {}) {
    std::vector<double> cur(2 * m.directed_count(), 0.5);
    std::vector<double> next(cur.size());
    Beliefs out;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const std::uint64_t touches = detail::lbp_step_into(m, cur.data(), next.data(),
                                                            opt.normalize_messages, opt.workers);
        out.edge_touches.push_back(touches);
        double delta = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) delta += std::abs(next[i] - cur[i]);
        cur.swap(next);
        out.iterations_run = it + 1;
        out.final_delta = delta;
        if (delta < opt.tolerance) {
            out.converged = true;
            break;
        }
    }
    const NodeId n = m.graph().node_count();
    out.posterior.resize(n);
    for (NodeId v = 0; v < n; ++v) out.posterior[v] = detail::node_posterior(m, cur.data(), v);
    if (opt.keep_messages) out.messages.value = std::move(cur);
    return out;
}

/// Argmax classification; an exact tie counts as Sybil.
inline std::vector<Tag> classify(const Beliefs& b) {
    std::vector<Tag> out(b.posterior.size());
    for (std::size_t v = 0; v < out.size(); ++v)
        out[v] = b.posterior[v].benign > b.posterior[v].sybil ? Tag::Benign : Tag::Sybil;
    return out;
}

/// Nodes in descending order of P(benign); ties break toward the smaller
/// node id.
inline std::vector<NodeId> rank_nodes(const Beliefs& b, std::span<const NodeId> restrict_to = {}) {
    std::vector<NodeId> ids;
    if (restrict_to.empty()) {
        ids.resize(b.posterior.size());
        for (std::size_t v = 0; v < ids.size(); ++v) ids[v] = NodeId(v);
    } else {
        ids.assign(restrict_to.begin(), restrict_to.end());
    }
    std::sort(ids.begin(), ids.end(), [&](NodeId x, NodeId y) {
        if (b.posterior[x].benign != b.posterior[y].benign)
            return b.posterior[x].benign > b.posterior[y].benign;
        return x < y;
    });
    return ids;
}

struct BoostOptions {
    int trials = 10;                      // K
    std::uint32_t samples_per_trial = 10; // capped at the seed label count
    bool include_labeled = false;         // let seed-labeled nodes be re-sampled as pseudo-labels
    std::uint64_t seed = 0;
    LbpOptions lbp{};
};

/// Runs LBP K times, each with `samples_per_trial` uniformly sampled nodes
/// standing in for the missing label class, and aggregates per node by
/// taking the maximum posterior of the pseudo-labeled class. Works from
/// benign-only seeds (sampling pseudo-Sybils) or Sybil-only seeds
/// (sampling pseudo-benigns).
inline Beliefs boosted_lbp(const Graph& g, const LabelSet& seed_labels, const MrfParams& params,
                           BoostOptions opt) {
    if (seed_labels.empty())
        throw std::invalid_argument("boosted_lbp: need at least one seed label");
    const Tag seed_tag = seed_labels.begin()->second.tag;
    for (const auto& [v, e] : seed_labels)
        if (e.tag != seed_tag)
            throw std::invalid_argument("boosted_lbp: seed labels must be single-class");
    if (opt.samples_per_trial > seed_labels.size())
        throw std::invalid_argument("boosted_lbp: sampled pseudo-labels per trial (" +
                                    std::to_string(opt.samples_per_trial) +
                                    ") exceed the seed label count (" +
                                    std::to_string(seed_labels.size()) + ")");
    if (opt.trials < 1) throw std::invalid_argument("boosted_lbp: trials must be >= 1");
    const Tag pseudo = opposite(seed_tag);

    std::vector<NodeId> candidates;
    candidates.reserve(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (opt.include_labeled || !seed_labels.contains(v)) candidates.push_back(v);
    if (candidates.size() < opt.samples_per_trial)
        throw std::invalid_argument("boosted_lbp: not enough candidate nodes to sample");

    Beliefs agg;
    agg.posterior.assign(g.node_count(), Posterior{});
    agg.converged = true;
    agg.final_delta = 0.0;
    LbpOptions lbp_opt = opt.lbp;
    lbp_opt.keep_messages = false;
    for (int i = 0; i < opt.trials; ++i) {
        Rng rng(derive_seed(opt.seed, "boost-trial", std::uint64_t(i)));
        LabelSet evidence = seed_labels;
        for (NodeId v : sample_without_replacement(candidates, opt.samples_per_trial, rng)) {
            if (evidence.contains(v)) evidence.flip(v);
            else evidence.insert(v, pseudo);
        }
        const MrfModel model(g, evidence, params);
        const Beliefs b = run_lbp(model, lbp_opt);
        for (NodeId v = 0; v < g.node_count(); ++v) {
            if (i == 0) {
                agg.posterior[v] = b.posterior[v];
            } else if (pseudo == Tag::Sybil) {
                agg.posterior[v].sybil = std::max(agg.posterior[v].sybil, b.posterior[v].sybil);
            } else {
                agg.posterior[v].benign = std::max(agg.posterior[v].benign, b.posterior[v].benign);
            }
        }
        agg.iterations_run = std::max(agg.iterations_run, b.iterations_run);
        agg.converged = agg.converged && b.converged;
        agg.final_delta = std::max(agg.final_delta, b.final_delta);
    }
    for (auto& p : agg.posterior) {
        if (pseudo == Tag::Sybil) p.benign = 1.0 - p.sybil;
        else p.sybil = 1.0 - p.benign;
    }
    return agg;
}

/// Flags labeled nodes whose neighborhood belief, computed without their
/// own evidence clamp, strictly contradicts the given label. An isolated
/// labeled node has a flat neighborhood belief and is never flagged.
inline std::vector<NodeId> detect_noisy_labels(const MrfModel& m, const Beliefs& b) {
    if (b.messages.value.size() != 2 * m.directed_count())
        throw std::invalid_argument("detect_noisy_labels: beliefs lack the final message table");
    const auto off = m.graph().offsets();
    const double theta_l = m.params().theta_labeled;
    std::vector<NodeId> flagged;
    for (NodeId v = 0; v < m.graph().node_count(); ++v) {
        const int clamp = m.clamp(v);
        if (clamp == 0) continue;
        double a = 1.0 - theta_l;
        double bb = theta_l;
        for (std::uint32_t j = off[v]; j < off[v + 1]; ++j) {
            a *= b.messages.value[2 * j];
            bb *= b.messages.value[2 * j + 1];
            const double s = a + bb;
            a /= s;
            bb /= s;
        }
        if ((clamp > 0 && a > bb) || (clamp < 0 && bb > a)) flagged.push_back(v);
    }
    return flagged;
}

}  // namespace sybil
