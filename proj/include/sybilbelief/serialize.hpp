#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sybilbelief/belief.hpp"
#include "sybilbelief/graph.hpp"
#include "sybilbelief/labels.hpp"
#include "sybilbelief/walks.hpp"

namespace sybil {

/// Fixed 9-decimal rendering used by all value dumps.
inline std::string format_fixed9(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9f", x);
    return buf;
}

// --- region map: "node_id region", region in {B,S} ---

inline void save_region_map(std::ostream& out, const ScenarioGraph& scen) {
    for (NodeId v = 0; v < scen.graph.node_count(); ++v)
        out << v << ' ' << tag_char(scen.region[v]) << '\n';
}

inline std::vector<Tag> load_region_map(std::istream& in, NodeId node_count) {
    std::vector<Tag> region(node_count, Tag::Benign);
    std::vector<bool> seen(node_count, false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        NodeId v;
        char c;
        if (!(ls >> v >> c))
            throw std::runtime_error("region map line " + std::to_string(line_no) +
                                     ": expected 'node_id region'");
        if (v >= node_count)
            throw std::runtime_error("region map line " + std::to_string(line_no) +
                                     ": node id out of range");
        region[v] = parse_tag(c);
        seen[v] = true;
    }
    for (NodeId v = 0; v < node_count; ++v)
        if (!seen[v])
            throw std::runtime_error("region map: no entry for node " + std::to_string(v));
    return region;
}

// --- label set: "node_id tag noise_flag" ---

inline void save_labels(std::ostream& out, const LabelSet& labels) {
    for (const auto& [v, e] : labels)
        out << v << ' ' << tag_char(e.tag) << ' ' << (e.noisy ? 1 : 0) << '\n';
}

inline LabelSet load_labels(std::istream& in) {
    LabelSet labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        NodeId v;
        char c;
        int noisy;
        if (!(ls >> v >> c >> noisy))
            throw std::runtime_error("labels line " + std::to_string(line_no) +
                                     ": expected 'node_id tag noise_flag'");
        labels.insert(v, parse_tag(c), noisy != 0);
    }
    return labels;
}

// --- beliefs: header comment, then "node_id p_sybil p_benign" ---

inline void save_beliefs(std::ostream& out, const Beliefs& b) {
    out << "# converged=" << (b.converged ? 1 : 0) << " iterations=" << b.iterations_run
        << " final_delta=" << format_fixed9(b.final_delta) << '\n';
    for (std::size_t v = 0; v < b.posterior.size(); ++v)
        out << v << ' ' << format_fixed9(b.posterior[v].sybil) << ' '
            << format_fixed9(b.posterior[v].benign) << '\n';
}

inline Beliefs load_beliefs(std::istream& in) {
    Beliefs b;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string field;
            while (ls >> field) {
                const auto eq = field.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = field.substr(0, eq);
                const std::string val = field.substr(eq + 1);
                if (key == "converged") b.converged = val != "0";
                else if (key == "iterations") b.iterations_run = std::stoi(val);
                else if (key == "final_delta") b.final_delta = std::stod(val);
            }
            continue;
        }
        std::istringstream ls(line);
        NodeId v;
        double ps, pb;
        if (!(ls >> v >> ps >> pb))
            throw std::runtime_error("beliefs line " + std::to_string(line_no) +
                                     ": expected 'node_id p_sybil p_benign'");
        if (b.posterior.size() <= v) b.posterior.resize(std::size_t(v) + 1);
        b.posterior[v] = Posterior{ps, pb};
    }
    return b;
}

// --- scores: provenance header, then "node_id score" ---

inline void save_scores(std::ostream& out, const ScoreVector& s) {
    out << "# provenance=" << provenance_name(s.provenance) << " iterations=" << s.iterations
        << " converged=" << (s.converged ? 1 : 0) << '\n';
    for (std::size_t v = 0; v < s.score.size(); ++v)
        out << v << ' ' << format_fixed9(s.score[v]) << '\n';
}

inline ScoreVector load_scores(std::istream& in) {
    ScoreVector s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        NodeId v;
        double x;
        if (!(ls >> v >> x))
            throw std::runtime_error("scores line " + std::to_string(line_no) +
                                     ": expected 'node_id score'");
        if (s.score.size() <= v) s.score.resize(std::size_t(v) + 1, 0.0);
        s.score[v] = x;
    }
    return s;
}

// --- scenario bundle: edges.txt, regions.txt, attack_edges.txt ---

inline void save_scenario(const std::filesystem::path& dir, const ScenarioGraph& scen) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "edges.txt");
        save_edge_list(f, scen.graph);
    }
    {
        std::ofstream f(dir / "regions.txt");
        save_region_map(f, scen);
    }
    {
        std::ofstream f(dir / "attack_edges.txt");
        for (const auto& [u, v] : scen.attack_edges) f << u << ' ' << v << '\n';
    }
}

inline ScenarioGraph load_scenario(const std::filesystem::path& dir) {
    ScenarioGraph scen;
    {
        std::ifstream f(dir / "edges.txt");
        if (!f) throw std::runtime_error("cannot open " + (dir / "edges.txt").string());
        scen.graph = load_edge_list(f);
    }
    {
        std::ifstream f(dir / "regions.txt");
        if (!f) throw std::runtime_error("cannot open " + (dir / "regions.txt").string());
        scen.region = load_region_map(f, scen.graph.node_count());
    }
    {
        std::ifstream f(dir / "attack_edges.txt");
        if (!f) throw std::runtime_error("cannot open " + (dir / "attack_edges.txt").string());
        const Graph attack = load_edge_list(f);
        // attack file reuses the edge-list format; ids refer to the scenario
        for (const auto& e : attack.edges()) scen.attack_edges.push_back(e);
    }
    std::sort(scen.attack_edges.begin(), scen.attack_edges.end());
    return scen;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

}  // namespace sybil
