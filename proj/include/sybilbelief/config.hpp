#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sybilbelief/belief.hpp"
#include "sybilbelief/generators.hpp"
#include "sybilbelief/metrics.hpp"
#include "sybilbelief/walks.hpp"

namespace sybil {

enum class DetectorKind : std::uint8_t { SB, SBN, SBB, SR, SRN, CIA, CIAN, Random };

inline const char* detector_name(DetectorKind k) {
    switch (k) {
        case DetectorKind::SB: return "SB";
        case DetectorKind::SBN: return "SB-N";
        case DetectorKind::SBB: return "SB-B";
        case DetectorKind::SR: return "SR";
        case DetectorKind::SRN: return "SR-N";
        case DetectorKind::CIA: return "CIA";
        case DetectorKind::CIAN: return "CIA-N";
        case DetectorKind::Random: return "Random";
    }
    return "?";
}

inline DetectorKind parse_detector_kind(const std::string& s) {
    for (DetectorKind k : {DetectorKind::SB, DetectorKind::SBN, DetectorKind::SBB,
                           DetectorKind::SR, DetectorKind::SRN, DetectorKind::CIA,
                           DetectorKind::CIAN, DetectorKind::Random})
        if (s == detector_name(k)) return k;
    throw std::invalid_argument("unknown detector '" + s + "'");
}

enum class BenignSource : std::uint8_t { Pa, Er, Communities, Dataset };
enum class SybilSource : std::uint8_t { Pa, Er, Duplicate };
enum class MetricFamily : std::uint8_t { Classification, Auc };

/// One experiment: scenario construction, label plan, detector(s), metric,
/// and run controls. Built by parse_config; defaults match the standard
/// operating point (w=0.90, theta=0.5, d=10, tol=1e-3, K=10, alpha=0.85).
struct ExperimentConfig {
    // scenario
    BenignSource benign_source = BenignSource::Pa;
    NodeId benign_nodes = 1000;
    double benign_avg_degree = 10.0;
    std::uint32_t communities = 1;
    std::uint32_t inter_edges = 10;
    std::string dataset_path;
    SybilSource sybil_source = SybilSource::Pa;
    NodeId sybil_nodes = 1000;
    double sybil_avg_degree = 10.0;
    std::vector<std::uint64_t> attack_edges = {500};

    // labels
    LabelPlan labels;
    bool cover_communities = false;

    // detector (single-detector runs)
    std::optional<DetectorKind> detector;

    // SybilBelief parameters
    MrfParams mrf;
    LbpOptions lbp;
    int boost_trials = 10;
    std::uint32_t boost_samples = 10;
    bool boost_include_labeled = false;

    // baselines
    SybilRankOptions sybilrank_opt;
    CiaOptions cia_opt;

    // metric
    std::optional<MetricFamily> family;
    std::vector<NodeId> size_grid; // empty: default geometric grid
    std::vector<DetectorKind> roster = {DetectorKind::SB,  DetectorKind::SBN,
                                        DetectorKind::SBB, DetectorKind::SR,
                                        DetectorKind::SRN, DetectorKind::CIA,
                                        DetectorKind::CIAN, DetectorKind::Random};

    // run
    int trials = 10;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir = "out";
    bool dump_beliefs = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ValueParser {
public:
    ValueParser(std::size_t line_no, std::string key, std::string value)
        : line_(line_no), key_(std::move(key)), value_(std::move(value)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line_) + " (" + key_ + "): " + what);
    }

    const std::string& str() const { return value_; }

    template <typename T>
    T integer() const {
        T out{};
        const auto [p, ec] = std::from_chars(value_.data(), value_.data() + value_.size(), out);
        if (ec != std::errc{} || p != value_.data() + value_.size())
            fail("expected an integer, got '" + value_ + "'");
        return out;
    }

    double real() const {
        try {
            std::size_t used = 0;
            const double out = std::stod(value_, &used);
            if (used != value_.size()) throw std::invalid_argument("");
            return out;
        } catch (const std::exception&) {
            fail("expected a number, got '" + value_ + "'");
        }
    }

    bool boolean() const {
        if (value_ == "true" || value_ == "1" || value_ == "yes") return true;
        if (value_ == "false" || value_ == "0" || value_ == "no") return false;
        fail("expected a boolean, got '" + value_ + "'");
    }

    std::vector<std::string> list() const {
        std::vector<std::string> out;
        std::stringstream ss(value_);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        if (out.empty()) fail("expected a comma-separated list");
        return out;
    }

    template <typename T>
    std::vector<T> integer_list() const {
        std::vector<T> out;
        for (const auto& item : list()) {
            T x{};
            const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
            if (ec != std::errc{} || p != item.data() + item.size())
                fail("list item '" + item + "' is not an integer");
            out.push_back(x);
        }
        return out;
    }

    SitePolicy site_policy() const {
        if (value_ == "uniform") return SitePolicy::Uniform;
        if (value_ == "si") return SitePolicy::NonEndpoint;
        if (value_ == "sii") return SitePolicy::Endpoint;
        fail("expected uniform|si|sii, got '" + value_ + "'");
    }

private:
    std::size_t line_;
    std::string key_;
    std::string value_;
};

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg);

/// Parses the line-oriented "section.key = value" grammar ('#' starts a
/// comment) and validates the resulting configuration. Throws with the
/// offending line number on syntax, unknown-key, and type errors.
inline ExperimentConfig parse_config(std::istream& in) {
    using detail::ConfigError;
    using detail::ValueParser;
    ExperimentConfig cfg;
    bool family_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'section.key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const ValueParser v(line_no, key, detail::trim(line.substr(eq + 1)));

        if (key == "scenario.benign") {
            if (v.str() == "pa") cfg.benign_source = BenignSource::Pa;
            else if (v.str() == "er") cfg.benign_source = BenignSource::Er;
            else if (v.str() == "communities") cfg.benign_source = BenignSource::Communities;
            else if (v.str() == "dataset") cfg.benign_source = BenignSource::Dataset;
            else v.fail("expected pa|er|communities|dataset");
        } else if (key == "scenario.benign_nodes") {
            cfg.benign_nodes = v.integer<NodeId>();
        } else if (key == "scenario.benign_avg_degree") {
            cfg.benign_avg_degree = v.real();
        } else if (key == "scenario.communities") {
            cfg.communities = v.integer<std::uint32_t>();
        } else if (key == "scenario.inter_edges") {
            cfg.inter_edges = v.integer<std::uint32_t>();
        } else if (key == "scenario.dataset_path") {
            cfg.dataset_path = v.str();
        } else if (key == "scenario.sybil") {
            if (v.str() == "pa") cfg.sybil_source = SybilSource::Pa;
            else if (v.str() == "er") cfg.sybil_source = SybilSource::Er;
            else if (v.str() == "duplicate") cfg.sybil_source = SybilSource::Duplicate;
            else v.fail("expected pa|er|duplicate");
        } else if (key == "scenario.sybil_nodes") {
            cfg.sybil_nodes = v.integer<NodeId>();
        } else if (key == "scenario.sybil_avg_degree") {
            cfg.sybil_avg_degree = v.real();
        } else if (key == "scenario.attack_edges") {
            cfg.attack_edges = v.integer_list<std::uint64_t>();
        } else if (key == "labels.benign") {
            cfg.labels.n_benign = v.integer<std::uint32_t>();
        } else if (key == "labels.sybil") {
            cfg.labels.n_sybil = v.integer<std::uint32_t>();
        } else if (key == "labels.benign_site") {
            cfg.labels.benign_site = v.site_policy();
        } else if (key == "labels.sybil_site") {
            cfg.labels.sybil_site = v.site_policy();
        } else if (key == "labels.noise_benign") {
            cfg.labels.noise_benign = v.integer<std::uint32_t>();
        } else if (key == "labels.noise_sybil") {
            cfg.labels.noise_sybil = v.integer<std::uint32_t>();
        } else if (key == "labels.cover_communities") {
            cfg.cover_communities = v.boolean();
        } else if (key == "detector.kind") {
            try {
                cfg.detector = parse_detector_kind(v.str());
            } catch (const std::invalid_argument& e) {
                v.fail(e.what());
            }
        } else if (key == "sybilbelief.w") {
            cfg.mrf.w_default = v.real();
        } else if (key == "sybilbelief.theta") {
            cfg.mrf.theta_default = v.real();
        } else if (key == "sybilbelief.theta_labeled") {
            cfg.mrf.theta_labeled = v.real();
        } else if (key == "sybilbelief.iterations") {
            cfg.lbp.max_iterations = v.integer<int>();
        } else if (key == "sybilbelief.tol") {
            cfg.lbp.tolerance = v.real();
        } else if (key == "sybilbelief.boost_trials") {
            cfg.boost_trials = v.integer<int>();
        } else if (key == "sybilbelief.boost_samples") {
            cfg.boost_samples = v.integer<std::uint32_t>();
        } else if (key == "sybilbelief.boost_include_labeled") {
            cfg.boost_include_labeled = v.boolean();
        } else if (key == "sybilrank.iterations") {
            cfg.sybilrank_opt.iterations = v.integer<int>();
        } else if (key == "sybilrank.log_base") {
            if (v.str() == "2") cfg.sybilrank_opt.natural_log = false;
            else if (v.str() == "e") cfg.sybilrank_opt.natural_log = true;
            else v.fail("expected 2|e");
        } else if (key == "cia.alpha") {
            cfg.cia_opt.alpha = v.real();
        } else if (key == "cia.tol") {
            cfg.cia_opt.tolerance = v.real();
        } else if (key == "cia.max_iterations") {
            cfg.cia_opt.max_iterations = v.integer<int>();
        } else if (key == "metric.family") {
            if (v.str() == "classification") cfg.family = MetricFamily::Classification;
            else if (v.str() == "auc") cfg.family = MetricFamily::Auc;
            else v.fail("expected classification|auc");
            family_set = true;
        } else if (key == "metric.size_grid") {
            cfg.size_grid = v.integer_list<NodeId>();
        } else if (key == "metric.detectors") {
            cfg.roster.clear();
            for (const auto& item : v.list()) {
                try {
                    cfg.roster.push_back(parse_detector_kind(item));
                } catch (const std::invalid_argument& e) {
                    v.fail(e.what());
                }
            }
        } else if (key == "run.trials") {
            cfg.trials = v.integer<int>();
        } else if (key == "run.seed") {
            cfg.seed = v.integer<std::uint64_t>();
        } else if (key == "run.jobs") {
            cfg.jobs = v.integer<int>();
        } else if (key == "run.out") {
            cfg.out_dir = v.str();
        } else if (key == "run.dump_beliefs") {
            cfg.dump_beliefs = v.boolean();
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
    }
    (void)family_set;
    validate_config(cfg);
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
    std::istringstream ss(text);
    return parse_config(ss);
}

/// Cross-field checks shared by parse_config and CLI overrides.
inline void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) { throw detail::ConfigError("config: " + what); };
    if (!cfg.family) fail("metric.family is required");
    if (cfg.trials < 1) fail("run.trials must be >= 1");
    if (cfg.jobs < 1) fail("run.jobs must be >= 1");
    cfg.mrf.validate();
    if (cfg.labels.noise_benign > cfg.labels.n_benign)
        fail("labels.noise_benign exceeds labels.benign");
    if (cfg.labels.noise_sybil > cfg.labels.n_sybil)
        fail("labels.noise_sybil exceeds labels.sybil");
    if (cfg.benign_source == BenignSource::Dataset) {
        if (cfg.dataset_path.empty()) fail("scenario.dataset_path is required for dataset input");
        if (!std::filesystem::exists(cfg.dataset_path))
            fail("scenario.dataset_path does not exist: " + cfg.dataset_path);
    }
    if (cfg.benign_source == BenignSource::Communities) {
        if (cfg.communities < 1) fail("scenario.communities must be >= 1");
        if (cfg.benign_nodes % cfg.communities != 0)
            fail("scenario.benign_nodes must be divisible by scenario.communities");
    }
    if (cfg.cover_communities && cfg.benign_source != BenignSource::Communities)
        fail("labels.cover_communities requires scenario.benign = communities");

    const auto check_detector = [&](DetectorKind k) {
        const auto& L = cfg.labels;
        switch (k) {
            case DetectorKind::SB:
                if (L.n_benign + L.n_sybil == 0) fail("SB needs at least one label");
                break;
            case DetectorKind::SBN:
                if (L.noise_benign + L.noise_sybil == 0)
                    fail("SB-N needs label noise (labels.noise_benign/noise_sybil)");
                break;
            case DetectorKind::SBB:
                if (cfg.boost_samples < 1) fail("SB-B needs sybilbelief.boost_samples >= 1");
                if (cfg.boost_trials < 1) fail("SB-B needs sybilbelief.boost_trials >= 1");
                break;
            case DetectorKind::SR:
                if (L.n_benign == 0) fail("SR needs benign labels");
                break;
            case DetectorKind::SRN:
                if (L.n_benign == 0) fail("SR-N needs benign labels");
                if (L.noise_sybil == 0)
                    fail("SR-N needs labels.noise_sybil > 0 (Sybils mislabeled as benign)");
                break;
            case DetectorKind::CIA:
                if (L.n_sybil == 0) fail("CIA needs Sybil labels");
                break;
            case DetectorKind::CIAN:
                if (L.n_sybil == 0) fail("CIA-N needs Sybil labels");
                if (L.noise_benign == 0)
                    fail("CIA-N needs labels.noise_benign > 0 (benign mislabeled as Sybil)");
                break;
            case DetectorKind::Random: break;
        }
    };

    if (*cfg.family == MetricFamily::Classification) {
        if (!cfg.detector) fail("detector.kind is required for the classification metric");
        const DetectorKind k = *cfg.detector;
        if (k != DetectorKind::SB && k != DetectorKind::SBN && k != DetectorKind::SBB)
            fail(std::string(detector_name(k)) +
                 " is a ranking detector; the classification sweep needs SB, SB-N, or SB-B");
        check_detector(k);
        if (k == DetectorKind::SB && cfg.labels.noise_benign + cfg.labels.noise_sybil > 0)
            fail("label noise is configured; use detector.kind = SB-N");
        if (k == DetectorKind::SBB) {
            const bool benign_only = cfg.labels.n_benign > 0 && cfg.labels.n_sybil == 0;
            const bool sybil_only = cfg.labels.n_sybil > 0 && cfg.labels.n_benign == 0;
            if (!benign_only && !sybil_only)
                fail("SB-B boosts from single-class labels; set exactly one of labels.benign, "
                     "labels.sybil");
            const std::uint32_t seeds = std::max(cfg.labels.n_benign, cfg.labels.n_sybil);
            if (cfg.boost_samples > seeds)
                fail("sybilbelief.boost_samples exceeds the seed label count");
        }
        if (cfg.sybil_source == SybilSource::Duplicate)
            fail("the classification sweep varies the Sybil region size; scenario.sybil = "
                 "duplicate fixes it (use metric.family = auc)");
    } else {
        if (cfg.roster.empty()) fail("metric.detectors must name at least one detector");
        if (cfg.detector) check_detector(*cfg.detector);
        for (DetectorKind k : cfg.roster) check_detector(k);
        if (cfg.labels.n_benign == 0 || cfg.labels.n_sybil == 0)
            fail("the AUC comparison shares one label set; labels.benign and labels.sybil must "
                 "both be positive");
    }
}

}  // namespace sybil
