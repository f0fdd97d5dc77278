#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capsim/ecbp.hpp"
#include "capsim/graph.hpp"
#include "json.hpp"

namespace capsim {

inline constexpr const char* kVersion = "capsim 0.1.0";

enum class ExperimentKind { ecer_convergence, ecbp_mc, analytic_report, local_weak_check, near_critical };

const char* to_string(ExperimentKind kind);

/// Flat key=value configuration. Every key has a default except lambda.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::analytic_report;
    int k = 0;  // 0 = infer from lambda
    std::vector<double> lambda;
    std::vector<std::size_t> n{500, 1000, 2000, 4000};
    std::size_t replicas = 30;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t ell_max = 10;
    std::size_t depth_cap = kDefaultDepthCap;
    std::size_t node_cap = kDefaultNodeCap;
    double survival_tol = 1e-12;
    double series_tol = 1e-14;
    int radius = 1;
    std::size_t max_nodes = 8;
    std::vector<double> eps{1e-2, 5e-3, 2e-3, 1e-3};
    std::string out;
    unsigned workers = 0;

    /// Parses and stores one key; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Reads `key = value` lines; blank lines and '#' comments are skipped.
    void load(std::istream& in);
    /// Cross-field checks; fills k from lambda. Throws ConfigError.
    void validate();

    LambdaVector lambda_vector() const { return LambdaVector(lambda); }
    FriendCountCaps caps() const { return {depth_cap, node_cap, survival_tol}; }

    /// Canonical text of every result-affecting key (excludes out and workers).
    std::string canonical() const;
    /// 16 hex digits derived from canonical().
    std::string hash() const;
};

struct RunRecord {
    nlohmann::json config;
    nlohmann::json results;
    std::map<std::string, bool> checks;
    double seconds = 0.0;

    bool ok() const;
    nlohmann::json to_json() const;
};

/// Writes `n,replica,ell,f_ell,target_f_ell,max_fraction,target_f_inf` rows to csv (if given).
RunRecord run_ecer_convergence(const ExperimentConfig& cfg, std::ostream* csv = nullptr);
RunRecord run_ecbp_mc(const ExperimentConfig& cfg);
RunRecord run_analytic_report(const ExperimentConfig& cfg);
/// Writes `class,nodes,ecer_freq,ecer_stderr,ecbp_freq,ecbp_stderr` rows to csv (if given).
RunRecord run_local_weak_check(const ExperimentConfig& cfg, std::ostream* csv = nullptr);
RunRecord run_near_critical(const ExperimentConfig& cfg);

RunRecord run_experiment(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

// =============================================================================
// Rooted colored balls
// =============================================================================

/// Canonical code of the radius-d ball around v, or nullopt if the ball is not
/// a tree (cycles or a neighbor joined by several colors).
std::optional<std::string> ball_code(const EdgeColoredGraph& g, const std::vector<Adjacency>& adj, Vertex v, int radius);

/// Canonical code of the subtree of `tree` truncated at depth radius.
std::string ball_code(const ColoredTree& tree, int radius);

/// Number of nodes encoded in a canonical code.
std::size_t code_size(const std::string& code);

}  // namespace capsim
