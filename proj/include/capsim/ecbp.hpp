#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capsim/analytic.hpp"
#include "capsim/chronology.hpp"
#include "capsim/graph.hpp"
#include "capsim/rng.hpp"

namespace capsim {

inline constexpr std::size_t kDefaultNodeCap = 1'000'000;
inline constexpr std::size_t kDefaultDepthCap = 40;

// =============================================================================
// Trees
// =============================================================================

struct TreeNode {
    std::uint32_t parent;
    int color;  // color of the edge to the parent, -1 at the root
    std::uint32_t depth;
    std::uint32_t first_child;
    std::uint32_t child_count;
};

/// Breadth-first arena; children of a node are contiguous.
class ColoredTree {
public:
    ColoredTree(int k, std::vector<TreeNode> nodes) : k_(k), nodes_(std::move(nodes)) {}

    int k() const { return k_; }
    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t root() const { return 0; }

    EdgeColoredGraph to_graph() const;

private:
    int k_;
    std::vector<TreeNode> nodes_;
};

/// Full tree to `depth` with Poisson(lambda_i) color-i children per node;
/// nullopt if more than node_cap nodes would be needed.
std::optional<ColoredTree> sample_ecbp(const LambdaVector& lambda, std::size_t depth, Stream& rng,
                                       std::size_t node_cap = kDefaultNodeCap);

// =============================================================================
// Chronology exploration on lazily grown trees
// =============================================================================

/// Dense ids for all color strings of length <= h + 1 with an append table.
class ChronologyIndex {
public:
    ChronologyIndex(int k, int h);

    int k() const { return k_; }
    int h() const { return h_; }
    std::size_t size() const { return strings_.size(); }
    const ColorString& string(std::size_t id) const { return strings_[id]; }
    std::size_t id(const ColorString& s) const;
    /// Id of s.c, or npos when c is already in s.
    std::size_t child(std::size_t id, int c) const { return child_[id * static_cast<std::size_t>(k_) + static_cast<std::size_t>(c)]; }
    /// Ids of the strings of length exactly len, in lexicographic order.
    const std::vector<std::size_t>& level(int len) const { return levels_[static_cast<std::size_t>(len)]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    int k_, h_;
    std::vector<ColorString> strings_;
    std::vector<std::size_t> child_;
    std::vector<std::vector<std::size_t>> levels_;
};

/// |R~_s(r)| for |s| <= h and |N~_s(r)| for |s| = h + 1, indexed by string id.
struct ChronologySample {
    std::vector<std::size_t> reach;
    std::vector<std::size_t> fresh;
};

/// Grows only the nodes with at most h distinct colors on their root path.
/// Returns false when more than node_cap nodes were expanded.
bool explore_chronology(const LambdaVector& lambda, const ChronologyIndex& index, Stream& rng, std::size_t node_cap,
                        ChronologySample& out);

/// Exact joint sample of (rho(r), b(r)); nullopt on node-cap overflow.
/// Throws ParameterError unless lambda_I < 1 for every |I| <= k-2.
std::optional<CoreBoundary> sample_core(const LambdaVector& lambda, Stream& rng, std::size_t node_cap = kDefaultNodeCap);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::size_t censored = 0;
    std::string note;
};

/// Mean of prod_i (1 - (1 - theta^{\i})^{b_i}) over core samples.
McEstimate mc_f_infinity(const LambdaVector& lambda, std::size_t samples, std::uint64_t seed, unsigned workers = 0,
                         std::size_t node_cap = kDefaultNodeCap);

/// Mean of prod_{s in S_h} z_s^{|R~_s(r)|}; z aligned with enumerate_color_strings(k, h).
McEstimate mc_phi(const LambdaVector& lambda, int h, const std::vector<double>& z, std::size_t samples,
                  std::uint64_t seed, unsigned workers = 0, std::size_t node_cap = kDefaultNodeCap);

// =============================================================================
// Friend counts
// =============================================================================

enum class CensorReason { depth_cap, node_cap, survival };

const char* to_string(CensorReason r);

struct FriendCountOutcome {
    enum class Kind { finite, infinite, censored };
    Kind kind = Kind::finite;
    std::size_t ell = 1;
    CensorReason reason = CensorReason::depth_cap;

    static FriendCountOutcome finite(std::size_t ell) { return {Kind::finite, ell, {}}; }
    static FriendCountOutcome censored(CensorReason r) { return {Kind::censored, 0, r}; }
};

struct FriendCountCaps {
    std::size_t depth_cap = kDefaultDepthCap;
    std::size_t node_cap = kDefaultNodeCap;
    /// Stop once every color's avoiding cluster dies later with total probability <= this.
    /// Only active for fully supercritical lambda; 0 disables it.
    double survival_tol = 1e-12;
};

/// Grows the part of the tree whose root paths miss at least one color, level by
/// level, until some color's avoiding cluster of the root stops reaching the
/// current level. Subtrees hanging below that level, or below nodes whose path
/// already uses every color, are replaced by independent extended type draws.
/// Never returns Kind::infinite: an unbounded friend set can only be censored.
class FriendCountSampler {
public:
    FriendCountSampler(const LambdaVector& lambda, FriendCountCaps caps = {});

    FriendCountOutcome operator()(Stream& rng);

    const PTable& table() const { return table_; }
    const LambdaVector& lambda() const { return lambda_; }
    const FriendCountCaps& caps() const { return caps_; }

private:
    struct Node {
        std::uint32_t parent;
        int color;
        ColorMask avoid;
        ColorMask alive;
    };

    ColorMask draw_type(Stream& rng) const;

    LambdaVector lambda_;
    FriendCountCaps caps_;
    PTable table_;
    std::vector<double> type_cdf_;
    std::vector<double> log_extinction_;  // log(1 - theta^{\i})
    bool survival_stop_ = false;
    std::vector<Node> nodes_;
    std::vector<ColorMask> ok_;
};

FriendCountOutcome sample_friend_count(const LambdaVector& lambda, Stream& rng, FriendCountCaps caps = {});

struct ComponentSizeEstimate {
    std::size_t samples = 0;
    std::size_t ell_max = 0;
    std::vector<std::size_t> counts;  // counts[ell], ell = 1..ell_max
    std::size_t tail_count = 0;       // finite outcomes above ell_max
    std::size_t censored_depth = 0;
    std::size_t censored_node = 0;
    std::size_t censored_survival = 0;

    std::size_t censored() const { return censored_depth + censored_node + censored_survival; }
    double f_hat(std::size_t ell) const;
    double stderr_of(std::size_t ell) const;
    double tail_mass() const;
    double censored_mass() const;
    double censored_stderr() const;
};

ComponentSizeEstimate mc_component_size_distribution(const LambdaVector& lambda, std::size_t samples,
                                                     std::size_t ell_max, std::uint64_t seed,
                                                     FriendCountCaps caps = {}, unsigned workers = 0);

}  // namespace capsim
