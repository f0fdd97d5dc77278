#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "capsim/rng.hpp"

namespace capsim {

using Vertex = std::uint32_t;
using ColorMask = std::uint32_t;

inline constexpr int kMaxColors = 16;

inline constexpr ColorMask full_mask(int k) { return k >= 32 ? ~ColorMask{0} : (ColorMask{1} << k) - 1; }
inline constexpr bool has_color(ColorMask m, int c) { return (m >> c) & 1U; }
int popcount(ColorMask m);

// =============================================================================
// Color intensities
// =============================================================================

/// Strictly positive color intensities lambda_1..lambda_k (colors are 0-based in code).
class LambdaVector {
public:
    explicit LambdaVector(std::vector<double> values);

    int k() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return values_; }

    /// Sum of the intensities of the colors in `colors`.
    double sum(ColorMask colors) const;
    /// Intensity of the graph with color i deleted.
    double without(int i) const { return sum(full_mask(k()) & ~(ColorMask{1} << i)); }
    double uncolored() const { return sum(full_mask(k())); }

private:
    std::vector<double> values_;
};

// =============================================================================
// Graphs
// =============================================================================

struct Edge {
    Vertex u;
    Vertex v;
    auto operator<=>(const Edge&) const = default;
};

/// Compressed adjacency (CSR) over n vertices.
struct Adjacency {
    std::vector<std::size_t> offsets;
    std::vector<Vertex> targets;

    std::span<const Vertex> neighbors(Vertex v) const {
        return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
};

Adjacency build_adjacency(std::size_t n, std::span<const Edge> edges);

/// Simple uncolored graph; edges are sorted, unique, with u < v.
class SimpleGraph {
public:
    SimpleGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    Adjacency adjacency() const { return build_adjacency(n_, edges_); }

private:
    std::size_t n_;
    std::vector<Edge> edges_;
};

/// Edge-colored multigraph: one simple edge set per color; a pair may carry several colors.
class EdgeColoredGraph {
public:
    /// Normalizes every pair to u < v, sorts and deduplicates within each color.
    /// Throws ParameterError on self-loops or out-of-range endpoints.
    EdgeColoredGraph(std::size_t n, std::vector<std::vector<Edge>> edge_sets);

    std::size_t n() const { return n_; }
    int k() const { return static_cast<int>(edge_sets_.size()); }
    const std::vector<Edge>& edges(int color) const { return edge_sets_[static_cast<std::size_t>(color)]; }
    std::size_t edge_count() const;

    /// Per-color adjacency lists, index = color.
    std::vector<Adjacency> color_adjacency() const;

private:
    std::size_t n_;
    std::vector<std::vector<Edge>> edge_sets_;
};

/// Union of the edge sets of `colors` with duplicates collapsed.
SimpleGraph project(const EdgeColoredGraph& g, ColorMask colors);

/// Each unordered pair of [vertex_count] joins color i independently with
/// probability 1 - exp(-lambda_i / n). Color i draws from rng.substream({i}).
EdgeColoredGraph sample_ecer(std::size_t n, std::size_t vertex_count, const LambdaVector& lambda,
                             const Stream& rng);

// Text dump: header "n k", then one "color u v" line per colored edge (0-based).
void write_graph(std::ostream& out, const EdgeColoredGraph& g);
EdgeColoredGraph read_graph(std::istream& in);

// =============================================================================
// Disjoint sets
// =============================================================================

/// Union-find over [n] with union by size and path halving.
class Partition {
public:
    explicit Partition(std::size_t n);

    std::size_t n() const { return parent_.size(); }
    Vertex find(Vertex v);
    bool unite(Vertex a, Vertex b);

    // Read-only queries; no path compression so concurrent readers are safe.
    Vertex root(Vertex v) const;
    bool same(Vertex a, Vertex b) const { return root(a) == root(b); }
    std::size_t size_of(Vertex v) const { return size_[root(v)]; }
    std::size_t block_count() const { return blocks_; }
    std::size_t largest_block() const;

    /// Label of each vertex = smallest vertex of its block.
    std::vector<Vertex> canonical_labels() const;
    /// Block size -> number of vertices lying in blocks of that size.
    std::map<std::size_t, std::size_t> vertex_size_histogram() const;

    bool operator==(const Partition& other) const;

private:
    std::vector<Vertex> parent_;
    std::vector<std::size_t> size_;
    std::size_t blocks_;
};

Partition connected_components(const SimpleGraph& g);
Partition connected_components(std::size_t n, std::span<const Edge> edges);

/// Vertices of all components of maximum size (ties included), sorted.
std::vector<Vertex> largest_component_union(const SimpleGraph& g);

}  // namespace capsim
