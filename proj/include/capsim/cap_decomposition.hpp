#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>

#include "capsim/graph.hpp"

namespace capsim {

/// Exact rational fraction count / n.
struct Fraction {
    std::size_t count = 0;
    std::size_t n = 1;
    double value() const { return static_cast<double>(count) / static_cast<double>(n); }
    bool operator==(const Fraction&) const = default;
};

/// Color-avoiding components of a graph with their vertex-size histogram.
struct CapDecomposition {
    Partition partition;
    /// component size -> number of vertices in components of that size
    std::map<std::size_t, std::size_t> size_histogram;
    std::size_t largest = 0;

    std::size_t n() const { return partition.n(); }
    double max_fraction() const;
};

/// v ~ w iff they are connected in G minus color i, for every color i.
/// Computed as the meet of the k per-color-deletion partitions.
Partition color_avoiding_partition(const EdgeColoredGraph& g);

CapDecomposition decompose(const EdgeColoredGraph& g);

/// f_ell(G): fraction of vertices in color-avoiding components of size ell.
Fraction component_size_density(const CapDecomposition& d, std::size_t ell);

/// Test oracle: decides every pair and color independently by BFS. n <= 12.
Partition brute_force_cap_partition(const EdgeColoredGraph& g);

inline constexpr std::size_t kBruteForceMaxVertices = 12;

/// CSV with header `size,fraction,count` (count = number of vertices).
void write_size_csv(std::ostream& out, const CapDecomposition& d);

}  // namespace capsim
