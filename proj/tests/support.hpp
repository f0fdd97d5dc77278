#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "capsim/graph.hpp"
#include "capsim/rng.hpp"

namespace testing {

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double variance() const {
        const double m = mean();
        return (sum_sq / static_cast<double>(n) - m * m) * static_cast<double>(n) / static_cast<double>(n - 1);
    }
    double stderr_() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

inline capsim::EdgeColoredGraph random_small_graph(capsim::Stream& rng, std::size_t n, int k, double density) {
    std::vector<std::vector<capsim::Edge>> sets(static_cast<std::size_t>(k));
    for (auto& set : sets)
        for (capsim::Vertex u = 0; u < n; ++u)
            for (capsim::Vertex v = u + 1; v < n; ++v)
                if (rng.uniform() < density) set.push_back({u, v});
    return capsim::EdgeColoredGraph(n, std::move(sets));
}

/// Plain BFS component labels (smallest vertex of each component).
inline std::vector<capsim::Vertex> bfs_labels(std::size_t n, const std::vector<capsim::Edge>& edges) {
    std::vector<std::vector<capsim::Vertex>> adj(n);
    for (auto e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<capsim::Vertex> label(n, static_cast<capsim::Vertex>(n));
    for (capsim::Vertex s = 0; s < n; ++s) {
        if (label[s] != n) continue;
        std::vector<capsim::Vertex> queue{s};
        label[s] = s;
        for (std::size_t q = 0; q < queue.size(); ++q)
            for (auto w : adj[queue[q]])
                if (label[w] == n) {
                    label[w] = s;
                    queue.push_back(w);
                }
    }
    return label;
}

}  // namespace testing
