#include "capsim/cap_decomposition.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "capsim/errors.hpp"

namespace capsim {

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<Vertex>& key) const {
        std::uint64_t h = 0x84222325CBF29CE4ULL;
        for (Vertex v : key) h = mix64(h ^ v);
        return static_cast<std::size_t>(h);
    }
};

bool avoiding_connected(const std::vector<Adjacency>& adj, int avoided, Vertex a, Vertex b, std::size_t n) {
    if (a == b) return true;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> queue{a};
    seen[a] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex x = queue[head];
        for (int c = 0; c < static_cast<int>(adj.size()); ++c) {
            if (c == avoided) continue;
            for (Vertex y : adj[static_cast<std::size_t>(c)].neighbors(x)) {
                if (seen[y]) continue;
                if (y == b) return true;
                seen[y] = 1;
                queue.push_back(y);
            }
        }
    }
    return false;
}

}  // namespace

double CapDecomposition::max_fraction() const {
    return n() == 0 ? 0.0 : static_cast<double>(largest) / static_cast<double>(n());
}

Partition color_avoiding_partition(const EdgeColoredGraph& g) {
    const std::size_t n = g.n();
    const int k = g.k();
    std::vector<Partition> per_color;
    per_color.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        Partition p(n);
        for (int c = 0; c < k; ++c) {
            if (c == i) continue;
            for (const Edge& e : g.edges(c)) p.unite(e.u, e.v);
        }
        per_color.push_back(std::move(p));
    }

    Partition meet(n);
    std::unordered_map<std::vector<Vertex>, Vertex, KeyHash> first_with_key;
    first_with_key.reserve(n);
    std::vector<Vertex> key(static_cast<std::size_t>(k));
    for (std::size_t v = 0; v < n; ++v) {
        for (int i = 0; i < k; ++i) key[static_cast<std::size_t>(i)] = per_color[static_cast<std::size_t>(i)].find(static_cast<Vertex>(v));
        auto [it, inserted] = first_with_key.try_emplace(key, static_cast<Vertex>(v));
        if (!inserted) meet.unite(it->second, static_cast<Vertex>(v));
    }
    return meet;
}

CapDecomposition decompose(const EdgeColoredGraph& g) {
    CapDecomposition d{color_avoiding_partition(g), {}, 0};
    d.size_histogram = d.partition.vertex_size_histogram();
    d.largest = d.partition.largest_block();
    return d;
}

Fraction component_size_density(const CapDecomposition& d, std::size_t ell) {
    if (ell < 1 || ell > d.n()) throw ParameterError("component size ell must lie in [1, n]");
    const auto it = d.size_histogram.find(ell);
    return {it == d.size_histogram.end() ? 0 : it->second, d.n()};
}

Partition brute_force_cap_partition(const EdgeColoredGraph& g) {
    const std::size_t n = g.n();
    if (n > kBruteForceMaxVertices) throw ParameterError("brute-force partition refuses graphs with more than 12 vertices");
    const auto adj = g.color_adjacency();
    Partition p(n);
    for (Vertex a = 0; a < n; ++a) {
        for (Vertex b = a + 1; b < n; ++b) {
            bool all = true;
            for (int i = 0; i < g.k() && all; ++i) all = avoiding_connected(adj, i, a, b, n);
            if (all) p.unite(a, b);
        }
    }
    return p;
}

void write_size_csv(std::ostream& out, const CapDecomposition& d) {
    out << "size,fraction,count\n";
    const auto old_precision = out.precision(17);
    for (const auto& [size, count] : d.size_histogram) {
        out << size << ',' << static_cast<double>(count) / static_cast<double>(d.n()) << ',' << count << '\n';
    }
    out.precision(old_precision);
}

}  // namespace capsim
