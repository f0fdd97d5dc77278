#include "capsim/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "capsim/errors.hpp"

namespace capsim {

int popcount(ColorMask m) { return std::popcount(m); }

LambdaVector::LambdaVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ParameterError("lambda must have at least one color");
    if (values_.size() > static_cast<std::size_t>(kMaxColors))
        throw ParameterError("at most " + std::to_string(kMaxColors) + " colors are supported");
    for (double x : values_) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("lambda coordinates must be finite and > 0");
    }
}

double LambdaVector::sum(ColorMask colors) const {
    double s = 0.0;
    for (int i = 0; i < k(); ++i) {
        if (has_color(colors, i)) s += values_[static_cast<std::size_t>(i)];
    }
    return s;
}

Adjacency build_adjacency(std::size_t n, std::span<const Edge> edges) {
    Adjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (const Edge& e : edges) {
        ++adj.offsets[e.u + 1];
        ++adj.offsets[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) adj.offsets[i + 1] += adj.offsets[i];
    adj.targets.resize(adj.offsets[n]);
    std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const Edge& e : edges) {
        adj.targets[fill[e.u]++] = e.v;
        adj.targets[fill[e.v]++] = e.u;
    }
    return adj;
}

namespace {
void normalize_edges(std::size_t n, std::vector<Edge>& edges) {
    for (Edge& e : edges) {
        if (e.u == e.v) throw ParameterError("self-loops are not allowed");
        if (e.u >= n || e.v >= n) throw ParameterError("edge endpoint out of range");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}
}  // namespace

SimpleGraph::SimpleGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    normalize_edges(n_, edges_);
}

EdgeColoredGraph::EdgeColoredGraph(std::size_t n, std::vector<std::vector<Edge>> edge_sets)
    : n_(n), edge_sets_(std::move(edge_sets)) {
    if (edge_sets_.empty()) throw ParameterError("an edge-colored graph needs at least one color");
    if (edge_sets_.size() > static_cast<std::size_t>(kMaxColors)) throw ParameterError("too many colors");
    if (n_ > std::size_t{0xFFFFFFFFu}) throw ParameterError("vertex count exceeds 32-bit index range");
    for (auto& es : edge_sets_) normalize_edges(n_, es);
}

std::size_t EdgeColoredGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& es : edge_sets_) total += es.size();
    return total;
}

std::vector<Adjacency> EdgeColoredGraph::color_adjacency() const {
    std::vector<Adjacency> out;
    out.reserve(edge_sets_.size());
    for (const auto& es : edge_sets_) out.push_back(build_adjacency(n_, es));
    return out;
}

SimpleGraph project(const EdgeColoredGraph& g, ColorMask colors) {
    std::vector<Edge> merged;
    for (int c = 0; c < g.k(); ++c) {
        if (!has_color(colors, c)) continue;
        std::vector<Edge> next;
        next.reserve(merged.size() + g.edges(c).size());
        std::set_union(merged.begin(), merged.end(), g.edges(c).begin(), g.edges(c).end(),
                       std::back_inserter(next));
        merged = std::move(next);
    }
    return SimpleGraph(g.n(), std::move(merged));
}

EdgeColoredGraph sample_ecer(std::size_t n, std::size_t vertex_count, const LambdaVector& lambda,
                             const Stream& rng) {
    if (vertex_count > n) throw ParameterError("vertex_count must not exceed n");
    if (n == 0) throw ParameterError("n must be positive");
    std::vector<std::vector<Edge>> sets(static_cast<std::size_t>(lambda.k()));
    const std::size_t m = vertex_count;
    for (int c = 0; c < lambda.k(); ++c) {
        Stream s = rng.substream({static_cast<std::uint64_t>(c)});
        const double p = -std::expm1(-lambda[c] / static_cast<double>(n));
        auto& out = sets[static_cast<std::size_t>(c)];
        out.reserve(static_cast<std::size_t>(p * 0.5 * static_cast<double>(m) * static_cast<double>(m) * 1.1) + 16);
        // Walk the row-major enumeration of pairs u < v, skipping geometric gaps.
        std::size_t u = 0;
        std::size_t v = 1;
        while (m >= 2 && u + 1 < m) {
            std::uint64_t skip = s.geometric_failures(p);
            // advance (u, v) by `skip` positions
            while (skip > 0 && u + 1 < m) {
                const std::size_t left_in_row = m - v;
                if (skip < left_in_row) {
                    v += static_cast<std::size_t>(skip);
                    skip = 0;
                } else {
                    skip -= left_in_row;
                    ++u;
                    v = u + 1;
                }
            }
            if (u + 1 >= m) break;
            out.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
            if (++v >= m) {
                ++u;
                v = u + 1;
            }
        }
    }
    return EdgeColoredGraph(n, std::move(sets));
}

void write_graph(std::ostream& out, const EdgeColoredGraph& g) {
    out << g.n() << ' ' << g.k() << '\n';
    for (int c = 0; c < g.k(); ++c) {
        for (const Edge& e : g.edges(c)) out << c << ' ' << e.u << ' ' << e.v << '\n';
    }
}

EdgeColoredGraph read_graph(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    int k = 0;
    bool have_header = false;
    std::vector<std::vector<Edge>> sets;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> n >> k) || k < 1) throw ParameterError("graph dump: bad header on line " + std::to_string(line_no));
            sets.resize(static_cast<std::size_t>(k));
            have_header = true;
            continue;
        }
        long long c = 0, u = 0, v = 0;
        if (!(ls >> c >> u >> v)) throw ParameterError("graph dump: bad edge on line " + std::to_string(line_no));
        if (c < 0 || c >= k || u < 0 || v < 0)
            throw ParameterError("graph dump: out-of-range value on line " + std::to_string(line_no));
        sets[static_cast<std::size_t>(c)].push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    }
    if (!have_header) throw ParameterError("graph dump: missing header");
    return EdgeColoredGraph(n, std::move(sets));
}

// --- Partition ---------------------------------------------------------------

Partition::Partition(std::size_t n) : parent_(n), size_(n, 1), blocks_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<Vertex>(i);
}

Vertex Partition::find(Vertex v) {
    while (parent_[v] != v) {
        parent_[v] = parent_[parent_[v]];
        v = parent_[v];
    }
    return v;
}

bool Partition::unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --blocks_;
    return true;
}

Vertex Partition::root(Vertex v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
}

std::size_t Partition::largest_block() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < parent_.size(); ++v) {
        if (parent_[v] == v) best = std::max(best, size_[v]);
    }
    return best;
}

std::vector<Vertex> Partition::canonical_labels() const {
    const std::size_t n = parent_.size();
    std::vector<Vertex> first(n, static_cast<Vertex>(n));
    std::vector<Vertex> labels(n);
    for (std::size_t v = 0; v < n; ++v) {
        const Vertex r = root(static_cast<Vertex>(v));
        if (first[r] == n) first[r] = static_cast<Vertex>(v);
        labels[v] = first[r];
    }
    return labels;
}

std::map<std::size_t, std::size_t> Partition::vertex_size_histogram() const {
    std::map<std::size_t, std::size_t> hist;
    for (std::size_t v = 0; v < parent_.size(); ++v) {
        if (parent_[v] == v) hist[size_[v]] += size_[v];
    }
    return hist;
}

bool Partition::operator==(const Partition& other) const {
    return n() == other.n() && canonical_labels() == other.canonical_labels();
}

Partition connected_components(std::size_t n, std::span<const Edge> edges) {
    Partition p(n);
    for (const Edge& e : edges) p.unite(e.u, e.v);
    return p;
}

Partition connected_components(const SimpleGraph& g) { return connected_components(g.n(), g.edges()); }

std::vector<Vertex> largest_component_union(const SimpleGraph& g) {
    const Partition p = connected_components(g);
    const std::size_t best = p.largest_block();
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < g.n(); ++v) {
        if (p.size_of(static_cast<Vertex>(v)) == best) out.push_back(static_cast<Vertex>(v));
    }
    return out;
}

}  // namespace capsim
