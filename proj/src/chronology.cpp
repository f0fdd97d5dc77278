#include "capsim/chronology.hpp"

#include <algorithm>
#include <iterator>

#include "capsim/errors.hpp"

namespace capsim {

namespace {

std::vector<Vertex> set_union(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Vertex> set_minus(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void enumerate(int k, int h, ColorString current, std::vector<ColorString>& out) {
    if (static_cast<int>(current.length()) == h) {
        out.push_back(std::move(current));
        return;
    }
    for (int c = 0; c < k; ++c) {
        if (!has_color(current.set(), c)) enumerate(k, h, current.append(c), out);
    }
}

class Explorer {
public:
    Explorer(const EdgeColoredGraph& g) : adj_(g.color_adjacency()), mark_(g.n(), 0) {}

    // N(W, G^{color}) with W excluded.
    std::vector<Vertex> neighbors(const std::vector<Vertex>& w, int color) {
        bump();
        for (Vertex x : w) mark_[x] = epoch_;
        std::vector<Vertex> out;
        for (Vertex x : w) {
            for (Vertex y : adj_[static_cast<std::size_t>(color)].neighbors(x)) {
                if (mark_[y] != epoch_) {
                    mark_[y] = epoch_;
                    out.push_back(y);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // R(W, G^{colors} - removed)
    std::vector<Vertex> reach(const std::vector<Vertex>& w, ColorMask colors, const std::vector<Vertex>& removed) {
        bump();
        for (Vertex x : removed) mark_[x] = epoch_;
        std::vector<Vertex> out;
        for (Vertex x : w) {
            if (mark_[x] == epoch_) continue;
            mark_[x] = epoch_;
            out.push_back(x);
        }
        for (std::size_t head = 0; head < out.size(); ++head) {
            const Vertex x = out[head];
            for (int c = 0; c < static_cast<int>(adj_.size()); ++c) {
                if (!has_color(colors, c)) continue;
                for (Vertex y : adj_[static_cast<std::size_t>(c)].neighbors(x)) {
                    if (mark_[y] == epoch_) continue;
                    mark_[y] = epoch_;
                    out.push_back(y);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    void bump() {
        if (++epoch_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0);
            epoch_ = 1;
        }
    }

    std::vector<Adjacency> adj_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t epoch_ = 0;
};

}  // namespace

ColorString::ColorString(std::vector<int> colors) : colors_(std::move(colors)) {
    for (int c : colors_) {
        if (c < 0 || c >= kMaxColors) throw ParameterError("color out of range in color string");
        if (has_color(set_, c)) throw ParameterError("color string repeats a color");
        set_ |= ColorMask{1} << c;
    }
}

ColorString ColorString::prefix() const {
    if (colors_.empty()) throw ParameterError("empty color string has no prefix");
    std::vector<int> p(colors_.begin(), colors_.end() - 1);
    return ColorString(std::move(p));
}

ColorString ColorString::append(int color) const {
    std::vector<int> p = colors_;
    p.push_back(color);
    return ColorString(std::move(p));
}

std::string ColorString::label() const {
    std::string s = "(";
    for (std::size_t j = 0; j < colors_.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(colors_[j]);
    }
    return s + ")";
}

std::size_t color_string_count(int k, int h) {
    if (h < 0 || h > k) throw ParameterError("color string length must lie in [0, k]");
    std::size_t count = 1;
    for (int j = 0; j < h; ++j) count *= static_cast<std::size_t>(k - j);
    return count;
}

std::vector<ColorString> enumerate_color_strings(int k, int h) {
    if (k < 1 || k > kMaxColors) throw ParameterError("number of colors out of range");
    if (h < 0 || h > k) throw ParameterError("color string length must lie in [0, k]");
    std::vector<ColorString> out;
    out.reserve(color_string_count(k, h));
    enumerate(k, h, ColorString{}, out);
    return out;
}

std::vector<Vertex> ChronologyAtlas::boundary_without(int i) const {
    if (h_max < k - 1) throw ParameterError("atlas too shallow for the (k-1)-color boundary");
    const ColorMask target = full_mask(k) & ~(ColorMask{1} << i);
    std::vector<Vertex> out;
    for (const auto& [s, layer] : layers) {
        if (static_cast<int>(s.length()) == k - 1 && s.set() == target) out = set_union(out, layer.fresh);
    }
    return out;
}

ChronologyAtlas build_atlas(const EdgeColoredGraph& g, Vertex v, int h_max) {
    const int k = g.k();
    if (v >= g.n()) throw ParameterError("root vertex out of range");
    if (h_max < 0 || h_max > k) throw ParameterError("atlas depth must lie in [0, k]");

    ChronologyAtlas atlas;
    atlas.root = v;
    atlas.k = k;
    atlas.h_max = h_max;
    atlas.layers[ColorString{}] = {{v}, {}};
    atlas.reach_upto.push_back({v});

    Explorer ex(g);
    for (int h = 1; h <= h_max; ++h) {
        const auto& below = atlas.reach_upto.back();
        std::vector<Vertex> upto = below;
        for (const ColorString& s : enumerate_color_strings(k, h)) {
            const ColorString parent = s.prefix();
            const auto& parent_reach = atlas.layers.at(parent).reach;
            ChronologyLayer layer;
            layer.fresh = set_minus(ex.neighbors(parent_reach, s.last()), below);
            layer.reach = ex.reach(layer.fresh, s.set(), parent_reach);
            upto = set_union(upto, layer.reach);
            atlas.layers.emplace(s, std::move(layer));
        }
        atlas.reach_upto.push_back(std::move(upto));
    }
    return atlas;
}

CoreBoundary core_and_boundary(const ChronologyAtlas& atlas) {
    const int k = atlas.k;
    if (k < 2) throw ParameterError("core and boundary need at least two colors");
    CoreBoundary out;
    out.rho = atlas.reach_upto.at(static_cast<std::size_t>(k - 2)).size();
    out.b.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out.b[static_cast<std::size_t>(i)] = atlas.boundary_without(i).size();
    return out;
}

CoreBoundary core_and_boundary(const EdgeColoredGraph& g, Vertex v) {
    if (g.k() < 2) throw ParameterError("core and boundary need at least two colors");
    return core_and_boundary(build_atlas(g, v, g.k() - 1));
}

nlohmann::json atlas_to_json(const ChronologyAtlas& atlas) {
    nlohmann::json reach = nlohmann::json::object();
    nlohmann::json fresh = nlohmann::json::object();
    for (const auto& [s, layer] : atlas.layers) {
        reach[s.label()] = layer.reach;
        if (!s.empty()) fresh[s.label()] = layer.fresh;
    }
    nlohmann::json j{{"root", atlas.root}, {"k", atlas.k}, {"h_max", atlas.h_max}, {"reach", reach}, {"fresh", fresh}};
    if (atlas.k >= 2 && atlas.h_max >= atlas.k - 1) {
        const auto cb = core_and_boundary(atlas);
        j["rho"] = cb.rho;
        j["b"] = cb.b;
    }
    return j;
}

}  // namespace capsim
