#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "capsim/graph.hpp"
#include "json.hpp"

namespace capsim {

/// A sequence of distinct colors (0-based).
class ColorString {
public:
    ColorString() = default;
    explicit ColorString(std::vector<int> colors);

    std::size_t length() const { return colors_.size(); }
    bool empty() const { return colors_.empty(); }
    const std::vector<int>& colors() const { return colors_; }
    int last() const { return colors_.back(); }
    ColorMask set() const { return set_; }

    /// Drops the last color.
    ColorString prefix() const;
    /// Appends a color not already present.
    ColorString append(int color) const;

    /// "()" or "(0,2,1)".
    std::string label() const;

    bool operator==(const ColorString& o) const { return colors_ == o.colors_; }
    std::strong_ordering operator<=>(const ColorString& o) const { return colors_ <=> o.colors_; }

private:
    std::vector<int> colors_;
    ColorMask set_ = 0;
};

/// All strings of h distinct colors out of k, lexicographically ordered.
std::vector<ColorString> enumerate_color_strings(int k, int h);

/// Falling factorial k (k-1) ... (k-h+1).
std::size_t color_string_count(int k, int h);

struct ChronologyLayer {
    std::vector<Vertex> reach;  // R~_s
    std::vector<Vertex> fresh;  // N~_s
};

struct ChronologyAtlas {
    Vertex root = 0;
    int k = 0;
    int h_max = 0;
    std::map<ColorString, ChronologyLayer> layers;
    /// reach_upto[h] = union of R~_s over |s| <= h.
    std::vector<std::vector<Vertex>> reach_upto;

    const ChronologyLayer& at(const ColorString& s) const { return layers.at(s); }
    /// Union of N~_s over the strings with set(s) = [k] \ {i}; needs h_max >= k-1.
    std::vector<Vertex> boundary_without(int i) const;
};

/// Builds R~_s and N~_s for every string of length <= h_max, h_max <= k.
ChronologyAtlas build_atlas(const EdgeColoredGraph& g, Vertex v, int h_max);

struct CoreBoundary {
    std::size_t rho = 0;
    std::vector<std::size_t> b;
    bool operator==(const CoreBoundary&) const = default;
};

/// rho = |R~<=_{k-2}(v)|, b_i = |N~^{\i}_{k-1}(v)|. Requires k >= 2.
CoreBoundary core_and_boundary(const EdgeColoredGraph& g, Vertex v);
CoreBoundary core_and_boundary(const ChronologyAtlas& atlas);

nlohmann::json atlas_to_json(const ChronologyAtlas& atlas);

}  // namespace capsim
