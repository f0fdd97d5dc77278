#include "capsim/ecbp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "capsim/errors.hpp"
#include "capsim/parallel.hpp"

namespace capsim {

namespace {

constexpr std::size_t kBlockSize = 4096;
constexpr std::size_t kMaxIndexSize = 1'000'000;

struct MomentBlock {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    std::size_t censored = 0;
};

McEstimate reduce_moments(const std::vector<MomentBlock>& blocks) {
    MomentBlock total;
    for (const auto& b : blocks) {
        total.sum += b.sum;
        total.sum_sq += b.sum_sq;
        total.n += b.n;
        total.censored += b.censored;
    }
    McEstimate e;
    e.samples = total.n + total.censored;
    e.censored = total.censored;
    if (total.n > 0) {
        const double n = static_cast<double>(total.n);
        e.estimate = total.sum / n;
        const double var = total.n > 1 ? std::max(0.0, (total.sum_sq - n * e.estimate * e.estimate) / (n - 1.0)) : 0.0;
        e.stderr_ = std::sqrt(var / n);
    }
    if (total.censored > 0) e.note = "samples above the node cap were dropped";
    return e;
}

void require_core_assumption(const LambdaVector& lambda) {
    if (!classify_lambda(lambda).core_assumption) {
        throw ParameterError("lambda_I < 1 must hold for every color set of size <= k-2");
    }
}

std::optional<CoreBoundary> core_from_index(const LambdaVector& lambda, const ChronologyIndex& index,
                                            const std::vector<int>& missing, Stream& rng, std::size_t node_cap,
                                            ChronologySample& scratch) {
    if (!explore_chronology(lambda, index, rng, node_cap, scratch)) return std::nullopt;
    CoreBoundary cb;
    cb.b.assign(static_cast<std::size_t>(lambda.k()), 0);
    for (std::size_t c : scratch.reach) cb.rho += c;
    for (std::size_t id : index.level(index.h() + 1)) cb.b[static_cast<std::size_t>(missing[id])] += scratch.fresh[id];
    return cb;
}

std::vector<int> missing_colors(const ChronologyIndex& index) {
    std::vector<int> missing(index.size(), -1);
    const ColorMask full = full_mask(index.k());
    for (std::size_t id : index.level(index.h() + 1)) {
        const ColorMask rest = full & ~index.string(id).set();
        if (popcount(rest) == 1) missing[id] = std::countr_zero(rest);
    }
    return missing;
}

}  // namespace

unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

EdgeColoredGraph ColoredTree::to_graph() const {
    std::vector<std::vector<Edge>> sets(static_cast<std::size_t>(k_));
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        sets[static_cast<std::size_t>(nodes_[i].color)].push_back({nodes_[i].parent, static_cast<Vertex>(i)});
    }
    return EdgeColoredGraph(nodes_.size(), std::move(sets));
}

std::optional<ColoredTree> sample_ecbp(const LambdaVector& lambda, std::size_t depth, Stream& rng, std::size_t node_cap) {
    std::vector<TreeNode> nodes{{0, -1, 0, 0, 0}};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].depth >= depth) continue;
        const auto first = static_cast<std::uint32_t>(nodes.size());
        for (int c = 0; c < lambda.k(); ++c) {
            const std::uint64_t x = rng.poisson(lambda[c]);
            if (nodes.size() + x > node_cap) return std::nullopt;
            for (std::uint64_t j = 0; j < x; ++j) {
                nodes.push_back({static_cast<std::uint32_t>(i), c, nodes[i].depth + 1, 0, 0});
            }
        }
        nodes[i].first_child = first;
        nodes[i].child_count = static_cast<std::uint32_t>(nodes.size()) - first;
    }
    return ColoredTree(lambda.k(), std::move(nodes));
}

ChronologyIndex::ChronologyIndex(int k, int h) : k_(k), h_(h) {
    if (h < 0 || h > k - 1) throw ParameterError("chronology depth must lie in [0, k-1]");
    std::map<ColorString, std::size_t> ids;
    for (int len = 0; len <= h + 1; ++len) {
        if (strings_.size() + color_string_count(k, len) > kMaxIndexSize) throw ParameterError("too many color strings");
        levels_.emplace_back();
        for (auto& s : enumerate_color_strings(k, len)) {
            ids.emplace(s, strings_.size());
            levels_.back().push_back(strings_.size());
            strings_.push_back(std::move(s));
        }
    }
    child_.assign(strings_.size() * static_cast<std::size_t>(k), npos);
    for (std::size_t id = 0; id < strings_.size(); ++id) {
        if (static_cast<int>(strings_[id].length()) > h) continue;
        for (int c = 0; c < k; ++c) {
            if (!has_color(strings_[id].set(), c)) child_[id * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] = ids.at(strings_[id].append(c));
        }
    }
}

std::size_t ChronologyIndex::id(const ColorString& s) const {
    const auto it = std::lower_bound(levels_.at(s.length()).begin(), levels_.at(s.length()).end(), s,
                                     [&](std::size_t a, const ColorString& b) { return strings_[a] < b; });
    if (it == levels_[s.length()].end() || strings_[*it] != s) throw ParameterError("color string not indexed");
    return *it;
}

bool explore_chronology(const LambdaVector& lambda, const ChronologyIndex& index, Stream& rng, std::size_t node_cap,
                        ChronologySample& out) {
    const int k = lambda.k();
    if (k != index.k()) throw ParameterError("chronology index built for a different number of colors");
    out.reach.assign(index.size(), 0);
    out.fresh.assign(index.size(), 0);
    // pending (string id, multiplicity) of unexpanded nodes
    std::vector<std::pair<std::size_t, std::uint64_t>> pending{{0, 1}};
    out.reach[0] = 1;
    std::size_t expanded = 0;
    while (!pending.empty()) {
        const std::size_t id = pending.back().first;
        if (--pending.back().second == 0) pending.pop_back();
        if (++expanded > node_cap) return false;
        const bool inner = static_cast<int>(index.string(id).length()) < index.h();
        for (int c = 0; c < k; ++c) {
            const std::uint64_t x = rng.poisson(lambda[c]);
            if (x == 0) continue;
            const std::size_t next = index.child(id, c);
            if (next == ChronologyIndex::npos) {
                out.reach[id] += x;
                pending.emplace_back(id, x);
            } else if (inner) {
                out.reach[next] += x;
                pending.emplace_back(next, x);
            } else {
                out.fresh[next] += x;
            }
        }
    }
    return true;
}

std::optional<CoreBoundary> sample_core(const LambdaVector& lambda, Stream& rng, std::size_t node_cap) {
    if (lambda.k() < 2) throw ParameterError("core sampling needs at least two colors");
    require_core_assumption(lambda);
    const ChronologyIndex index(lambda.k(), lambda.k() - 2);
    ChronologySample scratch;
    return core_from_index(lambda, index, missing_colors(index), rng, node_cap, scratch);
}

McEstimate mc_f_infinity(const LambdaVector& lambda, std::size_t samples, std::uint64_t seed, unsigned workers,
                         std::size_t node_cap) {
    const int k = lambda.k();
    const RegimeReport regime = classify_lambda(lambda);
    if (!regime.fully_supercritical) {
        McEstimate e;
        e.samples = samples;
        e.note = "not fully supercritical: f*_inf is exactly 0";
        return e;
    }
    require_core_assumption(lambda);
    const ChronologyIndex index(k, k - 2);
    const auto missing = missing_colors(index);
    std::vector<double> log_ext(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) log_ext[static_cast<std::size_t>(i)] = std::log1p(-survival_theta(lambda.without(i)));
    const Stream base(seed);

    auto blocks = run_blocks<MomentBlock>(samples, kBlockSize, workers, [&](std::size_t begin, std::size_t end) {
        MomentBlock m;
        ChronologySample scratch;
        for (std::size_t s = begin; s < end; ++s) {
            Stream rng = base.substream({s});
            const auto cb = core_from_index(lambda, index, missing, rng, node_cap, scratch);
            if (!cb) {
                ++m.censored;
                continue;
            }
            double v = 1.0;
            for (int i = 0; i < k; ++i) {
                v *= -std::expm1(static_cast<double>(cb->b[static_cast<std::size_t>(i)]) * log_ext[static_cast<std::size_t>(i)]);
            }
            m.sum += v;
            m.sum_sq += v * v;
            ++m.n;
        }
        return m;
    });
    return reduce_moments(blocks);
}

McEstimate mc_phi(const LambdaVector& lambda, int h, const std::vector<double>& z, std::size_t samples,
                  std::uint64_t seed, unsigned workers, std::size_t node_cap) {
    const int k = lambda.k();
    if (h < 0 || h > k - 2) throw ParameterError("mc_phi needs 0 <= h <= k-2");
    require_core_assumption(lambda);
    if (z.size() != color_string_count(k, h)) throw ParameterError("mc_phi argument count must equal |S_h|");
    const ChronologyIndex index(k, h);
    const auto& ids = index.level(h);
    const Stream base(seed);

    auto blocks = run_blocks<MomentBlock>(samples, kBlockSize, workers, [&](std::size_t begin, std::size_t end) {
        MomentBlock m;
        ChronologySample scratch;
        for (std::size_t s = begin; s < end; ++s) {
            Stream rng = base.substream({s});
            if (!explore_chronology(lambda, index, rng, node_cap, scratch)) {
                ++m.censored;
                continue;
            }
            double v = 1.0;
            for (std::size_t j = 0; j < ids.size(); ++j) v *= std::pow(z[j], static_cast<double>(scratch.reach[ids[j]]));
            m.sum += v;
            m.sum_sq += v * v;
            ++m.n;
        }
        return m;
    });
    return reduce_moments(blocks);
}

const char* to_string(CensorReason r) {
    switch (r) {
        case CensorReason::depth_cap: return "depth-cap";
        case CensorReason::node_cap: return "node-cap";
        case CensorReason::survival: return "survival";
    }
    return "?";
}

FriendCountSampler::FriendCountSampler(const LambdaVector& lambda, FriendCountCaps caps)
    : lambda_(lambda), caps_(caps), table_(solve_p_system(lambda)) {
    const RegimeReport regime = classify_lambda(lambda);
    if (!regime.core_assumption) throw ParameterError("lambda_I < 1 must hold for every color set of size <= k-2");
    if (caps.depth_cap < 1) throw ParameterError("depth cap must be positive");
    double acc = 0.0;
    for (double p : table_.pstar) type_cdf_.push_back(acc += p);
    for (double& c : type_cdf_) c /= acc;
    for (int i = 0; i < lambda.k(); ++i) log_extinction_.push_back(std::log1p(-survival_theta(lambda.without(i))));
    survival_stop_ = regime.fully_supercritical && caps.survival_tol > 0.0;
}

ColorMask FriendCountSampler::draw_type(Stream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(type_cdf_.begin(), type_cdf_.end(), u);
    return static_cast<ColorMask>(std::min<std::size_t>(static_cast<std::size_t>(it - type_cdf_.begin()), type_cdf_.size() - 1));
}

FriendCountOutcome FriendCountSampler::operator()(Stream& rng) {
    const int k = lambda_.k();
    const ColorMask full = full_mask(k);
    nodes_.clear();
    nodes_.push_back({0, -1, full, 0});
    std::size_t begin = 0;
    std::size_t end = 1;
    for (std::size_t depth = 1;; ++depth) {
        for (std::size_t v = begin; v < end; ++v) {
            const ColorMask avoid = nodes_[v].avoid;
            for (int c = 0; c < k; ++c) {
                const std::uint64_t x = rng.poisson(lambda_[c]);
                if (x == 0) continue;
                const ColorMask bit = ColorMask{1} << c;
                const ColorMask child_avoid = avoid & ~bit;
                if (child_avoid == 0) {
                    for (std::uint64_t j = 0; j < x; ++j) nodes_[v].alive |= draw_type(rng) & ~bit;
                    continue;
                }
                if (nodes_.size() + x > caps_.node_cap) return FriendCountOutcome::censored(CensorReason::node_cap);
                for (std::uint64_t j = 0; j < x; ++j) nodes_.push_back({static_cast<std::uint32_t>(v), c, child_avoid, 0});
            }
        }
        begin = end;
        end = nodes_.size();

        ColorMask cover = 0;
        for (std::size_t u = begin; u < end; ++u) cover |= nodes_[u].avoid;
        if (cover != full) {
            // Some color's avoiding cluster of the root ends above this level,
            // so every friend lies above it.
            for (std::size_t u = begin; u < end; ++u) nodes_[u].alive = draw_type(rng);
            for (std::size_t u = end; u-- > 1;) {
                nodes_[nodes_[u].parent].alive |= nodes_[u].alive & ~(ColorMask{1} << nodes_[u].color);
            }
            const ColorMask root_alive = nodes_[0].alive;
            // ok[u] bit i: alive_i of the node just below the deepest color-i edge on the root path
            ok_.assign(end, 0);
            std::size_t friends = 1;
            for (std::size_t u = 1; u < end; ++u) {
                const ColorMask bit = ColorMask{1} << nodes_[u].color;
                ok_[u] = (ok_[nodes_[u].parent] & ~bit) | (nodes_[u].alive & bit);
                if ((nodes_[u].avoid | (root_alive & ok_[u])) == full) ++friends;
            }
            return FriendCountOutcome::finite(friends);
        }
        if (depth >= caps_.depth_cap) return FriendCountOutcome::censored(CensorReason::depth_cap);
        if (survival_stop_) {
            double death = 0.0;
            for (int i = 0; i < k; ++i) {
                std::size_t f = 0;
                for (std::size_t u = begin; u < end; ++u) f += has_color(nodes_[u].avoid, i);
                death += std::exp(static_cast<double>(f) * log_extinction_[static_cast<std::size_t>(i)]);
            }
            if (death <= caps_.survival_tol) return FriendCountOutcome::censored(CensorReason::survival);
        }
    }
}

FriendCountOutcome sample_friend_count(const LambdaVector& lambda, Stream& rng, FriendCountCaps caps) {
    FriendCountSampler sampler(lambda, caps);
    return sampler(rng);
}

double ComponentSizeEstimate::f_hat(std::size_t ell) const {
    if (ell < 1 || ell > ell_max) throw ParameterError("ell outside the estimated range");
    return samples == 0 ? 0.0 : static_cast<double>(counts[ell]) / static_cast<double>(samples);
}

namespace {
double binomial_stderr(double p, std::size_t n) { return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }
}  // namespace

double ComponentSizeEstimate::stderr_of(std::size_t ell) const { return binomial_stderr(f_hat(ell), samples); }

double ComponentSizeEstimate::tail_mass() const {
    return samples == 0 ? 0.0 : static_cast<double>(tail_count) / static_cast<double>(samples);
}

double ComponentSizeEstimate::censored_mass() const {
    return samples == 0 ? 0.0 : static_cast<double>(censored()) / static_cast<double>(samples);
}

double ComponentSizeEstimate::censored_stderr() const { return binomial_stderr(censored_mass(), samples); }

ComponentSizeEstimate mc_component_size_distribution(const LambdaVector& lambda, std::size_t samples,
                                                     std::size_t ell_max, std::uint64_t seed, FriendCountCaps caps,
                                                     unsigned workers) {
    if (ell_max < 1) throw ParameterError("ell_max must be positive");
    const FriendCountSampler prototype(lambda, caps);
    const Stream base(seed);

    auto blocks = run_blocks<ComponentSizeEstimate>(samples, kBlockSize, workers, [&](std::size_t begin, std::size_t end) {
        FriendCountSampler sampler = prototype;
        ComponentSizeEstimate e;
        e.counts.assign(ell_max + 1, 0);
        for (std::size_t s = begin; s < end; ++s) {
            Stream rng = base.substream({s});
            const FriendCountOutcome o = sampler(rng);
            if (o.kind == FriendCountOutcome::Kind::finite) {
                if (o.ell <= ell_max) ++e.counts[o.ell];
                else ++e.tail_count;
            } else {
                switch (o.reason) {
                    case CensorReason::depth_cap: ++e.censored_depth; break;
                    case CensorReason::node_cap: ++e.censored_node; break;
                    case CensorReason::survival: ++e.censored_survival; break;
                }
            }
        }
        return e;
    });

    ComponentSizeEstimate total;
    total.samples = samples;
    total.ell_max = ell_max;
    total.counts.assign(ell_max + 1, 0);
    for (const auto& b : blocks) {
        for (std::size_t l = 1; l <= ell_max; ++l) total.counts[l] += b.counts[l];
        total.tail_count += b.tail_count;
        total.censored_depth += b.censored_depth;
        total.censored_node += b.censored_node;
        total.censored_survival += b.censored_survival;
    }
    return total;
}

}  // namespace capsim
