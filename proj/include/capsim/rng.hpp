#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace capsim {

// =============================================================================
// Counter-based random streams
// =============================================================================
//
// A Stream is a (key, counter) pair; the n-th output is a bijective 64-bit mix
// of key + n * golden_gamma. Substreams are derived by hashing a parent key
// with integer tags, so every (replica, color, ...) gets an independent,
// reproducible sequence no matter which thread consumes it.

std::uint64_t mix64(std::uint64_t x);

class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed = 0);

    /// Independent child stream identified by the given tags.
    Stream substream(std::initializer_list<std::uint64_t> tags) const;

    result_type operator()();
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1]; safe for log().
    double uniform_pos();

    /// Poisson(mean) by sequential inversion; means >= 10 are split into
    /// independent chunks below 10 so the method stays exact and cheap.
    std::uint64_t poisson(double mean);

    /// Number of failures before the first success of Bernoulli(p) trials.
    /// Returns max() when p == 0.
    std::uint64_t geometric_failures(double p);

    std::uint64_t key() const { return key_; }

private:
    Stream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace capsim
