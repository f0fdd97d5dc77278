#include "capsim/rng.hpp"

#include <cmath>

namespace capsim {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t poisson_small(Stream& s, double mean) {
    // Inversion from 0 upwards; mean < 10 keeps exp(-mean) far from underflow.
    double u = s.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf) {
        ++k;
        p *= mean / static_cast<double>(k);
        double next = cdf + p;
        if (next == cdf) break;  // numerical tail exhausted
        cdf = next;
    }
    return k;
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

Stream::Stream(std::uint64_t seed) : key_(mix64(seed ^ 0x6A09E667F3BCC908ULL)), counter_(0) {}

Stream Stream::substream(std::initializer_list<std::uint64_t> tags) const {
    std::uint64_t k = key_;
    for (std::uint64_t t : tags) {
        k = mix64(k ^ mix64(t + kGamma));
    }
    return Stream(k, 0);
}

Stream::result_type Stream::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double Stream::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Stream::uniform_pos() {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t Stream::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) return poisson_small(*this, mean);
    const auto chunks = static_cast<std::uint64_t>(std::ceil(mean / 9.0));
    const double part = mean / static_cast<double>(chunks);
    std::uint64_t total = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) total += poisson_small(*this, part);
    return total;
}

std::uint64_t Stream::geometric_failures(double p) {
    if (p >= 1.0) return 0;
    if (!(p > 0.0)) return max();
    const double g = std::floor(std::log(uniform_pos()) / std::log1p(-p));
    if (g >= 1.8e19) return max();
    return static_cast<std::uint64_t>(g);
}

}  // namespace capsim
