#include <cmath>
#include <numbers>

#include "capsim/analytic.hpp"
#include "capsim/errors.hpp"

namespace capsim {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double initial_guess(double x) {
    if (x < -0.25) {
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
    if (std::isnan(x)) throw DomainError("lambert_w0 of NaN");
    if (x < -kInvE - 1e-12) throw DomainError("lambert_w0 argument below -1/e");
    if (x <= -kInvE) return -1.0;
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;

    double w = initial_guess(x);
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0 || !std::isfinite(denom)) break;
        double next = w - f / denom;
        if (next < -1.0) next = (w - 1.0) / 2.0;
        if (std::fabs(next - w) <= 1e-16 * (1.0 + std::fabs(next))) {
            w = next;
            break;
        }
        w = next;
    }
    return w;
}

double solve_survival_equation(double a, double c) {
    if (!(a >= 0.0) || !(c >= 0.0)) throw ParameterError("survival equation needs a, c >= 0");
    if (a == 0.0 && c <= 1.0) return 0.0;
    if (c == 0.0) return -std::expm1(-a);

    const auto g = [&](double p) { return p + std::expm1(-a - c * p); };
    double p = 1.0 + lambert_w0(-c * std::exp(-a - c)) / c;
    // g is convex with g(1) > 0, so Newton from the right of the largest root
    // decreases monotonically onto it.
    if (!(p > 0.0) || !(p < 1.0) || g(p) < 0.0) p = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double gp = 1.0 - c * std::exp(-a - c * p);
        if (!(gp > 0.0)) break;
        const double step = g(p) / gp;
        const double next = p - step;
        if (!(next > 0.0) || next > p) break;
        p = next;
        if (step <= 1e-17 * p) break;
    }
    return p;
}

double survival_theta(double mu) {
    if (!(mu > 0.0)) throw ParameterError("survival_theta needs mu > 0");
    if (mu <= 1.0) return 0.0;
    return solve_survival_equation(0.0, mu);
}

double borel_pmf(double mu, std::size_t m) {
    if (!(mu > 0.0) || mu > 1.0) throw ParameterError("borel_pmf needs 0 < mu <= 1");
    if (m < 1) throw ParameterError("borel_pmf needs m >= 1");
    const double md = static_cast<double>(m);
    return std::exp(-mu * md + (md - 1.0) * std::log(mu * md) - std::lgamma(md + 1.0));
}

double total_progeny_gf(double mu, double z) {
    if (!(mu > 0.0)) throw ParameterError("total_progeny_gf needs mu > 0");
    if (!(z >= 0.0) || z > 1.0) throw DomainError("total_progeny_gf needs z in [0, 1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return mu <= 1.0 ? 1.0 : 1.0 - survival_theta(mu);

    const double w = lambert_w0(-mu * std::exp(-mu) * z);
    double y = -w / mu;
    // y = z exp(mu (y - 1)); h is concave and increasing up to the smallest root.
    for (int it = 0; it < 100; ++it) {
        const double e = z * std::exp(mu * (y - 1.0));
        const double hp = 1.0 - mu * e;
        if (!(hp > 0.0)) break;
        const double step = (y - e) / hp;
        const double next = y - step;
        if (!std::isfinite(next) || next < 0.0) break;
        y = next;
        if (std::fabs(step) <= 1e-17 * (1.0 + y)) break;
    }
    return y;
}

}  // namespace capsim
