#include "capsim/analytic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>

#include "capsim/errors.hpp"

namespace capsim {

namespace {

constexpr double kResidualLimit = 1e-8;
constexpr double kClampLimit = -1e-10;
constexpr std::size_t kMaxSeriesTerms = 10'000'000;

std::vector<ColorMask> masks_by_size(int k) {
    std::vector<ColorMask> order(std::size_t{1} << k);
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = static_cast<ColorMask>(m);
    std::stable_sort(order.begin(), order.end(), [](ColorMask a, ColorMask b) { return popcount(a) < popcount(b); });
    return order;
}

double sign_of(ColorMask m) { return popcount(m) % 2 == 0 ? 1.0 : -1.0; }

// sum_{m >= ell} Bin(m-1, theta_other)(ell-1) * Borel(mu)(m), certified to tol.
double borel_binomial_series(double mu, double theta_other, std::size_t ell, double tol) {
    if (ell > 1 && theta_other == 0.0) return 0.0;
    if (mu >= 1.0) throw NumericalError("two-color series cannot be certified at a critical Borel parameter");
    const double rho = mu * std::exp(1.0 - mu);
    const double tail_factor = rho / (1.0 - rho);
    const double l = static_cast<double>(ell);
    const double log_theta = ell > 1 ? std::log(theta_other) : 0.0;
    const double log_rest = std::log1p(-theta_other);
    double sum = 0.0;
    for (std::size_t m = 1; m <= kMaxSeriesTerms; ++m) {
        const double b = borel_pmf(mu, m);
        if (m >= ell) {
            const double md = static_cast<double>(m);
            const double log_binom = std::lgamma(md) - std::lgamma(l) - std::lgamma(md - l + 1.0) +
                                     (l - 1.0) * log_theta + (md - l) * log_rest;
            sum += std::exp(log_binom) * b;
            if (b * tail_factor <= tol) return sum;
        }
    }
    throw NumericalError("two-color series tolerance not reached within the term limit");
}

}  // namespace

RegimeReport classify_lambda(const LambdaVector& lambda) {
    const int k = lambda.k();
    RegimeReport r;
    r.fully_supercritical = true;
    r.fully_critical_subcritical = true;
    for (int i = 0; i < k; ++i) {
        if (lambda.without(i) > 1.0) {
            r.supercritical_indices |= ColorMask{1} << i;
            r.fully_critical_subcritical = false;
        } else {
            r.fully_supercritical = false;
        }
    }
    if (k <= 2) {
        r.core_assumption = true;
    } else {
        std::vector<double> v = lambda.values();
        std::sort(v.begin(), v.end(), std::greater<>());
        double top = 0.0;
        for (int j = 0; j < k - 2; ++j) top += v[static_cast<std::size_t>(j)];
        r.core_assumption = top < 1.0;
    }
    return r;
}

double p_residual(const LambdaVector& lambda, const std::vector<double>& p, ColorMask subset) {
    const int k = lambda.k();
    if (subset == 0) return std::fabs(p[0]);
    double exponent = -p[subset] * lambda.sum(full_mask(k) & ~subset);
    for (int j = 0; j < k; ++j) {
        if (has_color(subset, j)) exponent -= lambda[j] * p[subset & ~(ColorMask{1} << j)];
    }
    return std::fabs(p[subset] + std::expm1(exponent));
}

std::vector<double> extended_type_distribution(const std::vector<double>& p, int k) {
    const ColorMask full = full_mask(k);
    std::vector<double> pstar(p.size(), 0.0);
    for (ColorMask a = 0; a <= full; ++a) {
        double s = 0.0;
        // enumerate B subset of A
        for (ColorMask b = a;; b = (b - 1) & a) {
            s += sign_of(b) * (1.0 - p[(full & ~a) | b]);
            if (b == 0) break;
        }
        pstar[a] = s;
    }
    return pstar;
}

PTable solve_p_system(const LambdaVector& lambda) {
    const int k = lambda.k();
    const ColorMask full = full_mask(k);
    PTable t;
    t.k = k;
    t.p.assign(std::size_t{1} << k, 0.0);
    for (ColorMask subset : masks_by_size(k)) {
        if (subset == 0) continue;
        double a = 0.0;
        for (int i = 0; i < k; ++i) {
            if (has_color(subset, i)) a += lambda[i] * t.p[subset & ~(ColorMask{1} << i)];
        }
        t.p[subset] = subset == full ? -std::expm1(-a) : solve_survival_equation(a, lambda.sum(full & ~subset));
    }
    t.relevant = true;
    for (ColorMask subset = 0; subset <= full; ++subset) {
        t.max_residual = std::max(t.max_residual, p_residual(lambda, t.p, subset));
        if (subset != 0 && !(t.p[subset] > 0.0 && t.p[subset] < 1.0)) t.relevant = false;
    }
    if (t.max_residual > kResidualLimit) throw NumericalError("avoidance probability residual above 1e-8");

    t.pstar = extended_type_distribution(t.p, k);
    for (double& v : t.pstar) {
        if (v < 0.0) {
            t.min_raw_pstar = std::min(t.min_raw_pstar, v);
            if (v < kClampLimit) throw NumericalError("extended type inversion produced a negative probability");
            v = 0.0;
        }
    }
    return t;
}

double f_infinity_inclusion_exclusion(const PTable& table) {
    if (!table.relevant) return 0.0;
    double s = 0.0;
    for (ColorMask subset = 0; subset < table.p.size(); ++subset) s += sign_of(subset) * (1.0 - table.p[subset]);
    return s;
}

double f_infinity_inclusion_exclusion(const LambdaVector& lambda) {
    if (!classify_lambda(lambda).fully_supercritical) return 0.0;
    return f_infinity_inclusion_exclusion(solve_p_system(lambda));
}

double g_product(const std::vector<bool>& gamma, const std::vector<std::size_t>& beta, const std::vector<double>& x) {
    if (gamma.size() != beta.size() || gamma.size() != x.size()) throw ParameterError("g_product dimension mismatch");
    double log_sum = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        if (x[i] < 0.0 || x[i] > 1.0) throw ParameterError("g_product needs x in [0, 1]");
        const double log_miss = x[i] == 1.0 ? (beta[i] == 0 ? 0.0 : -INFINITY)
                                            : static_cast<double>(beta[i]) * std::log1p(-x[i]);
        const double factor_log = gamma[i] ? std::log(-std::expm1(log_miss)) : log_miss;
        if (factor_log == -INFINITY) return 0.0;
        log_sum += factor_log;
    }
    return std::exp(log_sum);
}

double phi_eval(const LambdaVector& lambda, int h, const std::vector<double>& z) {
    const int k = lambda.k();
    if (h < 0 || h > k - 2) throw ParameterError("phi_eval needs 0 <= h <= k-2");
    if (!classify_lambda(lambda).core_assumption) throw RegimeError("phi_eval needs lambda_I < 1 for |I| <= k-2");
    if (z.size() != color_string_count(k, h)) throw ParameterError("phi_eval argument count must equal |S_h|");
    for (double v : z) {
        if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("phi_eval arguments must lie in [0, 1]");
    }

    std::vector<double> current = z;
    for (int level = h; level > 0; --level) {
        const auto upper = enumerate_color_strings(k, level);
        std::map<ColorString, double> value;
        for (std::size_t j = 0; j < upper.size(); ++j) value.emplace(upper[j], current[j]);
        const auto lower = enumerate_color_strings(k, level - 1);
        std::vector<double> next(lower.size());
        for (std::size_t j = 0; j < lower.size(); ++j) {
            double log_prod = 0.0;
            for (int i = 0; i < k; ++i) {
                if (has_color(lower[j].set(), i)) continue;
                const ColorString si = lower[j].append(i);
                const double f = total_progeny_gf(lambda.sum(si.set()), value.at(si));
                log_prod += lambda[i] * (f - 1.0);
            }
            next[j] = std::exp(log_prod);
        }
        current = std::move(next);
    }
    return current.at(0);
}

double f_infinity_generating_function(const LambdaVector& lambda) {
    const int k = lambda.k();
    const RegimeReport regime = classify_lambda(lambda);
    if (!regime.fully_supercritical) throw RegimeError("generating-function route needs a fully supercritical lambda");
    if (!regime.core_assumption) throw RegimeError("generating-function route needs lambda_I < 1 for |I| <= k-2");

    const ColorMask full = full_mask(k);
    const auto strings = enumerate_color_strings(k, k - 2);
    std::vector<double> theta_without(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) theta_without[static_cast<std::size_t>(j)] = survival_theta(lambda.without(j));

    double total = 0.0;
    for (ColorMask J = 0; J <= full; ++J) {
        std::vector<double> args(strings.size(), 1.0);
        for (std::size_t j = 0; j < strings.size(); ++j) {
            double log_arg = 0.0;
            for (int i = 0; i < k; ++i) {
                if (has_color(strings[j].set(), i)) continue;
                const ColorMask missing = full & ~(strings[j].set() | (ColorMask{1} << i));
                const int m = std::countr_zero(missing);
                // exp(lambda_i (F(1-) - 1)) with F(1-) = 1 - theta(lambda^{\m})
                if (has_color(J, m)) log_arg -= lambda[i] * theta_without[static_cast<std::size_t>(m)];
            }
            args[j] = std::exp(log_arg);
        }
        total += sign_of(J) * phi_eval(lambda, k - 2, args);
    }
    return total;
}

double two_color_f_ell(double lambda_red, double lambda_blue, std::size_t ell, double tol) {
    if (ell < 1) throw ParameterError("two_color_f_ell needs ell >= 1");
    if (!(tol > 0.0)) throw ParameterError("two_color_f_ell needs tol > 0");
    const LambdaVector lambda({lambda_red, lambda_blue});
    const PTable t = solve_p_system(lambda);
    const double theta_red = survival_theta(lambda_red);
    const double theta_blue = survival_theta(lambda_blue);

    double f = ell == 1 ? t.pstar[0] : 0.0;
    const double w_red = t.pstar[0b01];
    const double w_blue = t.pstar[0b10];
    if (w_red > 0.0) f += w_red * borel_binomial_series(lambda_red * (1.0 - theta_red), theta_blue, ell, tol);
    if (w_blue > 0.0) f += w_blue * borel_binomial_series(lambda_blue * (1.0 - theta_blue), theta_red, ell, tol);
    return f;
}

LambdaVector near_critical_lambda(int k, double eps) {
    if (k < 2) throw ParameterError("near-critical family needs k >= 2");
    return LambdaVector(std::vector<double>(static_cast<std::size_t>(k), (1.0 + eps) / (k - 1)));
}

NearCriticalResult near_critical_constant(int k, const std::vector<double>& eps_grid) {
    if (k < 2) throw ParameterError("near-critical constant needs k >= 2");
    if (eps_grid.size() < 2) throw ParameterError("near-critical grid needs at least two points");
    for (std::size_t j = 0; j < eps_grid.size(); ++j) {
        const double e = eps_grid[j];
        if (!(e > 0.0)) throw ParameterError("near-critical grid must be positive");
        if (j > 0 && !(e < eps_grid[j - 1])) throw ParameterError("near-critical grid must be strictly decreasing");
        if (k >= 3 && !(e < 1.0 / (k - 2))) throw ParameterError("near-critical grid point breaks lambda_I < 1 for |I| <= k-2");
    }
    NearCriticalResult r;
    r.k = k;
    r.eps = eps_grid;
    for (double e : eps_grid) r.ratios.push_back(f_infinity_inclusion_exclusion(near_critical_lambda(k, e)) / std::pow(e, k));
    bool up = true, down = true;
    for (std::size_t j = 1; j < r.ratios.size(); ++j) {
        up = up && r.ratios[j] >= r.ratios[j - 1];
        down = down && r.ratios[j] <= r.ratios[j - 1];
    }
    r.monotone = up || down;
    const std::size_t n = r.eps.size();
    const double ea = r.eps[n - 2], eb = r.eps[n - 1];
    const double ra = r.ratios[n - 2], rb = r.ratios[n - 1];
    r.estimate = (ea * rb - eb * ra) / (ea - eb);
    return r;
}

}  // namespace capsim
