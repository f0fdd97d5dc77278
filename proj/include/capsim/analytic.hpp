#pragma once

#include <cstddef>
#include <vector>

#include "capsim/chronology.hpp"
#include "capsim/graph.hpp"

namespace capsim {

// =============================================================================
// Special functions
// =============================================================================

/// Principal branch of Lambert W on [-1/e, inf). Inputs down to -1/e - 1e-12
/// are clamped to the branch point; anything lower is a DomainError.
double lambert_w0(double x);

/// Survival probability of a Poisson(mu) Galton-Watson process.
double survival_theta(double mu);

/// Largest root in [0, 1) of p = 1 - exp(-a - c p), a, c >= 0.
double solve_survival_equation(double a, double c);

/// Borel(mu) pmf exp(-mu m) (mu m)^(m-1) / m!, 0 < mu <= 1, m >= 1.
double borel_pmf(double mu, std::size_t m);

/// Generating function of the Borel(mu) total progeny on [0, 1]; z = 1 means
/// the left limit (1 when mu <= 1, extinction probability otherwise).
double total_progeny_gf(double mu, double z);

// =============================================================================
// Regimes
// =============================================================================

struct RegimeReport {
    bool fully_supercritical = false;
    bool fully_critical_subcritical = false;
    /// lambda_I < 1 for every I with |I| <= k-2.
    bool core_assumption = false;
    /// Colors i with lambda^{\i} > 1.
    ColorMask supercritical_indices = 0;
};

RegimeReport classify_lambda(const LambdaVector& lambda);

// =============================================================================
// Avoidance probabilities
// =============================================================================

/// p[I] = P(root is i-avoiding connected to infinity for some i in I), I a bit mask;
/// pstar[A] = P(the set of colors i with root i-avoiding connected to infinity is exactly A).
struct PTable {
    int k = 0;
    std::vector<double> p;
    std::vector<double> pstar;
    bool relevant = false;
    double max_residual = 0.0;
    /// Most negative raw pstar value before clamping (0 if none).
    double min_raw_pstar = 0.0;

    double operator[](ColorMask subset) const { return p[subset]; }
};

/// Solves subsets in nondecreasing size order. Throws NumericalError if a
/// residual exceeds 1e-8 or the pstar inversion dips below -1e-10.
PTable solve_p_system(const LambdaVector& lambda);

/// |p_I - (1 - exp(-sum_{i in I} lambda_i p_{I\i} - p_I lambda_{[k]\I}))|
double p_residual(const LambdaVector& lambda, const std::vector<double>& p, ColorMask subset);

/// pstar from a p table (inclusion-exclusion inversion), before clamping.
std::vector<double> extended_type_distribution(const std::vector<double>& p, int k);

/// Alternating subset sum of (1 - p_I); exact 0 unless fully supercritical.
double f_infinity_inclusion_exclusion(const LambdaVector& lambda);
double f_infinity_inclusion_exclusion(const PTable& table);

/// prod_i [ (1-(1-x_i)^beta_i) gamma_i + (1-x_i)^beta_i (1-gamma_i) ]
double g_product(const std::vector<bool>& gamma, const std::vector<std::size_t>& beta, const std::vector<double>& x);

// =============================================================================
// Generating functions
// =============================================================================

/// Joint generating function of (|R~_s(r)|)_{s in S_h}; z is aligned with
/// enumerate_color_strings(k, h). Requires h <= k-2 and the core assumption.
double phi_eval(const LambdaVector& lambda, int h, const std::vector<double>& z);

/// f*_inf through Phi_{k-2}. Requires a fully supercritical lambda and the core assumption.
double f_infinity_generating_function(const LambdaVector& lambda);

// =============================================================================
// Two colors and near-critical scaling
// =============================================================================

/// P(root has exactly ell friends) for two colors, both series certified to tol.
double two_color_f_ell(double lambda_red, double lambda_blue, std::size_t ell, double tol = 1e-14);

struct NearCriticalResult {
    int k = 0;
    std::vector<double> eps;
    std::vector<double> ratios;  // f*_inf(eps) / eps^k
    bool monotone = false;
    double estimate = 0.0;
};

/// lambda(eps) = ((1+eps)/(k-1), ...); first-order Richardson on the two smallest eps.
NearCriticalResult near_critical_constant(int k, const std::vector<double>& eps_grid = {1e-2, 5e-3, 2e-3, 1e-3});

LambdaVector near_critical_lambda(int k, double eps);

}  // namespace capsim
