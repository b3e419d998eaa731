#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stepscat/errors.hpp"

namespace stepscat {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Density profile: rho(x) = alpha^2 on [0, a), 1 on [a, inf).
// ---------------------------------------------------------------------------

struct DensityProfile {
    double alpha{};  // density root on [0, a)
    double a{};      // location of the density step
};

inline void validate_profile(const DensityProfile& p, bool allow_degenerate = false) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.a) || p.alpha <= 0.0 || p.a <= 0.0)
        throw ValidationError("InvalidDensity",
                              "alpha and a must be finite positive reals");
    if (p.alpha == 1.0 && !allow_degenerate)
        throw ValidationError("InvalidDensity",
                              "alpha = 1 is admitted only in degenerate validation mode");
}

// rho evaluated with the right-limit convention at the step: rho(a) = 1.
inline double rho_at(const DensityProfile& p, double x) {
    if (x < 0.0) throw NegativeAbscissa("rho_at: x = " + std::to_string(x));
    return x < p.a ? p.alpha * p.alpha : 1.0;
}

// Travel-time coordinates mu±(x) = ±x·sqrt(rho(x)) + a(1 ∓ sqrt(rho(x))).
// Continuous at x = a where both equal a; for x >= a returns (x, 2a − x).
inline std::pair<double, double> mu_pm(const DensityProfile& p, double x) {
    if (x < 0.0) throw NegativeAbscissa("mu_pm: x = " + std::to_string(x));
    const double s = x < p.a ? p.alpha : 1.0;
    return {x * s + p.a * (1.0 - s), -x * s + p.a * (1.0 + s)};
}

// Interface reflection coefficient of the density step.
inline double tau_of(const DensityProfile& p) {
    return (p.alpha - 1.0) / (p.alpha + 1.0);
}

// ---------------------------------------------------------------------------
// Boundary coefficients (b0 + i b1 λ + b2 λ²) y'(0) + (a0 + i a1 λ + a2 λ²) y(0) = 0.
// ---------------------------------------------------------------------------

struct BoundaryCoefficients {
    double alpha0{}, alpha1{}, alpha2{};
    double beta0{}, beta1{}, beta2{};
};

struct DeltaTriple {
    double delta1{}, delta2{}, delta3{};
};

inline DeltaTriple delta_triple(const BoundaryCoefficients& c) {
    return {c.alpha0 * c.beta1 - c.alpha1 * c.beta0,
            c.alpha0 * c.beta2 - c.alpha2 * c.beta0,
            c.alpha1 * c.beta2 - c.alpha2 * c.beta1};
}

// Accepts iff delta1 <= 0, delta2 <= 0, delta3 >= 0 and not all six vanish.
inline DeltaTriple validate_boundary(const BoundaryCoefficients& c) {
    for (double v : {c.alpha0, c.alpha1, c.alpha2, c.beta0, c.beta1, c.beta2})
        if (!std::isfinite(v))
            throw ValidationError("InvalidBoundary", "coefficients must be finite");
    if (c.alpha0 == 0 && c.alpha1 == 0 && c.alpha2 == 0 && c.beta0 == 0 &&
        c.beta1 == 0 && c.beta2 == 0)
        throw AllZeroCoefficients("all six boundary coefficients vanish");
    const DeltaTriple d = delta_triple(c);
    if (d.delta1 > 0) throw SignConditionViolated("delta1");
    if (d.delta2 > 0) throw SignConditionViolated("delta2");
    if (d.delta3 < 0) throw SignConditionViolated("delta3");
    return d;
}

inline cplx alpha_poly(const BoundaryCoefficients& c, cplx lambda) {
    return c.alpha0 + cplx(0, 1) * c.alpha1 * lambda + c.alpha2 * lambda * lambda;
}

inline cplx beta_poly(const BoundaryCoefficients& c, cplx lambda) {
    return c.beta0 + cplx(0, 1) * c.beta1 * lambda + c.beta2 * lambda * lambda;
}

inline bool beta_all_zero(const BoundaryCoefficients& c) {
    return c.beta0 == 0 && c.beta1 == 0 && c.beta2 == 0;
}

// ---------------------------------------------------------------------------
// Sampled potential: piecewise linear between grid nodes, identically zero
// beyond support_bound.
// ---------------------------------------------------------------------------

struct PotentialSpec {
    std::vector<double> grid;    // strictly increasing, starts at 0
    std::vector<double> values;  // q samples
    double support_bound{};      // X_q: q treated as 0 beyond this abscissa

    double operator()(double x) const {
        if (grid.empty() || x > support_bound || x < grid.front() || x > grid.back())
            return 0.0;
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        if (it == grid.begin()) return values.front();
        if (it == grid.end()) return values.back();
        const std::size_t j = static_cast<std::size_t>(it - grid.begin());
        const double t = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
        return (1.0 - t) * values[j - 1] + t * values[j];
    }

    bool is_zero() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    }

    // Smallest interval [lo, hi] outside which q vanishes identically.
    std::pair<double, double> support_interval() const {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (values[i] != 0.0 && grid[i] <= support_bound) {
                if (!any) lo = i > 0 ? grid[i - 1] : grid[i];
                hi = i + 1 < grid.size() ? grid[i + 1] : grid[i];
                any = true;
            }
        }
        if (!any) return {0.0, 0.0};
        return {lo, std::min(hi, support_bound)};
    }
};

inline PotentialSpec zero_potential() {
    return {{0.0, 1.0}, {0.0, 0.0}, 0.5};
}

inline void validate_potential(const PotentialSpec& q) {
    if (q.grid.size() != q.values.size() || q.grid.size() < 2)
        throw ValidationError("InvalidPotential",
                              "grid and values must match and hold at least two nodes");
    if (q.grid.front() != 0.0)
        throw ValidationError("InvalidPotential", "grid must start at 0");
    for (std::size_t i = 1; i < q.grid.size(); ++i)
        if (!(q.grid[i] > q.grid[i - 1]))
            throw ValidationError("InvalidPotential", "grid must be strictly increasing");
    double norm = 0.0;
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        if (!std::isfinite(q.values[i]))
            throw ValidationError("InvalidPotential", "values must be finite");
        const double dl = i == 0 ? q.grid[1] - q.grid[0] : q.grid[i] - q.grid[i - 1];
        norm += (1.0 + q.grid[i]) * std::abs(q.values[i]) * dl;
    }
    if (!std::isfinite(norm))
        throw ValidationError("InvalidPotential", "weighted norm diverges");
    if (!std::isfinite(q.support_bound) || q.support_bound < 0)
        throw ValidationError("InvalidPotential", "support_bound must be a finite nonnegative real");
}

// ---------------------------------------------------------------------------
// Numerics configuration.
// ---------------------------------------------------------------------------

struct NumericsConfig {
    double x_max{};                // ODE truncation radius, > max(a, X_q)
    double h_x{};                  // x / y grid step
    double lambda_max{};           // half-width of the real λ grid
    int n_lambda{};                // λ sample count (even)
    double y_max{};                // main-equation y-grid truncation
    double root_tol = 1e-10;
    double quad_tol = 1e-8;
    double solve_tol = 1e-8;
    double mu_max = 0.0;           // bound-state search ceiling; 0 = automatic
    bool degenerate_ok = false;    // admit alpha = 1 (validation mode)
};

inline double default_mu_max(const DensityProfile& p, const PotentialSpec& q) {
    double depth = 0.0;
    for (std::size_t i = 0; i < q.grid.size(); ++i)
        if (q.grid[i] <= q.support_bound)
            depth = std::max(depth, -q.values[i] / rho_at(p, q.grid[i]));
    return std::sqrt(std::max(0.0, depth)) + 1.0 / p.a + 1.0;
}

inline NumericsConfig default_numerics(const DensityProfile& p, const PotentialSpec& q,
                                       const std::vector<double>& bound_states = {}) {
    NumericsConfig cfg;
    cfg.h_x = p.a / 100.0;
    cfg.lambda_max = 40.0 / p.a;
    cfg.n_lambda = 4096;
    cfg.x_max = std::max(p.a, q.support_bound) + p.a;
    double lam_min = 1.0 / p.a;
    for (double lk : bound_states) lam_min = std::min(lam_min, lk);
    cfg.y_max = bound_states.empty() ? cfg.x_max + 10.0 * p.a
                                     : cfg.x_max + 5.0 / lam_min;
    return cfg;
}

// The x grid must contain a as an exact node and the transition-table step must
// divide h_x; snap the configured steps so both hold.
inline NumericsConfig snapped(const DensityProfile& p, NumericsConfig cfg) {
    const long na = std::lround(p.a / cfg.h_x);
    cfg.h_x = p.a / static_cast<double>(std::max<long>(1, na));
    const long nx = static_cast<long>(std::ceil(cfg.x_max / cfg.h_x - 1e-12));
    cfg.x_max = cfg.h_x * static_cast<double>(nx);
    const long ny = static_cast<long>(std::ceil(cfg.y_max / cfg.h_x - 1e-12));
    cfg.y_max = cfg.h_x * static_cast<double>(ny);
    return cfg;
}

// Transition-table step: an integer fraction of h_x no coarser than a/100.
inline double table_step(const DensityProfile& p, const NumericsConfig& cfg) {
    const double m = std::max(2.0, std::ceil(cfg.h_x * 100.0 / p.a - 1e-12));
    return cfg.h_x / m;
}

// Fills the data-dependent y_max default (decay horizon of the slowest bound
// state), enforces the kernel-argument coverage floor, and snaps the grid.
inline NumericsConfig resolved(const DensityProfile& p, NumericsConfig cfg,
                               const std::vector<double>& bound_lams) {
    if (cfg.y_max <= 0.0) {
        double lam_min = 1.0 / p.a;
        for (double lk : bound_lams) lam_min = std::min(lam_min, lk);
        cfg.y_max = bound_lams.empty() ? cfg.x_max + 10.0 * p.a : cfg.x_max + 5.0 / lam_min;
    }
    cfg.y_max = std::max({cfg.y_max, p.a * (1.0 + p.alpha), cfg.x_max + p.a});
    return snapped(p, cfg);
}

inline NumericsConfig resolved(const DensityProfile& p, const NumericsConfig& cfg,
                               const std::vector<std::pair<double, double>>& bound_pairs) {
    std::vector<double> lams;
    lams.reserve(bound_pairs.size());
    for (const auto& [lk, m2] : bound_pairs) lams.push_back(lk);
    return resolved(p, cfg, lams);
}

// ---------------------------------------------------------------------------
// Scattering data.
// ---------------------------------------------------------------------------

struct ScatteringData {
    std::vector<double> lambda_grid;   // symmetric about 0, excludes 0
    std::vector<cplx> s_values;        // S(λ) samples
    std::vector<double> bound_states;  // ascending λ_k > 0 (eigen-parameters iλ_k)
    std::vector<double> norming;       // m_k, same length as bound_states
};

// Symmetric midpoint grid ±(k−1/2)·Δλ, k = 1..n/2; no node at 0.
inline std::vector<double> lambda_grid(const NumericsConfig& cfg) {
    const int half = cfg.n_lambda / 2;
    std::vector<double> g(static_cast<std::size_t>(cfg.n_lambda));
    const double dl = cfg.lambda_max / half;
    for (int k = 0; k < half; ++k) {
        const double lam = (k + 0.5) * dl;
        g[static_cast<std::size_t>(half - 1 - k)] = -lam;
        g[static_cast<std::size_t>(half + k)] = lam;
    }
    return g;
}

// Verifies the grid is symmetric and conj(S(−λ)) = S(λ) within tol.
inline void check_scattering_symmetry(const ScatteringData& sd, double tol) {
    const std::size_t n = sd.lambda_grid.size();
    if (sd.s_values.size() != n)
        throw ValidationError("InvalidScatteringData", "lambda_grid and s_values lengths differ");
    double ms = 1.0;
    for (const cplx& s : sd.s_values) ms = std::max(ms, std::abs(s));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        if (std::abs(sd.lambda_grid[i] + sd.lambda_grid[j]) > 1e-12 * (1 + std::abs(sd.lambda_grid[i])))
            throw NonHermitianData("lambda grid is not symmetric about 0");
        worst = std::max(worst, std::abs(std::conj(sd.s_values[j]) - sd.s_values[i]));
    }
    if (worst > tol * ms)
        throw NonHermitianData("conj(S(-lambda)) = S(lambda) violated by " + std::to_string(worst));
    for (std::size_t k = 0; k < sd.bound_states.size(); ++k) {
        if (!(sd.bound_states[k] > 0))
            throw ValidationError("InvalidScatteringData", "bound states must be positive");
        if (k > 0 && !(sd.bound_states[k] > sd.bound_states[k - 1]))
            throw ValidationError("InvalidScatteringData", "bound states must be strictly ascending");
    }
    if (sd.norming.size() != sd.bound_states.size())
        throw ValidationError("InvalidScatteringData", "norming and bound_states lengths differ");
    for (double m : sd.norming)
        if (!(m > 0))
            throw ValidationError("InvalidScatteringData", "norming constants must be positive");
}

}  // namespace stepscat
