#pragma once

// Shared fixtures for the test suite: reference problems with known spectra,
// a smooth compactly supported potential, and a fixed-step RK4 integrator used
// as an independent cross-check of the adaptive propagator.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "stepscat/stepscat.hpp"

namespace fixtures {

using stepscat::BoundaryCoefficients;
using stepscat::cplx;
using stepscat::DensityProfile;
using stepscat::NumericsConfig;
using stepscat::PotentialSpec;

inline DensityProfile profile_step() { return {2.0, 1.0}; }
inline DensityProfile profile_unit() { return {1.0, 1.0}; }

// Dirichlet condition y(0) = 0.
inline BoundaryCoefficients bc_dirichlet() {
    BoundaryCoefficients c;
    c.alpha0 = 1.0;
    return c;
}

// Pure function-term polynomial (every beta zero), one quadratic factor.
inline BoundaryCoefficients bc_robin_a() {
    BoundaryCoefficients c;
    c.alpha0 = 1.0;
    c.alpha1 = 0.4;
    c.alpha2 = 0.3;
    return c;
}

// Mixed condition with a constant derivative term; one bound state on the
// step profile.
inline BoundaryCoefficients bc_robin_b() {
    BoundaryCoefficients c;
    c.alpha0 = 2.0;
    c.alpha1 = 0.5;
    c.alpha2 = 0.5;
    c.beta0 = 1.0;
    return c;
}

// On the unit profile with zero potential the characteristic is 1.3 − μ on
// the imaginary axis: a single eigen-parameter at μ = 1.3 with m² = 2.6.
inline BoundaryCoefficients bc_affine_single() {
    BoundaryCoefficients c;
    c.alpha0 = 1.3;
    c.beta0 = 1.0;
    return c;
}

// On the unit profile with zero potential the characteristic is
// (μ − 0.8)(μ − 1.6) on the imaginary axis: two eigen-parameters with
// m² = 0.8 and 1.6.
inline BoundaryCoefficients bc_affine_double() {
    BoundaryCoefficients c;
    c.alpha0 = 1.28;
    c.alpha1 = 1.2;
    c.beta0 = 1.2;
    c.beta1 = 1.0;
    return c;
}

// Smooth bump supported on [1.5, 3.5]: exp(−u²/(1−u²)) with u = x − 2.5,
// sampled on a fine uniform grid.
inline PotentialSpec bump_potential() {
    PotentialSpec q;
    const double h = 0.0025;
    const int n = 1400;
    q.grid.reserve(n + 1);
    q.values.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double x = h * i;
        const double u = x - 2.5;
        double v = 0.0;
        if (std::abs(u) < 1.0) {
            const double d = 1.0 - u * u;
            v = std::exp(-u * u / d);
        }
        q.grid.push_back(x);
        q.values.push_back(v);
    }
    q.support_bound = 3.5;
    return q;
}

inline NumericsConfig cfg_free() {
    NumericsConfig cfg;
    cfg.x_max = 2.0;
    cfg.h_x = 0.02;
    cfg.lambda_max = 40.0;
    cfg.n_lambda = 4096;
    cfg.y_max = 6.0;
    return cfg;
}

inline NumericsConfig cfg_bump(double h_x = 0.01, int n_lambda = 4096) {
    NumericsConfig cfg;
    cfg.x_max = 4.0;
    cfg.h_x = h_x;
    cfg.lambda_max = 40.0;
    cfg.n_lambda = n_lambda;
    cfg.y_max = 8.5;
    return cfg;
}

inline NumericsConfig cfg_unit() {
    NumericsConfig cfg;
    cfg.x_max = 3.0;
    cfg.h_x = 0.01;
    cfg.lambda_max = 40.0;
    cfg.n_lambda = 512;
    cfg.y_max = 0.0;  // data-dependent default
    cfg.degenerate_ok = true;
    return cfg;
}

// Reflectionless data on the unit profile: S ≡ 1 with one bound state at
// λ = i and norming constant √2.  The exact kernel and potential are
//   K(x,y) = −2 e^{−(x+y)} / (1 + e^{−2x}),   q(x) = −2 sech² x.
inline stepscat::ScatteringData soliton_data(const NumericsConfig& cfg) {
    stepscat::ScatteringData sd;
    sd.lambda_grid = stepscat::lambda_grid(cfg);
    sd.s_values.assign(sd.lambda_grid.size(), cplx(1.0, 0.0));
    sd.bound_states = {1.0};
    sd.norming = {std::sqrt(2.0)};
    return sd;
}

inline double soliton_kernel(double x, double y) {
    return -2.0 * std::exp(-(x + y)) / (1.0 + std::exp(-2.0 * x));
}

inline double soliton_potential(double x) {
    const double c = std::cosh(x);
    return -2.0 / (c * c);
}

// Fixed-step classical RK4 for y'' = w(x) y, integrating (y, y') from x0 to
// x1 with n steps.  Independent of the production propagator.
template <class W>
inline std::pair<cplx, cplx> rk4_second_order(cplx y, cplx yp, double x0, double x1, int n,
                                              W&& w) {
    const double h = (x1 - x0) / n;
    for (int i = 0; i < n; ++i) {
        const double x = x0 + h * i;
        auto f = [&](double xx, cplx yy, cplx pp) { return std::make_pair(pp, w(xx) * yy); };
        const auto [k1y, k1p] = f(x, y, yp);
        const auto [k2y, k2p] = f(x + h / 2, y + h / 2 * k1y, yp + h / 2 * k1p);
        const auto [k3y, k3p] = f(x + h / 2, y + h / 2 * k2y, yp + h / 2 * k2p);
        const auto [k4y, k4p] = f(x + h, y + h * k3y, yp + h * k3p);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    return {y, yp};
}

}  // namespace fixtures
