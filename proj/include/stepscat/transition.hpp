#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "stepscat/errors.hpp"
#include "stepscat/jost.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

// ---------------------------------------------------------------------------
// Tabulated continuum part F0s of the transition kernel, together with its
// jump locations and the discrete (bound-state) part kept in closed form.
// ---------------------------------------------------------------------------

struct TransitionTable {
    double t_lo{}, ht{};
    std::vector<double> vals;  // F0s on t_lo + ht*i
    struct Feature {
        double t{};     // jump abscissa
        double jump{};  // F0s(t+0) − F0s(t−0)
    };
    std::vector<Feature> features;
    std::vector<std::pair<double, double>> bound;  // (λ_k, m_k²)

    double t_hi() const { return t_lo + ht * static_cast<double>(vals.size() - 1); }

    // True when the tabulated continuum part is numerical dust relative to the
    // discrete data (e.g. pure bound-state input whose S equals the layered
    // reference up to rounding).
    bool trivial() const {
        double scale = 1.0;
        for (const auto& bm : bound) scale += bm.second;
        double vm = 0.0;
        for (double v : vals) vm = std::max(vm, std::abs(v));
        return vm <= 1e-13 * scale;
    }

    // Linear interpolation; at a tabulated jump the stored midpoint value wins.
    double f0s(double t) const {
        const double u = (t - t_lo) / ht;
        if (u < -1e-7 || u > static_cast<double>(vals.size() - 1) + 1e-7)
            throw OutOfRange("t = " + std::to_string(t) + " outside table [" +
                             std::to_string(t_lo) + ", " + std::to_string(t_hi()) + "]");
        const double uc = std::min(std::max(u, 0.0), static_cast<double>(vals.size() - 1));
        const std::size_t i = std::min(static_cast<std::size_t>(uc), vals.size() - 2);
        const double frac = uc - static_cast<double>(i);
        if (frac < 1e-6) return vals[i];
        if (frac > 1.0 - 1e-6) return vals[i + 1];
        return (1.0 - frac) * vals[i] + frac * vals[i + 1];
    }

    // One-sided limit at jump abscissae: side = ±1 selects F0s(t ± 0).
    double f0s_sided(double t, int side) const {
        double v = f0s(t);
        if (side != 0)
            for (const Feature& f : features)
                if (std::abs(t - f.t) < 1e-9) v += side * 0.5 * f.jump;
        return v;
    }

    // Jump of F0s at the given abscissa (0 away from features).
    double jump_at(double t) const {
        for (const Feature& f : features)
            if (std::abs(t - f.t) < 1e-9) return f.jump;
        return 0.0;
    }

    // Full kernel F0 = F0s + discrete part.
    double f0(double t) const {
        double v = f0s(t);
        for (const auto& [lk, m2] : bound) v += m2 * std::exp(-lk * t);
        return v;
    }

    double f0_sided(double t, int side) const {
        double v = f0s_sided(t, side);
        for (const auto& [lk, m2] : bound) v += m2 * std::exp(-lk * t);
        return v;
    }
};

namespace detail {

// Arrival-time channels of the layered medium: shifts u_k = 2aαk − 2a.
inline std::vector<double> tail_shifts(const DensityProfile& p) {
    std::vector<double> us(6);
    for (int k = 0; k < 6; ++k) us[static_cast<std::size_t>(k)] = 2.0 * p.a * p.alpha * k - 2.0 * p.a;
    return us;
}

// The four rational envelope factors per channel, with closed-form transforms
//   (c1/2) sgn(s) e^{−w|s|}, (c2/2) e^{−w|s|}, (c3/4) w s e^{−w|s|},
//   (c4/4) (1 + w|s|) e^{−w|s|},  at s = t + u_k.
inline void channel_factors(double lam, double w, double g[4], double gi[4]) {
    const double d1 = lam * lam + w * w;
    const double d2 = d1 * d1;
    g[0] = 0.0;
    gi[0] = -lam / d1;
    g[1] = w / d1;
    gi[1] = 0.0;
    g[2] = 0.0;
    gi[2] = -lam * w * w / d2;
    g[3] = w * w * w / d2;
    gi[3] = 0.0;
}

}  // namespace detail

// Builds the continuum table for the main-equation kernel from scattering
// data: the slowly decaying part of S0 − S is projected on rational channel
// envelopes whose transforms are known exactly, the smooth remainder is
// windowed and summed by the midpoint rule, and the exact transforms are
// added back.  Jump magnitudes of F0s are recorded per channel.
inline TransitionTable f0s_transform(const ScatteringData& sd, const DensityProfile& p,
                                     const BoundaryCoefficients& c,
                                     const NumericsConfig& cfg_in) {
    const NumericsConfig cfg = resolved(p, cfg_in, sd.bound_states);
    check_scattering_symmetry(sd, cfg.solve_tol);
    const std::size_t n = sd.lambda_grid.size();
    if (n < 2) throw ValidationError("InvalidScatteringData", "lambda_grid too short");

    std::vector<cplx> D(n);
    for (std::size_t j = 0; j < n; ++j)
        D[j] = s_zero(p, c, sd.lambda_grid[j]) - sd.s_values[j];

    const double L = std::abs(sd.lambda_grid.back());
    const double w = 1.0 / p.a;
    const auto us = detail::tail_shifts(p);
    const std::size_t ncoef = 4 * us.size();

    // Least-squares projection on the channel envelopes over |λ| ≥ L/2.
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ncoef));
    std::vector<std::size_t> fit_rows;
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(sd.lambda_grid[j]) >= 0.5 * L) fit_rows.push_back(j);
    if (fit_rows.size() >= ncoef) {
        Eigen::MatrixXd A(static_cast<Eigen::Index>(2 * fit_rows.size()),
                          static_cast<Eigen::Index>(ncoef));
        Eigen::VectorXd b(static_cast<Eigen::Index>(2 * fit_rows.size()));
        for (std::size_t r = 0; r < fit_rows.size(); ++r) {
            const double lam = sd.lambda_grid[fit_rows[r]];
            double g[4], gi[4];
            detail::channel_factors(lam, w, g, gi);
            for (std::size_t k = 0; k < us.size(); ++k) {
                const double cph = std::cos(lam * us[k]), sph = std::sin(lam * us[k]);
                for (int m = 0; m < 4; ++m) {
                    // (cph + i sph)(g + i gi) split into real and imaginary rows
                    A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(4 * k + m)) =
                        cph * g[m] - sph * gi[m];
                    A(static_cast<Eigen::Index>(fit_rows.size() + r),
                      static_cast<Eigen::Index>(4 * k + m)) = sph * g[m] + cph * gi[m];
                }
            }
            b(static_cast<Eigen::Index>(r)) = D[fit_rows[r]].real();
            b(static_cast<Eigen::Index>(fit_rows.size() + r)) = D[fit_rows[r]].imag();
        }
        coef = A.colPivHouseholderQr().solve(b);
    }

    // Remainder after subtracting the fitted model, then a cos² roll-off
    // window on the outer 40% of the grid.
    std::vector<cplx> R(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = sd.lambda_grid[j];
        double g[4], gi[4];
        detail::channel_factors(lam, w, g, gi);
        cplx model = 0.0;
        for (std::size_t k = 0; k < us.size(); ++k) {
            const cplx ph(std::cos(lam * us[k]), std::sin(lam * us[k]));
            for (int m = 0; m < 4; ++m)
                model += coef(static_cast<Eigen::Index>(4 * k + m)) * ph * cplx(g[m], gi[m]);
        }
        R[j] = D[j] - model;
        const double alam = std::abs(lam);
        if (alam > 0.6 * L) {
            const double cw = std::cos(1.5707963267948966 * (alam - 0.6 * L) / (0.4 * L));
            R[j] *= cw * cw;
        }
    }

    TransitionTable tt;
    tt.ht = table_step(p, cfg);
    const double mu_p0 = mu_pm(p, 0.0).first;
    tt.t_lo = 2.0 * mu_p0 - cfg.y_max;
    const double t_hi = 2.0 * cfg.y_max;
    const std::size_t nt = static_cast<std::size_t>(std::lround((t_hi - tt.t_lo) / tt.ht)) + 1;
    tt.vals.assign(nt, 0.0);

    // Midpoint-rule transform of the remainder, with the uniform-grid phase
    // advanced by recurrence (refreshed periodically to pin down drift).
    const double dl = sd.lambda_grid[1] - sd.lambda_grid[0];
    const double lam0 = sd.lambda_grid[0];
    const double scale = dl / (2.0 * 3.141592653589793238462643);
    double max_im = 0.0, max_re = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = tt.t_lo + tt.ht * static_cast<double>(i);
        const cplx rot = std::exp(cplx(0, 1) * (dl * t));
        cplx acc = 0.0, ph = std::exp(cplx(0, 1) * (lam0 * t));
        for (std::size_t j = 0; j < n; ++j) {
            if ((j & 255u) == 0u)
                ph = std::exp(cplx(0, 1) * ((lam0 + dl * static_cast<double>(j)) * t));
            acc += R[j] * ph;
            ph *= rot;
        }
        acc *= scale;
        max_im = std::max(max_im, std::abs(acc.imag()));
        max_re = std::max(max_re, std::abs(acc.real()));
        tt.vals[i] = acc.real();
    }
    if (max_im > cfg.solve_tol * std::max(1.0, max_re))
        throw NonHermitianData("imaginary residue " + std::to_string(max_im) +
                               " in the transform");

    // Exact transforms of the fitted channels, evaluated at s = t + u_k with a
    // midpoint convention exactly on a jump.
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = tt.t_lo + tt.ht * static_cast<double>(i);
        double add = 0.0;
        for (std::size_t k = 0; k < us.size(); ++k) {
            const double s = t + us[k];
            const double as = std::abs(s);
            const double ex = std::exp(-w * as);
            const double sg = as < 1e-9 ? 0.0 : (s > 0 ? 1.0 : -1.0);
            add += coef(static_cast<Eigen::Index>(4 * k)) * 0.5 * sg * ex;
            add += coef(static_cast<Eigen::Index>(4 * k + 1)) * 0.5 * ex;
            add += coef(static_cast<Eigen::Index>(4 * k + 2)) * 0.25 * w * s * ex;
            add += coef(static_cast<Eigen::Index>(4 * k + 3)) * 0.25 * (1.0 + w * as) * ex;
        }
        tt.vals[i] += add;
    }

    // Record genuine jumps only: fitted amplitudes at rounding level would
    // otherwise poison downstream feature-avoidance logic.
    double dust = 1.0;
    for (double m : sd.norming) dust += m * m;
    dust *= 1e-13;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const double tk = -us[k];
        const double jk = coef(static_cast<Eigen::Index>(4 * k));
        if (std::abs(jk) > dust && tk >= tt.t_lo - 1e-9 && tk <= t_hi + 1e-9)
            tt.features.push_back({tk, jk});
    }

    for (std::size_t k = 0; k < sd.bound_states.size(); ++k)
        tt.bound.emplace_back(sd.bound_states[k], sd.norming[k] * sd.norming[k]);
    return tt;
}

// Continuum part of the full two-variable kernel:
//   Fs(x,y) = c+ F0s(y + μ+(x)) + c− F0s(y + μ−(x)).
inline double fs_eval(const TransitionTable& tt, const DensityProfile& p, double x, double y) {
    const double s = x < p.a ? p.alpha : 1.0;
    const auto [mup, mum] = mu_pm(p, x);
    const double cp = 0.5 * (1.0 + 1.0 / s);
    const double cm = 0.5 * (1.0 - 1.0 / s);
    double v = cp * tt.f0s(y + mup);
    if (cm != 0.0) v += cm * tt.f0s(y + mum);
    return v;
}

// Full kernel F(x,y); side = ±1 requests the one-sided limit in y where a
// channel argument sits exactly on a jump of F0s.
inline double f_eval(const TransitionTable& tt, const DensityProfile& p, double x, double y,
                     int side = 0) {
    const double s = x < p.a ? p.alpha : 1.0;
    const auto [mup, mum] = mu_pm(p, x);
    const double cp = 0.5 * (1.0 + 1.0 / s);
    const double cm = 0.5 * (1.0 - 1.0 / s);
    double v = cp * tt.f0s_sided(y + mup, side);
    if (cm != 0.0) v += cm * tt.f0s_sided(y + mum, side);
    for (const auto& [lk, m2] : tt.bound)
        v += m2 * free_jost(p, x, cplx(0, lk)).first.real() * std::exp(-lk * y);
    return v;
}

}  // namespace stepscat
