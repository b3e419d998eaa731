#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "stepscat/errors.hpp"
#include "stepscat/jost.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

struct CharacteristicValue {
    cplx lambda{}, E{}, S{};
};

// E(λ) = β-poly(λ) e'(0,λ) + α-poly(λ) e(0,λ) and the reflection coefficient
// S(λ) = [β-poly(λ) conj(e'(0,λ)) + α-poly(λ) conj(e(0,λ))] / E(λ).
inline CharacteristicValue characteristic(const BoundaryCoefficients& c,
                                          const JostSample& j, double root_tol) {
    const cplx pa = alpha_poly(c, j.lambda), pb = beta_poly(c, j.lambda);
    const cplx E = pb * j.ep0 + pa * j.e0;
    if (std::abs(j.lambda.imag()) < 1e-14) {
        const double scale = std::abs(pb * j.ep0) + std::abs(pa * j.e0);
        if (std::abs(E) <= root_tol * std::max(1.0, scale))
            throw CharacteristicVanishes("at real lambda = " + std::to_string(j.lambda.real()));
    }
    const cplx S = (pb * std::conj(j.ep0) + pa * std::conj(j.e0)) / E;
    return {j.lambda, E, S};
}

// Zero-potential reflection coefficient in closed form.  The branch is decided
// by whether the λ² coefficient of the derivative term is present.
inline cplx s_zero(const DensityProfile& p, const BoundaryCoefficients& c, cplx lambda) {
    const double tau = tau_of(p);
    const cplx z = std::exp(cplx(0, -2) * lambda * p.alpha * p.a);
    const cplx ph = std::exp(cplx(0, -2) * lambda * p.a);
    if (c.beta2 == 0.0) return ph * (1.0 + tau * z) / (z + tau);
    return -ph * (1.0 - tau * z) / (z - tau);
}

namespace detail {

inline CharacteristicValue characteristic_at(const DensityProfile& p, const PotentialSpec& q,
                                             const BoundaryCoefficients& c, cplx lambda,
                                             const NumericsConfig& cfg) {
    return characteristic(c, jost_solution(p, q, lambda, cfg), cfg.root_tol);
}

// Zeros of the boundary polynomial alpha0 + i alpha1 λ + alpha2 λ² lying in
// the open rectangle (−L, L) × (lo, hi) of the upper half-plane.
inline int alpha_poly_upper_zeros(const BoundaryCoefficients& c, double L, double lo,
                                  double hi) {
    std::vector<cplx> roots;
    if (c.alpha2 != 0.0) {
        const cplx disc = std::sqrt(cplx(-c.alpha1 * c.alpha1 - 4.0 * c.alpha0 * c.alpha2, 0.0));
        roots.push_back((cplx(0, -c.alpha1) + disc) / (2.0 * c.alpha2));
        roots.push_back((cplx(0, -c.alpha1) - disc) / (2.0 * c.alpha2));
    } else if (c.alpha1 != 0.0) {
        roots.push_back(cplx(0, c.alpha0 / c.alpha1));
    }
    int n = 0;
    for (const cplx& r : roots)
        if (r.imag() > lo && r.imag() < hi && std::abs(r.real()) < L) ++n;
    return n;
}

// E restricted to the positive imaginary axis, where it is real-valued.
inline double char_on_imag_axis(const DensityProfile& p, const PotentialSpec& q,
                                const BoundaryCoefficients& c, double mu,
                                const NumericsConfig& cfg) {
    const JostSample j = jost_solution(p, q, cplx(0, mu), cfg);
    const double pa = c.alpha0 - c.alpha1 * mu - c.alpha2 * mu * mu;
    const double pb = c.beta0 - c.beta1 * mu - c.beta2 * mu * mu;
    return pb * j.ep0.real() + pa * j.e0.real();
}

}  // namespace detail

// Eigen-parameters λ_k = iμ_k located by a sign scan plus bisection on
// (0, mu_max].  When every β vanishes the characteristic factors through the
// boundary polynomial, so the scan uses e(0,iμ) itself; this keeps roots of
// the polynomial factor, which carry no eigenfunction, out of the list.
inline std::vector<double> find_bound_states(const DensityProfile& p, const PotentialSpec& q,
                                             const BoundaryCoefficients& c,
                                             const NumericsConfig& cfg) {
    const double mu_max = cfg.mu_max > 0 ? cfg.mu_max : default_mu_max(p, q);
    const bool e_only = beta_all_zero(c);
    auto f = [&](double mu) -> double {
        if (e_only) return jost_solution(p, q, cplx(0, mu), cfg).e0.real();
        return detail::char_on_imag_axis(p, q, c, mu, cfg);
    };
    const double step = std::max(cfg.root_tol * 100.0, p.a / 50.0);
    std::vector<double> roots;
    double lo = std::max(cfg.root_tol, 1e-12);
    double flo = f(lo);
    bool skip_left_zero = false;
    while (lo < mu_max - 1e-15) {
        const double hi = std::min(lo + step, mu_max);
        const double fhi = f(hi);
        const bool hit = (flo == 0.0 && !skip_left_zero) || flo * fhi < 0.0 || fhi == 0.0;
        skip_left_zero = false;
        if (hit) {
            double a_ = lo, b_ = hi, fa = flo;
            if (fa == 0.0) {
                roots.push_back(a_);
            } else if (fhi == 0.0) {
                roots.push_back(b_);
                skip_left_zero = true;
            } else {
                for (int it = 0; it < 200 && b_ - a_ > cfg.root_tol; ++it) {
                    const double mid = 0.5 * (a_ + b_);
                    const double fm = f(mid);
                    if (fm == 0.0) { a_ = b_ = mid; break; }
                    if (fa * fm < 0.0) { b_ = mid; } else { a_ = mid; fa = fm; }
                }
                roots.push_back(0.5 * (a_ + b_));
            }
            if (roots.back() > mu_max - step)
                throw SearchCeilingHit("root near mu_max = " + std::to_string(mu_max) +
                                       "; raise the search ceiling");
        }
        lo = hi;
        flo = fhi;
    }
    return roots;
}

// Counts zeros of E inside the rectangle [−lambda_max, lambda_max] ×
// [root_tol, mu_max] by accumulating the boundary phase increment.
inline int verify_zero_count(const DensityProfile& p, const PotentialSpec& q,
                             const BoundaryCoefficients& c, const NumericsConfig& cfg) {
    const double mu_max = cfg.mu_max > 0 ? cfg.mu_max : default_mu_max(p, q);
    const double L = cfg.lambda_max;
    const double delta = std::max(cfg.root_tol, 1e-10);
    auto Ev = [&](cplx z) -> cplx {
        return detail::characteristic_at(p, q, c, z, cfg).E;
    };
    double total = 0.0, min_abs = 1e300, max_abs = 0.0;
    std::function<void(cplx, cplx, cplx, cplx, int)> walk =
        [&](cplx za, cplx Ea, cplx zb, cplx Eb, int depth) {
            const double da = std::arg(Eb / Ea);
            if (std::abs(da) <= 0.8 || depth >= 40) {
                total += da;
                return;
            }
            const cplx zm = 0.5 * (za + zb);
            const cplx Em = Ev(zm);
            min_abs = std::min(min_abs, std::abs(Em));
            max_abs = std::max(max_abs, std::abs(Em));
            walk(za, Ea, zm, Em, depth + 1);
            walk(zm, Em, zb, Eb, depth + 1);
        };
    const cplx corners[4] = {{-L, delta}, {L, delta}, {L, mu_max}, {-L, mu_max}};
    for (int side = 0; side < 4; ++side) {
        const cplx za = corners[side], zb = corners[(side + 1) % 4];
        const int n0 = side % 2 == 0
                           ? std::max(32, static_cast<int>(4.0 * L * p.a * (1.0 + p.alpha) / 3.141592653589793))
                           : 32;
        cplx zprev = za, Eprev = Ev(za);
        min_abs = std::min(min_abs, std::abs(Eprev));
        max_abs = std::max(max_abs, std::abs(Eprev));
        for (int k = 1; k <= n0; ++k) {
            const cplx zk = za + (zb - za) * (static_cast<double>(k) / n0);
            const cplx Ek = Ev(zk);
            min_abs = std::min(min_abs, std::abs(Ek));
            max_abs = std::max(max_abs, std::abs(Ek));
            walk(zprev, Eprev, zk, Ek, 0);
            zprev = zk;
            Eprev = Ek;
        }
    }
    if (!(min_abs > cfg.root_tol * std::max(1.0, max_abs)))
        throw ContourThroughZero("min |E| on the contour is " + std::to_string(min_abs));
    const double w = total / (2.0 * 3.141592653589793238462643);
    const double wr = std::nearbyint(w);
    if (std::abs(w - wr) > 0.25)
        throw ContourThroughZero("phase increment " + std::to_string(w) + " is not integral");
    int count = static_cast<int>(wr);
    if (beta_all_zero(c)) {
        // The characteristic factors through the boundary polynomial, whose
        // upper-half-plane zeros carry no eigenfunction; discount them.
        count -= detail::alpha_poly_upper_zeros(c, L, delta, mu_max);
    }
    return count;
}

// Norming constants m_k from the residue of S at iμ_k:
//   m_k² = −N(iμ_k) / dE/dμ(iμ_k),
// with N = 2μ β-poly(iμ)/e(0,iμ), or equivalently N = −2μ α-poly(iμ)/e'(0,iμ);
// the two agree at a characteristic root and the better-conditioned form wins.
inline std::vector<double> norming_constants(const DensityProfile& p, const PotentialSpec& q,
                                             const BoundaryCoefficients& c,
                                             const std::vector<double>& mus,
                                             const NumericsConfig& cfg) {
    std::vector<double> out;
    out.reserve(mus.size());
    for (double mu : mus) {
        const double pa = c.alpha0 - c.alpha1 * mu - c.alpha2 * mu * mu;
        const double pb = c.beta0 - c.beta1 * mu - c.beta2 * mu * mu;
        const double pb_scale = std::abs(c.beta0) + std::abs(c.beta1) * mu +
                                std::abs(c.beta2) * mu * mu;
        if (!beta_all_zero(c) && std::abs(pb) <= 1e-12 * (1.0 + pb_scale))
            throw BoundaryPolynomialVanishes("beta polynomial vanishes at lambda_k = i" +
                                             std::to_string(mu));
        const JostSample j = jost_solution(p, q, cplx(0, mu), cfg);
        const double e0 = j.e0.real(), ep0 = j.ep0.real();
        const double N = std::abs(pb * e0) >= std::abs(pa * ep0)
                             ? 2.0 * mu * pb / e0
                             : -2.0 * mu * pa / ep0;
        const double hstep = 1e-6 * std::max(1.0, mu);
        const double Em2 = detail::char_on_imag_axis(p, q, c, mu - 2 * hstep, cfg);
        const double Em1 = detail::char_on_imag_axis(p, q, c, mu - hstep, cfg);
        const double Ep1 = detail::char_on_imag_axis(p, q, c, mu + hstep, cfg);
        const double Ep2 = detail::char_on_imag_axis(p, q, c, mu + 2 * hstep, cfg);
        const double Edot = (-Ep2 + 8.0 * Ep1 - 8.0 * Em1 + Em2) / (12.0 * hstep);
        const double m2 = -N / Edot;
        if (!std::isfinite(m2) || m2 <= 0.0)
            throw NonpositiveNorm("m^2 = " + std::to_string(m2) + " at lambda_k = i" +
                                  std::to_string(mu));
        out.push_back(std::sqrt(m2));
    }
    return out;
}

// Full forward map: reflection coefficient on the symmetric λ grid plus the
// discrete data.  Each grid node is computed by an independent solve, so the
// conjugation symmetry of the result is a genuine check, not a construction.
inline ScatteringData forward_scattering(const DensityProfile& p, const PotentialSpec& q,
                                         const BoundaryCoefficients& c,
                                         const NumericsConfig& cfg) {
    validate_profile(p, cfg.degenerate_ok);
    validate_boundary(c);
    validate_potential(q);
    ScatteringData sd;
    sd.lambda_grid = lambda_grid(cfg);
    sd.s_values.reserve(sd.lambda_grid.size());
    for (double lam : sd.lambda_grid)
        sd.s_values.push_back(detail::characteristic_at(p, q, c, lam, cfg).S);
    sd.bound_states = find_bound_states(p, q, c, cfg);
    sd.norming = norming_constants(p, q, c, sd.bound_states, cfg);
    check_scattering_symmetry(sd, cfg.solve_tol);
    return sd;
}

}  // namespace stepscat
