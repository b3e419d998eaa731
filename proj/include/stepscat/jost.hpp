#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "stepscat/errors.hpp"
#include "stepscat/ivp.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

// ---------------------------------------------------------------------------
// Closed-form Jost solution of the zero-potential problem:
//   e0(x,λ) = c+ e^{iλμ+(x)} + c- e^{iλμ-(x)},  c± = (1 ± 1/sqrt(rho))/2.
// ---------------------------------------------------------------------------

inline std::pair<cplx, cplx> free_jost(const DensityProfile& p, double x, cplx lambda) {
    const double s = x < p.a ? p.alpha : 1.0;
    const auto [mup, mum] = mu_pm(p, x);
    const double cp = 0.5 * (1.0 + 1.0 / s);
    const double cm = 0.5 * (1.0 - 1.0 / s);
    const cplx il = cplx(0, 1) * lambda;
    const cplx ep_ = std::exp(il * mup), em_ = std::exp(il * mum);
    return {cp * ep_ + cm * em_, il * s * (cp * ep_ - cm * em_)};
}

// ---------------------------------------------------------------------------
// Jost solution with potential: e(x,λ) ~ e^{iλx} as x → ∞.
// ---------------------------------------------------------------------------

struct JostSample {
    cplx lambda{};
    cplx e0{}, ep0{};               // e(0,λ), e'(0,λ)
    std::vector<double> trace_x;    // requested abscissae (ascending)
    std::vector<cplx> trace_e, trace_ep;
};

struct RegularSample {
    cplx lambda{};
    std::vector<double> trace_x;
    std::vector<cplx> trace_w, trace_wp;
};

namespace detail {

inline double ode_rtol(const NumericsConfig& cfg) {
    return std::max(1e-13, std::min(1e-10, cfg.quad_tol * 1e-2));
}

// Breakpoints in (lo, hi): the density step, the potential grid nodes inside
// the support window, and any requested trace abscissae.
inline std::vector<double> breakpoints(const DensityProfile& p, const PotentialSpec& q,
                                       double lo, double hi,
                                       const std::vector<double>* extra) {
    std::vector<double> b{lo, hi};
    auto push = [&](double v) {
        if (v > lo + 1e-13 && v < hi - 1e-13) b.push_back(v);
    };
    push(p.a);
    const auto [slo, shi] = q.support_interval();
    if (shi > slo)
        for (double g : q.grid)
            if (g >= slo - 1e-13 && g <= shi + 1e-13) push(g);
    if (extra)
        for (double v : *extra) push(v);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-13; }),
            b.end());
    return b;
}

// Propagates across one smooth segment [xl, xr] in the given direction.
inline OdeState propagate_segment(OdeState s, double xfrom, double xto,
                                  const DensityProfile& p, const PotentialSpec& q,
                                  cplx lambda, double rtol) {
    const double mid = 0.5 * (xfrom + xto);
    const double rho = rho_at(p, mid);
    const cplx k2 = lambda * lambda * rho;
    const auto [slo, shi] = q.support_interval();
    const bool in_support = shi > slo && mid > slo - 1e-13 && mid < shi + 1e-13;
    if (!in_support) return free_transfer(s, k2, xto - xfrom);
    return dp45_integrate(
        s, xfrom, xto, [&](double x) { return cplx(q(x), 0.0) - k2; }, rtol, rtol * 1e-2);
}

}  // namespace detail

// Integrates backward from x_eff = max(a, X_q), where e = e^{iλx} holds
// exactly, down to 0.  Internally the solution is rescaled by e^{-iλ x_eff} so
// the initial value is exactly 1 for every λ, including λ = iμ.
inline JostSample jost_solution(const DensityProfile& p, const PotentialSpec& q,
                                cplx lambda, const NumericsConfig& cfg,
                                const std::vector<double>* trace_xs = nullptr) {
    const double x_eff = std::max(p.a, q.support_bound);
    if (!(cfg.x_max > x_eff))
        throw TruncationTooSmall("x_max = " + std::to_string(cfg.x_max) +
                                 " must exceed max(a, X_q) = " + std::to_string(x_eff));
    JostSample out;
    out.lambda = lambda;
    if (trace_xs) {
        out.trace_x = *trace_xs;
        std::sort(out.trace_x.begin(), out.trace_x.end());
        out.trace_e.assign(out.trace_x.size(), cplx{});
        out.trace_ep.assign(out.trace_x.size(), cplx{});
    }
    const cplx phase = std::exp(cplx(0, 1) * lambda * x_eff);
    const double rtol = detail::ode_rtol(cfg);

    auto record = [&](double x, const OdeState& s) {
        if (!trace_xs) return;
        for (std::size_t i = 0; i < out.trace_x.size(); ++i)
            if (std::abs(out.trace_x[i] - x) < 1e-12) {
                out.trace_e[i] = phase * s.y;
                out.trace_ep[i] = phase * s.yp;
            }
    };

    const auto bp = detail::breakpoints(p, q, 0.0, x_eff, trace_xs ? &out.trace_x : nullptr);
    OdeState s{1.0, cplx(0, 1) * lambda};
    record(x_eff, s);
    for (std::size_t i = bp.size() - 1; i > 0; --i) {
        s = detail::propagate_segment(s, bp[i], bp[i - 1], p, q, lambda, rtol);
        record(bp[i - 1], s);
    }
    out.e0 = phase * s.y;
    out.ep0 = phase * s.yp;
    if (trace_xs)
        for (std::size_t i = 0; i < out.trace_x.size(); ++i)
            if (out.trace_x[i] > x_eff - 1e-12) {
                const cplx ex = std::exp(cplx(0, 1) * lambda * out.trace_x[i]);
                out.trace_e[i] = ex;
                out.trace_ep[i] = cplx(0, 1) * lambda * ex;
            }
    return out;
}

// Solution fixed by the boundary data w(0) = β-poly(λ), w'(0) = −α-poly(λ),
// integrated forward from 0 across the requested trace range.
inline RegularSample regular_solution(const DensityProfile& p, const PotentialSpec& q,
                                      const BoundaryCoefficients& c, cplx lambda,
                                      const NumericsConfig& cfg,
                                      const std::vector<double>& trace_xs) {
    RegularSample out;
    out.lambda = lambda;
    out.trace_x = trace_xs;
    std::sort(out.trace_x.begin(), out.trace_x.end());
    out.trace_w.assign(out.trace_x.size(), cplx{});
    out.trace_wp.assign(out.trace_x.size(), cplx{});
    const double hi = std::max({p.a, q.support_bound,
                                out.trace_x.empty() ? p.a : out.trace_x.back()});
    const double rtol = detail::ode_rtol(cfg);
    auto record = [&](double x, const OdeState& s) {
        for (std::size_t i = 0; i < out.trace_x.size(); ++i)
            if (std::abs(out.trace_x[i] - x) < 1e-12) {
                out.trace_w[i] = s.y;
                out.trace_wp[i] = s.yp;
            }
    };
    const auto bp = detail::breakpoints(p, q, 0.0, hi, &out.trace_x);
    OdeState s{beta_poly(c, lambda), -alpha_poly(c, lambda)};
    record(0.0, s);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        s = detail::propagate_segment(s, bp[i], bp[i + 1], p, q, lambda, rtol);
        record(bp[i + 1], s);
    }
    return out;
}

// Pointwise e'(x,λ) conj(e(x,λ)) − e(x,λ) conj(e'(x,λ)); equals 2iλ for real λ.
inline std::vector<cplx> wronskian(const JostSample& j) {
    std::vector<cplx> w(j.trace_x.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = j.trace_ep[i] * std::conj(j.trace_e[i]) -
               j.trace_e[i] * std::conj(j.trace_ep[i]);
    return w;
}

}  // namespace stepscat
