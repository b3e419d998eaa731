#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "stepscat/io.hpp"
#include "stepscat/jost.hpp"
#include "stepscat/scattering.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace verify_detail

// Largest magnitude the assembled kernel data F0 takes over its table.
inline double kernel_data_magnitude(const TransitionTable& tt) {
    double m = 0.0;
    for (std::size_t i = 0; i < tt.vals.size(); ++i)
        m = std::max(m, std::abs(tt.f0(tt.t_lo + tt.ht * static_cast<double>(i))));
    return m;
}

// Structural invariants of the forward map, checked by direct computation.
inline std::vector<CheckResult> verify_problem(const Problem& prob) {
    std::vector<CheckResult> out;
    const DensityProfile& p = prob.profile;
    const PotentialSpec& q = prob.potential;
    const BoundaryCoefficients& c = prob.boundary;
    NumericsConfig cfg = snapped(p, prob.numerics);
    if (cfg.y_max <= 0.0) cfg.y_max = cfg.x_max + 10.0 * p.a;  // unused here, keep it sane

    // 1. The bilinear concomitant of a solution and its conjugate is constant.
    {
        double worst = 0.0;
        bool ok = true;
        std::string err;
        try {
            for (double lam : {0.5, 1.0, 2.0, 5.0, 10.0}) {
                std::vector<double> xs;
                const int nn = 21;
                for (int i = 0; i < nn; ++i)
                    xs.push_back(cfg.x_max * static_cast<double>(i) / (nn - 1));
                const JostSample j = jost_solution(p, q, cplx(lam, 0.0), cfg, &xs);
                const std::vector<cplx> w = wronskian(j);
                const cplx ref = w.back();
                for (const cplx& wv : w)
                    worst = std::max(worst, std::abs(wv - ref) / std::max(1.0, std::abs(ref)));
            }
            ok = worst < 1e-6;
        } catch (const std::exception& e) {
            ok = false;
            err = e.what();
        }
        out.push_back({"wronskian_constancy", ok,
                       err.empty() ? "max relative drift " + verify_detail::num(worst) : err});
    }

    // 2. Real-axis conjugation symmetry of E and S.
    {
        double worst = 0.0;
        bool ok = true;
        std::string err;
        try {
            for (double lam : {0.7, 1.3, 2.6}) {
                const CharacteristicValue cp = detail::characteristic_at(p, q, c, cplx(lam, 0), cfg);
                const CharacteristicValue cm =
                    detail::characteristic_at(p, q, c, cplx(-lam, 0), cfg);
                worst = std::max(worst, std::abs(std::conj(cm.E) - cp.E) /
                                            std::max(1.0, std::abs(cp.E)));
                worst = std::max(worst, std::abs(std::conj(cm.S) - cp.S) /
                                            std::max(1.0, std::abs(cp.S)));
            }
            ok = worst < 1e-8;
        } catch (const std::exception& e) {
            ok = false;
            err = e.what();
        }
        out.push_back({"conjugation_symmetry", ok,
                       err.empty() ? "max relative defect " + verify_detail::num(worst) : err});
    }

    // 3. The characteristic function stays away from zero on the real grid.
    {
        double min_rel = 1e300;
        bool ok = true;
        std::string err;
        try {
            const int nn = 64;
            for (int k = 0; k < nn; ++k) {
                const double lam = (k + 0.5) * cfg.lambda_max / nn;
                const JostSample j = jost_solution(p, q, cplx(lam, 0.0), cfg);
                const cplx pa = alpha_poly(c, j.lambda), pb = beta_poly(c, j.lambda);
                const double scale =
                    std::max(1.0, std::abs(pb * j.ep0) + std::abs(pa * j.e0));
                min_rel = std::min(min_rel, std::abs(pb * j.ep0 + pa * j.e0) / scale);
            }
            ok = min_rel > 1e-8;
        } catch (const std::exception& e) {
            ok = false;
            err = e.what();
        }
        out.push_back({"characteristic_nonvanishing", ok,
                       err.empty() ? "min scaled magnitude " + verify_detail::num(min_rel) : err});
    }

    // 4. Scan-located eigen-parameters agree with the contour count.
    std::vector<double> roots;
    {
        bool ok = true;
        std::string msg;
        try {
            roots = find_bound_states(p, q, c, cfg);
            const int wind = verify_zero_count(p, q, c, cfg);
            ok = wind == static_cast<int>(roots.size());
            msg = "scan " + std::to_string(roots.size()) + ", contour " + std::to_string(wind);
        } catch (const std::exception& e) {
            ok = false;
            msg = e.what();
        }
        out.push_back({"bound_state_count", ok, msg});
    }

    // 5. Every norming constant is positive and finite.
    {
        bool ok = true;
        std::string msg = "none";
        try {
            const std::vector<double> m = norming_constants(p, q, c, roots, cfg);
            for (double mv : m) ok = ok && std::isfinite(mv) && mv > 0.0;
            if (!m.empty()) {
                msg.clear();
                for (std::size_t i = 0; i < m.size(); ++i)
                    msg += (i ? ", " : "") + verify_detail::num(m[i] * m[i]);
            }
        } catch (const std::exception& e) {
            ok = false;
            msg = e.what();
        }
        out.push_back({"norming_positive", ok, msg});
    }

    // 6. With no potential and a boundary condition on the value alone, the
    // reflection coefficient reduces to its closed form exactly.
    if (q.is_zero() && beta_all_zero(c)) {
        double worst = 0.0;
        bool ok = true;
        std::string err;
        try {
            for (double lam : {0.45, 1.1, 3.3, 7.9}) {
                const CharacteristicValue cv =
                    detail::characteristic_at(p, q, c, cplx(lam, 0), cfg);
                worst = std::max(worst, std::abs(cv.S - s_zero(p, c, cplx(lam, 0))));
            }
            ok = worst < 1e-6;
        } catch (const std::exception& e) {
            ok = false;
            err = e.what();
        }
        out.push_back({"free_reflection_closed_form", ok,
                       err.empty() ? "max deviation " + verify_detail::num(worst) : err});
    }

    // 7. With no potential the assembled kernel input F(x,y) of the main
    // equation vanishes: the continuous channels offset the discrete sum.
    if (q.is_zero()) {
        bool ok = true;
        std::string msg;
        try {
            const ScatteringData sd = forward_scattering(p, q, c, cfg);
            const NumericsConfig rcfg = resolved(p, cfg, sd.bound_states);
            const TransitionTable tt = f0s_transform(sd, p, c, rcfg);
            const double fmax = kernel_data_magnitude(tt);
            double worst = 0.0;
            const double xs[6] = {0.0,      0.25 * p.a, 0.6 * p.a,
                                  1.1 * p.a, 1.6 * p.a,  2.2 * p.a};
            for (double x : xs) {
                if (x > rcfg.x_max) continue;
                const auto [mup, mum] = mu_pm(p, x);
                const int ny = 25;
                for (int k = 1; k <= ny; ++k) {
                    const double y =
                        mup + (rcfg.y_max - mup) * static_cast<double>(k) / (ny + 1);
                    bool near_feature = false;
                    for (const auto& ft : tt.features)
                        near_feature = near_feature || std::abs(y + mup - ft.t) < 2.0 * tt.ht ||
                                       std::abs(y + mum - ft.t) < 2.0 * tt.ht;
                    if (near_feature) continue;
                    worst = std::max(worst, std::abs(f_eval(tt, p, x, y)));
                }
            }
            ok = worst <= std::max(1e-8, 1e-5 * fmax);
            msg = "max |F| " + verify_detail::num(worst) + " against data magnitude " +
                  verify_detail::num(fmax);
        } catch (const std::exception& e) {
            ok = false;
            msg = e.what();
        }
        out.push_back({"zero_potential_cancellation", ok, msg});
    }

    return out;
}

// Admissibility of an externally supplied scattering data set against the
// geometry and boundary condition it claims to describe.
inline std::vector<CheckResult> verify_scattering_data(const Problem& prob,
                                                       const ScatteringData& sd) {
    std::vector<CheckResult> out;
    const DensityProfile& p = prob.profile;
    const BoundaryCoefficients& c = prob.boundary;

    {
        bool ok = true;
        std::string msg = "grid and values consistent";
        try {
            check_scattering_symmetry(sd, std::max(prob.numerics.solve_tol, 1e-8));
        } catch (const std::exception& e) {
            ok = false;
            msg = e.what();
        }
        out.push_back({"data_symmetry", ok, msg});
    }

    {
        bool ok = !sd.lambda_grid.empty();
        std::size_t pos_count = 0;
        for (double lam : sd.lambda_grid)
            if (lam > 0) ++pos_count;
        ok = ok && pos_count * 2 == sd.lambda_grid.size();
        out.push_back({"data_grid_balanced", ok,
                       std::to_string(sd.lambda_grid.size()) + " nodes, " +
                           std::to_string(pos_count) + " positive"});
    }

    {
        // The deviation from the layered reference must fade toward the band
        // edge, otherwise the quadrature window is cutting off live signal.
        double inner = 0.0, outer = 0.0;
        std::size_t ni = 0, no = 0;
        double lmax = 0.0;
        for (double lam : sd.lambda_grid) lmax = std::max(lmax, std::abs(lam));
        for (std::size_t i = 0; i < sd.lambda_grid.size(); ++i) {
            const double al = std::abs(sd.lambda_grid[i]);
            const double dev = std::abs(sd.s_values[i] - s_zero(p, c, sd.lambda_grid[i]));
            if (al < 0.25 * lmax) {
                inner += dev;
                ++ni;
            } else if (al > 0.75 * lmax) {
                outer += dev;
                ++no;
            }
        }
        if (ni) inner /= static_cast<double>(ni);
        if (no) outer /= static_cast<double>(no);
        const bool trivial = inner <= 1e-10;
        const bool ok = trivial || outer <= std::max(inner / 1.5, 1e-10);
        out.push_back({"data_band_edge_decay", ok,
                       "inner mean " + verify_detail::num(inner) + ", edge mean " +
                           verify_detail::num(outer)});
    }

    return out;
}

}  // namespace stepscat
