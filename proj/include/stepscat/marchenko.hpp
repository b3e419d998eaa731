#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "stepscat/errors.hpp"
#include "stepscat/scattering.hpp"
#include "stepscat/transition.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

struct KernelSlice {
    double x{};
    std::vector<double> y;  // ascending; duplicate entry at μ−(x) when the
                            // reflected channel is active (x < a, alpha != 1)
    std::vector<double> K;
    double K_diag{};        // K(x, μ+(x))
    double jump{};          // K(x, μ−(x)+0) − K(x, μ−(x)−0), 0 on single grids
    double cond{};          // 1-norm condition estimate of the solved system
};

struct KernelTable {
    std::vector<KernelSlice> slices;
    bool trivial_data{false};  // continuum table identically zero
};

namespace detail {

inline double matrix_norm1(const Eigen::MatrixXd& A) {
    return A.cwiseAbs().colwise().sum().maxCoeff();
}

// Hager's one-norm estimator for the inverse, given solvers for A and Aᵀ.
template <class Solve, class SolveT>
double hager_inv_norm1(Eigen::Index n, Solve&& solve, SolveT&& solveT) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = solve(x);
        est = y.template lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (Eigen::Index i = 0; i < n; ++i) xi(i) = y(i) >= 0 ? 1.0 : -1.0;
        const Eigen::VectorXd z = solveT(xi);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x) + 1e-14 * zmax) break;
        x.setZero();
        x(j) = 1.0;
    }
    return est;
}

// Solves Aᵀ z = v from a partial-pivot factorization A = P⁻¹ L U.
inline Eigen::VectorXd lu_transpose_solve(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                                          const Eigen::VectorXd& v) {
    const Eigen::MatrixXd& M = lu.matrixLU();
    Eigen::VectorXd w = M.transpose().triangularView<Eigen::Lower>().solve(v);
    Eigen::VectorXd s = M.transpose().triangularView<Eigen::UnitUpper>().solve(w);
    return lu.permutationP().transpose() * s;
}

struct DenseSystem {
    std::vector<double> y;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::Index idx_L{-1}, idx_R{-1};
};

// Full trapezoid discretization of the main equation at one x, with midpoint
// kernel values replaced by one-sided limits wherever a quadrature node or
// grid endpoint sits exactly on a jump of F0s.
inline DenseSystem assemble_dense(double x, const TransitionTable& tt,
                                  const DensityProfile& p, const NumericsConfig& cfg) {
    DenseSystem sys;
    const double T = cfg.y_max, h = cfg.h_x;
    const auto [mp, mm] = mu_pm(p, x);
    const bool split = x < p.a - 1e-12 && p.alpha != 1.0;
    const double tau = tau_of(p);

    if (!split) {
        const Eigen::Index M = static_cast<Eigen::Index>(std::ceil((T - mp) / h - 1e-9));
        const Eigen::Index N = M + 1;
        sys.y.resize(static_cast<std::size_t>(N));
        for (Eigen::Index i = 0; i < N; ++i)
            sys.y[static_cast<std::size_t>(i)] = mp + h * static_cast<double>(i);
        std::vector<double> g(static_cast<std::size_t>(2 * M + 1));
        for (std::size_t s = 0; s < g.size(); ++s)
            g[s] = tt.f0(2.0 * mp + h * static_cast<double>(s));
        sys.A.resize(N, N);
        for (Eigen::Index i = 0; i < N; ++i)
            for (Eigen::Index j = 0; j < N; ++j) {
                const double w = (j == 0 || j == N - 1) ? h / 2 : h;
                sys.A(i, j) = (i == j ? 1.0 : 0.0) + w * g[static_cast<std::size_t>(i + j)];
            }
        sys.A(0, 0) += (h / 2) * tt.jump_at(2.0 * sys.y[0]) / 2.0;
        sys.b.resize(N);
        for (Eigen::Index i = 0; i < N; ++i)
            sys.b(i) = -f_eval(tt, p, x, sys.y[static_cast<std::size_t>(i)], i == 0 ? +1 : 0);
        return sys;
    }

    const Eigen::Index n_half =
        std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::llround((mm - mp) / (2 * h))));
    const double hh = (mm - mp) / (2.0 * static_cast<double>(n_half));
    const Eigen::Index n1 = 2 * n_half;
    const Eigen::Index M = n1 + static_cast<Eigen::Index>(std::ceil((T - mm) / hh - 1e-9));
    const Eigen::Index N = M + 2;
    sys.idx_L = n1;
    sys.idx_R = n1 + 1;
    auto sig = [&](Eigen::Index i) { return i <= n1 ? i : i - 1; };
    sys.y.resize(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i)
        sys.y[static_cast<std::size_t>(i)] = mp + hh * static_cast<double>(sig(i));
    std::vector<double> g(static_cast<std::size_t>(2 * M + 1));
    for (std::size_t s = 0; s < g.size(); ++s)
        g[s] = tt.f0(2.0 * mp + hh * static_cast<double>(s));
    std::vector<double> w(static_cast<std::size_t>(N), hh);
    w[0] = w[static_cast<std::size_t>(N - 1)] = hh / 2;
    w[static_cast<std::size_t>(sys.idx_L)] = w[static_cast<std::size_t>(sys.idx_R)] = hh / 2;
    sys.A.resize(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            sys.A(i, j) = (i == j ? 1.0 : 0.0) +
                          w[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(sig(i) + sig(j))];

    // One-sided kernel limits at the enumerable jump crossings: the split
    // node at μ− meets the t = 2a jump from row μ+, the left endpoint column
    // takes its inside limit there, and the corner may sit on a jump itself.
    const double J2a = tt.jump_at(sys.y[0] + sys.y[static_cast<std::size_t>(sys.idx_L)]);
    sys.A(0, sys.idx_L) -= w[static_cast<std::size_t>(sys.idx_L)] * J2a / 2.0;
    sys.A(0, sys.idx_R) += w[static_cast<std::size_t>(sys.idx_R)] * J2a / 2.0;
    sys.A(sys.idx_L, 0) += w[0] * J2a / 2.0;
    sys.A(sys.idx_R, 0) += w[0] * J2a / 2.0;
    sys.A(0, 0) += w[0] * tt.jump_at(2.0 * sys.y[0]) / 2.0;

    // Reflected-channel coupling −τ K(x, 2a − y) for y ≤ μ−; the left limit
    // row at μ− keeps it, the right limit row drops it.
    for (Eigen::Index i = 0; i < N; ++i) {
        const double yi = sys.y[static_cast<std::size_t>(i)];
        if (yi < mm - 1e-12) {
            const Eigen::Index jr = n1 - sig(i);
            sys.A(i, jr == n1 ? sys.idx_L : jr) -= tau;
        } else if (i == sys.idx_L) {
            sys.A(i, 0) -= tau;
        }
    }

    sys.b.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        int side = 0;
        if (i == 0 || i == sys.idx_R) side = +1;
        if (i == sys.idx_L) side = -1;
        sys.b(i) = -f_eval(tt, p, x, sys.y[static_cast<std::size_t>(i)], side);
    }
    return sys;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shared descending-lattice factorization for the single-grid systems: every
// x >= a system (and every x in the degenerate alpha = 1 case) is a leading
// principal block of one matrix up to a rank-one end-weight fix, so one
// unpivoted factorization serves the whole family.
// ---------------------------------------------------------------------------

struct MasterLattice {
    double y_top{}, y_bottom{}, h{};
    Eigen::Index n{0};
    Eigen::MatrixXd LU;          // Doolittle factors packed in place
    std::vector<double> fvec;    // f0(2 y_top − s h)
    std::vector<double> fabs_p;  // prefix sums of |fvec|
    bool ok{false};
};

inline MasterLattice build_master(const TransitionTable& tt, const DensityProfile& p,
                                  const NumericsConfig& cfg_in) {
    const NumericsConfig cfg = resolved(p, cfg_in, tt.bound);
    MasterLattice m;
    m.h = cfg.h_x;
    m.y_bottom = p.alpha == 1.0 ? 0.0 : p.a;
    m.y_top = cfg.y_max;
    m.n = static_cast<Eigen::Index>(std::llround((m.y_top - m.y_bottom) / m.h)) + 1;
    if (m.n < 3) return m;
    const std::size_t ns = static_cast<std::size_t>(2 * m.n - 1);
    m.fvec.resize(ns);
    for (std::size_t s = 0; s < ns; ++s)
        m.fvec[s] = tt.f0(2.0 * m.y_top - m.h * static_cast<double>(s));
    m.fabs_p.assign(ns + 1, 0.0);
    for (std::size_t s = 0; s < ns; ++s) m.fabs_p[s + 1] = m.fabs_p[s] + std::abs(m.fvec[s]);
    m.LU.resize(m.n, m.n);
    for (Eigen::Index i = 0; i < m.n; ++i)
        for (Eigen::Index j = 0; j < m.n; ++j) {
            const double w = j == 0 ? m.h / 2 : m.h;
            m.LU(i, j) = (i == j ? 1.0 : 0.0) + w * m.fvec[static_cast<std::size_t>(i + j)];
        }
    for (Eigen::Index k = 0; k < m.n; ++k) {
        const double piv = m.LU(k, k);
        if (std::abs(piv) < 1e-10) return m;  // leave not-ok; callers fall back
        if (k + 1 == m.n) break;
        const Eigen::Index r = m.n - k - 1;
        m.LU.col(k).segment(k + 1, r) /= piv;
        m.LU.bottomRightCorner(r, r).noalias() -=
            m.LU.col(k).segment(k + 1, r) * m.LU.row(k).segment(k + 1, r);
    }
    m.ok = true;
    return m;
}

namespace detail {

inline void master_solve(const MasterLattice& ml, Eigen::Index m, Eigen::VectorXd& v) {
    auto B = ml.LU.topLeftCorner(m, m);
    B.triangularView<Eigen::UnitLower>().solveInPlace(v);
    B.triangularView<Eigen::Upper>().solveInPlace(v);
}

inline void master_solve_T(const MasterLattice& ml, Eigen::Index m, Eigen::VectorXd& v) {
    auto B = ml.LU.topLeftCorner(m, m);
    B.transpose().triangularView<Eigen::Lower>().solveInPlace(v);
    B.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(v);
}

}  // namespace detail

namespace detail {

// Solves the main equation at one abscissa without the conditioning gate.
// Routes through the master lattice when the slice is one of its leading
// blocks; otherwise (or when a consistency check fails) assembles the dense
// system.
inline KernelSlice solve_slice(double x, const TransitionTable& tt, const DensityProfile& p,
                               const NumericsConfig& cfg_in,
                               const MasterLattice* master = nullptr) {
    const NumericsConfig cfg = resolved(p, cfg_in, tt.bound);
    KernelSlice out;
    out.x = x;

    const bool single = !(x < p.a - 1e-12) || p.alpha == 1.0;
    bool master_done = false;
    if (master && master->ok && single && tt.jump_at(2.0 * x) == 0.0) {
        const double fi = (master->y_top - x) / master->h;
        const Eigen::Index m = static_cast<Eigen::Index>(std::llround(fi)) + 1;
        if (std::abs(fi - std::nearbyint(fi)) < 1e-9 && m >= 3 && m <= master->n) {
            const double h = master->h;
            Eigen::VectorXd b(m), u(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const double yi = master->y_top - h * static_cast<double>(i);
                b(i) = -f_eval(tt, p, x, yi, i == m - 1 ? +1 : 0);
                u(i) = -(h / 2) * tt.f0_sided(yi + x, +1);
            }
            Eigen::VectorXd z = b, v = u;
            detail::master_solve(*master, m, z);
            detail::master_solve(*master, m, v);
            const double denom = 1.0 + v(m - 1);
            if (std::abs(denom) > 1e-8) {
                Eigen::VectorXd k = z - v * (z(m - 1) / denom);
                // Residual spot check against the true trapezoid system.
                double rmax = 0.0;
                const double bs = 1.0 + b.cwiseAbs().maxCoeff();
                const Eigen::Index stride = std::max<Eigen::Index>(1, m / 16);
                for (Eigen::Index i = 0; i < m + stride; i += stride) {
                    const Eigen::Index row = std::min(i, m - 1);
                    double r = k(row) - b(row);
                    for (Eigen::Index j = 0; j + 1 < m; ++j) {
                        const double w = j == 0 ? h / 2 : h;
                        r += w * master->fvec[static_cast<std::size_t>(row + j)] * k(j);
                    }
                    r += (h / 2) *
                         tt.f0_sided(master->y_top - h * static_cast<double>(row) + x, +1) *
                         k(m - 1);
                    rmax = std::max(rmax, std::abs(r));
                }
                if (rmax <= 1e-9 * bs) {
                    // Condition estimate: exact column sums, Hager inverse norm.
                    double n1A = 0.0;
                    for (Eigen::Index j = 0; j < m; ++j) {
                        const double w = (j == 0 || j == m - 1) ? h / 2 : h;
                        double cs = w * (master->fabs_p[static_cast<std::size_t>(j + m)] -
                                         master->fabs_p[static_cast<std::size_t>(j)]);
                        const double d = w * master->fvec[static_cast<std::size_t>(2 * j)];
                        cs += std::abs(1.0 + d) - std::abs(d);
                        n1A = std::max(n1A, cs);
                    }
                    Eigen::VectorXd gT = Eigen::VectorXd::Zero(m);
                    gT(m - 1) = 1.0;
                    detail::master_solve_T(*master, m, gT);
                    auto solveA = [&](const Eigen::VectorXd& rhs) {
                        Eigen::VectorXd t = rhs;
                        detail::master_solve(*master, m, t);
                        return Eigen::VectorXd(t - v * (t(m - 1) / denom));
                    };
                    auto solveAT = [&](const Eigen::VectorXd& rhs) {
                        Eigen::VectorXd t = rhs;
                        detail::master_solve_T(*master, m, t);
                        return Eigen::VectorXd(t - gT * (u.dot(t) / denom));
                    };
                    out.cond = n1A * detail::hager_inv_norm1(m, solveA, solveAT);
                    out.y.resize(static_cast<std::size_t>(m));
                    out.K.resize(static_cast<std::size_t>(m));
                    for (Eigen::Index i = 0; i < m; ++i) {
                        out.y[static_cast<std::size_t>(m - 1 - i)] =
                            master->y_top - h * static_cast<double>(i);
                        out.K[static_cast<std::size_t>(m - 1 - i)] = k(i);
                    }
                    out.K_diag = out.K[0];
                    out.jump = 0.0;
                    master_done = true;
                }
            }
        }
    }

    if (!master_done) {
        detail::DenseSystem sys = detail::assemble_dense(x, tt, p, cfg);
        const Eigen::Index N = sys.A.rows();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
        const Eigen::VectorXd k = lu.solve(sys.b);
        if (!k.allFinite())
            throw SingularSystem("main-equation system at x = " + std::to_string(x));
        auto solveA = [&](const Eigen::VectorXd& rhs) { return Eigen::VectorXd(lu.solve(rhs)); };
        auto solveAT = [&](const Eigen::VectorXd& rhs) {
            return detail::lu_transpose_solve(lu, rhs);
        };
        out.cond = detail::matrix_norm1(sys.A) * detail::hager_inv_norm1(N, solveA, solveAT);
        out.y = sys.y;
        out.K.assign(k.data(), k.data() + N);
        out.K_diag = out.K[0];
        out.jump = sys.idx_R >= 0 ? out.K[static_cast<std::size_t>(sys.idx_R)] -
                                        out.K[static_cast<std::size_t>(sys.idx_L)]
                                  : 0.0;
    }
    return out;
}

}  // namespace detail

// Solves the main equation at one abscissa and gates on conditioning.
inline KernelSlice solve_main_equation_at_x(double x, const TransitionTable& tt,
                                            const DensityProfile& p,
                                            const NumericsConfig& cfg_in,
                                            const MasterLattice* master = nullptr) {
    const KernelSlice out = detail::solve_slice(x, tt, p, cfg_in, master);
    if (!(out.cond <= 1.0 / cfg_in.solve_tol))
        throw IllConditioned("condition estimate " + std::to_string(out.cond) + " at x = " +
                             std::to_string(out.x));
    return out;
}

// Kernel family over the whole x grid.  Conditioning failures are gathered
// and reported for the worst node; other per-node numerical failures are
// gathered into a family-level error listing every failed abscissa.
inline KernelTable solve_kernel_family(const TransitionTable& tt, const DensityProfile& p,
                                       const NumericsConfig& cfg_in) {
    const NumericsConfig cfg = resolved(p, cfg_in, tt.bound);
    KernelTable kt;
    kt.trivial_data = tt.trivial();
    const MasterLattice master = build_master(tt, p, cfg);
    const Eigen::Index nx = static_cast<Eigen::Index>(std::llround(cfg.x_max / cfg.h_x));
    std::string failures;
    double worst_cond = 0.0, worst_x = 0.0;
    for (Eigen::Index i = 0; i <= nx; ++i) {
        const double x = cfg.h_x * static_cast<double>(i);
        try {
            const KernelSlice s = detail::solve_slice(x, tt, p, cfg, &master);
            if (!(s.cond <= 1.0 / cfg.solve_tol)) {
                if (!(worst_cond >= s.cond)) {
                    worst_cond = s.cond;
                    worst_x = x;
                }
                continue;
            }
            kt.slices.push_back(s);
        } catch (const NumericalError& e) {
            if (!failures.empty()) failures += "; ";
            failures += std::string("x = ") + std::to_string(x) + ": " + e.what();
        }
    }
    if (worst_cond > 0.0)
        throw IllConditioned("condition estimate " + std::to_string(worst_cond) +
                             " at worst x = " + std::to_string(worst_x));
    if (!failures.empty()) throw FamilyIncomplete(failures);
    return kt;
}

namespace detail {

// Derivative of a nodal sequence with stencils that never straddle the
// interface abscissa and keep the two-point parity of the trapezoid grid.
// Returns one value per node; entries inside the exclusion set are filled by
// linear carry-over from the two nearest clean same-side nodes.
inline std::vector<double> seam_aware_derivative(const std::vector<double>& xs,
                                                 const std::vector<double>& vals,
                                                 double a, const std::vector<bool>& excl) {
    const std::size_t n = xs.size();
    if (n < 5) throw InsufficientNodes("need at least 5 x nodes");
    std::vector<double> d(n, 0.0);
    std::vector<bool> clean(n, false);
    auto side = [&](std::size_t j) { return xs[j] < a; };
    auto ok = [&](std::size_t i, std::size_t j) { return !excl[j] && side(i) == side(j); };
    for (std::size_t i = 0; i < n; ++i) {
        if (excl[i]) continue;
        if (i >= 1 && i + 1 < n && ok(i, i - 1) && ok(i, i + 1)) {
            d[i] = (vals[i + 1] - vals[i - 1]) / (xs[i + 1] - xs[i - 1]);
        } else if (i + 4 < n && ok(i, i + 2) && ok(i, i + 4)) {
            d[i] = (-3.0 * vals[i] + 4.0 * vals[i + 2] - vals[i + 4]) / (2.0 * (xs[i + 2] - xs[i]));
        } else if (i >= 4 && ok(i, i - 2) && ok(i, i - 4)) {
            d[i] = (3.0 * vals[i] - 4.0 * vals[i - 2] + vals[i - 4]) / (2.0 * (xs[i] - xs[i - 2]));
        } else if (i + 1 < n && ok(i, i + 1)) {
            d[i] = (vals[i + 1] - vals[i]) / (xs[i + 1] - xs[i]);
        } else if (i >= 1 && ok(i, i - 1)) {
            d[i] = (vals[i] - vals[i - 1]) / (xs[i] - xs[i - 1]);
        } else {
            continue;  // left non-clean; filled below
        }
        clean[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (clean[i]) continue;
        std::vector<std::size_t> cand;
        for (std::size_t j = 0; j < n; ++j)
            if (clean[j] && side(j) == side(i)) cand.push_back(j);
        std::sort(cand.begin(), cand.end(), [&](std::size_t u, std::size_t v) {
            return std::abs(xs[u] - xs[i]) < std::abs(xs[v] - xs[i]);
        });
        if (cand.empty())
            throw InsufficientNodes("no clean nodes on the side of x = " + std::to_string(xs[i]));
        if (cand.size() == 1) {
            d[i] = d[cand[0]];
        } else {
            const std::size_t j1 = cand[0], j2 = cand[1];
            d[i] = d[j1] + (d[j2] - d[j1]) * (xs[i] - xs[j1]) / (xs[j2] - xs[j1]);
        }
    }
    return d;
}

inline std::vector<bool> exclusion_mask(const std::vector<double>& xs, double a, double zone) {
    std::vector<bool> excl(xs.size(), false);
    for (std::size_t j = 0; j < xs.size(); ++j)
        excl[j] = xs[j] < zone + 1e-12 || std::abs(xs[j] - a) < zone + 1e-12;
    return excl;
}

}  // namespace detail

// Potential from the diagonal of the kernel family:
//   q(x) = −4 sqrt(rho)/(1 + 1/sqrt(rho)) d/dx K(x, μ+(x)).
inline PotentialSpec reconstruct_potential(const KernelTable& kt, const DensityProfile& p,
                                           const NumericsConfig& cfg_in) {
    const NumericsConfig cfg = snapped(p, cfg_in);
    const std::size_t n = kt.slices.size();
    if (n < 5) throw InsufficientNodes("kernel family holds fewer than 5 slices");
    std::vector<double> xs(n), kd(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = kt.slices[i].x;
        kd[i] = kt.slices[i].K_diag;
    }
    const double zone =
        kt.trivial_data ? 0.0 : std::max(cfg.h_x, 3.0 / cfg.lambda_max);
    // A unit density ratio leaves the medium continuous at x = a: no interface,
    // so stencils may cross it freely.
    const double seam = p.alpha == 1.0 ? std::numeric_limits<double>::infinity() : p.a;
    const auto excl = detail::exclusion_mask(xs, seam, zone);
    const auto d = detail::seam_aware_derivative(xs, kd, seam, excl);
    PotentialSpec q;
    q.grid = xs;
    q.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = xs[i] < p.a ? p.alpha : 1.0;
        q.values[i] = -4.0 * s / (1.0 + 1.0 / s) * d[i];
    }
    q.support_bound = xs.back();
    return q;
}

// Sup-normalized residual of the interface identity relating the recorded
// kernel jump to the reconstructed potential on [0, a):
//   dJ/dx = (1/(4 sqrt(rho))) (1 − 1/sqrt(rho)) q(x).
inline double jump_consistency(const KernelTable& kt, const PotentialSpec& q_rec,
                               const DensityProfile& p, const NumericsConfig& cfg_in) {
    const NumericsConfig cfg = snapped(p, cfg_in);
    if (p.a < 3.0 * cfg.h_x)
        throw NoInteriorNodes("a spans fewer than 3 grid steps");
    std::vector<double> xs, J, qv;
    for (const KernelSlice& s : kt.slices)
        if (s.x < p.a - 1e-12) {
            xs.push_back(s.x);
            J.push_back(s.jump);
            qv.push_back(q_rec(s.x));
        }
    if (xs.size() < 5) throw NoInteriorNodes("fewer than 5 nodes left of a");
    const double zone =
        kt.trivial_data ? 0.0 : std::max(cfg.h_x, 3.0 / cfg.lambda_max);
    const double seam = p.alpha == 1.0 ? std::numeric_limits<double>::infinity() : p.a;
    const auto excl = detail::exclusion_mask(xs, seam, zone);
    const auto dJ = detail::seam_aware_derivative(xs, J, seam, excl);
    const double s = p.alpha;
    double qmax = 0.0;
    for (double v : qv) qmax = std::max(qmax, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (excl[i]) continue;
        worst = std::max(worst, std::abs(dJ[i] - (1.0 / (4.0 * s)) * (1.0 - 1.0 / s) * qv[i]));
    }
    return worst / std::max(qmax, 1e-12);
}

struct ReconstructionReport {
    PotentialSpec q_rec;
    double sup_rel_error{}, l1_rel_error{};  // against a supplied reference
    double jump_residual{};
    std::vector<double> condition_numbers;
    double refinement_delta{};
};

namespace detail {

// Sup difference of K at matched nodes between a step-h slice and a step-h/2
// slice; duplicate nodes are matched by order of occurrence.
inline double slice_delta(const KernelSlice& coarse, const KernelSlice& fine) {
    double worst = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < coarse.y.size(); ++i) {
        while (j < fine.y.size() && fine.y[j] < coarse.y[i] - 1e-9) ++j;
        if (j >= fine.y.size()) break;
        if (std::abs(fine.y[j] - coarse.y[i]) <= 1e-9) {
            worst = std::max(worst, std::abs(fine.K[j] - coarse.K[i]));
            ++j;
        }
    }
    return worst;
}

inline double refinement_probe(const TransitionTable& tt, const DensityProfile& p,
                               const NumericsConfig& cfg) {
    NumericsConfig fine = cfg;
    fine.h_x = cfg.h_x / 2;
    double worst = 0.0;
    const double probes[4] = {0.0, 0.3 * p.a, p.a, std::min(2.5 * p.a, cfg.x_max)};
    for (double x : probes) {
        if (x > cfg.x_max + 1e-12) continue;
        const KernelSlice c = solve_main_equation_at_x(x, tt, p, cfg);
        const KernelSlice f = solve_main_equation_at_x(x, tt, p, fine);
        worst = std::max(worst, slice_delta(c, f));
    }
    return worst;
}

}  // namespace detail

// Inverse pass from given scattering data.
inline ReconstructionReport inverse_reconstruct(const ScatteringData& sd,
                                                const DensityProfile& p,
                                                const BoundaryCoefficients& c,
                                                const NumericsConfig& cfg_in) {
    validate_profile(p, cfg_in.degenerate_ok);
    validate_boundary(c);
    const NumericsConfig cfg = resolved(p, cfg_in, sd.bound_states);
    const TransitionTable tt = f0s_transform(sd, p, c, cfg);
    const KernelTable kt = solve_kernel_family(tt, p, cfg);
    ReconstructionReport rep;
    rep.q_rec = reconstruct_potential(kt, p, cfg);
    rep.jump_residual = jump_consistency(kt, rep.q_rec, p, cfg);
    for (const KernelSlice& s : kt.slices) rep.condition_numbers.push_back(s.cond);
    rep.refinement_delta = detail::refinement_probe(tt, p, cfg);
    return rep;
}

// Forward map followed by the inverse pass, with errors against the input.
inline ReconstructionReport roundtrip(const DensityProfile& p, const BoundaryCoefficients& c,
                                      const PotentialSpec& q, const NumericsConfig& cfg_in) {
    const ScatteringData sd = forward_scattering(p, q, c, cfg_in);
    ReconstructionReport rep = inverse_reconstruct(sd, p, c, cfg_in);
    double qmax = 0.0, l1den = 0.0, sup = 0.0, l1num = 0.0;
    for (std::size_t i = 0; i < rep.q_rec.grid.size(); ++i) {
        const double qt = q(rep.q_rec.grid[i]);
        qmax = std::max(qmax, std::abs(qt));
        l1den += std::abs(qt);
        sup = std::max(sup, std::abs(rep.q_rec.values[i] - qt));
        l1num += std::abs(rep.q_rec.values[i] - qt);
    }
    // Relative to the input size; absolute when the input vanishes.
    rep.sup_rel_error = sup / (qmax > 1e-12 ? qmax : 1.0);
    rep.l1_rel_error = l1num / (l1den > 1e-12 ? l1den : 1.0);
    return rep;
}

}  // namespace stepscat
