#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stepscat/stepscat.hpp"

using namespace stepscat;

namespace {

// Uniform synthetic table with constant tabulated values and no discrete
// part, spanning [−span, span].
TransitionTable constant_table(double value, double span, double ht) {
    TransitionTable tt;
    tt.t_lo = -span;
    tt.ht = ht;
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 * span / ht)) + 1;
    tt.vals.assign(n, value);
    return tt;
}

}  // namespace

TEST_CASE("reflectionless data reproduces the closed-form kernel and potential") {
    const DensityProfile p = fixtures::profile_unit();
    const BoundaryCoefficients c = fixtures::bc_dirichlet();
    const NumericsConfig cfg0 = fixtures::cfg_unit();
    const ScatteringData sd = fixtures::soliton_data(cfg0);
    const NumericsConfig cfg = resolved(p, cfg0, sd.bound_states);
    const TransitionTable tt = f0s_transform(sd, p, c, cfg);
    const KernelTable kt = solve_kernel_family(tt, p, cfg);

    SECTION("kernel values on every slice") {
        REQUIRE(kt.trivial_data);
        REQUIRE(kt.slices.size() == 301);
        double worst = 0.0;
        for (const KernelSlice& s : kt.slices) {
            REQUIRE(s.jump == 0.0);  // no reflected channel on the unit profile
            for (std::size_t i = 0; i < s.y.size(); ++i)
                worst = std::max(worst,
                                 std::abs(s.K[i] - fixtures::soliton_kernel(s.x, s.y[i])));
            CHECK(s.cond < 10.0);
        }
        CHECK(worst < 1e-4);
    }

    SECTION("diagonal derivative gives the potential") {
        const PotentialSpec q = reconstruct_potential(kt, p, cfg);
        double sup = 0.0;
        for (std::size_t i = 0; i < q.grid.size(); ++i)
            sup = std::max(sup, std::abs(q.values[i] - fixtures::soliton_potential(q.grid[i])));
        CHECK(sup / 2.0 < 0.01);
        CHECK(sup < 2e-3);

        const double resid = jump_consistency(kt, q, p, cfg);
        CHECK(resid < 1e-8);
    }

    SECTION("grid refinement moves the kernel by little") {
        const double delta = detail::refinement_probe(tt, p, cfg);
        CHECK(delta < 1e-4);
    }
}

TEST_CASE("shared-lattice and dense paths agree") {
    const DensityProfile p = fixtures::profile_step();
    const BoundaryCoefficients c = fixtures::bc_robin_b();
    NumericsConfig cfg0 = fixtures::cfg_free();
    const ScatteringData sd = forward_scattering(p, zero_potential(), c, cfg0);
    const NumericsConfig cfg = resolved(p, cfg0, sd.bound_states);
    const TransitionTable tt = f0s_transform(sd, p, c, cfg);
    const MasterLattice master = build_master(tt, p, cfg);
    REQUIRE(master.ok);

    for (double x : {1.2, 1.5, 1.96}) {
        const KernelSlice fast = detail::solve_slice(x, tt, p, cfg, &master);
        const KernelSlice dense = detail::solve_slice(x, tt, p, cfg, nullptr);
        REQUIRE(fast.y.size() == dense.y.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < fast.y.size(); ++i) {
            REQUIRE(fast.y[i] == Catch::Approx(dense.y[i]).margin(1e-12));
            worst = std::max(worst, std::abs(fast.K[i] - dense.K[i]));
        }
        CHECK(worst < 1e-10);
        // Both condition estimates describe the same operator.
        CHECK(fast.cond == Catch::Approx(dense.cond).epsilon(0.5));
    }
}

TEST_CASE("solved slices satisfy their own integral identity") {
    const DensityProfile p = fixtures::profile_step();
    const BoundaryCoefficients c = fixtures::bc_robin_b();
    NumericsConfig cfg0 = fixtures::cfg_free();
    const ScatteringData sd = forward_scattering(p, zero_potential(), c, cfg0);
    const NumericsConfig cfg = resolved(p, cfg0, sd.bound_states);
    const TransitionTable tt = f0s_transform(sd, p, c, cfg);

    const double x = 1.5;
    const KernelSlice s = solve_main_equation_at_x(x, tt, p, cfg);
    const std::size_t n = s.y.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; i += 7) {
        double r = s.K[i] + f_eval(tt, p, x, s.y[i], i == 0 ? +1 : 0);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = (j == 0 || j == n - 1) ? cfg.h_x / 2 : cfg.h_x;
            const int side = (i == 0 && j == 0) ? +1 : 0;
            r += w * tt.f0_sided(s.y[i] + s.y[j], side) * s.K[j];
        }
        worst = std::max(worst, std::abs(r));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("condition estimate tracks the exact one-norm condition number") {
    const DensityProfile p = fixtures::profile_step();
    const BoundaryCoefficients c = fixtures::bc_robin_b();
    NumericsConfig cfg0 = fixtures::cfg_free();
    const ScatteringData sd = forward_scattering(p, zero_potential(), c, cfg0);
    const NumericsConfig cfg = resolved(p, cfg0, sd.bound_states);
    const TransitionTable tt = f0s_transform(sd, p, c, cfg);

    for (double x : {0.5, 1.4}) {
        const detail::DenseSystem sys = detail::assemble_dense(x, tt, p, cfg);
        const Eigen::MatrixXd inv = sys.A.inverse();
        const double exact = detail::matrix_norm1(sys.A) * detail::matrix_norm1(inv);
        const KernelSlice s = detail::solve_slice(x, tt, p, cfg, nullptr);
        CHECK(s.cond <= exact * 1.000001);
        CHECK(s.cond >= exact / 10.0);
    }
}

TEST_CASE("near-singular systems are refused") {
    const DensityProfile p = fixtures::profile_step();
    NumericsConfig cfg;
    cfg.x_max = 2.0;
    cfg.h_x = 0.1;
    cfg.lambda_max = 40.0;
    cfg.n_lambda = 64;
    cfg.y_max = 3.0;

    // Constant tabulated values make the quadrature operator rank one; tuning
    // the constant against the weight sum drives the system singular.
    const NumericsConfig rcfg = resolved(p, cfg, std::vector<double>{});
    const double span = rcfg.y_max - 1.0;  // total weight of the row quadrature at x = a
    const TransitionTable tt = constant_table(-(1.0 + 1e-9) / span, 2.5 * rcfg.y_max, 0.05);
    CHECK_THROWS_AS(solve_main_equation_at_x(p.a, tt, p, cfg), IllConditioned);
}

TEST_CASE("matched-node slice comparison") {
    KernelSlice coarse, fine;
    coarse.y = {0.0, 1.0, 2.0};
    coarse.K = {1.0, 2.0, 3.0};
    fine.y = {0.0, 0.5, 1.0, 1.5, 2.0};
    fine.K = {1.0, 9.0, 2.25, 9.0, 3.5};
    CHECK(detail::slice_delta(coarse, fine) == Catch::Approx(0.5));
}

TEST_CASE("interface-respecting derivative") {
    std::vector<double> xs, vals;
    for (int i = 0; i <= 20; ++i) {
        xs.push_back(0.1 * i);
        vals.push_back(xs.back() * xs.back());
    }

    SECTION("exact on quadratics away from exclusions") {
        const auto excl = detail::exclusion_mask(xs, 1.0, 0.0);
        const auto d = detail::seam_aware_derivative(xs, vals, 1.0, excl);
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(d[i] == Catch::Approx(2.0 * xs[i]).margin(1e-10));
    }

    SECTION("excluded nodes are filled from their own side") {
        const auto excl = detail::exclusion_mask(xs, 1.0, 0.15);
        int excluded = 0;
        for (bool b : excl) excluded += b ? 1 : 0;
        CHECK(excluded == 5);  // two near zero, three around the interface
        const auto d = detail::seam_aware_derivative(xs, vals, 1.0, excl);
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(d[i] == Catch::Approx(2.0 * xs[i]).margin(1e-10));
    }

    SECTION("too few nodes or a starved side fail loudly") {
        std::vector<double> tiny = {0.0, 0.1, 0.2};
        std::vector<double> tv = {0.0, 0.01, 0.04};
        CHECK_THROWS_AS(
            detail::seam_aware_derivative(tiny, tv, 1.0, std::vector<bool>(3, false)),
            InsufficientNodes);

        // Every node left of the interface is excluded: nothing to fill from.
        std::vector<double> xs2, v2;
        for (int i = 0; i <= 10; ++i) {
            xs2.push_back(0.1 * i);
            v2.push_back(0.0);
        }
        const auto excl2 = detail::exclusion_mask(xs2, 0.25, 0.3);
        CHECK_THROWS_AS(detail::seam_aware_derivative(xs2, v2, 0.25, excl2),
                        InsufficientNodes);
    }
}

TEST_CASE("potential reconstruction applies the interface weight") {
    const DensityProfile p = fixtures::profile_step();
    NumericsConfig cfg;
    cfg.x_max = 2.0;
    cfg.h_x = 0.01;
    cfg.lambda_max = 40.0;
    cfg.n_lambda = 64;
    cfg.y_max = 6.0;

    KernelTable kt;
    kt.trivial_data = true;  // no data-driven exclusion zone
    for (int i = 0; i <= 200; ++i) {
        KernelSlice s;
        s.x = 0.01 * i;
        s.K_diag = std::sin(s.x);
        kt.slices.push_back(s);
    }
    const PotentialSpec q = reconstruct_potential(kt, p, cfg);
    REQUIRE(q.grid.size() == 201);
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        const double x = q.grid[i];
        const double s = x < p.a ? p.alpha : 1.0;
        const double expect = -4.0 * s / (1.0 + 1.0 / s) * std::cos(x);
        // Nodes at the domain edge and beside the interface fall back to
        // stride-two one-sided stencils (or extrapolation at the always-masked
        // x = 0 and x = a nodes), so their truncation error is ~(2h)^2.
        const double edge_dist = std::min(x, std::abs(x - p.a));
        const double margin = edge_dist < 2.0 * cfg.h_x - 1e-12 ? 3e-3 : 2e-4;
        CHECK(q.values[i] == Catch::Approx(expect).margin(margin));
    }
    CHECK(q.support_bound == Catch::Approx(2.0));
}

TEST_CASE("interface-identity residual needs interior nodes") {
    const DensityProfile p = fixtures::profile_step();
    PotentialSpec q = zero_potential();
    NumericsConfig cfg;
    cfg.x_max = 2.0;
    cfg.lambda_max = 40.0;
    cfg.n_lambda = 64;
    cfg.y_max = 6.0;

    SECTION("interface narrower than three grid steps") {
        cfg.h_x = 0.5;
        KernelTable kt;
        kt.trivial_data = true;
        for (int i = 0; i <= 4; ++i) {
            KernelSlice s;
            s.x = 0.5 * i;
            kt.slices.push_back(s);
        }
        CHECK_THROWS_AS(jump_consistency(kt, q, p, cfg), NoInteriorNodes);
    }

    SECTION("fewer than five recorded slices inside the layer") {
        cfg.h_x = 0.25;
        KernelTable kt;
        kt.trivial_data = true;
        for (int i = 0; i <= 8; ++i) {
            KernelSlice s;
            s.x = 0.25 * i;  // four slices strictly below the interface
            kt.slices.push_back(s);
        }
        CHECK_THROWS_AS(jump_consistency(kt, q, p, cfg), NoInteriorNodes);
    }
}

TEST_CASE("full inverse pass from stored-style data") {
    const DensityProfile p = fixtures::profile_unit();
    const BoundaryCoefficients c = fixtures::bc_dirichlet();
    const NumericsConfig cfg = fixtures::cfg_unit();
    const ScatteringData sd = fixtures::soliton_data(cfg);

    const ReconstructionReport rep = inverse_reconstruct(sd, p, c, cfg);
    CHECK(rep.jump_residual < 1e-8);
    CHECK(rep.refinement_delta < 1e-4);
    REQUIRE_FALSE(rep.condition_numbers.empty());
    for (double v : rep.condition_numbers) CHECK(v < 1e6);
    double sup = 0.0;
    for (std::size_t i = 0; i < rep.q_rec.grid.size(); ++i)
        sup = std::max(sup, std::abs(rep.q_rec.values[i] -
                                     fixtures::soliton_potential(rep.q_rec.grid[i])));
    CHECK(sup / 2.0 < 0.01);

    SECTION("degenerate profiles require the explicit flag") {
        NumericsConfig strict = cfg;
        strict.degenerate_ok = false;
        CHECK_THROWS_AS(inverse_reconstruct(sd, p, c, strict), ValidationError);
    }
}
