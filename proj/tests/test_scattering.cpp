#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "stepscat/stepscat.hpp"

using namespace stepscat;

TEST_CASE("layered-medium reflection coefficient") {
    const DensityProfile p = fixtures::profile_step();

    SECTION("unimodular on the real axis in both branch forms") {
        BoundaryCoefficients c = fixtures::bc_dirichlet();
        for (double lam : {0.35, 0.8, 2.4}) {
            CHECK(std::abs(std::abs(s_zero(p, c, lam)) - 1.0) < 1e-13);
        }
        c = BoundaryCoefficients{};
        c.beta2 = 1.0;  // derivative-dominated branch
        for (double lam : {0.35, 0.8, 2.4}) {
            CHECK(std::abs(std::abs(s_zero(p, c, lam)) - 1.0) < 1e-13);
        }
    }

    SECTION("unit density ratio collapses the closed form") {
        const DensityProfile u = fixtures::profile_unit();
        BoundaryCoefficients c = fixtures::bc_dirichlet();
        CHECK(std::abs(s_zero(u, c, 1.7) - cplx(1.0, 0.0)) < 1e-13);
        c = BoundaryCoefficients{};
        c.beta2 = 1.0;
        CHECK(std::abs(s_zero(u, c, 1.7) - cplx(-1.0, 0.0)) < 1e-13);
    }

    SECTION("computed reflection matches the closed form when the potential vanishes") {
        const PotentialSpec q = zero_potential();
        const NumericsConfig cfg = fixtures::cfg_free();
        const BoundaryCoefficients c = fixtures::bc_dirichlet();
        for (double lam : {0.45, 1.1, 3.3, 7.9}) {
            const CharacteristicValue v = detail::characteristic_at(p, q, c, lam, cfg);
            CHECK(std::abs(v.S - s_zero(p, c, lam)) < 1e-10);
        }
    }
}

TEST_CASE("characteristic rejects a vanishing denominator on the real axis") {
    JostSample j;
    j.lambda = cplx(1.0, 0.0);
    j.e0 = cplx(0.0, 0.0);
    j.ep0 = cplx(1.0, 0.0);
    CHECK_THROWS_AS(characteristic(fixtures::bc_dirichlet(), j, 1e-10), CharacteristicVanishes);
}

TEST_CASE("bound-state location on the unit profile") {
    const DensityProfile p = fixtures::profile_unit();
    const PotentialSpec q = zero_potential();
    NumericsConfig cfg = fixtures::cfg_unit();
    cfg.y_max = 6.0;

    SECTION("single affine root") {
        const auto mus = find_bound_states(p, q, fixtures::bc_affine_single(), cfg);
        REQUIRE(mus.size() == 1);
        CHECK(std::abs(mus[0] - 1.3) < 1e-8);
    }

    SECTION("two quadratic roots") {
        const auto mus = find_bound_states(p, q, fixtures::bc_affine_double(), cfg);
        REQUIRE(mus.size() == 2);
        CHECK(std::abs(mus[0] - 0.8) < 1e-8);
        CHECK(std::abs(mus[1] - 1.6) < 1e-8);
    }

    SECTION("a root too close to the search ceiling is flagged") {
        cfg.mu_max = 1.31;
        CHECK_THROWS_AS(find_bound_states(p, q, fixtures::bc_affine_single(), cfg),
                        SearchCeilingHit);
    }
}

TEST_CASE("bound-state location on the step profile") {
    const DensityProfile p = fixtures::profile_step();
    const PotentialSpec q = zero_potential();
    const NumericsConfig cfg = fixtures::cfg_free();

    SECTION("mixed condition has exactly one eigen-parameter") {
        const auto mus = find_bound_states(p, q, fixtures::bc_robin_b(), cfg);
        REQUIRE(mus.size() == 1);
        CHECK(std::abs(mus[0] - 0.718121233660) < 1e-9);
    }

    SECTION("pure function-term condition has none") {
        const auto mus = find_bound_states(p, q, fixtures::bc_robin_a(), cfg);
        CHECK(mus.empty());
    }
}

TEST_CASE("contour count matches the scan") {
    const PotentialSpec q = zero_potential();

    SECTION("unit profile, two roots") {
        NumericsConfig cfg = fixtures::cfg_unit();
        cfg.y_max = 6.0;
        CHECK(verify_zero_count(fixtures::profile_unit(), q, fixtures::bc_affine_double(), cfg) ==
              2);
        CHECK(verify_zero_count(fixtures::profile_unit(), q, fixtures::bc_affine_single(), cfg) ==
              1);
    }

    SECTION("step profile, with and without eigen-parameters") {
        const NumericsConfig cfg = fixtures::cfg_free();
        CHECK(verify_zero_count(fixtures::profile_step(), q, fixtures::bc_robin_b(), cfg) == 1);
        // The characteristic of a derivative-free condition factors through
        // its polynomial, whose own upper-half-plane root must not be counted.
        CHECK(verify_zero_count(fixtures::profile_step(), q, fixtures::bc_robin_a(), cfg) == 0);
    }

    SECTION("a contour through a characteristic root is rejected") {
        NumericsConfig cfg = fixtures::cfg_free();
        cfg.mu_max = 0.7181212336452438;  // top edge on the root
        CHECK_THROWS_AS(
            verify_zero_count(fixtures::profile_step(), q, fixtures::bc_robin_b(), cfg),
            ContourThroughZero);
    }
}

TEST_CASE("polynomial root counting in the search rectangle") {
    SECTION("quadratic function-term polynomial") {
        // 1 + 0.4 iλ + 0.3 λ²: one root on the positive imaginary axis near 1.277.
        CHECK(detail::alpha_poly_upper_zeros(fixtures::bc_robin_a(), 40.0, 1e-10, 2.0) == 1);
        CHECK(detail::alpha_poly_upper_zeros(fixtures::bc_robin_a(), 40.0, 1e-10, 1.0) == 0);
    }
    SECTION("linear and constant polynomials") {
        BoundaryCoefficients c;
        c.alpha0 = 1.0;
        c.alpha1 = 1.0;  // root at λ = i
        CHECK(detail::alpha_poly_upper_zeros(c, 40.0, 1e-10, 2.0) == 1);
        CHECK(detail::alpha_poly_upper_zeros(fixtures::bc_dirichlet(), 40.0, 1e-10, 2.0) == 0);
    }
}

TEST_CASE("norming constants from the characteristic residue") {
    const PotentialSpec q = zero_potential();

    SECTION("closed-form values on the unit profile") {
        NumericsConfig cfg = fixtures::cfg_unit();
        cfg.y_max = 6.0;
        const DensityProfile p = fixtures::profile_unit();
        const auto m1 = norming_constants(p, q, fixtures::bc_affine_single(), {1.3}, cfg);
        REQUIRE(m1.size() == 1);
        CHECK(m1[0] * m1[0] == Catch::Approx(2.6).epsilon(1e-8));
        const auto m2 = norming_constants(p, q, fixtures::bc_affine_double(), {0.8, 1.6}, cfg);
        REQUIRE(m2.size() == 2);
        CHECK(m2[0] * m2[0] == Catch::Approx(0.8).epsilon(1e-8));
        CHECK(m2[1] * m2[1] == Catch::Approx(1.6).epsilon(1e-8));
    }

    SECTION("step-profile value") {
        const NumericsConfig cfg = fixtures::cfg_free();
        const DensityProfile p = fixtures::profile_step();
        const auto mus = find_bound_states(p, q, fixtures::bc_robin_b(), cfg);
        REQUIRE(mus.size() == 1);
        const auto m = norming_constants(p, q, fixtures::bc_robin_b(), mus, cfg);
        CHECK(m[0] * m[0] == Catch::Approx(0.1744717633).epsilon(1e-6));
    }

    SECTION("common scaling of all six coefficients cancels") {
        const NumericsConfig cfg = fixtures::cfg_free();
        const DensityProfile p = fixtures::profile_step();
        const auto mus = find_bound_states(p, q, fixtures::bc_robin_b(), cfg);
        BoundaryCoefficients cs = fixtures::bc_robin_b();
        cs.alpha0 *= 7.3;
        cs.alpha1 *= 7.3;
        cs.alpha2 *= 7.3;
        cs.beta0 *= 7.3;
        cs.beta1 *= 7.3;
        cs.beta2 *= 7.3;
        const auto m = norming_constants(p, q, fixtures::bc_robin_b(), mus, cfg);
        const auto ms = norming_constants(p, q, cs, mus, cfg);
        // The quotient is algebraically invariant; the residual is pure
        // rounding from the non-dyadic factor distributing over sums.
        CHECK(std::abs(m[0] - ms[0]) / m[0] < 1e-10);
    }

    SECTION("a sign-indefinite residue quotient is rejected") {
        // Dirichlet data on the step profile: the characteristic is positive
        // and increasing on the imaginary axis, so a forced evaluation away
        // from any root must fail the positivity gate.
        const NumericsConfig cfg = fixtures::cfg_free();
        CHECK_THROWS_AS(
            norming_constants(fixtures::profile_step(), q, fixtures::bc_dirichlet(), {1.0}, cfg),
            NonpositiveNorm);
    }

    SECTION("a vanishing derivative-term polynomial at the root is rejected") {
        // b0 + i b1 λ vanishes at λ = i·1 when b0 = b1; pick admissible
        // coefficients with that degeneracy.
        BoundaryCoefficients c;
        c.alpha0 = 0.0;
        c.alpha1 = 1.0;
        c.beta0 = 1.0;
        c.beta1 = 1.0;
        validate_boundary(c);
        const NumericsConfig cfg = fixtures::cfg_free();
        CHECK_THROWS_AS(
            norming_constants(fixtures::profile_step(), q, c, {1.0}, cfg),
            BoundaryPolynomialVanishes);
    }
}

TEST_CASE("full forward map on the step profile") {
    const DensityProfile p = fixtures::profile_step();
    const PotentialSpec q = zero_potential();
    NumericsConfig cfg = fixtures::cfg_free();
    cfg.n_lambda = 256;

    const ScatteringData sd = forward_scattering(p, q, fixtures::bc_robin_b(), cfg);
    REQUIRE(sd.lambda_grid.size() == 256);
    REQUIRE(sd.s_values.size() == 256);
    REQUIRE(sd.bound_states.size() == 1);
    REQUIRE(sd.norming.size() == 1);
    CHECK_NOTHROW(check_scattering_symmetry(sd, 1e-10));
    // Independent ±λ solves must reproduce the conjugation pairing tightly.
    const std::size_t n = sd.lambda_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(std::conj(sd.s_values[n - 1 - i]) - sd.s_values[i]) < 1e-10);
    }

    SECTION("inadmissible inputs are rejected up front") {
        BoundaryCoefficients bad;
        bad.alpha0 = 1.0;
        bad.beta1 = 1.0;
        CHECK_THROWS_AS(forward_scattering(p, q, bad, cfg), SignConditionViolated);
        CHECK_THROWS_AS(forward_scattering({1.0, 1.0}, q, fixtures::bc_dirichlet(), cfg),
                        ValidationError);
    }
}
