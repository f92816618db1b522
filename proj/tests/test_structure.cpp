#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "matrod/structure.hpp"
#include "oracles.hpp"

using namespace matrod;

TEST_CASE("Hermite recurrence coefficients")
{
    const ModelSpec h = fixture::hermite(8);
    const FamilyCache c = generate_family(h, 8);
    for (int n = 1; n <= 7; ++n) {
        const RecurrenceCoeffs r = recurrence_coeffs(h, n);
        CHECK(std::abs(r.alpha(0, 0) + 0.5) < 1e-15);
        CHECK(std::abs(r.beta(0, 0)) < 1e-15);
        CHECK(std::abs(r.gamma(0, 0) + static_cast<double>(n)) < 1e-13);
        CHECK(recurrence_residual(c, r) < 1e-10 * c[n].norm());
        CHECK(recurrence_system_residual(h, r) < 1e-13);
    }
}

TEST_CASE("recurrence for noncommuting 3x3 data")
{
    std::mt19937_64 rng(5);
    const ModelSpec spec = fixture::random_spec(rng, 3, 8);
    REQUIRE_FALSE(spec.commuting());
    const FamilyCache c = generate_family(spec, 8);
    for (int n = 1; n <= 7; ++n) {
        const RecurrenceCoeffs r = recurrence_coeffs(spec, n);
        CHECK(recurrence_residual(c, r) < 1e-9 * spec.scale() * c[n].norm());
        CHECK(norm(recurrence_alpha_closed_form(spec, n) - r.alpha) < 1e-12 * std::max(1.0, norm(r.alpha)));
    }
}

TEST_CASE("eigen-equation values and gating")
{
    const ModelSpec leg = fixture::legendre(6);
    const FamilyCache c = generate_family(leg, 6);
    for (int n = 0; n <= 6; ++n) {
        const EigenCheck e = eigen_check(leg, c, n);
        CHECK(e.eigen_matrix(0, 0) == Complex(n * (n + 1.0)));
        CHECK(e.residual < 1e-10 * std::max(1.0, c[n].norm()) * std::max(1.0, n * (n + 1.0)));
    }
    std::mt19937_64 rng(9);
    const ModelSpec nc = fixture::random_spec(rng, 2, 4);
    CHECK_THROWS_AS(eigen_check(nc, generate_family(nc, 4), 2), PreconditionError);
}

TEST_CASE("Laguerre ladder closed form")
{
    const double a = 0.5;
    const ModelSpec lag = fixture::laguerre(a, 8);
    const FamilyCache c = generate_family(lag, 8);
    for (int n = 1; n <= 8; ++n) {
        const LadderCoeffs l = ladder_coeffs(lag, n);
        CHECK(l.scalar());
        CHECK(std::abs(l.g(0, 0) - (n + a)) < 1e-13);
        CHECK(std::abs(l.b(0, 0) - 1.0 / (n + a)) < 1e-13);
        CHECK(std::abs(l.c(0, 0) + 1.0 / (n * (n + a))) < 1e-13);
        CHECK(std::abs(l.a(0, 0)) < 1e-15);
        CHECK(ladder_system_residual(lag, l) < 1e-12);
        CHECK(poly_distance(ladder_apply(lag, l, c[n]), c[n - 1]) < 1e-9 * c[n - 1].norm());
    }
}

TEST_CASE("ladder on the 2x2 algebra and degenerate G")
{
    const ModelSpec spec = fixture::algebra_spec(6);
    const FamilyCache c = generate_family(spec, 6);
    for (int n = 1; n <= 6; ++n) {
        const LadderCoeffs l = ladder_coeffs(spec, n);
        CHECK_FALSE(l.scalar());
        CHECK(in_nilpotent_algebra(l.c, 1e-12));
        CHECK(poly_distance(ladder_apply(spec, l, c[n]), c[n - 1]) < 1e-9 * c[n - 1].norm());
    }
    // Q = x with L2 = -n makes G = -L1 (n + L2) vanish at that n.
    const ModelSpec degenerate({0.0, 1.0, 0.0}, fixture::scalar(-1.0), fixture::scalar(-2.0), 4);
    CHECK_THROWS_AS(ladder_coeffs(degenerate, 2), SingularMatrixError);
}
