#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "matrod/quadrature.hpp"

using namespace matrod;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, Complex(v)); }

} // namespace

TEST_CASE("finite interval polynomial is exact")
{
    const QuadratureResult r = integrate_finite([](double x) { return scalar(x * x * x * x); }, 0.0, 2.0);
    CHECK(r.converged);
    CHECK(std::abs(r.value(0, 0) - Complex(32.0 / 5.0)) < 1e-13);
}

TEST_CASE("half line with an endpoint singularity")
{
    Domain d{Interval::HalfLine, -0.5, 0.0};
    const QuadratureResult r =
        integrate_matrix([](const Abscissa& a) { return scalar(std::exp(-a.x) / std::sqrt(a.from_left)); }, d);
    CHECK(r.converged);
    CHECK(std::abs(r.value(0, 0) - Complex(std::sqrt(M_PI))) < 1e-10);
    CHECK(r.max_error() < 1e-10);
}

TEST_CASE("beta integral on [-1, 1]")
{
    const double a = 0.5, b = -1.0 / 3.0;
    Domain d{Interval::Symmetric, b, a};
    const QuadratureResult r = integrate_matrix(
        [&](const Abscissa& p) { return scalar(std::pow(p.from_right, a) * std::pow(p.from_left, b)); }, d);
    const double exact = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 2);
    CHECK(r.converged);
    CHECK(std::abs(r.value(0, 0) - Complex(exact)) < 1e-10);
}

TEST_CASE("real line, matrix valued")
{
    Domain d{Interval::RealLine, 0.0, 0.0};
    const QuadratureResult r = integrate_matrix(
        [](const Abscissa& p) {
            Matrix m(2, 2);
            const double g = std::exp(-p.x * p.x);
            m << g, p.x * g, Complex(0.0, p.x * p.x * g), g;
            return m;
        },
        d);
    CHECK(std::abs(r.value(0, 0) - Complex(std::sqrt(M_PI))) < 1e-10);
    CHECK(std::abs(r.value(0, 1)) < 1e-10);
    CHECK(std::abs(r.value(1, 0) - Complex(0.0, std::sqrt(M_PI) / 2)) < 1e-10);
}

TEST_CASE("non-finite integrands are rejected")
{
    CHECK_THROWS_AS(integrate_finite([](double) { return scalar(NAN); }, 0.0, 1.0), DomainError);
}
