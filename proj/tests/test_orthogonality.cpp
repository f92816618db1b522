#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "matrod/orthogonality.hpp"
#include "oracles.hpp"

using namespace matrod;

TEST_CASE("Laguerre moments are Gamma values")
{
    const Weight w = Weight::closed_commutative(fixture::laguerre(0.5));
    for (int k = 0; k <= 4; ++k) {
        const MomentMatrix m = moment(w, k);
        CHECK(std::abs(m.value(0, 0) - Complex(std::tgamma(k + 1.5))) < 1e-9 * std::tgamma(k + 1.5));
        CHECK(norm(q_moment(w, k).value - m.value) < 1e-12 * norm(m.value));
    }
}

TEST_CASE("integrability refusal names the condition")
{
    const Weight bad_end = Weight::closed_commutative(fixture::laguerre(-1.5));
    CHECK_THROWS_AS(check_integrability(bad_end), IntegrabilityError);
    const ModelSpec growing({0.0, 1.0, 0.0}, fixture::scalar(0.5), fixture::scalar(0.0), 4);
    try {
        check_integrability(Weight::closed_commutative(growing));
        FAIL("expected refusal");
    } catch (const IntegrabilityError& e) {
        CHECK(std::string(e.what()).find("decay") != std::string::npos);
    }
}

TEST_CASE("Gram matrix: parallel equals serial bitwise")
{
    const ModelSpec spec = fixture::algebra_spec(4);
    const FamilyCache c = generate_family(spec, 4);
    const Weight w = Weight::closed_commutative(spec);
    const GramReport a = gram_matrix(c, w, GramVariant::StarLeft);
    const GramReport b = gram_matrix_serial(c, w, GramVariant::StarLeft);
    REQUIRE(a.entries.size() == b.entries.size());
    for (size_t i = 0; i < a.entries.size(); ++i) {
        CHECK((a.entries[i].entry.array() == b.entries[i].entry.array()).all());
        CHECK(a.entries[i].error == b.entries[i].error);
    }
    CHECK(a.pattern_holds());
}

TEST_CASE("Gram variants on Hermite data")
{
    const ModelSpec h = fixture::hermite(4);
    const FamilyCache c = generate_family(h, 4);
    const Weight w = Weight::closed_commutative(h);
    for (GramVariant v : {GramVariant::StarLeft, GramVariant::StarRight, GramVariant::Commutative}) {
        const GramReport r = gram_matrix(c, w, v);
        CHECK(r.pattern_holds());
        // 2^n n! sqrt(pi) on the diagonal
        for (int n = 0; n <= 4; ++n) {
            const double expected = std::ldexp(std::tgamma(n + 1.0), n) * std::sqrt(M_PI);
            CHECK(std::abs(r.at(n, n).entry(0, 0) - Complex(expected)) < 1e-9 * expected);
        }
    }
    CHECK(gram_variant_from_string("star_right") == GramVariant::StarRight);
    CHECK_THROWS_AS(gram_variant_from_string("both"), DomainError);
}

TEST_CASE("commutative Gram requires commuting data")
{
    Matrix l1(2, 2), l2(2, 2);
    l1 << -1.0, 0.3, 0.2, -0.8;
    l2 << 0.5, 0.4, -0.3, 1.1;
    const ModelSpec spec({0.0, 1.0, 0.0}, l1, l2, 3);
    const Weight w = Weight::frobenius(spec, Anchor::Zero);
    const FamilyCache c = generate_family(spec, 3);
    CHECK_THROWS_AS(gram_matrix(c, w, GramVariant::Commutative), PreconditionError);
    CHECK(gram_matrix(c, w, GramVariant::StarLeft).pattern_holds());
    CHECK_THROWS_AS(norm_identity_check(c, w, 1), PreconditionError);
    CHECK_THROWS_AS(expand_by_integrals(c, w, c[2]), PreconditionError);
}

TEST_CASE("norm identity on Hermite data carries k!")
{
    const ModelSpec h = fixture::hermite(3);
    const FamilyCache c = generate_family(h, 3);
    const Weight w = Weight::closed_commutative(h);
    for (int k = 0; k <= 3; ++k) {
        const NormIdentity n = norm_identity_check(c, w, k);
        CHECK(n.gap_factorial < 1e-9);
        if (k >= 2) CHECK(n.gap_plain > 0.1);
    }
    CHECK(norm_identity_factor(3) == -6.0);
    CHECK(norm_identity_factor(3, false) == -1.0);
}

TEST_CASE("expansion by integrals agrees with elimination")
{
    const ModelSpec spec = fixture::algebra_spec(5);
    const FamilyCache c = generate_family(spec, 5);
    const Weight w = Weight::closed_commutative(spec);
    std::mt19937_64 rng(13);
    const MatrixPolynomial p = fixture::random_poly(rng, 2, 5);
    const std::vector<Matrix> a = expand_in_basis(c, p);
    const std::vector<Matrix> b = expand_by_integrals(c, w, p);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) CHECK(norm(a[k] - b[k]) < 1e-7 * std::max(1.0, norm(a[k])));
}
