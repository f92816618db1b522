#include "matrod/orthogonality.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace matrod {

namespace {

std::vector<Complex> eigenvalues(const Matrix& m)
{
    Eigen::ComplexEigenSolver<Matrix> solver(m, false);
    const auto& ev = solver.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

double min_real(const Matrix& m)
{
    double best = std::numeric_limits<double>::infinity();
    for (Complex z : eigenvalues(m)) best = std::min(best, z.real());
    return best;
}

double max_real(const Matrix& m)
{
    double best = -std::numeric_limits<double>::infinity();
    for (Complex z : eigenvalues(m)) best = std::max(best, z.real());
    return best;
}

Matrix adjoint_eval(const MatrixPolynomial& p, double x) { return poly_eval(p, x).adjoint(); }

/// sum ||c_m|| |x|^m: the size of the terms a value of p at x is assembled from.
double term_magnitude(const MatrixPolynomial& p, double x)
{
    double acc = 0.0;
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * std::abs(x) + norm(*it);
    return acc;
}

} // namespace

void check_integrability(const Weight& weight)
{
    const IntegrabilityData data = integrability_data(weight.spec());
    for (const auto& e : data.endpoints) {
        const double re = min_real(e.exponent);
        if (!(re > -1.0)) {
            std::ostringstream msg;
            msg << "integrability: exponent at x=" << e.endpoint << " has an eigenvalue with real part " << re
                << " (need > -1)";
            throw IntegrabilityError(msg.str());
        }
    }
    if (data.decay) {
        const double re = max_real(*data.decay);
        if (!(re < 0.0)) {
            std::ostringstream msg;
            msg << "integrability: decay matrix at infinity has an eigenvalue with real part " << re
                << " (need < 0)";
            throw IntegrabilityError(msg.str());
        }
    }
}

Domain integration_domain(const Weight& weight)
{
    check_integrability(weight);
    const IntegrabilityData data = integrability_data(weight.spec());
    Domain domain;
    domain.interval = data.interval;
    for (const auto& e : data.endpoints) {
        // Exponents with a nilpotent part carry logarithms; shave a little off.
        const double re = std::min(min_real(e.exponent), 2.0);
        const double value = std::max(-0.999, re - 0.05);
        if (e.endpoint < 0.5) domain.left_exponent = value;
        else domain.right_exponent = value;
    }
    return domain;
}

namespace {

MomentMatrix scalar_weighted_moment(const Weight& weight, int k, double tol, bool use_q)
{
    const Domain domain = integration_domain(weight);
    const Quadratic q = weight.spec().q;
    auto f = [&](const Abscissa& a) {
        const Complex s = use_q ? std::pow(q(a.x), k) : Complex(std::pow(a.x, k));
        return Matrix(s * weight(a));
    };
    const QuadratureResult r = integrate_matrix(f, domain, tol);
    MomentMatrix m;
    m.k = k;
    m.value = r.value;
    m.error = r.max_error();
    m.condition = condition_number(r.value);
    return m;
}

} // namespace

MomentMatrix moment(const Weight& weight, int k, double tol) { return scalar_weighted_moment(weight, k, tol, false); }

MomentMatrix q_moment(const Weight& weight, int k, double tol) { return scalar_weighted_moment(weight, k, tol, true); }

std::string to_string(GramVariant variant)
{
    switch (variant) {
    case GramVariant::StarLeft: return "star_left";
    case GramVariant::StarRight: return "star_right";
    case GramVariant::Commutative: return "commutative";
    }
    return "?";
}

GramVariant gram_variant_from_string(const std::string& name)
{
    if (name == "star_left") return GramVariant::StarLeft;
    if (name == "star_right") return GramVariant::StarRight;
    if (name == "commutative") return GramVariant::Commutative;
    throw DomainError("unknown Gram variant: " + name);
}

bool expected_vanishing(GramVariant variant, int j, int k)
{
    switch (variant) {
    case GramVariant::StarLeft: return j < k;
    case GramVariant::StarRight: return j > k;
    case GramVariant::Commutative: return j != k;
    }
    return false;
}

bool GramReport::pattern_holds() const
{
    for (const auto& e : entries)
        if (expected_vanishing(variant, e.j, e.k) && !e.vanishing) return false;
    return true;
}

namespace {

GramEntry gram_entry(const FamilyCache& cache, const Weight& weight, const Domain& domain, GramVariant variant, int j,
                     int k, double tol)
{
    const MatrixPolynomial& pj = cache[j];
    const MatrixPolynomial& pk = cache[k];
    auto f = [&](const Abscissa& a) -> Sample {
        const double x = a.x;
        const Matrix w = weight(a);
        const double scale = term_magnitude(pj, x) * norm(w) * term_magnitude(pk, x);
        switch (variant) {
        case GramVariant::StarLeft: return {adjoint_eval(pj, x) * w * poly_eval(pk, x), scale};
        case GramVariant::StarRight: return {adjoint_eval(pj, x) * w.adjoint() * poly_eval(pk, x), scale};
        case GramVariant::Commutative: return {poly_eval(pj, x) * w * poly_eval(pk, x), scale};
        }
        return {w, scale};
    };
    const QuadratureResult r = integrate_matrix(SampleFunction(f), domain, tol);
    GramEntry e;
    e.j = j;
    e.k = k;
    e.entry = r.value;
    e.error = r.max_error();
    e.converged = r.converged;
    e.vanishing = r.value.cwiseAbs().maxCoeff() <= kVanishingFactor * e.error;
    return e;
}

void check_gram_inputs(const FamilyCache& cache, const Weight& weight, GramVariant variant)
{
    if (cache.spec.dim() != weight.spec().dim()) throw DimensionError("gram_matrix: weight and family dimensions differ");
    if (variant == GramVariant::Commutative && !weight.spec().commuting())
        throw PreconditionError("gram_matrix: commutative variant requires commuting L1, L2");
}

} // namespace

GramReport gram_matrix_serial(const FamilyCache& cache, const Weight& weight, GramVariant variant, double tol)
{
    check_gram_inputs(cache, weight, variant);
    const Domain domain = integration_domain(weight);
    GramReport report;
    report.variant = variant;
    report.n_max = cache.n_max();
    for (int j = 0; j <= cache.n_max(); ++j)
        for (int k = 0; k <= cache.n_max(); ++k) report.entries.push_back(gram_entry(cache, weight, domain, variant, j, k, tol));
    return report;
}

GramReport gram_matrix(const FamilyCache& cache, const Weight& weight, GramVariant variant, double tol)
{
    check_gram_inputs(cache, weight, variant);
    const Domain domain = integration_domain(weight);
    const int side = cache.n_max() + 1;
    GramReport report;
    report.variant = variant;
    report.n_max = cache.n_max();
    report.entries.resize(static_cast<size_t>(side * side));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int idx = 0; idx < side * side; ++idx) {
        try {
            report.entries[static_cast<size_t>(idx)] =
                gram_entry(cache, weight, domain, variant, idx / side, idx % side, tol);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return report;
}

double norm_identity_factor(int k, bool with_factorial)
{
    double f = (k % 2 == 0) ? 1.0 : -1.0;
    if (with_factorial)
        for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

NormIdentity norm_identity_check(const FamilyCache& cache, const Weight& weight, int k, double tol)
{
    if (!weight.spec().commuting()) throw PreconditionError("norm_identity_check: requires commuting L1, L2");
    const Domain domain = integration_domain(weight);
    const GramEntry diag = gram_entry(cache, weight, domain, GramVariant::Commutative, k, k, tol);
    const MomentMatrix mk = q_moment(weight, k, tol);
    const Matrix& ck = cache.leading.at(static_cast<size_t>(k));

    NormIdentity out;
    out.k = k;
    out.lhs = diag.entry;
    out.rhs_factorial = norm_identity_factor(k, true) * ck * mk.value;
    out.rhs_plain = norm_identity_factor(k, false) * ck * mk.value;
    const double scale = std::max(norm(out.lhs), std::numeric_limits<double>::min());
    out.gap_factorial = norm(out.lhs - out.rhs_factorial) / scale;
    out.gap_plain = norm(out.lhs - out.rhs_plain) / scale;
    out.quadrature_error = std::max(diag.error, mk.error);
    return out;
}

std::vector<Matrix> expand_by_integrals(const FamilyCache& cache, const Weight& weight, const MatrixPolynomial& p,
                                        double tol)
{
    if (!weight.spec().commuting()) throw PreconditionError("expand_by_integrals: requires commuting L1, L2");
    if (p.degree() > cache.n_max()) throw DomainError("expand_by_integrals: degree exceeds the cached family");
    const Domain domain = integration_domain(weight);
    const int top = std::max(p.degree(), 0);
    std::vector<Matrix> q;
    for (int k = 0; k <= top; ++k) {
        const MatrixPolynomial& pk = cache[k];
        auto f = [&](const Abscissa& a) {
            const Matrix w = weight(a);
            return Sample{poly_eval(pk, a.x) * w * poly_eval(p, a.x),
                          term_magnitude(pk, a.x) * norm(w) * term_magnitude(p, a.x)};
        };
        const QuadratureResult projection = integrate_matrix(SampleFunction(f), domain, tol);
        const Matrix norm_k =
            norm_identity_factor(k) * cache.leading.at(static_cast<size_t>(k)) * q_moment(weight, k, tol).value;
        q.push_back(solve(norm_k, projection.value));
    }
    return q;
}

} // namespace matrod
