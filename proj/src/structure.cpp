#include "matrod/structure.hpp"

#include <algorithm>
#include <sstream>

namespace matrod {

namespace {

Matrix shifted(const ModelSpec& spec, double multiple)
{
    return spec.l1 + multiple * spec.q.sigma * identity(spec.dim());
}

void require_commuting(const ModelSpec& spec, const char* what)
{
    if (!spec.commuting()) {
        std::ostringstream msg;
        msg << what << ": requires commuting L1, L2 (||[L1,L2]|| = " << norm(commutator(spec.l1, spec.l2)) << ")";
        throw PreconditionError(msg.str());
    }
}

} // namespace

RecurrenceCoeffs recurrence_coeffs(const ModelSpec& spec, int n)
{
    if (n < 1) throw DomainError("recurrence_coeffs: n must be at least 1");
    const int d = spec.dim();
    const Matrix id = identity(d);
    const Complex sigma = spec.q.sigma, tau = spec.q.tau, delta = spec.q.delta;
    const double nn = n;
    const Matrix& l1 = spec.l1;
    const Matrix& l2 = spec.l2;

    RecurrenceCoeffs c;
    c.n = n;
    try {
        c.alpha = solve(shifted(spec, 2 * nn + 1) * shifted(spec, 2 * nn + 2), shifted(spec, nn + 1));
        const Matrix mix = 2.0 * (2 * nn + 1) * sigma * l2 + 2.0 * (nn + 1) * tau * l1 +
                           2.0 * (nn + 1) * (2 * nn + 1) * sigma * tau * id + l1 * l2 + l2 * l1;
        c.beta = solve(shifted(spec, 2 * nn), (l2 + tau * id) - mix * c.alpha);
    } catch (const SingularMatrixError& e) {
        std::ostringstream msg;
        msg << "recurrence_coeffs: resonance at n=" << n << ": " << e.what();
        throw ResonanceError(msg.str(), n);
    }
    const Matrix nt = nn * tau * id + l2;
    const Matrix curly = nt * ((nn + 1) * tau * id + l2) + delta * shifted(spec, 2 * (nn + 1));
    c.gamma = -(nn - 1) * delta * id - curly * c.alpha - nt * c.beta;
    return c;
}

Matrix recurrence_alpha_closed_form(const ModelSpec& spec, int n)
{
    const double nn = n;
    return matrix_inverse(shifted(spec, 2 * nn + 1)).inverse * matrix_inverse(shifted(spec, 2 * nn + 2)).inverse *
           shifted(spec, nn + 1);
}

double recurrence_system_residual(const ModelSpec& spec, const RecurrenceCoeffs& c)
{
    const Matrix id = identity(spec.dim());
    const Complex sigma = spec.q.sigma, tau = spec.q.tau, delta = spec.q.delta;
    const double nn = c.n;
    const Matrix& l1 = spec.l1;
    const Matrix& l2 = spec.l2;
    const double r1 = norm(shifted(spec, nn + 1) - shifted(spec, 2 * nn + 1) * shifted(spec, 2 * nn + 2) * c.alpha);
    const Matrix mix = 2.0 * (2 * nn + 1) * sigma * l2 + 2.0 * (nn + 1) * tau * l1 +
                       2.0 * (nn + 1) * (2 * nn + 1) * sigma * tau * id + l1 * l2 + l2 * l1;
    const double r2 = norm(l2 + tau * id - shifted(spec, 2 * nn) * c.beta - mix * c.alpha);
    const Matrix nt = nn * tau * id + l2;
    const Matrix curly = nt * ((nn + 1) * tau * id + l2) + delta * shifted(spec, 2 * (nn + 1));
    const double r3 = norm(-(nn - 1) * delta * id - c.gamma - curly * c.alpha - nt * c.beta);
    return std::max({r1, r2, r3});
}

double recurrence_residual(const FamilyCache& cache, const RecurrenceCoeffs& c)
{
    const int n = c.n;
    if (n < 1 || n + 1 > cache.n_max()) throw DomainError("recurrence_residual: need 1 <= n <= n_max - 1");
    MatrixPolynomial lhs = poly_shift(cache[n]);
    lhs -= poly_right_multiply(cache[n + 1], c.alpha);
    lhs -= poly_right_multiply(cache[n], c.beta);
    lhs -= poly_right_multiply(cache[n - 1], c.gamma);
    return lhs.norm();
}

double recurrence_residual(const FamilyCache& cache, int n)
{
    return recurrence_residual(cache, recurrence_coeffs(cache.spec, n));
}

EigenCheck eigen_check(const ModelSpec& spec, const FamilyCache& cache, int n)
{
    require_commuting(spec, "eigen_check");
    if (n < 0 || n > cache.n_max()) throw DomainError("eigen_check: n outside the cached range");
    EigenCheck out;
    out.eigen_matrix = static_cast<double>(n) * shifted(spec, n + 1.0);
    const MatrixPolynomial& p = cache[n];
    const MatrixPolynomial lhs = apply_operator(spec, 1, poly_derivative(p));
    out.residual = poly_distance(lhs, poly_left_multiply(out.eigen_matrix, p));
    return out;
}

bool LadderCoeffs::scalar(double tol) const
{
    auto is_scalar = [tol](const Matrix& m) {
        const Matrix id = identity(static_cast<int>(m.rows()));
        return norm(m - m(0, 0) * id) <= tol * std::max(1.0, norm(m));
    };
    return is_scalar(a) && is_scalar(b) && is_scalar(c) && is_scalar(g);
}

LadderCoeffs ladder_coeffs(const ModelSpec& spec, int n)
{
    require_commuting(spec, "ladder_coeffs");
    if (n < 1) throw DomainError("ladder_coeffs: n must be at least 1");
    const Matrix id = identity(spec.dim());
    const Complex sigma = spec.q.sigma, tau = spec.q.tau;
    // The ladder system writes gamma for the constant term of Q.
    const Complex gamma = spec.q.delta;
    const double nn = n;
    const Matrix& l1 = spec.l1;
    const Matrix& l2 = spec.l2;

    LadderCoeffs out;
    out.n = n;
    out.g = nn * (4.0 * sigma * gamma - tau * tau) * shifted(spec, nn) + gamma * l1 * l1 + sigma * l2 * l2 - tau * l1 * l2;
    Matrix g_inv;
    try {
        g_inv = matrix_inverse(out.g, 1e-12).inverse;
    } catch (const SingularMatrixError&) {
        std::ostringstream msg;
        msg << "ladder degenerate: G is singular at n=" << n;
        throw SingularMatrixError(msg.str());
    }
    out.b = (sigma * l2 - tau * nn * sigma * id - tau * l1) * g_inv;
    out.c = (1.0 / nn) * shifted(spec, 2 * nn) * g_inv;
    out.a = -nn * sigma * out.c;
    for (int k = 1; k <= n; ++k) out.thetas.push_back(2.0 * sigma * static_cast<double>(k) * out.c + out.c * l1 - out.a);
    return out;
}

double ladder_system_residual(const ModelSpec& spec, const LadderCoeffs& c)
{
    const Matrix id = identity(spec.dim());
    const Complex sigma = spec.q.sigma, tau = spec.q.tau, gamma = spec.q.delta;
    const double nn = c.n;
    const Matrix f = shifted(spec, nn + 1);
    const double r1 = norm(f * (c.a + nn * sigma * c.c));
    const double r2 = norm((tau * id + spec.l2) * c.a + shifted(spec, 2 * nn) * c.b + nn * tau * f * c.c);
    const double r3 = norm(-gamma * (nn - 1) * c.a + (nn * tau * id + spec.l2) * c.b + nn * gamma * f * c.c - id);
    return std::max({r1, r2, r3});
}

MatrixPolynomial ladder_apply(const ModelSpec& spec, const LadderCoeffs& coeffs, const MatrixPolynomial& p)
{
    MatrixPolynomial out = poly_shift(poly_left_multiply(coeffs.a, p));
    out += poly_left_multiply(coeffs.b, p);
    out += poly_left_multiply(coeffs.c, poly_mul_by_scalar_poly(spec.q, poly_derivative(p)));
    return out;
}

} // namespace matrod
