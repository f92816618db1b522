#include "matrod/rodrigues.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <sstream>

namespace matrod {

MatrixPolynomial apply_operator(const ModelSpec& spec, int k, const MatrixPolynomial& r)
{
    if (r.dim() != spec.dim()) throw DimensionError("apply_operator: polynomial dimension does not match the spec");
    const Quadratic& q = spec.q;
    const double kk = static_cast<double>(k);
    MatrixPolynomial out = poly_mul_by_scalar_poly(std::vector<Complex>{kk * q.tau, 2.0 * kk * q.sigma}, r);
    out += poly_shift(poly_left_multiply(spec.l1, r));
    out += poly_left_multiply(spec.l2, r);
    out += poly_mul_by_scalar_poly(q, poly_derivative(r));
    return out;
}

CommutationResiduals commutation_residuals(const ModelSpec& spec, int k, const MatrixPolynomial& r)
{
    const Quadratic& q = spec.q;
    const MatrixPolynomial ar = apply_operator(spec, k, r);
    const MatrixPolynomial qr = poly_mul_by_scalar_poly(q, r);
    CommutationResiduals out;
    out.shift = poly_distance(apply_operator(spec, k, poly_shift(r)), poly_shift(ar) + qr);
    out.q_multiply = poly_distance(poly_mul_by_scalar_poly(q, ar), apply_operator(spec, k - 1, qr));
    const Matrix twist = 2.0 * static_cast<double>(k) * q.sigma * identity(spec.dim()) + spec.l1;
    out.derivative = poly_distance(poly_derivative(ar),
                                   apply_operator(spec, k + 1, poly_derivative(r)) + poly_left_multiply(twist, r));
    return out;
}

MatrixPolynomial generate_polynomial(const ModelSpec& spec, int n)
{
    MatrixPolynomial p = MatrixPolynomial::identity(spec.dim());
    for (int k = n; k >= 1; --k) p = apply_operator(spec, k, p);
    return p;
}

Matrix leading_coefficient(const ModelSpec& spec, int n)
{
    const int d = spec.dim();
    Matrix c = identity(d);
    for (int j = 2 * n; j >= n + 1; --j) c = c * (spec.l1 + static_cast<double>(j) * spec.q.sigma * identity(d));
    return c;
}

namespace {

void check_horizon(const ModelSpec& spec, int n_max)
{
    if (n_max < 0) throw DomainError("generate_family: n_max must be non-negative");
    if (n_max > spec.max_degree) {
        std::ostringstream msg;
        msg << "generate_family: n_max=" << n_max << " exceeds the spec horizon " << spec.max_degree;
        throw DomainError(msg.str());
    }
    require_valid(spec);
}

void check_degrees(const FamilyCache& cache)
{
    for (int n = 0; n <= cache.n_max(); ++n)
        if (cache.polys[static_cast<size_t>(n)].degree() != n) {
            std::ostringstream msg;
            msg << "generate_family: P_" << n << " has degree " << cache.polys[static_cast<size_t>(n)].degree();
            throw Error(msg.str());
        }
}

} // namespace

FamilyCache generate_family_serial(const ModelSpec& spec, int n_max)
{
    check_horizon(spec, n_max);
    FamilyCache cache{spec, {}, {}};
    for (int n = 0; n <= n_max; ++n) {
        cache.polys.push_back(generate_polynomial(spec, n));
        cache.leading.push_back(leading_coefficient(spec, n));
    }
    check_degrees(cache);
    return cache;
}

FamilyCache generate_family(const ModelSpec& spec, int n_max)
{
    check_horizon(spec, n_max);
    const int d = spec.dim();
    FamilyCache cache{spec, std::vector<MatrixPolynomial>(static_cast<size_t>(n_max) + 1, MatrixPolynomial(d)),
                      std::vector<Matrix>(static_cast<size_t>(n_max) + 1)};
    std::exception_ptr failure;
    // Cost grows like n^2, so hand out the high degrees first.
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i <= n_max; ++i) {
        const int n = n_max - i;
        try {
            cache.polys[static_cast<size_t>(n)] = generate_polynomial(spec, n);
            cache.leading[static_cast<size_t>(n)] = leading_coefficient(spec, n);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    check_degrees(cache);
    return cache;
}

std::vector<Matrix> expand_in_basis(const FamilyCache& cache, const MatrixPolynomial& p)
{
    if (p.dim() != cache.spec.dim()) throw DimensionError("expand_in_basis: dimension mismatch");
    if (p.degree() > cache.n_max()) {
        std::ostringstream msg;
        msg << "expand_in_basis: degree " << p.degree() << " exceeds cached degree " << cache.n_max();
        throw DomainError(msg.str());
    }
    const int top = std::max(p.degree(), 0);
    std::vector<Matrix> q(static_cast<size_t>(top) + 1, zeros(p.dim()));
    // Track the remainder densely so round-off in dropped top terms cannot shift the degree.
    std::vector<Matrix> rem(static_cast<size_t>(top) + 1, zeros(p.dim()));
    for (int k = 0; k <= p.degree(); ++k) rem[static_cast<size_t>(k)] = p.coeff(k);
    for (int k = top; k >= 0; --k) {
        const Matrix& ck = cache.leading[static_cast<size_t>(k)];
        q[static_cast<size_t>(k)] = solve(ck, rem[static_cast<size_t>(k)]);
        const MatrixPolynomial& pk = cache[k];
        for (int j = 0; j <= k; ++j) rem[static_cast<size_t>(j)] -= pk.coeff(j) * q[static_cast<size_t>(k)];
    }
    return q;
}

MatrixPolynomial resum(const FamilyCache& cache, const std::vector<Matrix>& q)
{
    MatrixPolynomial out(cache.spec.dim());
    for (size_t k = 0; k < q.size(); ++k) out += poly_right_multiply(cache[static_cast<int>(k)], q[k]);
    return out;
}

namespace {

// Central stencils of order 6 for the first three derivatives (offsets -4..4).
constexpr std::array<std::array<double, 9>, 3> kStencils = {{
    {0.0, -1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60, 0.0},
    {0.0, 1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90, 0.0},
    {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240},
}};

} // namespace

Matrix rodrigues_numeric_oracle(const ModelSpec& spec, const Weight& weight, int n, double x)
{
    if (n < 1 || n > 3) throw DomainError("rodrigues_numeric_oracle: n must be 1, 2 or 3");
    double room = 1.0;
    switch (weight.interval()) {
    case Interval::HalfLine: room = x; break;
    case Interval::Symmetric: room = 1.0 - std::abs(x); break;
    case Interval::RealLine: room = 1.0; break;
    }
    if (!(room > 0.0)) throw DomainError("rodrigues_numeric_oracle: x outside the interior of J");
    const double h = std::min(0.05, room / 5.0);
    if (h < 1e-6) throw DomainError("rodrigues_numeric_oracle: step underflow near the endpoint");

    auto g = [&](double t) { return Matrix(std::pow(spec.q(t), n) * weight(t)); };
    const auto& stencil = kStencils[static_cast<size_t>(n - 1)];
    auto derivative = [&](double step) {
        Matrix acc = zeros(spec.dim());
        for (int i = 0; i < 9; ++i)
            if (stencil[static_cast<size_t>(i)] != 0.0) acc += stencil[static_cast<size_t>(i)] * g(x + (i - 4) * step);
        return Matrix(acc / std::pow(step, n));
    };
    // One Richardson step removes the h^6 term.
    const Matrix coarse = derivative(h);
    const Matrix fine = derivative(0.5 * h);
    const Matrix refined = (64.0 * fine - coarse) / 63.0;
    return solve(weight(x), refined);
}

} // namespace matrod
