// Independent reference data for the test suites. Nothing here calls the
// operator-product code: classical polynomials come from their textbook
// recurrences and explicit sums, expanded into monomials.
#ifndef MATROD_TESTS_ORACLES_HPP
#define MATROD_TESTS_ORACLES_HPP

#include <cmath>
#include <random>
#include <vector>

#include "matrod/core.hpp"

namespace oracle {

using Coeffs = std::vector<long double>;  // lowest power first

inline Coeffs poly_mul(const Coeffs& a, const Coeffs& b)
{
    Coeffs out(a.size() + b.size() - 1, 0.0L);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline long double factorial(int n)
{
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Generalized binomial C(a, m) for real a and integer m >= 0.
inline long double binom(long double a, int m)
{
    long double out = 1.0L;
    for (int i = 1; i <= m; ++i) out *= (a - m + i) / i;
    return out;
}

/// Physicists' Hermite H_n from H_{n+1} = 2x H_n - 2n H_{n-1}.
inline Coeffs hermite(int n)
{
    Coeffs prev{1.0L}, cur{0.0L, 2.0L};
    if (n == 0) return prev;
    for (int k = 1; k < n; ++k) {
        Coeffs next(static_cast<size_t>(k + 2), 0.0L);
        for (size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0L * cur[i];
        for (size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0L * k * prev[i];
        prev = cur;
        cur = next;
    }
    return cur;
}

/// L_n^(a)(x) = sum_k (-1)^k C(n+a, n-k) x^k / k!
inline Coeffs laguerre(int n, long double a)
{
    Coeffs out(static_cast<size_t>(n + 1));
    for (int k = 0; k <= n; ++k) out[static_cast<size_t>(k)] = ((k % 2) ? -1.0L : 1.0L) * binom(n + a, n - k) / factorial(k);
    return out;
}

/// P_n^(a,b)(x) = sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)
inline Coeffs jacobi(int n, long double a, long double b)
{
    Coeffs out(static_cast<size_t>(n + 1), 0.0L);
    for (int s = 0; s <= n; ++s) {
        Coeffs term{binom(n + a, n - s) * binom(n + b, s)};
        for (int i = 0; i < s; ++i) term = poly_mul(term, {-0.5L, 0.5L});
        for (int i = 0; i < n - s; ++i) term = poly_mul(term, {0.5L, 0.5L});
        for (size_t i = 0; i < term.size(); ++i) out[i] += term[i];
    }
    return out;
}

inline Coeffs scaled(Coeffs c, long double s)
{
    for (auto& v : c) v *= s;
    return c;
}

/// Normalizations of W^-1 (Q^n W)^(n) for the classical data, from the
/// classical Rodrigues formulas:
///   Q = 1, W = exp(-x^2):             (-1)^n H_n
///   Q = x, W = x^a exp(-x):            n! L_n^(a)
///   Q = x^2-1, W = (1-x)^a (1+x)^b:    2^n n! P_n^(a,b)
inline Coeffs hermite_rodrigues(int n) { return scaled(hermite(n), (n % 2) ? -1.0L : 1.0L); }
inline Coeffs laguerre_rodrigues(int n, long double a) { return scaled(laguerre(n, a), factorial(n)); }
inline Coeffs jacobi_rodrigues(int n, long double a, long double b)
{
    return scaled(jacobi(n, a, b), std::ldexp(factorial(n), n));
}

/// Gamma-integral oracle: int_0^inf p(x) e^{-x} dx = sum_k p_k k!
inline long double laguerre_weight_integral(const Coeffs& p)
{
    long double s = 0.0L;
    for (size_t k = 0; k < p.size(); ++k) s += p[k] * factorial(static_cast<int>(k));
    return s;
}

} // namespace oracle

namespace fixture {

using matrod::Complex;
using matrod::Matrix;
using matrod::ModelSpec;
using matrod::Quadratic;

inline Matrix scalar(Complex v)
{
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

inline ModelSpec hermite(int n_max = 12) { return ModelSpec({0.0, 0.0, 1.0}, scalar(-2.0), scalar(0.0), n_max); }
inline ModelSpec laguerre(double a, int n_max = 12) { return ModelSpec({0.0, 1.0, 0.0}, scalar(-1.0), scalar(a), n_max); }
inline ModelSpec jacobi(double a, double b, int n_max = 12)
{
    return ModelSpec({1.0, 0.0, -1.0}, scalar(a + b), scalar(a - b), n_max);
}
inline ModelSpec legendre(int n_max = 12) { return jacobi(0.0, 0.0, n_max); }

/// a I + b N in the 2x2 algebra with N^2 = 0.
inline Matrix algebra(Complex a, Complex b)
{
    Matrix m(2, 2);
    m << a, b, 0.0, a;
    return m;
}

/// Q = x with L1 = a1 I + b1 N (a1 < 0) and L2 = a2 I + b2 N (a2 > 0).
inline ModelSpec algebra_spec(int n_max = 8)
{
    return ModelSpec({0.0, 1.0, 0.0}, algebra(-1.0, 0.3), algebra(0.7, -0.4), n_max);
}

inline Matrix random_matrix(std::mt19937_64& rng, int d, double spread = 1.0, bool complex_entries = true)
{
    std::uniform_real_distribution<double> u(-spread, spread);
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(u(rng), complex_entries ? u(rng) : 0.0);
    return m;
}

inline matrod::MatrixPolynomial random_poly(std::mt19937_64& rng, int d, int degree)
{
    std::vector<Matrix> c;
    for (int k = 0; k <= degree; ++k) c.push_back(random_matrix(rng, d));
    return matrod::MatrixPolynomial(d, std::move(c));
}

/// Min over k = 1..2N of sigma_min(L1 + k sigma).
inline double resonance_margin(const ModelSpec& spec)
{
    double margin = INFINITY;
    for (int k = 1; k <= 2 * spec.max_degree; ++k) {
        const Matrix m = spec.l1 + static_cast<double>(k) * spec.q.sigma * matrod::identity(spec.dim());
        margin = std::min(margin, matrod::smallest_singular_value(m));
    }
    return margin;
}

/// Random spec with well-separated resonances; general Q, generally noncommuting data.
inline ModelSpec random_spec(std::mt19937_64& rng, int d, int n_max)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        const Quadratic q{u(rng), u(rng), u(rng)};
        ModelSpec spec(q, random_matrix(rng, d, 1.5), random_matrix(rng, d), n_max);
        if (resonance_margin(spec) > 0.5) return spec;
    }
}

/// Commuting data S diag(a) S^-1, S diag(b) S^-1 with a random Q of a chosen shape.
inline ModelSpec random_commuting_spec(std::mt19937_64& rng, int d, int n_max)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Matrix s = random_matrix(rng, d) + 2.0 * matrod::identity(d);
        const Matrix s_inv = s.inverse();
        Matrix a = Matrix::Zero(d, d), b = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            a(i, i) = Complex(u(rng) * 2.0, u(rng) * 0.5);
            b(i, i) = Complex(u(rng), u(rng) * 0.5);
        }
        const Quadratic q{u(rng), u(rng), u(rng)};
        ModelSpec spec(q, s * a * s_inv, s * b * s_inv, n_max);
        if (resonance_margin(spec) > 0.5) return spec;
    }
}

} // namespace fixture

#endif
