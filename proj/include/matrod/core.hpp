#ifndef MATROD_CORE_HPP
#define MATROD_CORE_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace matrod {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// A matrix that has to be inverted is singular within tolerance.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Raised when L1 + k*sigma is singular; carries the offending k.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, int k) : Error(what), k_(k) {}
    int k() const noexcept { return k_; }

private:
    int k_;
};

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

inline constexpr double kInvertibilityTol = 1e-10;
inline constexpr double kTightnessTol = 1e-13;

// ---------------------------------------------------------------------------
// Scalar quadratic Q(x) = sigma x^2 + tau x + delta
// ---------------------------------------------------------------------------

struct Quadratic {
    Complex sigma{0.0};
    Complex tau{0.0};
    Complex delta{0.0};

    int degree() const noexcept
    {
        if (sigma != Complex(0.0)) return 2;
        if (tau != Complex(0.0)) return 1;
        return 0;
    }

    Complex operator()(Complex x) const noexcept { return (sigma * x + tau) * x + delta; }
    Complex derivative(Complex x) const noexcept { return 2.0 * sigma * x + tau; }

    /// Coefficients lowest first: {delta, tau, sigma}.
    std::vector<Complex> coefficients() const { return {delta, tau, sigma}; }
};

// ---------------------------------------------------------------------------
// Matrix helpers
// ---------------------------------------------------------------------------

Matrix identity(int d);
Matrix zeros(int d);
bool all_finite(const Matrix& m);

/// Frobenius norm; used for every "coefficient-wise" norm in the library.
double norm(const Matrix& m);

/// Induced 1-norm (max column sum), the submultiplicative norm used by matrix_exp.
double norm1(const Matrix& m);

double smallest_singular_value(const Matrix& m);
double condition_number(const Matrix& m);

Matrix commutator(const Matrix& a, const Matrix& b);

struct InverseResult {
    Matrix inverse;
    double condition = 0.0;
};

/// Throws SingularMatrixError when sigma_min <= tol * sigma_max.
InverseResult matrix_inverse(const Matrix& m, double tol = kInvertibilityTol);

/// Solves a * x = b through a pivoted LU after the same singularity test.
Matrix solve(const Matrix& a, const Matrix& b, double tol = kInvertibilityTol);

/// exp(M) by scaling and squaring with the degree-13 Pade approximant.
Matrix matrix_exp(const Matrix& m);

/// x^M = exp(M ln x) for real x > 0.
Matrix matrix_power(const Matrix& m, double x);

/// True when a is upper-triangular Toeplitz (the 2x2 algebra alpha I + beta N).
bool in_nilpotent_algebra(const Matrix& a, double tol);

// ---------------------------------------------------------------------------
// Matrix-coefficient polynomials
// ---------------------------------------------------------------------------

/// Polynomial with d x d complex matrix coefficients, lowest power first.
/// The stored degree is always tight; the zero polynomial has no coefficients.
class MatrixPolynomial {
public:
    explicit MatrixPolynomial(int dim);
    MatrixPolynomial(int dim, std::vector<Matrix> coeffs);

    static MatrixPolynomial constant(const Matrix& c);
    static MatrixPolynomial identity(int dim);
    /// c * x^power
    static MatrixPolynomial monomial(const Matrix& c, int power);

    int dim() const noexcept { return dim_; }
    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }

    const std::vector<Matrix>& coeffs() const noexcept { return coeffs_; }
    /// Coefficient of x^k; zero matrix beyond the degree.
    Matrix coeff(int k) const;
    /// Top coefficient; zero matrix for the zero polynomial.
    Matrix leading() const;

    /// Largest coefficient norm.
    double norm() const;

    Matrix operator()(Complex x) const;

    MatrixPolynomial& operator+=(const MatrixPolynomial& other);
    MatrixPolynomial& operator-=(const MatrixPolynomial& other);
    MatrixPolynomial& operator*=(Complex s);

private:
    void normalize();

    int dim_;
    std::vector<Matrix> coeffs_;
};

MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial& b);
MatrixPolynomial operator-(MatrixPolynomial a, const MatrixPolynomial& b);
MatrixPolynomial operator*(Complex s, MatrixPolynomial p);

Matrix poly_eval(const MatrixPolynomial& p, Complex x);
MatrixPolynomial poly_derivative(const MatrixPolynomial& p);
MatrixPolynomial poly_add(const MatrixPolynomial& a, const MatrixPolynomial& b);
/// m * p(x), coefficientwise from the left.
MatrixPolynomial poly_left_multiply(const Matrix& m, const MatrixPolynomial& p);
/// p(x) * m, coefficientwise from the right.
MatrixPolynomial poly_right_multiply(const MatrixPolynomial& p, const Matrix& m);
/// s(x) p(x) for a scalar polynomial s given lowest power first.
MatrixPolynomial poly_mul_by_scalar_poly(const std::vector<Complex>& s, const MatrixPolynomial& p);
MatrixPolynomial poly_mul_by_scalar_poly(const Quadratic& q, const MatrixPolynomial& p);
/// x * p(x)
MatrixPolynomial poly_shift(const MatrixPolynomial& p);

/// Max coefficient norm of a - b.
double poly_distance(const MatrixPolynomial& a, const MatrixPolynomial& b);

// ---------------------------------------------------------------------------
// Model specification
// ---------------------------------------------------------------------------

/// The triple (Q, L1, L2) together with the working degree horizon N.
struct ModelSpec {
    Quadratic q;
    Matrix l1;
    Matrix l2;
    int max_degree = 8;

    /// Checks shapes and finiteness; throws DimensionError / DomainError.
    ModelSpec(Quadratic q, Matrix l1, Matrix l2, int max_degree);

    int dim() const noexcept { return static_cast<int>(l1.rows()); }
    bool commuting(double rel_tol = 1e-12) const;
    /// max(1, ||L1||, ||L2||); the reference scale for relative tolerances.
    double scale() const;
};

struct ResonanceViolation {
    int k = 0;
    double smallest_singular_value = 0.0;
    std::string message;
};

struct ValidationReport {
    std::vector<ResonanceViolation> violations;
    bool ok() const noexcept { return violations.empty(); }
    std::string summary() const;
};

/// Nonresonance: L1 + k sigma invertible for k = 1..2N.
ValidationReport validate_model(const ModelSpec& spec);

/// Throws ResonanceError naming the first failing k.
void require_valid(const ModelSpec& spec);

} // namespace matrod

#endif
