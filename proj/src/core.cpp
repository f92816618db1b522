#include "matrod/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace matrod {

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix zeros(int d) { return Matrix::Zero(d, d); }

bool all_finite(const Matrix& m)
{
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

double norm(const Matrix& m) { return m.norm(); }

double norm1(const Matrix& m)
{
    double best = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).cwiseAbs().sum());
    return best;
}

double smallest_singular_value(const Matrix& m)
{
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().minCoeff();
}

double condition_number(const Matrix& m)
{
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s.minCoeff();
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s.maxCoeff() / smin;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

InverseResult matrix_inverse(const Matrix& m, double tol)
{
    if (m.rows() != m.cols()) throw DimensionError("matrix_inverse: matrix is not square");
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smax = s.maxCoeff();
    const double smin = s.minCoeff();
    if (smax == 0.0 || smin <= tol * smax) {
        std::ostringstream msg;
        msg << "matrix_inverse: singular matrix (sigma_min=" << smin << ", sigma_max=" << smax << ")";
        throw SingularMatrixError(msg.str());
    }
    return {m.fullPivLu().inverse(), smax / smin};
}

Matrix solve(const Matrix& a, const Matrix& b, double tol)
{
    if (a.rows() != a.cols() || a.rows() != b.rows()) throw DimensionError("solve: shape mismatch");
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.maxCoeff() == 0.0 || s.minCoeff() <= tol * s.maxCoeff()) {
        std::ostringstream msg;
        msg << "solve: singular system matrix (sigma_min=" << s.minCoeff() << ")";
        throw SingularMatrixError(msg.str());
    }
    return a.fullPivLu().solve(b);
}

// Higham, "The scaling and squaring method for the matrix exponential revisited".
Matrix matrix_exp(const Matrix& m)
{
    if (m.rows() != m.cols()) throw DimensionError("matrix_exp: matrix is not square");
    if (!all_finite(m)) throw DomainError("matrix_exp: non-finite input");

    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    static constexpr double theta13 = 5.371920351148152;

    const int d = static_cast<int>(m.rows());
    const double n1 = norm1(m);
    int squarings = 0;
    if (n1 > theta13) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(n1 / theta13))));
    const Matrix a = m / std::ldexp(1.0, squarings);

    const Matrix id = identity(d);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                           b[3] * a2 + b[1] * id;
    const Matrix u = a * u_inner;
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                     b[2] * a2 + b[0] * id;

    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;

    if (!all_finite(r)) throw OverflowError("matrix_exp: result exceeds the floating range");
    return r;
}

Matrix matrix_power(const Matrix& m, double x)
{
    if (!(x > 0.0)) throw DomainError("matrix_power: base must be positive");
    return matrix_exp(m * std::log(x));
}

bool in_nilpotent_algebra(const Matrix& a, double tol)
{
    if (a.rows() != 2 || a.cols() != 2) return false;
    const double s = std::max(1.0, norm(a));
    return std::abs(a(1, 0)) <= tol * s && std::abs(a(0, 0) - a(1, 1)) <= tol * s;
}

// ---------------------------------------------------------------------------
// MatrixPolynomial
// ---------------------------------------------------------------------------

MatrixPolynomial::MatrixPolynomial(int dim) : dim_(dim)
{
    if (dim < 1) throw DimensionError("MatrixPolynomial: dimension must be positive");
}

MatrixPolynomial::MatrixPolynomial(int dim, std::vector<Matrix> coeffs) : dim_(dim), coeffs_(std::move(coeffs))
{
    if (dim < 1) throw DimensionError("MatrixPolynomial: dimension must be positive");
    for (const auto& c : coeffs_)
        if (c.rows() != dim || c.cols() != dim) throw DimensionError("MatrixPolynomial: coefficient shape mismatch");
    normalize();
}

MatrixPolynomial MatrixPolynomial::constant(const Matrix& c)
{
    return MatrixPolynomial(static_cast<int>(c.rows()), {c});
}

MatrixPolynomial MatrixPolynomial::identity(int dim) { return constant(matrod::identity(dim)); }

MatrixPolynomial MatrixPolynomial::monomial(const Matrix& c, int power)
{
    const int d = static_cast<int>(c.rows());
    std::vector<Matrix> coeffs(static_cast<size_t>(power) + 1, zeros(d));
    coeffs.back() = c;
    return MatrixPolynomial(d, std::move(coeffs));
}

Matrix MatrixPolynomial::coeff(int k) const
{
    if (k < 0 || k > degree()) return zeros(dim_);
    return coeffs_[static_cast<size_t>(k)];
}

Matrix MatrixPolynomial::leading() const { return is_zero() ? zeros(dim_) : coeffs_.back(); }

double MatrixPolynomial::norm() const
{
    double best = 0.0;
    for (const auto& c : coeffs_) best = std::max(best, c.norm());
    return best;
}

Matrix MatrixPolynomial::operator()(Complex x) const { return poly_eval(*this, x); }

void MatrixPolynomial::normalize()
{
    const double cutoff = kTightnessTol * norm();
    while (!coeffs_.empty() && coeffs_.back().norm() <= cutoff) coeffs_.pop_back();
}

MatrixPolynomial& MatrixPolynomial::operator+=(const MatrixPolynomial& other)
{
    if (other.dim_ != dim_) throw DimensionError("polynomial addition: dimension mismatch");
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), zeros(dim_));
    for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    normalize();
    return *this;
}

MatrixPolynomial& MatrixPolynomial::operator-=(const MatrixPolynomial& other)
{
    if (other.dim_ != dim_) throw DimensionError("polynomial subtraction: dimension mismatch");
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), zeros(dim_));
    for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
    normalize();
    return *this;
}

MatrixPolynomial& MatrixPolynomial::operator*=(Complex s)
{
    for (auto& c : coeffs_) c *= s;
    normalize();
    return *this;
}

MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial& b) { return a += b; }
MatrixPolynomial operator-(MatrixPolynomial a, const MatrixPolynomial& b) { return a -= b; }
MatrixPolynomial operator*(Complex s, MatrixPolynomial p) { return p *= s; }

Matrix poly_eval(const MatrixPolynomial& p, Complex x)
{
    Matrix acc = zeros(p.dim());
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = (acc * x + *it).eval();
    return acc;
}

MatrixPolynomial poly_derivative(const MatrixPolynomial& p)
{
    if (p.degree() < 1) return MatrixPolynomial(p.dim());
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(p.degree()));
    for (int k = 1; k <= p.degree(); ++k) out.push_back(static_cast<double>(k) * p.coeffs()[static_cast<size_t>(k)]);
    return MatrixPolynomial(p.dim(), std::move(out));
}

MatrixPolynomial poly_add(const MatrixPolynomial& a, const MatrixPolynomial& b) { return a + b; }

MatrixPolynomial poly_left_multiply(const Matrix& m, const MatrixPolynomial& p)
{
    if (m.rows() != p.dim() || m.cols() != p.dim()) throw DimensionError("poly_left_multiply: dimension mismatch");
    std::vector<Matrix> out;
    out.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) out.push_back(m * c);
    return MatrixPolynomial(p.dim(), std::move(out));
}

MatrixPolynomial poly_right_multiply(const MatrixPolynomial& p, const Matrix& m)
{
    if (m.rows() != p.dim() || m.cols() != p.dim()) throw DimensionError("poly_right_multiply: dimension mismatch");
    std::vector<Matrix> out;
    out.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) out.push_back(c * m);
    return MatrixPolynomial(p.dim(), std::move(out));
}

MatrixPolynomial poly_mul_by_scalar_poly(const std::vector<Complex>& s, const MatrixPolynomial& p)
{
    if (p.is_zero() || s.empty()) return MatrixPolynomial(p.dim());
    std::vector<Matrix> out(p.coeffs().size() + s.size() - 1, zeros(p.dim()));
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == Complex(0.0)) continue;
        for (size_t k = 0; k < p.coeffs().size(); ++k) out[i + k] += s[i] * p.coeffs()[k];
    }
    return MatrixPolynomial(p.dim(), std::move(out));
}

MatrixPolynomial poly_mul_by_scalar_poly(const Quadratic& q, const MatrixPolynomial& p)
{
    return poly_mul_by_scalar_poly(q.coefficients(), p);
}

MatrixPolynomial poly_shift(const MatrixPolynomial& p)
{
    if (p.is_zero()) return p;
    std::vector<Matrix> out;
    out.reserve(p.coeffs().size() + 1);
    out.push_back(zeros(p.dim()));
    for (const auto& c : p.coeffs()) out.push_back(c);
    return MatrixPolynomial(p.dim(), std::move(out));
}

double poly_distance(const MatrixPolynomial& a, const MatrixPolynomial& b)
{
    if (a.dim() != b.dim()) throw DimensionError("poly_distance: dimension mismatch");
    const int top = std::max(a.degree(), b.degree());
    double best = 0.0;
    for (int k = 0; k <= top; ++k) best = std::max(best, (a.coeff(k) - b.coeff(k)).norm());
    return best;
}

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

ModelSpec::ModelSpec(Quadratic q_, Matrix l1_, Matrix l2_, int max_degree_)
    : q(q_), l1(std::move(l1_)), l2(std::move(l2_)), max_degree(max_degree_)
{
    if (l1.rows() < 1 || l1.rows() != l1.cols()) throw DimensionError("ModelSpec: L1 must be a non-empty square matrix");
    if (l2.rows() != l1.rows() || l2.cols() != l1.cols()) throw DimensionError("ModelSpec: L2 must have the shape of L1");
    if (max_degree < 1) throw DomainError("ModelSpec: max_degree must be positive");
    if (!all_finite(l1) || !all_finite(l2)) throw DomainError("ModelSpec: non-finite matrix entries");
    for (Complex c : {q.sigma, q.tau, q.delta})
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("ModelSpec: non-finite Q coefficient");
}

bool ModelSpec::commuting(double rel_tol) const
{
    return commutator(l1, l2).norm() <= rel_tol * std::max(1.0, l1.norm() * l2.norm());
}

double ModelSpec::scale() const { return std::max({1.0, l1.norm(), l2.norm()}); }

std::string ValidationReport::summary() const
{
    if (ok()) return "nonresonant";
    std::ostringstream out;
    out << "resonance: L1 + k*sigma singular for k =";
    for (const auto& v : violations) out << ' ' << v.k;
    return out.str();
}

ValidationReport validate_model(const ModelSpec& spec)
{
    ValidationReport report;
    const Matrix id = identity(spec.dim());
    for (int k = 1; k <= 2 * spec.max_degree; ++k) {
        const Matrix m = spec.l1 + static_cast<double>(k) * spec.q.sigma * id;
        Eigen::JacobiSVD<Matrix> svd(m);
        const double smax = svd.singularValues().maxCoeff();
        const double smin = svd.singularValues().minCoeff();
        if (smax == 0.0 || smin <= kInvertibilityTol * smax) {
            std::ostringstream msg;
            msg << "L1 + " << k << "*sigma is singular (sigma_min=" << smin << ")";
            report.violations.push_back({k, smin, msg.str()});
        }
    }
    return report;
}

void require_valid(const ModelSpec& spec)
{
    const auto report = validate_model(spec);
    if (!report.ok()) throw ResonanceError(report.violations.front().message, report.violations.front().k);
}

} // namespace matrod
