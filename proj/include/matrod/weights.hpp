#ifndef MATROD_WEIGHTS_HPP
#define MATROD_WEIGHTS_HPP

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "matrod/core.hpp"

namespace matrod {

/// Orthogonality interval J. The real line is used for constant Q.
enum class Interval { HalfLine, Symmetric, RealLine };

enum class WeightForm { ClosedCommutative, FrobeniusSeries, SelfAdjoint2D };

/// Regular singular point used as the expansion center of a Frobenius series.
enum class Anchor { Zero, PlusOne, MinusOne };

enum class QKind { X, XSquaredMinusOne };

std::string to_string(Interval interval);
std::string to_string(WeightForm form);
std::string to_string(Anchor anchor);

/// Interval matching the shape of Q: delta, tau*x or sigma*(x^2 - 1).
/// Throws PreconditionError for any other Q.
Interval interval_for(const Quadratic& q);

/// Smooth global coordinate u on the interior of J: ln x, atanh x, or x.
double to_coordinate(Interval interval, double x);
double from_coordinate(Interval interval, double u);
/// dx/du at coordinate u.
double coordinate_jacobian(Interval interval, double u);

/// A point of J together with its distances to the endpoints. Near a singular
/// endpoint the distance is carried exactly instead of being recovered as 1 -+ x.
struct Abscissa {
    double x = 0.0;
    double from_left = 0.0;   // x - a; x itself on [0, inf), +inf on the real line
    double from_right = 0.0;  // b - x; +inf when J is unbounded above

    static Abscissa at(Interval interval, double x);
};

/// Smooth coordinate of an abscissa, computed from the endpoint distances.
double to_coordinate(Interval interval, const Abscissa& p);

/// Interior sample points: log-spaced on [0, inf), tanh-spaced on [-1, 1].
std::vector<double> interior_grid(Interval interval, int count);

/// Singular exponent of W at a finite endpoint of J (W ~ |x - e|^E).
struct EndpointExponent {
    double endpoint = 0.0;
    Matrix exponent;
};

/// Endpoint exponents and, for unbounded J, the matrix whose spectrum controls decay.
struct IntegrabilityData {
    Interval interval = Interval::HalfLine;
    std::vector<EndpointExponent> endpoints;
    std::optional<Matrix> decay;
};

IntegrabilityData integrability_data(const ModelSpec& spec);

/// Truncated Frobenius solution W(x) = t^E Phi(t), t the distance to the anchor.
/// Coefficients are stored in the original basis; the Sylvester steps
/// n Phi_n + E Phi_n - Phi_n E = sum_m Phi_{n-1-m} G_m define them.
struct FrobeniusSeries {
    Anchor anchor = Anchor::Zero;
    Matrix exponent;
    std::vector<Matrix> forcing;  // G_0, G_1, ...
    std::vector<Matrix> phi;      // Phi_0 = I, ..., Phi_M
    int truncation = 0;
    double trust_radius = 0.0;

    double distance(double x) const;
    /// Phi(t) by Horner.
    Matrix phi_at(double t) const;
    /// Residual of step n of the recursion (n >= 1).
    double step_residual(int n) const;
};

/// Thrown when a Sylvester step n + d_i - d_j vanishes.
class SeriesResonanceError : public Error {
public:
    SeriesResonanceError(const std::string& what, int n, Complex di, Complex dj)
        : Error(what), n_(n), di_(di), dj_(dj) {}
    int step() const noexcept { return n_; }
    Complex first() const noexcept { return di_; }
    Complex second() const noexcept { return dj_; }

private:
    int n_;
    Complex di_, dj_;
};

/// Builds the series; throws SeriesResonanceError naming n and the eigenvalue pair.
FrobeniusSeries build_frobenius_series(const ModelSpec& spec, Anchor anchor, int truncation);

/// Parameters of the self-adjoint non-scalar 2x2 families.
struct SelfAdjoint2DParams {
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double c = 1.0;
    double d_entry = 0.0;
    Matrix s = Matrix::Identity(2, 2);

    Matrix l() const;       // [[alpha, beta], [0, alpha]]
    Matrix jordan() const;  // [[lambda, 1], [0, lambda]]
    Matrix t() const;       // [[0, c], [c, d]]
    /// L1 = S^-1 L S, L2 = S^-1 D S with Q = x or x^2 - 1.
    ModelSpec induced_spec(QKind kind, int max_degree) const;
};

/// An evaluable solution of the Pearson equation Q W^-1 W' = x L1 + L2.
class Weight {
public:
    /// e^{x L1} x^{L2} type closed forms; requires [L1, L2] = 0.
    static Weight closed_commutative(const ModelSpec& spec);
    static Weight frobenius(const ModelSpec& spec, Anchor anchor, int truncation = 40);
    /// Wraps a prebuilt (possibly modified) series.
    static Weight from_series(const ModelSpec& spec, FrobeniusSeries series);
    static Weight selfadjoint2d(const SelfAdjoint2DParams& params, QKind kind, int max_degree = 8);

    Matrix operator()(double x) const;
    Matrix operator()(const Abscissa& p) const;

    const ModelSpec& spec() const;
    Interval interval() const;
    WeightForm form() const;
    const FrobeniusSeries* series() const;
    const SelfAdjoint2DParams* selfadjoint_params() const;

    struct Impl;

private:
    explicit Weight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// || Q W' - W (x L1 + L2) || / ||W|| with W' from a 6th-order central
/// difference taken in the smooth interior coordinate.
double pearson_residual(const Weight& weight, double x);

/// Acceptance bound for pearson_residual at x.
double pearson_tolerance(const ModelSpec& spec, double x);

struct GridPoint {
    double x = 0.0;
    Matrix value;
    bool selfadjoint = false;
    bool positive_semidefinite = false;
    bool indefinite = false;
    double min_eigenvalue = 0.0;  // of the Hermitian part
    double max_eigenvalue = 0.0;
};

struct GridReport {
    bool selfadjoint = true;
    bool positive_semidefinite = true;
    bool indefinite = false;
    std::vector<GridPoint> points;
};

GridReport grid_checks(const Weight& weight, const std::vector<double>& grid);
/// Serial reference for grid_checks.
GridReport grid_checks_serial(const Weight& weight, const std::vector<double>& grid);

struct ScalarReduction {
    std::optional<Matrix> s;  // S with S L S^-1 diagonal
    std::optional<ModelSpec> diagonal;
    std::string reason;
    bool reducible() const noexcept { return s.has_value(); }
};

/// Simultaneous diagonalization of L1, L2 when they commute and are diagonalizable.
ScalarReduction reduce_to_scalar(const ModelSpec& spec);

} // namespace matrod

#endif
