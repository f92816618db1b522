#ifndef MATROD_QUADRATURE_HPP
#define MATROD_QUADRATURE_HPP

#include <functional>

#include "matrod/core.hpp"
#include "matrod/weights.hpp"

namespace matrod {

using MatrixFunction = std::function<Matrix(double)>;
/// Integrand on J; receives exact endpoint distances near singular endpoints.
using PointFunction = std::function<Matrix(const Abscissa&)>;

/// Integrand value plus the magnitude of the terms that cancelled to produce it;
/// the latter sets the round-off floor (|value| is used when it is larger).
struct Sample {
    Matrix value;
    double scale = 0.0;
};
using SampleFunction = std::function<Sample(const Abscissa&)>;

struct QuadratureResult {
    Matrix value;
    Eigen::MatrixXd error;  // entrywise estimate, truncation plus round-off floor
    bool converged = false;
    int segments = 0;

    double max_error() const { return error.size() ? error.maxCoeff() : 0.0; }
};

/// Integration domain: J plus the smallest real part of the singular exponent at
/// each finite endpoint (0 for a regular endpoint). Drives the endpoint substitutions.
struct Domain {
    Interval interval = Interval::HalfLine;
    double left_exponent = 0.0;   // at 0 (HalfLine) or -1 (Symmetric)
    double right_exponent = 0.0;  // at +1 (Symmetric)
};

inline constexpr double kDefaultQuadratureTol = 1e-10;
inline constexpr int kMaxSegments = 4000;

/// Global adaptive 15-point Gauss-Kronrod on [a, b]. The result is converged when
/// every entry's estimate is below max(tol, round-off floor).
QuadratureResult integrate_finite(const MatrixFunction& f, double a, double b, double tol = kDefaultQuadratureTol,
                                  int max_segments = kMaxSegments);

/// Entrywise integral over J after endpoint-flattening substitutions:
/// x = t^p near 0, x = 1 -+ t^p near +-1, x = 1 + t/(1-t) for the tail.
QuadratureResult integrate_matrix(const PointFunction& f, const Domain& domain, double tol = kDefaultQuadratureTol);
QuadratureResult integrate_matrix(const SampleFunction& f, const Domain& domain, double tol = kDefaultQuadratureTol);

} // namespace matrod

#endif
