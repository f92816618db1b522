#include "matrod/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace matrod {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a = 0.0;
    double b = 0.0;
    Matrix value;
    Eigen::MatrixXd error;
    Eigen::MatrixXd absolute;  // integral of |f| entrywise

    double worst() const { return error.maxCoeff(); }
};

using ScaledFunction = std::function<Sample(double)>;

Eigen::MatrixXd magnitude(const Sample& s) { return s.value.cwiseAbs().cwiseMax(s.scale); }

Segment kronrod(const ScaledFunction& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const Sample fc = f(center);
    Matrix k15 = kWgk[7] * fc.value;
    Matrix g7 = kWg[3] * fc.value;
    Eigen::MatrixXd abs15 = kWgk[7] * magnitude(fc);
    for (size_t i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const Sample f1 = f(center - dx);
        const Sample f2 = f(center + dx);
        k15 += kWgk[i] * (f1.value + f2.value);
        abs15 += kWgk[i] * (magnitude(f1) + magnitude(f2));
        if (i % 2 == 1) g7 += kWg[i / 2] * (f1.value + f2.value);
    }
    Segment s{a, b, k15 * half, ((k15 - g7) * half).cwiseAbs(), abs15 * std::abs(half)};
    if (!all_finite(s.value)) throw DomainError("integrate: non-finite integrand value");
    return s;
}

QuadratureResult integrate_scaled(const ScaledFunction& f, double a, double b, double tol,
                                  int max_segments = kMaxSegments)
{
    std::vector<Segment> segments;
    segments.push_back(kronrod(f, a, b));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    // Running totals of the (nonnegative) error and |f| estimates.
    Eigen::MatrixXd err = segments.front().error;
    Eigen::MatrixXd absolute = segments.front().absolute;

    for (;;) {
        const Eigen::MatrixXd floor = 50.0 * eps * absolute;
        bool done = true;
        for (Eigen::Index i = 0; i < err.size(); ++i) done = done && err(i) <= std::max(tol, floor(i));
        if (done || static_cast<int>(segments.size()) >= max_segments) {
            // Sum in left-to-right order so the result does not depend on refinement history.
            std::sort(segments.begin(), segments.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
            QuadratureResult result;
            result.value = Matrix::Zero(segments.front().value.rows(), segments.front().value.cols());
            Eigen::MatrixXd total_err = Eigen::MatrixXd::Zero(err.rows(), err.cols());
            Eigen::MatrixXd total_abs = total_err;
            for (const auto& s : segments) {
                result.value += s.value;
                total_err += s.error;
                total_abs += s.absolute;
            }
            result.error = total_err + 50.0 * eps * total_abs;
            result.converged = done;
            result.segments = static_cast<int>(segments.size());
            return result;
        }
        auto worst = std::max_element(segments.begin(), segments.end(),
                                      [](const Segment& l, const Segment& r) { return l.worst() < r.worst(); });
        const double mid = 0.5 * (worst->a + worst->b);
        Segment left = kronrod(f, worst->a, mid);
        Segment right = kronrod(f, mid, worst->b);
        err += left.error + right.error - worst->error;
        absolute += left.absolute + right.absolute - worst->absolute;
        err = err.cwiseMax(0.0);
        *worst = std::move(left);
        segments.push_back(std::move(right));
    }
}

} // namespace

QuadratureResult integrate_finite(const MatrixFunction& f, double a, double b, double tol, int max_segments)
{
    return integrate_scaled([&](double x) { return Sample{f(x), 0.0}; }, a, b, tol, max_segments);
}

namespace {

double flattening_power(double exponent)
{
    // After x = t^p the endpoint behaves like t^{p(1+exponent)-1}; aim for at least t^1.
    if (!(exponent > -1.0)) throw DomainError("integrate: endpoint exponent must exceed -1");
    return std::max(1.0, 2.0 / (1.0 + exponent));
}

void accumulate(QuadratureResult& total, const QuadratureResult& part)
{
    if (total.value.size() == 0) {
        total = part;
        return;
    }
    total.value += part.value;
    total.error += part.error;
    total.converged = total.converged && part.converged;
    total.segments += part.segments;
}

QuadratureResult near_endpoint(const SampleFunction& f, Interval interval, double endpoint, double direction,
                               double exponent, double tol)
{
    // x = endpoint + direction * t^p for t in [0, 1]; the distance t^p is passed on exactly.
    const double p = flattening_power(exponent);
    const double span = interval == Interval::Symmetric ? 2.0 : std::numeric_limits<double>::infinity();
    auto g = [&](double t) {
        const double tp = std::pow(t, p);
        // Underflowed distances contribute nothing once the Jacobian is applied.
        const double s = std::max(tp, std::numeric_limits<double>::min());
        Abscissa a;
        a.x = endpoint + direction * s;
        a.from_left = direction > 0.0 ? s : span - s;
        a.from_right = direction > 0.0 ? span - s : s;
        const double jacobian = p * tp / t;
        Sample v = f(a);
        v.value *= jacobian;
        v.scale *= jacobian;
        return v;
    };
    return integrate_scaled(g, 0.0, 1.0, tol);
}

QuadratureResult tail(const SampleFunction& f, Interval interval, double start, double direction, double tol)
{
    // x = start + direction * t / (1 - t)
    auto g = [&](double t) {
        const double s = 1.0 - t;
        const double x = start + direction * t / s;
        Sample v = f(Abscissa::at(interval, x));
        if (v.value.isZero(0.0) && v.scale == 0.0) return v;
        v.value /= s * s;
        v.scale /= s * s;
        return v;
    };
    return integrate_scaled(g, 0.0, 1.0, tol);
}

} // namespace

QuadratureResult integrate_matrix(const PointFunction& f, const Domain& domain, double tol)
{
    return integrate_matrix(SampleFunction([&](const Abscissa& a) { return Sample{f(a), 0.0}; }), domain, tol);
}

QuadratureResult integrate_matrix(const SampleFunction& f, const Domain& domain, double tol)
{
    QuadratureResult total;
    total.converged = true;
    switch (domain.interval) {
    case Interval::HalfLine:
        accumulate(total, near_endpoint(f, domain.interval, 0.0, 1.0, domain.left_exponent, 0.5 * tol));
        accumulate(total, tail(f, domain.interval, 1.0, 1.0, 0.5 * tol));
        break;
    case Interval::Symmetric:
        accumulate(total, near_endpoint(f, domain.interval, -1.0, 1.0, domain.left_exponent, 0.5 * tol));
        // the right half is flattened from +1 towards 0
        accumulate(total, near_endpoint(f, domain.interval, 1.0, -1.0, domain.right_exponent, 0.5 * tol));
        break;
    case Interval::RealLine:
        accumulate(total, tail(f, domain.interval, 0.0, -1.0, 0.5 * tol));
        accumulate(total, tail(f, domain.interval, 0.0, 1.0, 0.5 * tol));
        break;
    }
    return total;
}

} // namespace matrod
