#include "matrod/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace matrod {

namespace {

constexpr double kSeriesTailTol = 1e-10;
// Bound on sum ||Phi_n|| rho^n relative to ||Phi_0||; caps cancellation in the series.
constexpr double kSeriesMagnitudeBound = 100.0;
// Taylor patches continue a series solution across regular points.
constexpr int kPatchOrder = 60;
constexpr double kPatchTailTol = 1e-16;
constexpr int kMaxPatches = 20000;
constexpr double kHalfLineFarPoint = 1e6;
// Relative size below which a decaying solution is treated as zero.
constexpr double kUnderflowRatio = 1e-300;
// Without a far-end series, patches stop this close to the far endpoint.
constexpr double kSymmetricPatchStop = 1e-3;
// Beyond the last patch a controlled dopri5 run takes over.
constexpr double kContinuationRelTol = 1e-12;
constexpr double kContinuationAbsTol = 1e-13;

bool is_zero(Complex z, Complex reference)
{
    return std::abs(z) <= 1e-14 * std::max(1.0, std::abs(reference));
}

/// Factor c(x) with dW/du = W (x L1 + L2) c, i.e. c = (dx/du) / Q(x).
Complex coordinate_factor(Interval interval, const Quadratic& q)
{
    switch (interval) {
    case Interval::HalfLine: return 1.0 / q.tau;
    case Interval::Symmetric: return -1.0 / q.sigma;
    case Interval::RealLine: return 1.0 / q.delta;
    }
    return 1.0;
}

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

using State = std::vector<Complex>;

State to_state(const Matrix& m) { return State(m.data(), m.data() + m.size()); }

Matrix from_state(const State& s, int d)
{
    return Eigen::Map<const Matrix>(s.data(), d, d);
}

/// Integrates dW/du = W (x(u) a + b) from u0 to u1.
Matrix continue_solution(const Matrix& w0, double u0, double u1, Interval interval, const Matrix& a, const Matrix& b)
{
    namespace ode = boost::numeric::odeint;
    if (u0 == u1) return w0;
    const int d = static_cast<int>(w0.rows());
    auto rhs = [&](const State& s, State& ds, double u) {
        const double x = from_coordinate(interval, u);
        const Matrix w = from_state(s, d);
        const Matrix dw = w * (x * a + b);
        std::copy(dw.data(), dw.data() + dw.size(), ds.begin());
    };
    State state = to_state(w0);
    const double atol = kContinuationAbsTol * std::max(norm(w0), std::numeric_limits<double>::min());
    auto stepper = ode::make_controlled(atol, kContinuationRelTol, ode::runge_kutta_dopri5<State>());
    const double dt = (u1 > u0 ? 1.0 : -1.0) * 1e-3;
    ode::integrate_adaptive(stepper, rhs, state, u0, u1, dt);
    return from_state(state, d);
}

std::vector<Complex> eigenvalues(const Matrix& m)
{
    Eigen::ComplexEigenSolver<Matrix> solver(m, false);
    const auto& ev = solver.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

} // namespace

std::string to_string(Interval interval)
{
    switch (interval) {
    case Interval::HalfLine: return "[0,inf)";
    case Interval::Symmetric: return "[-1,1]";
    case Interval::RealLine: return "(-inf,inf)";
    }
    return "?";
}

std::string to_string(WeightForm form)
{
    switch (form) {
    case WeightForm::ClosedCommutative: return "closed";
    case WeightForm::FrobeniusSeries: return "frobenius";
    case WeightForm::SelfAdjoint2D: return "selfadjoint2d";
    }
    return "?";
}

std::string to_string(Anchor anchor)
{
    switch (anchor) {
    case Anchor::Zero: return "0";
    case Anchor::PlusOne: return "+1";
    case Anchor::MinusOne: return "-1";
    }
    return "?";
}

Interval interval_for(const Quadratic& q)
{
    switch (q.degree()) {
    case 0:
        if (q.delta == Complex(0.0)) throw PreconditionError("Q vanishes identically");
        return Interval::RealLine;
    case 1:
        if (!is_zero(q.delta, q.tau)) throw PreconditionError("degree-1 Q must be tau*x (delta = 0)");
        return Interval::HalfLine;
    default:
        if (!is_zero(q.tau, q.sigma) || !is_zero(q.delta + q.sigma, q.sigma))
            throw PreconditionError("degree-2 Q must be sigma*(x^2 - 1)");
        return Interval::Symmetric;
    }
}

double to_coordinate(Interval interval, double x)
{
    switch (interval) {
    case Interval::HalfLine: return std::log(x);
    case Interval::Symmetric: return std::atanh(x);
    case Interval::RealLine: return x;
    }
    return x;
}

double from_coordinate(Interval interval, double u)
{
    switch (interval) {
    case Interval::HalfLine: return std::exp(u);
    case Interval::Symmetric: return std::tanh(u);
    case Interval::RealLine: return u;
    }
    return u;
}

Abscissa Abscissa::at(Interval interval, double x)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (interval) {
    case Interval::HalfLine: return {x, x, inf};
    case Interval::Symmetric: return {x, 1.0 + x, 1.0 - x};
    case Interval::RealLine: return {x, inf, inf};
    }
    return {x, inf, inf};
}

double to_coordinate(Interval interval, const Abscissa& p)
{
    switch (interval) {
    case Interval::HalfLine: return std::log(p.from_left);
    case Interval::Symmetric: return 0.5 * (std::log(p.from_left) - std::log(p.from_right));
    case Interval::RealLine: return p.x;
    }
    return p.x;
}

double coordinate_jacobian(Interval interval, double u)
{
    switch (interval) {
    case Interval::HalfLine: return std::exp(u);
    case Interval::Symmetric: {
        const double c = std::cosh(u);
        return 1.0 / (c * c);
    }
    case Interval::RealLine: return 1.0;
    }
    return 1.0;
}

std::vector<double> interior_grid(Interval interval, int count)
{
    double lo = 0.0, hi = 0.0;
    switch (interval) {
    case Interval::HalfLine: lo = std::log(0.02); hi = std::log(20.0); break;
    case Interval::Symmetric: lo = -3.0; hi = 3.0; break;
    case Interval::RealLine: lo = -4.0; hi = 4.0; break;
    }
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
        grid.push_back(from_coordinate(interval, u));
    }
    return grid;
}

IntegrabilityData integrability_data(const ModelSpec& spec)
{
    IntegrabilityData data;
    data.interval = interval_for(spec.q);
    switch (data.interval) {
    case Interval::HalfLine:
        data.endpoints.push_back({0.0, spec.l2 / spec.q.tau});
        data.decay = spec.l1 / spec.q.tau;
        break;
    case Interval::Symmetric: {
        const Matrix l1 = spec.l1 / spec.q.sigma;
        const Matrix l2 = spec.l2 / spec.q.sigma;
        data.endpoints.push_back({-1.0, 0.5 * (l1 - l2)});
        data.endpoints.push_back({1.0, 0.5 * (l1 + l2)});
        break;
    }
    case Interval::RealLine:
        data.decay = spec.l1 / spec.q.delta;
        break;
    }
    return data;
}

// ---------------------------------------------------------------------------
// Frobenius series
// ---------------------------------------------------------------------------

double FrobeniusSeries::distance(double x) const
{
    switch (anchor) {
    case Anchor::Zero: return x;
    case Anchor::PlusOne: return 1.0 - x;
    case Anchor::MinusOne: return 1.0 + x;
    }
    return x;
}

Matrix FrobeniusSeries::phi_at(double t) const
{
    Matrix acc = zeros(static_cast<int>(exponent.rows()));
    for (auto it = phi.rbegin(); it != phi.rend(); ++it) acc = (acc * t + *it).eval();
    return acc;
}

double FrobeniusSeries::step_residual(int n) const
{
    const auto& p = phi[static_cast<size_t>(n)];
    Matrix rhs = zeros(static_cast<int>(exponent.rows()));
    for (int m = 0; m <= n - 1 && m < static_cast<int>(forcing.size()); ++m)
        rhs += phi[static_cast<size_t>(n - 1 - m)] * forcing[static_cast<size_t>(m)];
    return norm(static_cast<double>(n) * p + exponent * p - p * exponent - rhs);
}

FrobeniusSeries build_frobenius_series(const ModelSpec& spec, Anchor anchor, int truncation)
{
    if (truncation < 1) throw DomainError("frobenius: truncation must be at least 1");
    const Interval interval = interval_for(spec.q);
    const int d = spec.dim();

    FrobeniusSeries series;
    series.anchor = anchor;
    series.truncation = truncation;

    if (anchor == Anchor::Zero) {
        if (interval != Interval::HalfLine) throw PreconditionError("frobenius: anchor 0 requires Q = tau*x");
        series.exponent = spec.l2 / spec.q.tau;
        series.forcing = {spec.l1 / spec.q.tau};
    } else {
        if (interval != Interval::Symmetric)
            throw PreconditionError("frobenius: anchors +1/-1 require Q = sigma*(x^2 - 1)");
        const Matrix l1 = spec.l1 / spec.q.sigma;
        const Matrix l2 = spec.l2 / spec.q.sigma;
        // W' = W (A/(1-x) + B/(1+x)), A = -(L1+L2)/2, B = (L1-L2)/2
        const Matrix a = -0.5 * (l1 + l2);
        const Matrix b = 0.5 * (l1 - l2);
        series.exponent = anchor == Anchor::PlusOne ? Matrix(-a) : b;
        const Matrix& other = anchor == Anchor::PlusOne ? b : a;
        const double sign = anchor == Anchor::PlusOne ? -1.0 : 1.0;
        for (int m = 0; m < truncation; ++m) series.forcing.push_back(sign * std::ldexp(1.0, -(m + 1)) * other);
    }

    const auto ev = eigenvalues(series.exponent);
    const Matrix id = identity(d);
    const Matrix id2 = identity(d * d);
    const Matrix sylvester = kron(id, series.exponent) - kron(series.exponent.transpose(), id);

    series.phi.push_back(id);
    for (int n = 1; n <= truncation; ++n) {
        for (size_t i = 0; i < ev.size(); ++i)
            for (size_t j = 0; j < ev.size(); ++j)
                if (std::abs(static_cast<double>(n) + ev[i] - ev[j]) <= 1e-8 * n) {
                    std::ostringstream msg;
                    msg << "frobenius: resonance at step n=" << n << " between exponent eigenvalues " << ev[i]
                        << " and " << ev[j];
                    throw SeriesResonanceError(msg.str(), n, ev[i], ev[j]);
                }
        Matrix rhs = zeros(d);
        for (int m = 0; m <= n - 1 && m < static_cast<int>(series.forcing.size()); ++m)
            rhs += series.phi[static_cast<size_t>(n - 1 - m)] * series.forcing[static_cast<size_t>(m)];
        const Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(rhs.data(), rhs.size());
        const Matrix system = static_cast<double>(n) * id2 + sylvester;
        const Matrix sol = solve(system, Matrix(vec));
        series.phi.push_back(Eigen::Map<const Matrix>(sol.data(), d, d));
    }

    // Trust radius: tail bound on the last coefficient, then a magnitude cap.
    const double phi0 = norm(series.phi.front());
    const double last = norm(series.phi.back());
    double radius = last == 0.0 ? std::numeric_limits<double>::infinity()
                                : std::pow(kSeriesTailTol * phi0 / last, 1.0 / truncation);
    if (anchor != Anchor::Zero) radius = std::min(radius, 1.9);
    auto magnitude = [&](double r) {
        double s = 0.0, p = 1.0;
        for (const auto& c : series.phi) {
            s += norm(c) * p;
            p *= r;
        }
        return s;
    };
    if (std::isfinite(radius) && magnitude(radius) > kSeriesMagnitudeBound * phi0) {
        double lo = 0.0, hi = radius;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (magnitude(mid) > kSeriesMagnitudeBound * phi0 ? hi : lo) = mid;
        }
        radius = lo;
    }
    // An infinite radius only arises at anchor 0, where Phi_M = 0 forces every later term to vanish.
    series.trust_radius = radius;
    return series;
}

// ---------------------------------------------------------------------------
// SelfAdjoint2DParams
// ---------------------------------------------------------------------------

Matrix SelfAdjoint2DParams::l() const
{
    Matrix m(2, 2);
    m << alpha, beta, 0.0, alpha;
    return m;
}

Matrix SelfAdjoint2DParams::jordan() const
{
    Matrix m(2, 2);
    m << lambda, 1.0, 0.0, lambda;
    return m;
}

Matrix SelfAdjoint2DParams::t() const
{
    Matrix m(2, 2);
    m << 0.0, c, c, d_entry;
    return m;
}

ModelSpec SelfAdjoint2DParams::induced_spec(QKind kind, int max_degree) const
{
    if (c == 0.0) throw DomainError("selfadjoint2d: c must be nonzero");
    if (s.rows() != 2 || s.cols() != 2) throw DimensionError("selfadjoint2d: S must be 2x2");
    const Matrix s_inv = matrix_inverse(s).inverse;
    Quadratic q;
    if (kind == QKind::X) {
        q.tau = 1.0;
    } else {
        q.sigma = 1.0;
        q.delta = -1.0;
    }
    return ModelSpec(q, s_inv * l() * s, s_inv * jordan() * s, max_degree);
}

// ---------------------------------------------------------------------------
// Weight
// ---------------------------------------------------------------------------

namespace {

struct ClosedData {
    Matrix a;  // HalfLine: L1/tau; Symmetric: exponent at +1; RealLine: L1/delta
    Matrix b;  // HalfLine: L2/tau; Symmetric: exponent at -1; RealLine: L2/delta
};

/// W(center + s) = sum_m coeffs[m] s^m for |s| <= reach.
struct TaylorPatch {
    double center = 0.0;
    double reach = 0.0;
    std::vector<Matrix> coeffs;
};

struct FrobeniusData {
    FrobeniusSeries series;
    double series_limit = 0.0;  // the series is used for anchor distances up to this
    double direction = 1.0;     // patches run from the anchor in this direction
    std::vector<TaylorPatch> patches;
    // Far endpoint of [-1, 1]: W = far_factor * W_far for far distances up to far_limit.
    std::optional<FrobeniusSeries> far_series;
    Matrix far_factor;
    double far_limit = 0.0;
    // Past the last patch: dW/du = W (x a + b) from (end_u, end_w).
    Matrix a;
    Matrix b;
    double end_u = 0.0;
    Matrix end_w;
    bool underflowed = false;  // W is negligible beyond the last patch
};

struct SelfAdjointData {
    SelfAdjoint2DParams params;
    QKind kind = QKind::X;
};

} // namespace

struct Weight::Impl {
    ModelSpec spec;
    Interval interval;
    WeightForm form;
    std::variant<ClosedData, FrobeniusData, SelfAdjointData> data;

    Matrix evaluate(const Abscissa& p) const;
};

namespace {

bool in_interior(Interval interval, const Abscissa& p)
{
    switch (interval) {
    case Interval::HalfLine: return p.from_left > 0.0 && std::isfinite(p.x);
    case Interval::Symmetric: return p.from_left > 0.0 && p.from_right > 0.0;
    case Interval::RealLine: return std::isfinite(p.x);
    }
    return false;
}

Matrix evaluate_closed(const ClosedData& c, Interval interval, const Abscissa& p)
{
    const double x = p.x;
    switch (interval) {
    case Interval::HalfLine: return matrix_exp(x * c.a) * matrix_power(c.b, p.from_left);
    case Interval::Symmetric: return matrix_power(c.a, p.from_right) * matrix_power(c.b, p.from_left);
    case Interval::RealLine: return matrix_exp((0.5 * x * x) * c.a + x * c.b);
    }
    return {};
}

Matrix evaluate_series(const FrobeniusSeries& s, double t)
{
    return matrix_power(s.exponent, t) * s.phi_at(t);
}

double anchor_distance(Anchor anchor, const Abscissa& p)
{
    return anchor == Anchor::PlusOne ? p.from_right : p.from_left;
}

Matrix evaluate_patch(const TaylorPatch& patch, double x)
{
    const double s = x - patch.center;
    Matrix acc = zeros(static_cast<int>(patch.coeffs.front().rows()));
    for (auto it = patch.coeffs.rbegin(); it != patch.coeffs.rend(); ++it) acc = (acc * s + *it).eval();
    return acc;
}

Matrix evaluate_frobenius(const FrobeniusData& f, Interval interval, const Abscissa& p)
{
    const double t = anchor_distance(f.series.anchor, p);
    if (t <= f.series_limit || f.patches.empty()) return evaluate_series(f.series, t);
    if (f.far_series) {
        const double t_far = f.series.anchor == Anchor::PlusOne ? p.from_left : p.from_right;
        if (t_far <= f.far_limit) return f.far_factor * evaluate_series(*f.far_series, t_far);
    }
    // Patches are ordered along the direction; find the last center not beyond x.
    const double key = f.direction * p.x;
    auto it = std::upper_bound(f.patches.begin(), f.patches.end(), key,
                               [&](double k, const TaylorPatch& patch) { return k < f.direction * patch.center; });
    if (it != f.patches.begin()) --it;
    if (std::abs(p.x - it->center) <= it->reach) return evaluate_patch(*it, p.x);
    if (f.underflowed) return zeros(static_cast<int>(f.end_w.rows()));
    return continue_solution(f.end_w, f.end_u, to_coordinate(interval, p), interval, f.a, f.b);
}

Matrix evaluate_selfadjoint(const SelfAdjointData& s, const Abscissa& a)
{
    const auto& p = s.params;
    const double x = a.x;
    Matrix inner(2, 2);
    double scalar = 0.0;
    if (s.kind == QKind::X) {
        scalar = std::exp(p.alpha * x) * std::pow(a.from_left, p.lambda);
        inner << 0.0, p.c, p.c, p.c * (p.beta * x + std::log(a.from_left)) + p.d_entry;
    } else {
        // (1-x)^{(L1+L2)/2} (1+x)^{(L1-L2)/2} in the frame where L1 = L, L2 = D.
        const double right = a.from_right, left = a.from_left;
        scalar = std::pow(right, 0.5 * (p.alpha + p.lambda)) * std::pow(left, 0.5 * (p.alpha - p.lambda));
        const double f = 0.5 * (p.beta + 1.0) * std::log(right) + 0.5 * (p.beta - 1.0) * std::log(left);
        inner << 0.0, p.c, p.c, p.c * f + p.d_entry;
    }
    return scalar * (p.s.adjoint() * inner * p.s);
}

} // namespace

Matrix Weight::Impl::evaluate(const Abscissa& x) const
{
    if (!in_interior(interval, x)) {
        std::ostringstream msg;
        msg << "weight evaluated outside the interior of " << to_string(interval) << ": x=" << x.x;
        throw DomainError(msg.str());
    }
    return std::visit(
        [&](const auto& d) -> Matrix {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ClosedData>) return evaluate_closed(d, interval, x);
            else if constexpr (std::is_same_v<T, FrobeniusData>) return evaluate_frobenius(d, interval, x);
            else return evaluate_selfadjoint(d, x);
        },
        data);
}

Weight Weight::closed_commutative(const ModelSpec& spec)
{
    if (!spec.commuting()) throw PreconditionError("closed_commutative_weight: L1 and L2 do not commute");
    const Interval interval = interval_for(spec.q);
    ClosedData c;
    switch (interval) {
    case Interval::HalfLine:
        c.a = spec.l1 / spec.q.tau;
        c.b = spec.l2 / spec.q.tau;
        break;
    case Interval::Symmetric: {
        const Matrix l1 = spec.l1 / spec.q.sigma;
        const Matrix l2 = spec.l2 / spec.q.sigma;
        c.a = 0.5 * (l1 + l2);
        c.b = 0.5 * (l1 - l2);
        break;
    }
    case Interval::RealLine:
        c.a = spec.l1 / spec.q.delta;
        c.b = spec.l2 / spec.q.delta;
        break;
    }
    return Weight(std::make_shared<const Impl>(Impl{spec, interval, WeightForm::ClosedCommutative, c}));
}

Weight Weight::frobenius(const ModelSpec& spec, Anchor anchor, int truncation)
{
    return from_series(spec, build_frobenius_series(spec, anchor, truncation));
}

namespace {

/// Taylor coefficients at a regular point from Q W' = W (x L1 + L2):
/// q0 (m+1) c_{m+1} = c_m (M0 - q1 m) + c_{m-1} (M1 - q2 (m-1)).
TaylorPatch make_patch(const ModelSpec& spec, double center, const Matrix& w0, double singular_distance)
{
    const Quadratic& q = spec.q;
    const Complex q0 = q(center), q1 = q.derivative(center), q2 = q.sigma;
    const Matrix m0 = center * spec.l1 + spec.l2;
    const Matrix& m1 = spec.l1;
    TaylorPatch patch;
    patch.center = center;
    patch.coeffs.reserve(kPatchOrder + 1);
    patch.coeffs.push_back(w0);
    for (int m = 0; m < kPatchOrder; ++m) {
        const Matrix& cm = patch.coeffs[static_cast<size_t>(m)];
        Matrix next = cm * m0 - (q1 * static_cast<double>(m)) * cm;
        if (m >= 1) {
            const Matrix& prev = patch.coeffs[static_cast<size_t>(m - 1)];
            next += prev * m1 - (q2 * static_cast<double>(m - 1)) * prev;
        }
        patch.coeffs.push_back(next / (q0 * static_cast<double>(m + 1)));
    }
    // Half the convergence radius, then the same tail and magnitude bounds as the series.
    const double c0 = norm(w0);
    double reach = 0.5 * singular_distance;
    const double last = norm(patch.coeffs.back());
    if (last > 0.0) reach = std::min(reach, std::pow(kPatchTailTol * c0 / last, 1.0 / kPatchOrder));
    auto magnitude = [&](double r) {
        double sum = 0.0, power = 1.0;
        for (const auto& c : patch.coeffs) {
            sum += norm(c) * power;
            power *= r;
        }
        return sum;
    };
    if (magnitude(reach) > kSeriesMagnitudeBound * c0) {
        double lo = 0.0, hi = reach;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (magnitude(mid) > kSeriesMagnitudeBound * c0 ? hi : lo) = mid;
        }
        reach = lo;
    }
    patch.reach = reach;
    return patch;
}

double singular_distance(Interval interval, double x)
{
    return interval == Interval::HalfLine ? x : std::min(1.0 - x, 1.0 + x);
}

} // namespace

Weight Weight::from_series(const ModelSpec& spec, FrobeniusSeries series)
{
    const Interval interval = interval_for(spec.q);
    FrobeniusData f;
    const Complex factor = coordinate_factor(interval, spec.q);
    f.a = spec.l1 * factor;
    f.b = spec.l2 * factor;
    f.series_limit = series.trust_radius;

    if (std::isfinite(series.trust_radius)) {
        // Inside half the trust radius the truncation error is negligible.
        f.series_limit = 0.5 * series.trust_radius;
        double x = 0.0, far_endpoint = 0.0;
        switch (series.anchor) {
        case Anchor::Zero:
            x = f.series_limit;
            f.direction = 1.0;
            break;
        case Anchor::PlusOne:
            x = 1.0 - f.series_limit;
            f.direction = -1.0;
            far_endpoint = -1.0;
            break;
        case Anchor::MinusOne:
            x = -1.0 + f.series_limit;
            f.direction = 1.0;
            far_endpoint = 1.0;
            break;
        }
        double stop = 0.0;  // far distance at which the patches end (Symmetric)
        if (interval == Interval::Symmetric) {
            const Anchor far = series.anchor == Anchor::PlusOne ? Anchor::MinusOne : Anchor::PlusOne;
            try {
                FrobeniusSeries fs = build_frobenius_series(spec, far, series.truncation);
                f.far_limit = std::isfinite(fs.trust_radius) ? 0.5 * fs.trust_radius : 1.0;
                f.far_series = std::move(fs);
                stop = f.far_limit;
            } catch (const SeriesResonanceError&) {
                stop = kSymmetricPatchStop;
            }
        }

        Matrix w = evaluate_series(series, series.distance(x));
        double peak = norm(w);
        for (int count = 0; count < kMaxPatches; ++count) {
            TaylorPatch patch = make_patch(spec, x, w, singular_distance(interval, x));
            const double reach = patch.reach;
            const double next_x = x + f.direction * reach;
            f.patches.push_back(std::move(patch));
            const TaylorPatch& cur = f.patches.back();
            if (interval == Interval::Symmetric) {
                const double far_now = std::abs(far_endpoint - x);
                if (far_now - reach <= stop) {
                    // Hand over at the point whose far distance is exactly `stop`.
                    const double xm = far_now <= stop ? x : far_endpoint - f.direction * stop;
                    const double tm = far_now <= stop ? far_now : stop;
                    const Matrix wm = evaluate_patch(cur, xm);
                    if (f.far_series) {
                        f.far_limit = tm;
                        f.far_factor = solve(evaluate_series(*f.far_series, tm).transpose(), wm.transpose()).transpose();
                    }
                    f.end_u = to_coordinate(interval, xm);
                    f.end_w = wm;
                    break;
                }
            }
            w = evaluate_patch(cur, next_x);
            peak = std::max(peak, norm(w));
            const bool done = interval == Interval::HalfLine &&
                              (next_x >= kHalfLineFarPoint || norm(w) <= kUnderflowRatio * peak || count + 1 == kMaxPatches);
            x = next_x;
            if (done) {
                f.underflowed = norm(w) <= kUnderflowRatio * peak;
                f.end_u = to_coordinate(interval, x);
                f.end_w = w;
                break;
            }
        }
    }
    f.series = std::move(series);
    return Weight(std::make_shared<const Impl>(Impl{spec, interval, WeightForm::FrobeniusSeries, std::move(f)}));
}

Weight Weight::selfadjoint2d(const SelfAdjoint2DParams& params, QKind kind, int max_degree)
{
    const ModelSpec spec = params.induced_spec(kind, max_degree);
    SelfAdjointData s{params, kind};
    return Weight(std::make_shared<const Impl>(Impl{spec, interval_for(spec.q), WeightForm::SelfAdjoint2D, s}));
}

Matrix Weight::operator()(double x) const { return impl_->evaluate(Abscissa::at(impl_->interval, x)); }
Matrix Weight::operator()(const Abscissa& p) const { return impl_->evaluate(p); }
const ModelSpec& Weight::spec() const { return impl_->spec; }
Interval Weight::interval() const { return impl_->interval; }
WeightForm Weight::form() const { return impl_->form; }

const FrobeniusSeries* Weight::series() const
{
    const auto* f = std::get_if<FrobeniusData>(&impl_->data);
    return f ? &f->series : nullptr;
}

const SelfAdjoint2DParams* Weight::selfadjoint_params() const
{
    const auto* s = std::get_if<SelfAdjointData>(&impl_->data);
    return s ? &s->params : nullptr;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

double pearson_residual(const Weight& weight, double x)
{
    const ModelSpec& spec = weight.spec();
    const Interval interval = weight.interval();
    const Matrix rhs = x * spec.l1 + spec.l2;
    const double rate = std::abs(coordinate_factor(interval, spec.q)) * norm(rhs);
    const double h = 0.02 / std::max(1.0, rate);
    const double u = to_coordinate(interval, x);

    auto w_at = [&](int k) { return weight(from_coordinate(interval, u + k * h)); };
    const Matrix dw_du = (-w_at(-3) + 9.0 * w_at(-2) - 45.0 * w_at(-1) + 45.0 * w_at(1) - 9.0 * w_at(2) + w_at(3)) /
                         (60.0 * h);
    const Matrix dw_dx = dw_du / coordinate_jacobian(interval, u);
    const Matrix w = weight(x);
    // Multiplied through by W: immune to the conditioning of W itself.
    return norm(spec.q(x) * dw_dx - w * rhs) / norm(w);
}

double pearson_tolerance(const ModelSpec& spec, double x)
{
    return 1e-8 * std::max(1.0, norm(x * spec.l1 + spec.l2));
}

namespace {

GridPoint check_point(const Weight& weight, double x)
{
    GridPoint p;
    p.x = x;
    p.value = weight(x);
    const double scale = std::max(norm(p.value), std::numeric_limits<double>::min());
    p.selfadjoint = norm(p.value - p.value.adjoint()) <= 1e-9 * scale;
    const Matrix herm = 0.5 * (p.value + p.value.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    p.min_eigenvalue = solver.eigenvalues().minCoeff();
    p.max_eigenvalue = solver.eigenvalues().maxCoeff();
    p.positive_semidefinite = p.selfadjoint && p.min_eigenvalue >= -1e-9 * scale;
    p.indefinite = p.selfadjoint && p.min_eigenvalue < -1e-9 * scale && p.max_eigenvalue > 1e-9 * scale;
    return p;
}

GridReport summarize(std::vector<GridPoint> points)
{
    GridReport report;
    for (const auto& p : points) {
        report.selfadjoint = report.selfadjoint && p.selfadjoint;
        report.positive_semidefinite = report.positive_semidefinite && p.positive_semidefinite;
        report.indefinite = report.indefinite || p.indefinite;
    }
    report.points = std::move(points);
    return report;
}

} // namespace

GridReport grid_checks_serial(const Weight& weight, const std::vector<double>& grid)
{
    std::vector<GridPoint> points;
    points.reserve(grid.size());
    for (double x : grid) points.push_back(check_point(weight, x));
    return summarize(std::move(points));
}

GridReport grid_checks(const Weight& weight, const std::vector<double>& grid)
{
    std::vector<GridPoint> points(grid.size());
    const auto n = static_cast<long>(grid.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            points[static_cast<size_t>(i)] = check_point(weight, grid[static_cast<size_t>(i)]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return summarize(std::move(points));
}

ScalarReduction reduce_to_scalar(const ModelSpec& spec)
{
    ScalarReduction out;
    if (!spec.commuting(1e-10)) {
        out.reason = "noncommuting: [L1, L2] != 0";
        return out;
    }
    // Eigenvectors of a generic combination diagonalize a commuting diagonalizable pair.
    const Complex mix(0.6180339887498949, 0.4142135623730950);
    Eigen::ComplexEigenSolver<Matrix> solver(spec.l1 + mix * spec.l2);
    Matrix v = solver.eigenvectors();
    for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
    const double cond = condition_number(v);
    if (!std::isfinite(cond) || cond > 1e8) {
        out.reason = "defective: the generated algebra is not semisimple (eigenvector condition " +
                     std::to_string(cond) + ")";
        return out;
    }
    const Matrix s = v.fullPivLu().inverse();
    const Matrix d1 = s * spec.l1 * v;
    const Matrix d2 = s * spec.l2 * v;
    auto off_diagonal = [](const Matrix& m) {
        Matrix o = m;
        o.diagonal().setZero();
        return norm(o);
    };
    if (off_diagonal(d1) > 1e-10 * spec.scale() || off_diagonal(d2) > 1e-10 * spec.scale()) {
        out.reason = "defective: simultaneous diagonalization failed";
        return out;
    }
    Matrix l1 = zeros(spec.dim()), l2 = zeros(spec.dim());
    l1.diagonal() = d1.diagonal();
    l2.diagonal() = d2.diagonal();
    out.s = s;
    out.diagonal = ModelSpec(spec.q, l1, l2, spec.max_degree);
    out.reason = "reducible";
    return out;
}

} // namespace matrod
