#include "matrod/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "matrod/rodrigues.hpp"
#include "matrod/structure.hpp"

namespace matrod::cli {

// ---------------------------------------------------------------------------
// JSON conversion
// ---------------------------------------------------------------------------

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const MatrixPolynomial& p, int n)
{
    json coeffs = json::array();
    for (const Matrix& c : p.coeffs()) coeffs.push_back(to_json(c));
    return json{{"n", n}, {"coeffs", std::move(coeffs)}};
}

json to_json(const ModelSpec& spec)
{
    return json{{"sigma", to_json(spec.q.sigma)}, {"tau", to_json(spec.q.tau)},   {"delta", to_json(spec.q.delta)},
                {"dim", spec.dim()},              {"max_degree", spec.max_degree}, {"L1", to_json(spec.l1)},
                {"L2", to_json(spec.l2)}};
}

namespace {

Complex complex_from_json(const json& v, const std::string& field)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(field + ": expected a number or an [re, im] pair");
}

bool is_scalar_entry(const json& v) { return v.is_number() || (v.is_array() && v.size() == 2 && v[0].is_number()); }

} // namespace

Matrix matrix_from_json(const json& value, int dim, const std::string& field)
{
    if (!value.is_array()) throw ConfigError(field + ": expected a list of entries");
    Matrix m(dim, dim);
    const size_t d = static_cast<size_t>(dim);
    // Row-major flat lists have d^2 entries; nested lists have d rows. Length decides,
    // since a real 2-row matrix and a complex pair look alike.
    bool flat = value.size() == d * d;
    for (const auto& e : value) flat = flat && is_scalar_entry(e);
    if (flat) {
        for (size_t k = 0; k < d * d; ++k)
            m(static_cast<Eigen::Index>(k / d), static_cast<Eigen::Index>(k % d)) =
                complex_from_json(value[k], field);
        return m;
    }
    if (value.size() != d) {
        std::ostringstream msg;
        msg << field << ": expected " << d * d << " row-major entries or " << d << " rows for dim=" << dim << ", got "
            << value.size();
        throw ConfigError(msg.str());
    }
    for (size_t i = 0; i < d; ++i) {
        if (!value[i].is_array() || value[i].size() != d) {
            std::ostringstream msg;
            msg << field << ": row " << i << " must have " << d << " entries";
            throw ConfigError(msg.str());
        }
        for (size_t j = 0; j < d; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = complex_from_json(value[i][j], field);
    }
    return m;
}

MatrixPolynomial polynomial_from_json(const json& value, int dim)
{
    const json& coeffs = value.is_object() ? value.at("coeffs") : value;
    if (!coeffs.is_array()) throw ConfigError("poly: expected a list of coefficient matrices");
    std::vector<Matrix> c;
    for (size_t k = 0; k < coeffs.size(); ++k) c.push_back(matrix_from_json(coeffs[k], dim, "poly.coeffs[" + std::to_string(k) + "]"));
    return MatrixPolynomial(dim, std::move(c));
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

template <class T>
T get_or(const json& obj, const char* key, T fallback)
{
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(key) + ": wrong type");
    }
}

Anchor anchor_from_string(const std::string& s)
{
    if (s == "zero" || s == "0") return Anchor::Zero;
    if (s == "plus_one" || s == "+1") return Anchor::PlusOne;
    if (s == "minus_one" || s == "-1") return Anchor::MinusOne;
    throw ConfigError("weight.anchor: unknown anchor '" + s + "'");
}

QKind qkind_from_string(const std::string& s)
{
    if (s == "x") return QKind::X;
    if (s == "x^2-1" || s == "x2-1") return QKind::XSquaredMinusOne;
    throw ConfigError("weight.q: expected 'x' or 'x^2-1', got '" + s + "'");
}

Anchor default_anchor(const Quadratic& q)
{
    return q.degree() == 2 ? Anchor::PlusOne : Anchor::Zero;
}

} // namespace

RunConfig parse_config(const json& doc)
{
    if (!doc.is_object()) throw ConfigError("config: expected an object at the top level");
    const int max_degree = get_or(doc, "max_degree", 8);
    if (max_degree < 0) throw ConfigError("max_degree: must be non-negative");

    const json weight_doc = doc.value("weight", json::object());
    WeightConfig wc;
    const std::string form = get_or<std::string>(weight_doc, "form", "");

    std::optional<ModelSpec> spec;
    if (form == "selfadjoint2d") {
        SelfAdjoint2DParams p;
        p.alpha = get_or(weight_doc, "alpha", 0.0);
        p.beta = get_or(weight_doc, "beta", 0.0);
        p.lambda = get_or(weight_doc, "lambda", 0.0);
        p.c = get_or(weight_doc, "c", 1.0);
        p.d_entry = get_or(weight_doc, "d", 0.0);
        if (weight_doc.contains("S")) p.s = matrix_from_json(weight_doc.at("S"), 2, "weight.S");
        wc.form = WeightForm::SelfAdjoint2D;
        wc.kind = qkind_from_string(get_or<std::string>(weight_doc, "q", "x"));
        wc.selfadjoint = p;
        try {
            spec = p.induced_spec(wc.kind, max_degree);
        } catch (const Error& e) {
            throw ConfigError(std::string("weight: ") + e.what());
        }
    } else {
        if (!doc.contains("dim")) throw ConfigError("dim: missing");
        const int dim = get_or(doc, "dim", 0);
        if (dim < 1) throw ConfigError("dim: must be positive");
        Quadratic q;
        q.sigma = doc.contains("sigma") ? complex_from_json(doc["sigma"], "sigma") : Complex(0.0);
        q.tau = doc.contains("tau") ? complex_from_json(doc["tau"], "tau") : Complex(0.0);
        q.delta = doc.contains("delta") ? complex_from_json(doc["delta"], "delta") : Complex(0.0);
        if (!doc.contains("L1")) throw ConfigError("L1: missing");
        if (!doc.contains("L2")) throw ConfigError("L2: missing");
        Matrix l1 = matrix_from_json(doc["L1"], dim, "L1");
        Matrix l2 = matrix_from_json(doc["L2"], dim, "L2");
        try {
            spec.emplace(q, std::move(l1), std::move(l2), max_degree);
        } catch (const Error& e) {
            throw ConfigError(std::string("spec: ") + e.what());
        }
        if (form.empty()) {
            wc.form = spec->commuting() ? WeightForm::ClosedCommutative : WeightForm::FrobeniusSeries;
        } else if (form == "closed") {
            wc.form = WeightForm::ClosedCommutative;
        } else if (form == "frobenius") {
            wc.form = WeightForm::FrobeniusSeries;
        } else {
            throw ConfigError("weight.form: unknown form '" + form + "'");
        }
        wc.anchor = weight_doc.contains("anchor") ? anchor_from_string(weight_doc["anchor"].get<std::string>())
                                                  : default_anchor(q);
        if ((wc.anchor == Anchor::Zero) != (q.degree() == 1) && q.degree() != 0)
            throw ConfigError("weight.anchor: " + to_string(wc.anchor) + " is not a singular point of Q");
        wc.truncation = get_or(weight_doc, "truncation", 40);
    }

    RunConfig config(std::move(*spec));
    config.weight = wc;
    if (doc.contains("interval")) {
        Interval expected;
        try {
            expected = interval_for(config.spec.q);
        } catch (const Error& e) {
            throw ConfigError(std::string("interval: ") + e.what());
        }
        if (doc["interval"].get<std::string>() != to_string(expected))
            throw ConfigError("interval: Q determines " + to_string(expected));
    }
    const json quad = doc.value("quadrature", json::object());
    config.tol = get_or(quad, "tol", kDefaultQuadratureTol);
    const json gram = doc.value("gram", json::object());
    try {
        config.gram = gram_variant_from_string(get_or<std::string>(gram, "variant", "star_left"));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("gram.variant: ") + e.what());
    }
    config.grid_points = get_or(doc.value("grid", json::object()), "points", 100);
    const json output = doc.value("output", json::object());
    config.output_dir = get_or<std::string>(output, "dir", "");
    config.format = get_or<std::string>(output, "format", "");
    return config;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(doc);
}

Weight make_weight(const RunConfig& config)
{
    switch (config.weight.form) {
    case WeightForm::ClosedCommutative: return Weight::closed_commutative(config.spec);
    case WeightForm::FrobeniusSeries: return Weight::frobenius(config.spec, config.weight.anchor, config.weight.truncation);
    case WeightForm::SelfAdjoint2D:
        return Weight::selfadjoint2d(*config.weight.selfadjoint, config.weight.kind, config.spec.max_degree);
    }
    throw ConfigError("weight.form: unsupported");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

json header(const char* command, const RunConfig& config)
{
    return json{{"schema", kSchema}, {"command", command}, {"spec", to_json(config.spec)}};
}

struct Check {
    Check(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

    std::string name;
    double tolerance = 0.0;
    double max_residual = 0.0;
    std::string skipped;
    json details = json::array();
    bool failed = false;

    void record(json item, double residual, double bound)
    {
        const bool ok = std::isfinite(residual) && residual <= bound;
        item["residual"] = residual;
        item["tolerance"] = bound;
        item["pass"] = ok;
        details.push_back(std::move(item));
        max_residual = std::max(max_residual, std::isfinite(residual) ? residual : INFINITY);
        failed = failed || !ok;
    }

    json to_json() const
    {
        json j{{"name", name}};
        if (!skipped.empty()) {
            j["status"] = "skipped: " + skipped;
            return j;
        }
        j["status"] = failed ? "fail" : "pass";
        j["max_residual"] = max_residual;
        j["details"] = details;
        return j;
    }
};

MatrixPolynomial random_polynomial(std::mt19937_64& rng, int dim, int degree)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Matrix> c;
    for (int k = 0; k <= degree; ++k) {
        Matrix m(dim, dim);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(u(rng), u(rng));
        c.push_back(m);
    }
    return MatrixPolynomial(dim, std::move(c));
}

const char* weight_form_key(WeightForm f)
{
    switch (f) {
    case WeightForm::ClosedCommutative: return "closed";
    case WeightForm::FrobeniusSeries: return "frobenius";
    case WeightForm::SelfAdjoint2D: return "selfadjoint2d";
    }
    return "?";
}

} // namespace

CommandOutput cmd_generate(const RunConfig& config)
{
    const FamilyCache cache = generate_family(config.spec, config.spec.max_degree);
    json doc = header("generate", config);
    json polys = json::array();
    for (int n = 0; n <= cache.n_max(); ++n) polys.push_back(to_json(cache[n], n));
    doc["polynomials"] = std::move(polys);
    json leading = json::array();
    for (int n = 1; n <= cache.n_max(); ++n)
        leading.push_back(json{{"n", n}, {"C", to_json(cache.leading[static_cast<size_t>(n)])}});
    doc["leading"] = std::move(leading);
    return {kExitOk, std::move(doc), {}, false};
}

CommandOutput cmd_verify(const RunConfig& config)
{
    const ModelSpec& spec = config.spec;
    const int n_max = spec.max_degree;
    const double scale = spec.scale();
    const FamilyCache cache = generate_family(spec, n_max);
    std::vector<Check> checks;

    Check leading{"leading_coefficients", 1e-10};
    for (int n = 0; n <= n_max; ++n) {
        const Matrix c = leading_coefficient(spec, n);
        const double rel = norm(cache[n].leading() - c) / std::max(norm(c), 1e-300);
        leading.record(json{{"n", n}}, rel, leading.tolerance);
    }
    checks.push_back(std::move(leading));

    Check identities{"commutation_identities", 1e-11 * scale};
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 1 + trial % 10;
        const MatrixPolynomial r = random_polynomial(rng, spec.dim(), trial % 6);
        const CommutationResiduals res = commutation_residuals(spec, k, r);
        identities.record(json{{"k", k}, {"degree", r.degree()}}, res.max(), identities.tolerance);
    }
    checks.push_back(std::move(identities));

    Check recurrence{"recurrence", 1e-9 * scale};
    for (int n = 1; n + 1 <= n_max; ++n) {
        const RecurrenceCoeffs c = recurrence_coeffs(spec, n);
        const double rel = recurrence_residual(cache, c) / std::max(1.0, cache[n].norm());
        recurrence.record(json{{"n", n}, {"alpha", to_json(c.alpha)}, {"beta", to_json(c.beta)}, {"gamma", to_json(c.gamma)}},
                          rel, recurrence.tolerance);
    }
    checks.push_back(std::move(recurrence));

    const bool commuting = spec.commuting();
    Check eigen{"eigen_equation", 1e-9 * scale};
    Check ladder{"ladder", 1e-8};
    if (!commuting) {
        eigen.skipped = "noncommutative";
        ladder.skipped = "noncommutative";
    } else {
        for (int n = 0; n <= n_max; ++n) {
            const EigenCheck e = eigen_check(spec, cache, n);
            const double rel = e.residual / (std::max(1.0, cache[n].norm()) * std::max(1.0, norm(e.eigen_matrix)));
            eigen.record(json{{"n", n}, {"eigen_matrix", to_json(e.eigen_matrix)}}, rel, eigen.tolerance);
        }
        for (int n = 1; n <= n_max; ++n) {
            try {
                const LadderCoeffs lc = ladder_coeffs(spec, n);
                const double rel = poly_distance(ladder_apply(spec, lc, cache[n]), cache[n - 1]) /
                                   std::max(1.0, cache[n - 1].norm());
                ladder.record(json{{"n", n}, {"A", to_json(lc.a)}, {"B", to_json(lc.b)}, {"C", to_json(lc.c)},
                                   {"G", to_json(lc.g)}},
                              rel, ladder.tolerance);
            } catch (const SingularMatrixError& e) {
                ladder.details.push_back(json{{"n", n}, {"status", std::string("skipped: ") + e.what()}});
            }
        }
    }
    checks.push_back(std::move(eigen));
    checks.push_back(std::move(ladder));

    Check pearson{"pearson_residual", 0.0};
    try {
        const Weight w = make_weight(config);
        for (double x : interior_grid(w.interval(), 20)) {
            const double bound = pearson_tolerance(w.spec(), x);
            pearson.record(json{{"x", x}}, pearson_residual(w, x), bound);
        }
        pearson.tolerance = pearson_tolerance(w.spec(), 0.0);
    } catch (const SeriesResonanceError&) {
        throw;
    } catch (const PreconditionError& e) {
        pearson.skipped = e.what();
    }
    checks.push_back(std::move(pearson));

    json doc = header("verify", config);
    doc["weight"] = weight_form_key(config.weight.form);
    doc["commuting"] = commuting;
    json arr = json::array();
    bool all_pass = true;
    for (const Check& c : checks) {
        arr.push_back(c.to_json());
        all_pass = all_pass && (!c.skipped.empty() || !c.failed);
    }
    doc["checks"] = std::move(arr);
    doc["passed"] = all_pass;
    return {all_pass ? kExitOk : kExitVerifyFailed, std::move(doc), {}, false};
}

CommandOutput cmd_gram(const RunConfig& config)
{
    const Weight w = make_weight(config);
    const FamilyCache cache = generate_family(config.spec, config.spec.max_degree);
    const GramReport report = gram_matrix(cache, w, config.gram, config.tol);
    json doc = header("gram", config);
    doc["variant"] = to_string(report.variant);
    doc["tol"] = config.tol;
    doc["n_max"] = report.n_max;
    json entries = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "j,k,max_abs,error,threshold,vanishing,expected_vanishing\n";
    for (const GramEntry& e : report.entries) {
        const double max_abs = e.entry.cwiseAbs().maxCoeff();
        const bool expected = expected_vanishing(report.variant, e.j, e.k);
        entries.push_back(json{{"j", e.j},
                               {"k", e.k},
                               {"entry", to_json(e.entry)},
                               {"error", e.error},
                               {"vanishing", e.vanishing},
                               {"converged", e.converged},
                               {"max_abs", max_abs},
                               {"threshold", kVanishingFactor * e.error},
                               {"expected_vanishing", expected}});
        csv << e.j << ',' << e.k << ',' << max_abs << ',' << e.error << ',' << kVanishingFactor * e.error << ','
            << (e.vanishing ? "true" : "false") << ',' << (expected ? "true" : "false") << '\n';
    }
    doc["entries"] = std::move(entries);
    doc["pattern_holds"] = report.pattern_holds();
    const bool as_csv = config.format == "csv";
    return {kExitOk, std::move(doc), as_csv ? csv.str() : std::string(), as_csv};
}

CommandOutput cmd_weights(const RunConfig& config)
{
    const Weight w = make_weight(config);
    const GridReport report = grid_checks(w, interior_grid(w.interval(), config.grid_points));
    const int d = config.spec.dim();
    std::ostringstream csv;
    csv << std::setprecision(17) << "x,selfadjoint,psd,indefinite,min_eig,max_eig";
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) csv << ",W" << i << j << "_re,W" << i << j << "_im";
    csv << '\n';
    json rows = json::array();
    for (const GridPoint& p : report.points) {
        csv << p.x << ',' << (p.selfadjoint ? "true" : "false") << ',' << (p.positive_semidefinite ? "true" : "false")
            << ',' << (p.indefinite ? "true" : "false") << ',' << p.min_eigenvalue << ',' << p.max_eigenvalue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) csv << ',' << p.value(i, j).real() << ',' << p.value(i, j).imag();
        csv << '\n';
        rows.push_back(json{{"x", p.x},
                            {"selfadjoint", p.selfadjoint},
                            {"psd", p.positive_semidefinite},
                            {"indefinite", p.indefinite},
                            {"min_eig", p.min_eigenvalue},
                            {"max_eig", p.max_eigenvalue},
                            {"W", to_json(p.value)}});
    }
    json doc = header("weights", config);
    doc["weight"] = weight_form_key(config.weight.form);
    doc["interval"] = to_string(w.interval());
    doc["selfadjoint"] = report.selfadjoint;
    doc["psd"] = report.positive_semidefinite;
    doc["indefinite"] = report.indefinite;
    doc["points"] = std::move(rows);
    const bool as_csv = config.format != "json";
    return {kExitOk, std::move(doc), as_csv ? csv.str() : std::string(), as_csv};
}

CommandOutput cmd_expand(const RunConfig& config, const MatrixPolynomial& p)
{
    if (p.dim() != config.spec.dim()) throw ConfigError("poly: dimension does not match the spec");
    if (p.degree() > config.spec.max_degree) throw ConfigError("poly: degree exceeds max_degree");
    const FamilyCache cache = generate_family(config.spec, config.spec.max_degree);
    const std::vector<Matrix> basis = expand_in_basis(cache, p);
    std::optional<std::vector<Matrix>> integrals;
    std::string skipped;
    if (config.spec.commuting()) {
        integrals = expand_by_integrals(cache, make_weight(config), p, config.tol);
    } else {
        skipped = "noncommutative";
    }
    json rows = json::array();
    double gap = 0.0;
    for (size_t k = 0; k < basis.size(); ++k) {
        json row{{"k", k}, {"basis", to_json(basis[k])}};
        if (integrals) {
            const double g = norm(basis[k] - (*integrals)[k]);
            row["integrals"] = to_json((*integrals)[k]);
            row["gap"] = g;
            gap = std::max(gap, g);
        }
        rows.push_back(std::move(row));
    }
    json doc = header("expand", config);
    doc["poly"] = to_json(p, p.degree());
    doc["rows"] = std::move(rows);
    doc["resum_error"] = poly_distance(resum(cache, basis), p);
    if (integrals) doc["gap"] = gap;
    else doc["integrals"] = "skipped: " + skipped;
    return {kExitOk, std::move(doc), {}, false};
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

namespace {

void emit(const CommandOutput& result, const std::string& command, const RunConfig& config, std::ostream& out)
{
    const std::string text = result.is_csv ? result.csv : result.document.dump(2) + "\n";
    if (config.output_dir.empty()) {
        out << text;
        return;
    }
    std::filesystem::create_directories(config.output_dir);
    const auto path = std::filesystem::path(config.output_dir) / (command + (result.is_csv ? ".csv" : ".json"));
    std::ofstream file(path);
    if (!file) throw ConfigError("--out: cannot write " + path.string());
    file << text;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Matrix-valued Rodrigues polynomials: generation, verification and export"};
    app.require_subcommand(1);
    std::string config_path, out_dir, format, poly_path;
    std::optional<double> tol;
    std::optional<int> degree;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (default: stdout)");
    app.add_option("--tol", tol, "quadrature tolerance");
    app.add_option("--degree", degree, "degree horizon N")->check(CLI::NonNegativeNumber);
    app.add_option("--format", format, "export format")->check(CLI::IsMember({"json", "csv"}));
    app.fallthrough();
    app.add_subcommand("generate", "P_0..P_N and their leading coefficients");
    app.add_subcommand("verify", "structure identities and the Pearson residual");
    app.add_subcommand("gram", "Gram matrix of integrals and its vanishing pattern");
    app.add_subcommand("weights", "weight values and definiteness on an interior grid");
    CLI::App* expand = app.add_subcommand("expand", "coefficients of a polynomial in the family");
    expand->add_option("--poly", poly_path, "polynomial JSON ({\"coeffs\": [...]})")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunConfig config = load_config(config_path);
        if (degree) config.spec.max_degree = *degree;
        if (tol) config.tol = *tol;
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (!format.empty()) config.format = format;
        if (config.format == "csv" && command != "gram" && command != "weights")
            throw ConfigError("--format: csv is only available for gram and weights");

        const ValidationReport report = validate_model(config.spec);
        if (!report.ok()) {
            err << "invalid spec: " << report.summary() << '\n';
            return kExitInvalidConfig;
        }

        CommandOutput result;
        if (command == "generate") result = cmd_generate(config);
        else if (command == "verify") result = cmd_verify(config);
        else if (command == "gram") result = cmd_gram(config);
        else if (command == "weights") result = cmd_weights(config);
        else {
            std::ifstream in(poly_path);
            if (!in) throw ConfigError("--poly: cannot open " + poly_path);
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("--poly: ") + e.what());
            }
            result = cmd_expand(config, polynomial_from_json(doc, config.spec.dim()));
        }
        emit(result, command, config, out);
        if (result.exit_code == kExitVerifyFailed) err << command << ": verification failed\n";
        return result.exit_code;
    } catch (const IntegrabilityError& e) {
        err << e.what() << '\n';
        return kExitNotIntegrable;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const ResonanceError& e) {
        err << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const SeriesResonanceError& e) {
        err << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const PreconditionError& e) {
        err << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const DimensionError& e) {
        err << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitVerifyFailed;
    }
}

} // namespace matrod::cli
