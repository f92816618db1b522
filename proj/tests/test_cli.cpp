#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "matrod/cli.hpp"
#include "matrod/rodrigues.hpp"
#include "oracles.hpp"

using namespace matrod;
using namespace matrod::cli;

namespace {

const std::string kData = MATROD_TEST_DIR "/data/";
const std::string kGolden = MATROD_TEST_DIR "/golden/";

json read_json(const std::string& path)
{
    std::ifstream in(path);
    REQUIRE(in);
    return json::parse(in);
}

std::string config_error(const json& doc)
{
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

/// Numbers within tol, everything else exactly.
bool same_document(const json& a, const json& b, double tol, std::string& where)
{
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        if (std::abs(x - y) <= tol * std::max(1.0, std::abs(y))) return true;
        where = std::to_string(x) + " vs " + std::to_string(y);
        return false;
    }
    if (a.type() != b.type() || a.size() != b.size()) {
        where = "shape";
        return false;
    }
    if (a.is_array()) {
        for (size_t i = 0; i < a.size(); ++i)
            if (!same_document(a[i], b[i], tol, where)) return false;
        return true;
    }
    if (a.is_object()) {
        for (auto it = b.begin(); it != b.end(); ++it) {
            if (!a.contains(it.key())) {
                where = "missing " + it.key();
                return false;
            }
            if (!same_document(a[it.key()], it.value(), tol, where)) return false;
        }
        return true;
    }
    if (a != b) where = a.dump() + " vs " + b.dump();
    return a == b;
}

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "matrodrigues");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

int subprocess(const std::string& args)
{
    const std::string cmd = std::string("\"") + MATROD_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("config parsing: accepted forms")
{
    const json flat = json::parse(R"({"tau": 1, "dim": 2, "max_degree": 3, "L1": [-1, 0, 0, -2], "L2": [0.5, 0, 0, 0.25]})");
    const RunConfig a = parse_config(flat);
    CHECK(a.spec.dim() == 2);
    CHECK(a.spec.l1(1, 1) == Complex(-2.0));
    CHECK(a.weight.form == WeightForm::ClosedCommutative);
    CHECK(a.weight.anchor == Anchor::Zero);

    const json nested =
        json::parse(R"({"tau": 1, "dim": 2, "L1": [[-1, 0.3], [0.2, -0.8]], "L2": [[[0.5, 1], 0], [0, [1, -1]]]})");
    const RunConfig b = parse_config(nested);
    CHECK(b.spec.l1(0, 1) == Complex(0.3));
    CHECK(b.spec.l2(0, 0) == Complex(0.5, 1.0));
    CHECK(b.spec.l2(1, 1) == Complex(1.0, -1.0));
    CHECK(b.weight.form == WeightForm::FrobeniusSeries);  // noncommuting default

    const RunConfig jac = parse_config(read_json(kData + "jacobi_frobenius.json"));
    CHECK(jac.weight.anchor == Anchor::PlusOne);
    const RunConfig sa = parse_config(read_json(kData + "selfadjoint2d.json"));
    CHECK(sa.weight.form == WeightForm::SelfAdjoint2D);
    REQUIRE(sa.weight.selfadjoint);
}

TEST_CASE("config parsing: errors name the field")
{
    CHECK(config_error(json::parse(R"({"tau": 1, "dim": 2, "L2": [0, 0, 0, 0]})")).find("L1") != std::string::npos);
    CHECK(config_error(json::parse(R"({"tau": 1, "dim": 2, "L1": [1, 2, 3], "L2": [0, 0, 0, 0]})")).find("L1") !=
          std::string::npos);
    CHECK(config_error(json::parse(R"({"tau": "one", "dim": 1, "L1": [1], "L2": [0]})")).find("tau") !=
          std::string::npos);
    CHECK(config_error(json::parse(R"({"tau": 1, "dim": 1, "L1": [-1], "L2": [0], "weight": {"form": "magic"}})"))
              .find("weight.form") != std::string::npos);
    CHECK(config_error(json::parse(R"({"tau": 1, "dim": 1, "L1": [-1], "L2": [0], "weight": {"anchor": "plus_one"}})"))
              .find("weight") != std::string::npos);
    CHECK(config_error(json::parse(R"({"tau": 1, "dim": 1, "L1": [-1], "L2": [0], "interval": "[-1,1]"})"))
              .find("interval") != std::string::npos);
    CHECK(config_error(json::parse(R"({"tau": 1, "dim": 1, "L1": [-1], "L2": [0], "gram": {"variant": "upper"}})"))
              .find("gram.variant") != std::string::npos);
    CHECK(config_error(json::parse("[1, 2]")).find("config") != std::string::npos);
}

TEST_CASE("generate agrees with the library and the Hermite oracle")
{
    const RunConfig config = load_config(kData + "hermite.json");
    const CommandOutput result = cmd_generate(config);
    CHECK(result.exit_code == kExitOk);
    CHECK(result.document["schema"] == kSchema);
    const FamilyCache cache = generate_family(config.spec, config.spec.max_degree);
    const json& polys = result.document["polynomials"];
    REQUIRE(polys.size() == static_cast<size_t>(config.spec.max_degree + 1));
    for (int n = 0; n <= config.spec.max_degree; ++n) {
        const json& coeffs = polys[static_cast<size_t>(n)]["coeffs"];
        const oracle::Coeffs expected = oracle::hermite_rodrigues(n);
        REQUIRE(coeffs.size() == expected.size());
        for (size_t m = 0; m < expected.size(); ++m) {
            const double re = coeffs[m][0][0][0].get<double>();
            CHECK(re == doctest::Approx(static_cast<double>(expected[m])).epsilon(1e-13));
            CHECK(re == cache[n].coeff(static_cast<int>(m))(0, 0).real());
        }
    }
}

TEST_CASE("generate exports match the golden files")
{
    for (const std::string name : {"hermite", "legendre"}) {
        CAPTURE(name);
        const json doc = cmd_generate(load_config(kData + name + ".json")).document;
        std::string where;
        CHECK_MESSAGE(same_document(doc, read_json(kGolden + name + "_generate.json"), 1e-12, where), where);
    }
}

TEST_CASE("verify: commuting data pass every check, noncommuting data skip two")
{
    const json her = cmd_verify(load_config(kData + "hermite.json")).document;
    CHECK(her["passed"] == true);
    for (const auto& c : her["checks"]) CHECK(c["status"] == "pass");

    const CommandOutput nc = cmd_verify(load_config(kData + "noncommuting3.json"));
    CHECK(nc.exit_code == kExitOk);
    CHECK(nc.document["commuting"] == false);
    int skipped = 0;
    for (const auto& c : nc.document["checks"]) {
        const std::string status = c["status"];
        if (status.rfind("skipped", 0) == 0) {
            ++skipped;
            CHECK(status == "skipped: noncommutative");
        } else {
            CHECK(status == "pass");
        }
    }
    CHECK(skipped == 2);
}

TEST_CASE("gram: document matches the library report")
{
    const RunConfig config = load_config(kData + "laguerre.json");
    const CommandOutput result = cmd_gram(config);
    const GramReport report = gram_matrix(generate_family(config.spec, config.spec.max_degree),
                                          make_weight(config), config.gram, config.tol);
    const json& entries = result.document["entries"];
    REQUIRE(entries.size() == report.entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        CHECK(entries[i]["vanishing"] == report.entries[i].vanishing);
        CHECK(entries[i]["converged"] == true);
        CHECK(entries[i]["max_abs"].get<double>() ==
              doctest::Approx(report.entries[i].entry.cwiseAbs().maxCoeff()).epsilon(1e-12));
    }
    CHECK(result.document["pattern_holds"] == true);

    RunConfig csv_config = config;
    csv_config.format = "csv";
    const CommandOutput csv = cmd_gram(csv_config);
    REQUIRE(csv.is_csv);
    CHECK(csv.csv.rfind("j,k,max_abs", 0) == 0);
    CHECK(std::count(csv.csv.begin(), csv.csv.end(), '\n') == static_cast<long>(entries.size() + 1));
}

TEST_CASE("gram with a noncommuting Frobenius weight keeps the one-sided pattern")
{
    const json doc = cmd_gram(load_config(kData + "noncommuting3.json")).document;
    CHECK(doc["pattern_holds"] == true);
    for (const auto& e : doc["entries"]) CHECK(e["converged"] == true);
}

TEST_CASE("weights: self-adjoint family is flagged indefinite")
{
    const json doc = cmd_weights(load_config(kData + "selfadjoint2d.json")).document;
    CHECK(doc["selfadjoint"] == true);
    CHECK(doc["indefinite"] == true);
    CHECK(doc["psd"] == false);
}

TEST_CASE("expand: basis and integral coefficients agree")
{
    const RunConfig config = load_config(kData + "laguerre.json");
    const FamilyCache cache = generate_family(config.spec, 3);
    const json doc = cmd_expand(config, cache[3]).document;
    CHECK(doc["resum_error"].get<double>() < 1e-10);
    CHECK(doc["gap"].get<double>() < 1e-8);

    const RunConfig nc = load_config(kData + "noncommuting3.json");
    const json skipped = cmd_expand(nc, MatrixPolynomial::identity(3)).document;
    CHECK(skipped["integrals"] == "skipped: noncommutative");
    CHECK_THROWS_AS(cmd_expand(nc, MatrixPolynomial::identity(2)), ConfigError);
}

TEST_CASE("run: exit codes")
{
    CHECK(invoke({"--config", kData + "hermite.json", "generate"}).code == kExitOk);
    CHECK(invoke({"--config", kData + "hermite.json", "verify"}).code == kExitOk);

    const Invocation resonant = invoke({"--config", kData + "resonant.json", "generate"});
    CHECK(resonant.code == kExitInvalidConfig);
    CHECK(resonant.err.find("k = 3") != std::string::npos);

    const Invocation mismatch = invoke({"--config", kData + "dim_mismatch.json", "generate"});
    CHECK(mismatch.code == kExitInvalidConfig);
    CHECK(mismatch.err.find("L1") != std::string::npos);

    CHECK(invoke({"--config", kData + "not_integrable.json", "gram"}).code == kExitNotIntegrable);
    CHECK(invoke({"--config", kData + "hermite.json", "--format", "csv", "verify"}).code == kExitInvalidConfig);
    CHECK(invoke({"generate"}).code == kExitInvalidConfig);
    CHECK(invoke({"--config", kData + "missing.json", "generate"}).code == kExitInvalidConfig);
    CHECK(invoke({"--config", kData + "algebra.json", "--degree", "3", "generate"}).code == kExitOk);
}

TEST_CASE("run: --out writes the export file")
{
    const auto dir = std::filesystem::temp_directory_path() / "matrod_cli_test_out";
    std::filesystem::remove_all(dir);
    CHECK(invoke({"--config", kData + "laguerre.json", "--out", dir.string(), "--format", "csv", "gram"}).code ==
          kExitOk);
    CHECK(std::filesystem::exists(dir / "gram.csv"));
    CHECK(invoke({"--config", kData + "hermite.json", "--out", dir.string(), "generate"}).code == kExitOk);
    const json doc = read_json((dir / "generate.json").string());
    CHECK(doc["command"] == "generate");
    std::filesystem::remove_all(dir);
}

TEST_CASE("binary: exit codes from a subprocess")
{
    CHECK(subprocess("--config \"" + kData + "hermite.json\" verify") == kExitOk);
    CHECK(subprocess("--config \"" + kData + "resonant.json\" generate") == kExitInvalidConfig);
    CHECK(subprocess("--config \"" + kData + "not_integrable.json\" gram") == kExitNotIntegrable);
    CHECK(subprocess("--help") == kExitOk);
}
