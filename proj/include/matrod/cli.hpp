#ifndef MATROD_CLI_HPP
#define MATROD_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "matrod/orthogonality.hpp"
#include "matrod/weights.hpp"

namespace matrod::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "matrodrigues/1";

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitInvalidConfig = 2,
    kExitNotIntegrable = 3,
};

/// Malformed or inconsistent configuration; the message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct WeightConfig {
    WeightForm form = WeightForm::ClosedCommutative;
    Anchor anchor = Anchor::Zero;
    int truncation = 40;
    std::optional<SelfAdjoint2DParams> selfadjoint;
    QKind kind = QKind::X;
};

struct RunConfig {
    explicit RunConfig(ModelSpec s) : spec(std::move(s)) {}

    ModelSpec spec;
    WeightConfig weight;
    double tol = kDefaultQuadratureTol;
    GramVariant gram = GramVariant::StarLeft;
    int grid_points = 100;
    std::string output_dir;  // empty: write to stdout
    std::string format;      // empty: per-command default
};

/// Builds a RunConfig from a parsed document. Does not run validate_model.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

json to_json(Complex z);
json to_json(const Matrix& m);
json to_json(const MatrixPolynomial& p, int n);
json to_json(const ModelSpec& spec);
Matrix matrix_from_json(const json& value, int dim, const std::string& field);
MatrixPolynomial polynomial_from_json(const json& value, int dim);

Weight make_weight(const RunConfig& config);

/// Result of one subcommand: a JSON document or CSV text plus the exit code.
struct CommandOutput {
    int exit_code = kExitOk;
    json document;
    std::string csv;
    bool is_csv = false;
};

CommandOutput cmd_generate(const RunConfig& config);
CommandOutput cmd_verify(const RunConfig& config);
CommandOutput cmd_gram(const RunConfig& config);
CommandOutput cmd_weights(const RunConfig& config);
CommandOutput cmd_expand(const RunConfig& config, const MatrixPolynomial& p);

/// Full command line: parses flags, runs the subcommand, writes the export and
/// maps failures to the exit-code contract.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace matrod::cli

#endif
