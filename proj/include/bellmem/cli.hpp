#pragma once

#include "bellmem/bounds.hpp"
#include "bellmem/enumerator.hpp"
#include "bellmem/montecarlo.hpp"
#include "bellmem/rational.hpp"
#include "bellmem/strategies.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bellmem::cli {

enum class ExitCode : int { Success = 0, InvariantViolation = 1, InputError = 2 };

enum class Format { Csv, Json };

struct CliConfig {
  std::string subcommand;  // simulate | enumerate | bounds | table | nosig
  std::string strategy;
  std::optional<std::string> strategy_file;
  std::optional<StochasticLHV> weights;
  std::size_t n = 0;
  std::size_t batches = 0;
  std::uint64_t seed = 0;
  Rational delta{1, 10};
  std::optional<double> epsilon;
  std::optional<std::string> out;
  Format format = Format::Json;
  std::size_t enum_cap = 10;
  unsigned workers = 0;
};

/// Parsing and validation failure; carries the text to print and the exit code.
struct UsageError {
  int exit_code = 2;
  std::string message;
};

/// Fully validated configuration. On `--help` the returned UsageError has
/// exit code 0 and the help text as its message.
struct ParseResult {
  std::optional<CliConfig> config;
  std::optional<UsageError> error;
};

ParseResult parse_args(const std::vector<std::string>& args);

/// Runs the configured subcommand, writing to `config.out` when set and to
/// `out` otherwise. Diagnostics go to `err`.
int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + dispatch with exception-to-exit-code mapping.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Document builders shared by dispatch and the tests.
nlohmann::ordered_json rational_json(const Rational& value);
nlohmann::ordered_json exact_result_json(const ExactResult& result, std::string_view strategy);
nlohmann::ordered_json collective_json(const CollectiveExact& result, std::string_view strategy);
nlohmann::ordered_json model101_json(const Model101Exact& result);
nlohmann::ordered_json bound_report_json(const BoundReport& report);
nlohmann::ordered_json table_json(const ModelBoundsTable& table);
nlohmann::ordered_json estimate_json(const EstimateReport& report);
nlohmann::ordered_json tail_compare_json(const TailComparison& comparison);
nlohmann::ordered_json nosig_json(const NoSignalingResult& result, std::string_view strategy, std::size_t n);
nlohmann::ordered_json batch_json(const BatchRecord& record);

inline constexpr std::string_view kBatchCsvHeader =
    "batch,seed,n,y_value,x_defined,x_value,c11,c12,c21,a22,n11,n12,n21,n22";

/// One CSV row per batch under kBatchCsvHeader, Y and X as exact p/q strings.
std::string batches_csv(const std::vector<BatchRecord>& batches);
/// Parses batches_csv output back into the JSON form produced by batch_json.
nlohmann::ordered_json batches_from_csv(std::string_view csv);

/// `model,quantity,status,relation,value` rows of the bounds table.
std::string table_csv(const ModelBoundsTable& table);
nlohmann::ordered_json table_rows_from_csv(std::string_view csv);

/// Generic two-column `key,value` CSV: JSON-pointer keys, JSON scalar values.
std::string flat_csv(const nlohmann::ordered_json& document);
nlohmann::ordered_json from_flat_csv(std::string_view csv);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace bellmem::cli
