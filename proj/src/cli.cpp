#include "bellmem/cli.hpp"

#include "bellmem/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace bellmem::cli {

using json = nlohmann::ordered_json;

namespace {

struct RawArgs {
  std::string strategy;
  std::string strategy_file;
  std::size_t n = 0;
  std::size_t batches = 0;
  std::uint64_t seed = 0;
  std::string delta = "0.1";
  double epsilon = 0.0;
  std::string out;
  std::string format = "json";
  std::size_t enum_cap = 10;
  unsigned workers = 0;
};

struct Flags {
  CLI::Option* strategy = nullptr;
  CLI::Option* strategy_file = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* batches = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* out = nullptr;
};

Flags add_flags(CLI::App& sub, RawArgs& raw, bool uses_strategy, bool uses_batches, bool uses_delta,
                bool uses_epsilon, bool uses_cap) {
  Flags f;
  if (uses_strategy) {
    f.strategy = sub.add_option("--strategy", raw.strategy, "Strategy name");
    f.strategy_file = sub.add_option("--strategy-file", raw.strategy_file, "Weights CSV for stochastic-lhv");
  }
  f.n = sub.add_option("--n", raw.n, "Rounds per batch");
  if (uses_batches) {
    f.batches = sub.add_option("--batches", raw.batches, "Number of independent batches");
    sub.add_option("--seed", raw.seed, "Master seed");
    sub.add_option("--workers", raw.workers, "Worker threads (0 = hardware concurrency)");
  }
  if (uses_delta) f.delta = sub.add_option("--delta", raw.delta, "Tail threshold delta (decimal or p/q)");
  if (uses_epsilon) f.epsilon = sub.add_option("--epsilon", raw.epsilon, "Exponent slack epsilon > 0");
  if (uses_cap) {
    sub.add_option("--enum-cap", raw.enum_cap, "Largest n to enumerate exhaustively");
    sub.add_option("--workers", raw.workers, "Worker threads (0 = hardware concurrency)");
  }
  f.out = sub.add_option("--out", raw.out, "Output file (default: stdout)");
  sub.add_option("--format", raw.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  return f;
}

UsageError usage(std::string message) { return {2, std::move(message)}; }

void require(const CLI::Option* opt, const std::string& subcommand) {
  if (opt == nullptr || opt->count() == 0) {
    throw InputError(subcommand + ": missing required flag " + (opt ? opt->get_name() : std::string("?")));
  }
}

void check_strategy_name(const std::string& name) {
  for (const auto& valid : model_names()) {
    if (valid == name) return;
  }
  make_model(name);  // throws with the list of valid names
}

}  // namespace

ParseResult parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Sequential CHSH experiments under local hidden variable models with and without memory"};
  app.name("bellmem");
  app.require_subcommand(1, 1);
  RawArgs raw;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate over seeded batches");
  auto* enumerate = app.add_subcommand("enumerate", "Exact expectations by exhaustive enumeration");
  auto* bounds = app.add_subcommand("bounds", "Analytic tail and expectation bounds");
  auto* table = app.add_subcommand("table", "Bounds table per model class");
  auto* nosig = app.add_subcommand("nosig", "Exhaustive no-signaling check");

  const Flags sim_flags = add_flags(*simulate, raw, true, true, true, false, false);
  const Flags enum_flags = add_flags(*enumerate, raw, true, false, false, false, true);
  const Flags bound_flags = add_flags(*bounds, raw, false, false, true, true, false);
  const Flags table_flags = add_flags(*table, raw, false, false, true, true, false);
  const Flags nosig_flags = add_flags(*nosig, raw, true, false, false, false, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, UsageError{0, app.help()}};
  } catch (const CLI::CallForAllHelp&) {
    return {std::nullopt, UsageError{0, app.help("", CLI::AppFormatMode::All)}};
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, usage(std::string(e.what()) + "\nRun with --help for usage.")};
  }

  CliConfig config;
  const CLI::App* sub = app.get_subcommands().front();
  config.subcommand = sub->get_name();
  const Flags& flags = sub == simulate    ? sim_flags
                       : sub == enumerate ? enum_flags
                       : sub == bounds    ? bound_flags
                       : sub == table     ? table_flags
                                          : nosig_flags;
  try {
    config.format = raw.format == "csv" ? Format::Csv : Format::Json;
    if (flags.out->count() > 0) config.out = raw.out;
    config.seed = raw.seed;
    config.enum_cap = raw.enum_cap;
    config.workers = raw.workers;

    require(flags.n, config.subcommand);
    if (raw.n == 0) throw InputError("--n must be >= 1");
    config.n = raw.n;

    if (flags.strategy != nullptr) {
      require(flags.strategy, config.subcommand);
      check_strategy_name(raw.strategy);
      config.strategy = raw.strategy;
      if (flags.strategy_file->count() > 0) {
        config.strategy_file = raw.strategy_file;
        std::ifstream in(raw.strategy_file);
        if (!in) throw InputError("cannot open --strategy-file '" + raw.strategy_file + "'");
        config.weights = read_stochastic_lhv_csv(in);
      }
      if (config.strategy == "stochastic-lhv" && !config.weights) {
        throw InputError("--strategy stochastic-lhv requires --strategy-file");
      }
    }
    if (flags.batches != nullptr) {
      require(flags.batches, config.subcommand);
      if (raw.batches == 0) throw InputError("--batches must be >= 1");
      config.batches = raw.batches;
    }
    if (flags.delta != nullptr) {
      if (config.subcommand != "simulate") require(flags.delta, config.subcommand);
      config.delta = parse_rational(raw.delta);
      if (config.delta <= 0 || config.delta >= 1) throw InputError("--delta must lie in (0, 1)");
    }
    if (flags.epsilon != nullptr && flags.epsilon->count() > 0) {
      if (!(raw.epsilon > 0.0)) throw InputError("--epsilon must be > 0");
      config.epsilon = raw.epsilon;
    }

    const bool collective = config.strategy == "collective-n2";
    if (collective && config.n != 2) throw InputError("--strategy collective-n2 requires --n 2");
    if (config.subcommand == "enumerate" || config.subcommand == "nosig") {
      const bool model101_special = config.subcommand == "enumerate" && config.strategy == "model101" && config.n == 101;
      if (config.n > config.enum_cap && !model101_special) {
        throw ResourceError("--n " + std::to_string(config.n) + " exceeds --enum-cap " +
                            std::to_string(config.enum_cap) + " (4^n playouts); use simulate instead");
      }
    }
    if (config.subcommand == "enumerate" && (config.strategy == "quantum" || config.strategy == "stochastic-lhv")) {
      throw InputError("enumerate needs a deterministic strategy; '" + config.strategy + "' is randomized");
    }
    if (config.subcommand == "table") {
      const double d = to_double(config.delta);
      if (!((3.0 + d) < (3.0 + 5.0 * d) * (1.0 - d))) {
        throw InputError("table needs (3+delta) < (3+5 delta)(1-delta), i.e. delta < 0.2");
      }
    }
  } catch (const InputError& e) {
    return {std::nullopt, usage(config.subcommand + ": " + e.what())};
  } catch (const ResourceError& e) {
    return {std::nullopt, usage(config.subcommand + ": resource limit: " + e.what())};
  }
  return {config, std::nullopt};
}

json rational_json(const Rational& value) { return {{"rational", to_string(value)}, {"decimal", to_double(value)}}; }

json exact_result_json(const ExactResult& result, std::string_view strategy) {
  json dist = json::array();
  for (const auto& p : result.distribution) {
    dist.push_back({{"y", rational_json(p.y)},
                    {"x", p.x ? rational_json(*p.x) : json(nullptr)},
                    {"probability", rational_json(p.probability)}});
  }
  return {{"n", result.n},
          {"strategy", strategy},
          {"sequences", result.sequences},
          {"e_y", rational_json(result.e_y)},
          {"e_x_conditional", result.e_x_conditional ? rational_json(*result.e_x_conditional) : json(nullptr)},
          {"p_undefined", rational_json(result.p_undefined)},
          {"distribution", dist}};
}

json collective_json(const CollectiveExact& result, std::string_view strategy) {
  auto counted = [&result](std::uint64_t count) {
    json j = rational_json(Rational(count, result.sequences));
    j["fraction"] = std::to_string(count) + "/" + std::to_string(result.sequences);
    return j;
  };
  json events = json::array();
  for (std::size_t e = 0; e < result.favorable.size(); ++e) {
    json scores = json::array();
    for (std::size_t k = result.n; k-- > 0;) scores.push_back((e >> k) & 1U);
    events.push_back({{"scores", scores}, {"count", result.favorable[e]}, {"probability", counted(result.favorable[e])}});
  }
  std::uint64_t ceiling_count = 1;
  for (std::size_t k = 0; k < result.n; ++k) ceiling_count *= 3;
  return {{"n", result.n},
          {"strategy", strategy},
          {"sequences", result.sequences},
          {"events", events},
          {"p_all_score", counted(result.all_score_count())},
          {"independent_ceiling", counted(ceiling_count)},
          {"exceeds_ceiling", result.all_score_count() > ceiling_count}};
}

json model101_json(const Model101Exact& result) {
  json branches = json::array();
  for (SettingPair p : kAllPairs) {
    branches.push_back({{"pair", to_string(p)}, {"x", rational_json(result.branch_values[p.index()])}});
  }
  json p_trigger = rational_json(result.p_trigger);
  p_trigger["log10"] = result.log10_p_trigger;
  p_trigger["log10_lgamma"] = result.log10_p_trigger_lgamma;
  return {{"n", 101},
          {"strategy", "model101"},
          {"multinomial", result.multinomial.str()},
          {"p_trigger", p_trigger},
          {"branch_values", branches},
          {"e_conditional", rational_json(result.e_conditional)},
          {"e_x_excess", rational_json(result.e_x_excess)}};
}

json bound_report_json(const BoundReport& r) {
  return {{"n", r.n},
          {"delta", r.delta},
          {"epsilon", r.epsilon ? json(*r.epsilon) : json(nullptr)},
          {"f_value", r.f_value},
          {"x_tail_bound", r.x_tail_bound},
          {"x_mean_bound", r.x_mean_bound ? json(*r.x_mean_bound) : json(nullptr)}};
}

namespace {

json entry_json(ModelClass m, TableQuantity q, const BoundEntry& e) {
  return {{"model", to_string(m)},
          {"quantity", to_string(q)},
          {"status", e.known ? "bound" : "unknown"},
          {"relation", e.known ? json(e.strict ? "<" : "<=") : json(nullptr)},
          {"value", e.known ? json(e.value) : json(nullptr)}};
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_lines(std::string_view csv) {
  std::vector<std::string> lines;
  std::string current;
  bool quoted = false;
  for (char c : csv) {
    if (c == '"') quoted = !quoted;
    if (c == '\n' && !quoted) {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

}  // namespace

json table_json(const ModelBoundsTable& table) {
  json rows = json::array();
  for (ModelClass m : kModelClasses) {
    for (TableQuantity q : kTableQuantities) rows.push_back(entry_json(m, q, table.at(m, q)));
  }
  return {{"n", table.n}, {"delta", table.delta}, {"epsilon", table.epsilon}, {"rows", rows}};
}

json estimate_json(const EstimateReport& r) {
  auto interval = [](const WilsonInterval& w) { return json{{"lower", w.lower}, {"upper", w.upper}}; };
  return {{"strategy", r.strategy},
          {"n", r.n},
          {"batches", r.batches},
          {"master_seed", r.master_seed},
          {"delta", rational_json(r.delta)},
          {"mean_y", r.mean_y},
          {"se_y", r.se_y},
          {"mean_x", r.mean_x ? json(*r.mean_x) : json(nullptr)},
          {"se_x", r.se_x ? json(*r.se_x) : json(nullptr)},
          {"tail_count_y", r.tail_count_y},
          {"tail_count_x", r.tail_count_x},
          {"tail_freq_y", r.tail_freq_y},
          {"tail_freq_x", r.tail_freq_x},
          {"wilson_y", interval(r.tail_ci_y)},
          {"wilson_x", interval(r.tail_ci_x)},
          {"undefined_count", r.undefined_count}};
}

json tail_compare_json(const TailComparison& c) {
  return {{"y", {{"empirical", c.empirical_y}, {"bound", c.bound_y}, {"ratio", c.ratio_y}}},
          {"x", {{"empirical", c.empirical_x}, {"bound", c.bound_x}, {"ratio", c.ratio_x}}}};
}

json nosig_json(const NoSignalingResult& result, std::string_view strategy, std::size_t n) {
  json counterexample = nullptr;
  if (result.counterexample) {
    const auto& c = *result.counterexample;
    json settings = json::array();
    for (SettingPair p : c.settings) settings.push_back(to_string(p));
    counterexample = {{"settings", settings},
                      {"toggled_round", c.toggled_round},
                      {"toggled_side", to_string(c.toggled_side)},
                      {"affected_round", c.affected_round},
                      {"affected_side", to_string(c.affected_side)},
                      {"description", c.describe()}};
  }
  return {{"strategy", strategy},
          {"n", n},
          {"pass", result.pass},
          {"comparisons", result.comparisons},
          {"counterexample", counterexample}};
}

json batch_json(const BatchRecord& b) {
  const CountTable& c = b.stats.counts;
  return {{"batch", b.batch},
          {"seed", b.seed},
          {"n", b.stats.n},
          {"y_value", to_string(b.stats.y)},
          {"x_defined", b.stats.x.has_value()},
          {"x_value", b.stats.x ? json(to_string(*b.stats.x)) : json(nullptr)},
          {"c11", c[0].correlated},
          {"c12", c[1].correlated},
          {"c21", c[2].correlated},
          {"a22", c[3].anticorrelated},
          {"n11", c[0].total},
          {"n12", c[1].total},
          {"n21", c[2].total},
          {"n22", c[3].total}};
}

std::string batches_csv(const std::vector<BatchRecord>& batches) {
  std::ostringstream out;
  out << kBatchCsvHeader << '\n';
  for (const BatchRecord& b : batches) {
    const CountTable& c = b.stats.counts;
    out << b.batch << ',' << b.seed << ',' << b.stats.n << ',' << to_string(b.stats.y) << ','
        << (b.stats.x ? "true" : "false") << ',' << (b.stats.x ? to_string(*b.stats.x) : "") << ','
        << c[0].correlated << ',' << c[1].correlated << ',' << c[2].correlated << ',' << c[3].anticorrelated << ','
        << c[0].total << ',' << c[1].total << ',' << c[2].total << ',' << c[3].total << '\n';
  }
  return out.str();
}

json batches_from_csv(std::string_view csv) {
  const auto lines = csv_lines(csv);
  if (lines.empty() || lines.front() != kBatchCsvHeader) throw InputError("batch CSV header mismatch");
  const auto header = split_csv_line(lines.front());
  json rows = json::array();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != header.size()) throw InputError("batch CSV row " + std::to_string(i) + " is malformed");
    json row = json::object();
    for (std::size_t k = 0; k < header.size(); ++k) {
      const std::string& name = header[k];
      const std::string& f = fields[k];
      if (name == "y_value") {
        row[name] = f;
      } else if (name == "x_value") {
        row[name] = f.empty() ? json(nullptr) : json(f);
      } else if (name == "x_defined") {
        row[name] = f == "true";
      } else {
        row[name] = std::stoull(f);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string table_csv(const ModelBoundsTable& table) {
  std::ostringstream out;
  out << "model,quantity,status,relation,value\n";
  const json document = table_json(table);
  for (const json& row : document["rows"]) {
    out << row["model"].get<std::string>() << ',' << row["quantity"].get<std::string>() << ','
        << row["status"].get<std::string>() << ',' << (row["relation"].is_null() ? "" : row["relation"].get<std::string>())
        << ',' << (row["value"].is_null() ? "" : row["value"].dump()) << '\n';
  }
  return out.str();
}

json table_rows_from_csv(std::string_view csv) {
  const auto lines = csv_lines(csv);
  if (lines.empty() || lines.front() != "model,quantity,status,relation,value") {
    throw InputError("table CSV header mismatch");
  }
  json rows = json::array();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 5) throw InputError("table CSV row " + std::to_string(i) + " is malformed");
    rows.push_back({{"model", f[0]},
                    {"quantity", f[1]},
                    {"status", f[2]},
                    {"relation", f[3].empty() ? json(nullptr) : json(f[3])},
                    {"value", f[4].empty() ? json(nullptr) : json::parse(f[4])}});
  }
  return rows;
}

std::string flat_csv(const json& document) {
  std::ostringstream out;
  out << "key,value\n";
  const json flat = document.flatten();
  for (const auto& [key, value] : flat.items()) {
    out << csv_quote(key) << ',' << csv_quote(value.dump()) << '\n';
  }
  return out.str();
}

json from_flat_csv(std::string_view csv) {
  const auto lines = csv_lines(csv);
  if (lines.empty() || lines.front() != "key,value") throw InputError("flat CSV header mismatch");
  json flat = json::object();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 2) throw InputError("flat CSV row " + std::to_string(i) + " is malformed");
    flat[f[0]] = json::parse(f[1]);
  }
  return flat.unflatten();
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

namespace {

void emit(const std::string& text, const CliConfig& config, std::ostream& out) {
  if (config.out) {
    std::ofstream file(*config.out, std::ios::binary | std::ios::trunc);
    if (!file) throw InputError("cannot open --out '" + *config.out + "' for writing");
    file << text;
    if (!file) throw InputError("failed writing '" + *config.out + "'");
  } else {
    out << text;
  }
}

std::string render(const json& document, Format format) {
  return format == Format::Json ? document.dump(2) + "\n" : flat_csv(document);
}

int run_simulate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  SimulationPlan plan;
  plan.strategy = config.strategy;
  plan.weights = config.weights;
  plan.n = config.n;
  plan.batches = config.batches;
  plan.master_seed = config.seed;
  plan.delta = config.delta;
  plan.workers = config.workers;
  const SimulationResult result = simulate(plan);

  json summary = {{"plan",
                   {{"strategy", plan.strategy},
                    {"n", plan.n},
                    {"batches", plan.batches},
                    {"seed", plan.master_seed},
                    {"delta", rational_json(plan.delta)}}},
                  {"summary", estimate_json(result.report)},
                  {"tail_compare", tail_compare_json(tail_compare(result.report))}};
  if (config.format == Format::Json) {
    json batches = json::array();
    for (const BatchRecord& b : result.batches) batches.push_back(batch_json(b));
    summary["batches"] = std::move(batches);
    emit(summary.dump(2) + "\n", config, out);
  } else {
    emit(batches_csv(result.batches), config, out);
    (config.out ? out : err) << summary.dump(2) << '\n';
  }
  return static_cast<int>(ExitCode::Success);
}

int run_enumerate(const CliConfig& config, std::ostream& out) {
  const Model model = make_model(config.strategy, config.weights);
  const EnumerationOptions options{config.enum_cap, config.workers};
  json document;
  if (model.is_collective()) {
    document = collective_json(exact_collective(model.collective(), config.n, options), model.name);
  } else if (config.strategy == "model101" && config.n == 101) {
    document = model101_json(model101_exact());
  } else {
    document = exact_result_json(exact_expectations(model.sequential(), config.n, options), model.name);
  }
  emit(render(document, config.format), config, out);
  return static_cast<int>(ExitCode::Success);
}

int run_nosig(const CliConfig& config, std::ostream& out) {
  const Model model = make_model(config.strategy, config.weights);
  const NoSignalingResult result = no_signaling_check(model, config.n, {config.enum_cap, config.workers});
  emit(render(nosig_json(result, model.name, config.n), config.format), config, out);
  return static_cast<int>(result.pass ? ExitCode::Success : ExitCode::InvariantViolation);
}

}  // namespace

int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.subcommand == "simulate") return run_simulate(config, out, err);
  if (config.subcommand == "enumerate") return run_enumerate(config, out);
  if (config.subcommand == "nosig") return run_nosig(config, out);
  if (config.subcommand == "bounds") {
    emit(render(bound_report_json(bound_report(config.n, to_double(config.delta), config.epsilon)), config.format),
         config, out);
    return static_cast<int>(ExitCode::Success);
  }
  if (config.subcommand == "table") {
    const ModelBoundsTable t = bounds_table(config.n, to_double(config.delta), config.epsilon.value_or(0.25));
    emit(config.format == Format::Json ? table_json(t).dump(2) + "\n" : table_csv(t), config, out);
    return static_cast<int>(ExitCode::Success);
  }
  throw InputError("unknown subcommand '" + config.subcommand + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ParseResult parsed = parse_args(args);
  if (parsed.error) {
    (parsed.error->exit_code == 0 ? out : err) << parsed.error->message << '\n';
    return parsed.error->exit_code;
  }
  try {
    return dispatch(*parsed.config, out, err);
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvariantViolation);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  }
}

}  // namespace bellmem::cli
