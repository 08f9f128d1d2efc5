#include "commands.hpp"

#include "harvest/dataset.hpp"
#include "harvest/error.hpp"
#include "harvest/report.hpp"
#include "harvest/sampler.hpp"
#include "harvest/screening.hpp"
#include "harvest/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace harvest::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Flags shared by `screen` and `reproduce`. Unset flags leave the config
/// file (or built-in defaults) untouched.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> output;
  std::optional<double> alpha;
  std::optional<std::size_t> k;
  std::optional<std::size_t> n_subsets;
  std::optional<double> coverage;
  std::optional<std::string> adjust;
  std::optional<std::size_t> rounds;
  std::optional<std::string> learner;
};

void add_common_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--seed", o.seed, "Random seed");
  cmd.add_option("--workers", o.workers, "Worker threads (0 = all hardware threads)");
  cmd.add_option("--output", o.output, "Write the JSON report to this path");
  cmd.add_option("--alpha", o.alpha, "Significance level, 0 < alpha < 1");
  cmd.add_option("--k", o.k, "Features per random subset");
  cmd.add_option("--n-subsets", o.n_subsets, "Total number of random subsets per round");
  cmd.add_option("--coverage", o.coverage, "Target expected subsets per feature (plans n)");
  cmd.add_option("--adjust", o.adjust, "Multiple-testing adjustment: none, bonferroni, bh");
  cmd.add_option("--rounds", o.rounds, "Maximum number of screening rounds");
  cmd.add_option("--learner", o.learner, "Base learner: ols or logistic");
}

void apply(const Overrides& o, HarvestConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.alpha) cfg.alpha = *o.alpha;
  if (o.k) cfg.subset_size = *o.k;
  if (o.n_subsets && o.coverage) {
    throw ConfigError("--n-subsets and --coverage are mutually exclusive");
  }
  if (o.n_subsets) {
    cfg.n_subsets = *o.n_subsets;
    cfg.target_coverage.reset();
  }
  if (o.coverage) {
    cfg.target_coverage = *o.coverage;
    cfg.n_subsets.reset();
  }
  if (o.adjust) cfg.adjustment = parse_adjustment(*o.adjust);
  if (o.rounds) cfg.rounds = *o.rounds;
  if (o.learner) cfg.learner.kind = parse_learner_kind(*o.learner);
}

// Command-line runs require a proper significance level; the library also
// accepts the 0 and 1 boundaries.
void validate_for_cli(const HarvestConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    std::ostringstream msg;
    msg << "field 'alpha': must satisfy 0 < alpha < 1, got " << cfg.alpha;
    throw ConfigError(msg.str());
  }
  cfg.validate();
}

unsigned resolve_worker_flag(const std::optional<unsigned>& flag, std::optional<unsigned> from_config) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
      throw ConfigError(std::string(kWorkersEnv) + " must be a non-negative integer");
    }
    return static_cast<unsigned>(v);
  }
  return 0;
}

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot read ") + what + " '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// ----------------------------------------------------------------------------
// screen

struct ScreenRun {
  fs::path input;
  ColumnRef outcome_column = std::string("y");
  OutcomeKind outcome_kind = OutcomeKind::Continuous;
  std::optional<double> split_fraction;
  std::uint64_t split_seed = 0;
  std::optional<std::string> output;
  std::optional<unsigned> workers;
  HarvestConfig harvest;
};

ScreenRun load_screen_config(const fs::path& path) {
  const std::string text = read_file(path, "config");
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ScreenRun run;
  auto check = [&](const char* key, bool ok, const char* expected) {
    if (!ok) throw ConfigError(std::string("field '") + key + "': expected " + expected);
  };
  const fs::path base = path.parent_path();
  if (doc.contains("input")) {
    check("input", doc["input"].is_string(), "a path string");
    fs::path in = doc["input"].get<std::string>();
    run.input = in.is_relative() ? base / in : in;
  }
  if (doc.contains("outcome_column")) {
    const auto& c = doc["outcome_column"];
    check("outcome_column", c.is_string() || c.is_number_unsigned(), "a name or column index");
    if (c.is_string()) {
      run.outcome_column = c.get<std::string>();
    } else {
      run.outcome_column = c.get<std::size_t>();
    }
  }
  if (doc.contains("outcome_kind")) {
    check("outcome_kind", doc["outcome_kind"].is_string(), "continuous or binary");
    run.outcome_kind = parse_outcome_kind(doc["outcome_kind"].get<std::string>());
  }
  if (doc.contains("split")) {
    const auto& s = doc["split"];
    check("split", s.is_object() && s.contains("fraction") && s["fraction"].is_number(),
          "an object with a numeric 'fraction'");
    run.split_fraction = s["fraction"].get<double>();
    if (s.contains("seed")) {
      check("split.seed", s["seed"].is_number_unsigned(), "a non-negative integer");
      run.split_seed = s["seed"].get<std::uint64_t>();
    }
  }
  if (doc.contains("output")) {
    check("output", doc["output"].is_string(), "a path string");
    fs::path out = doc["output"].get<std::string>();
    run.output = (out.is_relative() ? base / out : out).string();
  }
  if (doc.contains("workers")) {
    check("workers", doc["workers"].is_number_unsigned(), "a non-negative integer");
    run.workers = doc["workers"].get<unsigned>();
  }
  if (doc.contains("harvest")) run.harvest = config_from_json(doc["harvest"].dump());
  return run;
}

Json column_json(const ColumnRef& c) {
  if (const auto* name = std::get_if<std::string>(&c)) return *name;
  return std::get<std::size_t>(c);
}

void print_round_table(std::ostream& out, const RoundReport& round, const Dataset& ds) {
  out << "round " << round.round_index + 1 << ": " << round.candidate_features.size()
      << " candidates, k=" << round.subset_size << ", n=" << round.n_subsets << ", "
      << round.survivors.size() << " survivors";
  if (round.failed_fits > 0) out << ", " << round.failed_fits << " failed fits";
  out << " (" << std::fixed << std::setprecision(2)
      << std::chrono::duration<double>(round.wall_time).count() << " s)\n";
  out.unsetf(std::ios::floatfield);

  std::vector<const FeatureTestResult*> rows;
  for (const auto& r : round.results) {
    if (r.selected) rows.push_back(&r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return a->p_value < b->p_value;
  });
  if (rows.empty()) {
    out << "  (no survivors)\n";
    return;
  }
  std::size_t name_width = 7;
  for (const auto* r : rows) name_width = std::max(name_width, ds.feature_names()[r->feature].size());
  out << "  " << std::left << std::setw(static_cast<int>(name_width)) << "feature" << std::right
      << std::setw(8) << "n_i" << std::setw(12) << "avg_rank" << std::setw(10) << "z"
      << std::setw(13) << "p" << std::setw(13) << "p_adj" << '\n';
  for (const auto* r : rows) {
    out << "  " << std::left << std::setw(static_cast<int>(name_width))
        << ds.feature_names()[r->feature] << std::right << std::setw(8) << r->n_i << std::fixed
        << std::setprecision(2) << std::setw(12) << r->avg_rank << std::setw(10) << r->z
        << std::scientific << std::setprecision(3) << std::setw(13) << r->p_value << std::setw(13)
        << r->p_adjusted << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

int cmd_screen(const std::optional<std::string>& config_path, const std::optional<std::string>& input,
               const std::optional<std::string>& outcome, const std::optional<std::string>& outcome_kind,
               const std::optional<double>& split_fraction, const Overrides& o, std::ostream& out) {
  // Configuration: file, then flags.
  ScreenRun run = config_path ? load_screen_config(*config_path) : ScreenRun{};
  if (input) run.input = *input;
  if (outcome) {
    const bool numeric = !outcome->empty() &&
                         std::all_of(outcome->begin(), outcome->end(), [](unsigned char c) { return std::isdigit(c); });
    if (numeric) {
      run.outcome_column = static_cast<std::size_t>(std::stoull(*outcome));
    } else {
      run.outcome_column = *outcome;
    }
  }
  if (outcome_kind) run.outcome_kind = parse_outcome_kind(*outcome_kind);
  if (split_fraction) run.split_fraction = *split_fraction;
  if (o.output) run.output = *o.output;
  apply(o, run.harvest);
  if (run.input.empty()) throw ConfigError("field 'input': no input CSV given (config or --input)");
  if (run.split_fraction && !(*run.split_fraction > 0.0 && *run.split_fraction < 1.0)) {
    throw ConfigError("field 'split.fraction': must satisfy 0 < fraction < 1");
  }
  if (!run.output) throw ConfigError("field 'output': no report path given (config or --output)");
  validate_for_cli(run.harvest);
  check_compatible(run.harvest.learner, run.outcome_kind);
  const unsigned workers = resolve_worker_flag(o.workers, run.workers);

  // Data.
  const Dataset full = load_csv(run.input, run.outcome_column, run.outcome_kind);
  std::optional<SplitPair> parts;
  if (run.split_fraction) parts = split(full, *run.split_fraction, run.split_seed);
  const Dataset& train = parts ? parts->train : full;

  out << "screening " << train.rows() << " observations x " << train.cols() << " features ("
      << to_string(run.harvest.learner.kind) << ", alpha=" << run.harvest.alpha
      << ", adjust=" << to_string(run.harvest.adjustment) << ")\n";
  const HarvestReport report = harvest::run(train, run.harvest, workers);
  for (const auto& round : report.rounds) print_round_table(out, round, train);
  out << "stopped: " << to_string(report.stop_reason) << "; " << report.final_features.size()
      << " features selected\n";

  Json doc = Json::parse(report_to_json(report));
  Json run_info{{"input", run.input.generic_string()},
                {"outcome_column", column_json(run.outcome_column)},
                {"outcome_kind", to_string(run.outcome_kind)},
                {"observations", full.rows()},
                {"features", full.cols()}};
  if (parts) {
    run_info["split"] = Json{{"fraction", parts->fraction},
                             {"seed", parts->seed},
                             {"train_rows", parts->train_rows.size()},
                             {"holdout_rows", parts->holdout_rows.size()}};
  }
  doc["run"] = std::move(run_info);

  if (parts && !report.final_features.empty()) {
    FeatureSubset chosen;
    for (const auto& f : report.final_features) chosen.indices.push_back(f.index);
    const FitResult model = fit(parts->train, chosen, run.harvest.learner);
    const double holdout_accuracy = evaluate(parts->holdout, chosen, model, run.harvest.learner);
    doc["validation"] = Json{{"criterion", run.harvest.learner.kind == LearnerKind::OlsRSquared ? "r2" : "auc"},
                             {"train_accuracy", model.accuracy},
                             {"holdout_accuracy", holdout_accuracy}};
    out << "validation: train " << model.accuracy << ", holdout " << holdout_accuracy << '\n';
  }

  write_file(*run.output, doc.dump(2) + "\n");
  out << "report written to " << *run.output << '\n';
  return kOk;
}

// ----------------------------------------------------------------------------
// reproduce

void print_triplet(std::ostream& out, const MinMedMax& v) {
  out << std::fixed << std::setprecision(1) << std::setw(7) << v.min << std::setw(7) << v.median
      << std::setw(7) << v.max;
  out.unsetf(std::ios::floatfield);
}

MinMedMax abs_diff(const MinMedMax& a, const MinMedMax& b) {
  return {std::fabs(a.min - b.min), std::fabs(a.median - b.median), std::fabs(a.max - b.max)};
}

Json triplet_json(const MinMedMax& v) {
  return Json{{"min", v.min}, {"median", v.median}, {"max", v.max}};
}

int cmd_reproduce(const std::string& table_name, const std::optional<std::size_t>& replications,
                  const Overrides& o, std::ostream& out) {
  const PaperTable table = parse_paper_table(table_name);
  SimSpec spec;
  spec.n_obs = table_n_obs(table);
  if (o.seed) spec.seed = *o.seed;
  if (replications) spec.replications = *replications;
  Overrides harvest_flags = o;
  harvest_flags.seed.reset();
  apply(harvest_flags, spec.harvest);
  validate_for_cli(spec.harvest);
  spec.validate();
  const unsigned workers = resolve_worker_flag(o.workers, std::nullopt);

  const SimSpec reference;
  const bool reduced = spec.replications != reference.replications ||
                       config_to_json(spec.harvest) != config_to_json(SimSpec::default_harvest());

  out << "reproducing " << to_string(table) << ": n_obs=" << spec.n_obs
      << ", replications=" << spec.replications << ", k=" << spec.harvest.subset_size
      << ", n=" << spec.harvest.subsets_for(spec.p, spec.harvest.subset_size)
      << ", alpha=" << spec.harvest.alpha << " (" << to_string(spec.harvest.adjustment) << ")"
      << ", seed=" << spec.seed << (reduced ? "  [REDUCED: differs from published settings]" : "")
      << '\n';

  const SimSummary summary = run_study(spec, workers);
  const MethodRow& published = published_harvest_row(table);

  out << '\n' << std::left << std::setw(16) << "" << std::right << std::setw(21)
      << "sensitivity (%)" << std::setw(21) << "specificity (%)" << '\n';
  out << std::left << std::setw(16) << "" << std::right;
  for (int i = 0; i < 2; ++i) out << std::setw(7) << "min" << std::setw(7) << "median" << std::setw(7) << "max";
  out << '\n';
  auto line = [&](const std::string& label, const MinMedMax& sens, const MinMedMax& spec_v) {
    out << std::left << std::setw(16) << label << std::right;
    print_triplet(out, sens);
    print_triplet(out, spec_v);
    out << '\n';
  };
  const MinMedMax sens = summary.sensitivity.value_or(MinMedMax{});
  const MinMedMax spec_v = summary.specificity.value_or(MinMedMax{});
  line("HARVEST (run)", sens, spec_v);
  line("HARVEST (pub.)", published.sensitivity, published.specificity);
  line("|difference|", abs_diff(sens, published.sensitivity), abs_diff(spec_v, published.specificity));
  out << "\npublished comparison rows:\n";
  for (const auto& row : published_rows(table)) line(std::string(row.method), row.sensitivity, row.specificity);

  out << "\nselection counts per feature (out of " << summary.replications << "):\n ";
  for (std::size_t j = 0; j < summary.selection_counts.size(); ++j) {
    out << ' ' << summary.selection_counts[j];
    if (j + 1 == summary.relevant.size()) out << " |";
  }
  out << '\n';

  if (o.output) {
    Json doc{{"format", "harvest-reproduction"},
             {"version", version()},
             {"table", to_string(table)},
             {"reduced", reduced},
             {"spec", Json::parse(sim_spec_to_json(spec))},
             {"summary", Json::parse(summary_to_json(summary))},
             {"published", Json{{"sensitivity", triplet_json(published.sensitivity)},
                                {"specificity", triplet_json(published.specificity)}}}};
    if (summary.sensitivity && summary.specificity) {
      doc["abs_difference"] = Json{{"sensitivity", triplet_json(abs_diff(sens, published.sensitivity))},
                                   {"specificity", triplet_json(abs_diff(spec_v, published.specificity))}};
    }
    write_file(*o.output, doc.dump(2) + "\n");
    out << "report written to " << *o.output << '\n';
  }
  return kOk;
}

// ----------------------------------------------------------------------------
// plan

int cmd_plan(std::size_t p, std::size_t k, double coverage, std::ostream& out) {
  const std::size_t n = plan_n_for_coverage(p, k, coverage);
  const double mean = static_cast<double>(n) * static_cast<double>(k) / static_cast<double>(p);
  out << "n = " << n << '\n';
  out << "expected subsets per feature = " << mean << '\n';
  out << "sd = " << std::sqrt(mean) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature relevance screening with random subsets and rank-sum tests", "harvest-cli"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  Overrides screen_flags;
  std::optional<std::string> config_path, input, outcome, outcome_kind;
  std::optional<double> split_fraction;
  auto* screen = app.add_subcommand("screen", "Screen the features of a CSV dataset");
  screen->add_option("--config", config_path, "JSON run configuration");
  screen->add_option("--input", input, "Input CSV (overrides the config)");
  screen->add_option("--outcome", outcome, "Outcome column name or zero-based index");
  screen->add_option("--outcome-kind", outcome_kind, "continuous or binary");
  screen->add_option("--split", split_fraction, "Screen on a random training fraction, validate on the rest");
  add_common_flags(*screen, screen_flags);

  Overrides repro_flags;
  std::string table_name;
  std::optional<std::size_t> replications;
  auto* reproduce = app.add_subcommand("reproduce", "Rerun the published simulation study");
  reproduce->add_option("table", table_name, "table1 (n_obs=50) or table2 (n_obs=100)")->required();
  reproduce->add_option("--replications", replications, "Number of replications (default 100)");
  add_common_flags(*reproduce, repro_flags);

  std::size_t plan_p = 0, plan_k = 0;
  double plan_coverage = 100.0;
  auto* plan = app.add_subcommand("plan", "Number of subsets needed for a target coverage");
  plan->add_option("--p", plan_p, "Number of features")->required();
  plan->add_option("--k", plan_k, "Features per subset")->required();
  plan->add_option("--coverage", plan_coverage, "Target expected subsets per feature");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*screen) {
      return cmd_screen(config_path, input, outcome, outcome_kind, split_fraction, screen_flags, out);
    }
    if (*reproduce) return cmd_reproduce(table_name, replications, repro_flags, out);
    if (*plan) return cmd_plan(plan_p, plan_k, plan_coverage, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace harvest::cli
