#include "harvest/report.hpp"

#include "harvest/error.hpp"

#include <json.hpp>

#include <string>

#ifndef HARVEST_VERSION
#define HARVEST_VERSION "0.0.0"
#endif

namespace harvest {

using Json = nlohmann::ordered_json;

std::string_view version() { return HARVEST_VERSION; }

namespace {

template <typename T>
T field(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const Json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? field<T>(obj, key, where) : fallback;
}

Json learner_json(const LearnerSpec& spec) {
  return Json{{"kind", to_string(spec.kind)},
              {"ridge", spec.ridge},
              {"max_iterations", spec.max_iterations},
              {"tolerance", spec.tolerance}};
}

LearnerSpec learner_from(const Json& j) {
  const std::string where = "learner";
  if (!j.is_object()) throw ConfigError("learner must be an object");
  LearnerSpec spec;
  spec.kind = parse_learner_kind(field_or<std::string>(j, "kind", "ols", where));
  spec.ridge = field_or<double>(j, "ridge", spec.ridge, where);
  spec.max_iterations = field_or<int>(j, "max_iterations", spec.max_iterations, where);
  spec.tolerance = field_or<double>(j, "tolerance", spec.tolerance, where);
  return spec;
}

Json config_json(const HarvestConfig& cfg) {
  Json j{{"alpha", cfg.alpha}, {"subset_size", cfg.subset_size}};
  if (cfg.n_subsets) j["n_subsets"] = *cfg.n_subsets;
  if (cfg.target_coverage) j["target_coverage"] = *cfg.target_coverage;
  j["learner"] = learner_json(cfg.learner);
  j["adjustment"] = to_string(cfg.adjustment);
  j["rounds"] = cfg.rounds;
  j["seed"] = cfg.seed;
  return j;
}

HarvestConfig config_from(const Json& j) {
  const std::string where = "harvest config";
  if (!j.is_object()) throw ConfigError("harvest config must be an object");
  HarvestConfig cfg;
  cfg.alpha = field_or<double>(j, "alpha", cfg.alpha, where);
  cfg.subset_size = field_or<std::size_t>(j, "subset_size", cfg.subset_size, where);
  if (j.contains("n_subsets")) {
    cfg.n_subsets = field<std::size_t>(j, "n_subsets", where);
    cfg.target_coverage.reset();
  }
  if (j.contains("target_coverage")) cfg.target_coverage = field<double>(j, "target_coverage", where);
  if (j.contains("learner")) cfg.learner = learner_from(j.at("learner"));
  cfg.adjustment = parse_adjustment(field_or<std::string>(j, "adjustment", "none", where));
  cfg.rounds = field_or<std::size_t>(j, "rounds", cfg.rounds, where);
  cfg.seed = field_or<std::uint64_t>(j, "seed", cfg.seed, where);
  return cfg;
}

Json result_json(const FeatureTestResult& r) {
  return Json{{"feature", r.feature},   {"n_i", r.n_i},   {"avg_rank", r.avg_rank},
              {"mu", r.mu},             {"sigma", r.sigma}, {"z", r.z},
              {"p_value", r.p_value},   {"p_adjusted", r.p_adjusted},
              {"selected", r.selected}, {"flag", to_string(r.flag)}};
}

FeatureTestResult result_from(const Json& j) {
  const std::string where = "feature result";
  FeatureTestResult r;
  r.feature = field<std::size_t>(j, "feature", where);
  r.n_i = field<std::size_t>(j, "n_i", where);
  r.avg_rank = field<double>(j, "avg_rank", where);
  r.mu = field<double>(j, "mu", where);
  r.sigma = field<double>(j, "sigma", where);
  r.z = field<double>(j, "z", where);
  r.p_value = field<double>(j, "p_value", where);
  r.p_adjusted = field<double>(j, "p_adjusted", where);
  r.selected = field<bool>(j, "selected", where);
  r.flag = parse_test_flag(field<std::string>(j, "flag", where));
  return r;
}

Json round_json(const RoundReport& r) {
  Json results = Json::array();
  for (const auto& res : r.results) results.push_back(result_json(res));
  return Json{{"round_index", r.round_index},
              {"subset_size", r.subset_size},
              {"n_subsets", r.n_subsets},
              {"round_seed", r.round_seed},
              {"candidate_features", r.candidate_features},
              {"subsets_trained", r.subsets_trained},
              {"failed_fits", r.failed_fits},
              {"unconverged_fits", r.unconverged_fits},
              {"survivors", r.survivors},
              {"results", std::move(results)}};
}

RoundReport round_from(const Json& j) {
  const std::string where = "round";
  RoundReport r;
  r.round_index = field<std::size_t>(j, "round_index", where);
  r.subset_size = field<std::size_t>(j, "subset_size", where);
  r.n_subsets = field<std::size_t>(j, "n_subsets", where);
  r.round_seed = field<std::uint64_t>(j, "round_seed", where);
  r.candidate_features = field<std::vector<std::size_t>>(j, "candidate_features", where);
  r.subsets_trained = field<std::size_t>(j, "subsets_trained", where);
  r.failed_fits = field<std::size_t>(j, "failed_fits", where);
  r.unconverged_fits = field<std::size_t>(j, "unconverged_fits", where);
  r.survivors = field<std::vector<std::size_t>>(j, "survivors", where);
  for (const auto& res : j.at("results")) r.results.push_back(result_from(res));
  return r;
}

Json min_med_max_json(const std::optional<MinMedMax>& v) {
  if (!v) return nullptr;
  return Json{{"min", v->min}, {"median", v->median}, {"max", v->max}};
}

std::optional<MinMedMax> min_med_max_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  const std::string where = "summary";
  return MinMedMax{field<double>(j, "min", where), field<double>(j, "median", where),
                   field<double>(j, "max", where)};
}

Json parse(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

std::string config_to_json(const HarvestConfig& cfg, int indent) {
  return config_json(cfg).dump(indent);
}

HarvestConfig config_from_json(std::string_view text) {
  return config_from(parse(text, "harvest config"));
}

std::string report_to_json(const HarvestReport& report, int indent) {
  Json rounds = Json::array();
  for (const auto& r : report.rounds) rounds.push_back(round_json(r));
  Json finals = Json::array();
  for (const auto& f : report.final_features) finals.push_back(Json{{"index", f.index}, {"name", f.name}});
  const Json doc{{"format", "harvest-report"},
                 {"version", version()},
                 {"config", config_json(report.config)},
                 {"stop_reason", to_string(report.stop_reason)},
                 {"rounds", std::move(rounds)},
                 {"final_features", std::move(finals)}};
  return doc.dump(indent);
}

HarvestReport report_from_json(std::string_view text) {
  const Json doc = parse(text, "report");
  const std::string where = "report";
  if (field_or<std::string>(doc, "format", "", where) != "harvest-report") {
    throw ConfigError("report: not a harvest-report document");
  }
  HarvestReport report;
  report.config = config_from(doc.at("config"));
  report.stop_reason = parse_stop_reason(field<std::string>(doc, "stop_reason", where));
  for (const auto& r : doc.at("rounds")) report.rounds.push_back(round_from(r));
  for (const auto& f : doc.at("final_features")) {
    report.final_features.push_back(
        {field<std::size_t>(f, "index", where), field<std::string>(f, "name", where)});
  }
  return report;
}

std::string sim_spec_to_json(const SimSpec& spec, int indent) {
  const Json doc{{"p", spec.p},
                 {"beta", spec.beta},
                 {"block_correlation", spec.block_correlation},
                 {"error_variance", spec.error_variance},
                 {"n_obs", spec.n_obs},
                 {"replications", spec.replications},
                 {"seed", spec.seed},
                 {"harvest", config_json(spec.harvest)}};
  return doc.dump(indent);
}

std::string summary_to_json(const SimSummary& s, int indent) {
  const Json doc{{"format", "harvest-sim-summary"},
                 {"version", version()},
                 {"replications", s.replications},
                 {"relevant", s.relevant},
                 {"selection_counts", s.selection_counts},
                 {"sensitivity", min_med_max_json(s.sensitivity)},
                 {"specificity", min_med_max_json(s.specificity)}};
  return doc.dump(indent);
}

SimSummary summary_from_json(std::string_view text) {
  const Json doc = parse(text, "summary");
  const std::string where = "summary";
  SimSummary s;
  s.replications = field<std::size_t>(doc, "replications", where);
  s.relevant = field<std::vector<std::size_t>>(doc, "relevant", where);
  s.selection_counts = field<std::vector<std::size_t>>(doc, "selection_counts", where);
  s.sensitivity = min_med_max_from(doc.at("sensitivity"));
  s.specificity = min_med_max_from(doc.at("specificity"));
  return s;
}

}  // namespace harvest
