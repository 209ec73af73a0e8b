#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "augsel/experiment.hpp"

namespace augsel {

using nlohmann::json;

bool PolicyConfig::is_deterministic() const {
  return kind == Kind::deterministic_topk || kind == Kind::vsv;
}

std::string policy_kind_name(PolicyConfig::Kind kind) {
  switch (kind) {
    case PolicyConfig::Kind::baseline_uniform: return "baseline_uniform";
    case PolicyConfig::Kind::random_proportional: return "random_proportional";
    case PolicyConfig::Kind::deterministic_topk: return "deterministic_topk";
    case PolicyConfig::Kind::vsv: return "vsv";
    case PolicyConfig::Kind::stratified_cluster: return "stratified_cluster";
    case PolicyConfig::Kind::kdpp: return "kdpp";
  }
  return "?";
}

PolicyConfig::Kind policy_kind_from_name(const std::string& name) {
  if (name == "baseline_uniform") return PolicyConfig::Kind::baseline_uniform;
  if (name == "random_proportional") return PolicyConfig::Kind::random_proportional;
  if (name == "deterministic_topk") return PolicyConfig::Kind::deterministic_topk;
  if (name == "vsv") return PolicyConfig::Kind::vsv;
  if (name == "stratified_cluster") return PolicyConfig::Kind::stratified_cluster;
  if (name == "kdpp") return PolicyConfig::Kind::kdpp;
  raise(ErrorKind::config, "unknown policy kind: " + name);
}

std::string PolicyConfig::display_name() const {
  if (!name.empty()) return name;
  std::string base;
  switch (kind) {
    case Kind::baseline_uniform: return "baseline";
    case Kind::vsv: return "vsv";
    case Kind::random_proportional: base = inverse ? "rand_inv_prop" : "rand_prop"; break;
    case Kind::deterministic_topk: base = inverse ? "det_inv_prop" : "det_prop"; break;
    case Kind::stratified_cluster: base = "cluster"; break;
    case Kind::kdpp: base = "kdpp"; break;
  }
  base += "_" + metric_name(metric);
  if (update_scores) base += "_update";
  if (downweight) base += "_down";
  return base;
}

void PolicyConfig::validate() const {
  if (update_scores)
    require(metric == Metric::loss || metric == Metric::influence, ErrorKind::config,
            "update_scores requires the loss or influence metric");
  if (kind == Kind::baseline_uniform || kind == Kind::vsv)
    require(!inverse, ErrorKind::config,
            policy_kind_name(kind) + " has no scores to invert");
}

void ExperimentConfig::validate() const {
  require(!policies.empty(), ErrorKind::config, "at least one policy is required");
  for (const auto& p : policies) p.validate();
  require(budget >= 0, ErrorKind::config, "budget must be nonnegative");
  require(repeats >= 1, ErrorKind::config, "repeats must be at least 1");
  require(histogram_bins >= 1, ErrorKind::config, "histogram_bins must be at least 1");
  if (std::holds_alternative<IdxSource>(source)) {
    require(transform.has_value(), ErrorKind::config, "an IDX source needs a transform");
    const auto& s = std::get<IdxSource>(source);
    require(s.n_train > 0, ErrorKind::config, "n_train must be positive");
    require(s.class_a != s.class_b, ErrorKind::config, "class_a and class_b must differ");
  } else {
    require(!transform.has_value(), ErrorKind::config,
            "a CSV source carries precomputed members; remove the transform block");
  }
  if (!checkpoints.empty()) {
    require(checkpoints.front() == 0, ErrorKind::config, "checkpoints must start at 0");
    require(checkpoints.back() == budget, ErrorKind::config, "checkpoints must end at the budget");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
      require(checkpoints[i] > checkpoints[i - 1], ErrorKind::config,
              "checkpoints must be strictly ascending");
  }
  if (train.use_cv) {
    require(!train.cv_grid.empty(), ErrorKind::config, "cv_grid must be nonempty");
    require(train.cv_folds >= 2, ErrorKind::config, "cv_folds must be at least 2");
  }
  train.config.validate();
}

std::vector<int> default_checkpoints(int budget) {
  const int base[] = {0, 1, 2, 5, 10, 25, 50, 100, 250, 500, 750};
  std::vector<int> out;
  for (int b : base)
    if (b <= budget) out.push_back(b);
  if (out.empty() || out.back() != budget) out.push_back(budget);
  return out;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
  for (const auto& [key, _] : obj.items())
    require(allowed.count(key) > 0, ErrorKind::config,
            "unknown key '" + key + "' in " + context);
}

TransformSpec parse_transform(const json& j) {
  require(j.is_object(), ErrorKind::config, "transform must be an object");
  reject_unknown_keys(j, {"kind", "offset_px", "angles", "max_degrees", "count", "borders"},
                      "transform");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "translate") {
    require(j.contains("offset_px"), ErrorKind::config, "translate needs offset_px");
    return TransformSpec::make_translate(j.at("offset_px").get<int>());
  }
  if (kind == "rotate") {
    if (j.contains("angles"))
      return TransformSpec::make_rotate(j.at("angles").get<std::vector<double>>());
    require(j.contains("max_degrees") && j.contains("count"), ErrorKind::config,
            "rotate needs either angles or max_degrees+count");
    return TransformSpec::evenly_spaced_rotations(j.at("max_degrees").get<double>(),
                                                  j.at("count").get<int>());
  }
  if (kind == "crop") {
    require(j.contains("borders"), ErrorKind::config, "crop needs borders");
    return TransformSpec::make_crop(j.at("borders").get<std::vector<int>>());
  }
  raise(ErrorKind::config, "unknown transform kind: " + kind);
}

json transform_to_json(const TransformSpec& t) {
  json j;
  switch (t.kind) {
    case TransformSpec::Kind::translate:
      j["kind"] = "translate";
      j["offset_px"] = t.offset_px;
      break;
    case TransformSpec::Kind::rotate:
      j["kind"] = "rotate";
      j["angles"] = t.angles;
      break;
    case TransformSpec::Kind::crop:
      j["kind"] = "crop";
      j["borders"] = t.borders;
      break;
  }
  return j;
}

PolicyConfig parse_policy(const json& j) {
  require(j.is_object(), ErrorKind::config, "policy must be an object");
  reject_unknown_keys(j, {"kind", "metric", "update_scores", "downweight", "inverse", "name"},
                      "policy");
  PolicyConfig p;
  p.kind = policy_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("metric")) p.metric = metric_from_name(j.at("metric").get<std::string>());
  if (j.contains("update_scores")) p.update_scores = j.at("update_scores").get<bool>();
  if (j.contains("downweight")) p.downweight = j.at("downweight").get<bool>();
  if (j.contains("inverse")) p.inverse = j.at("inverse").get<bool>();
  if (j.contains("name")) p.name = j.at("name").get<std::string>();
  if (p.kind == PolicyConfig::Kind::baseline_uniform || p.kind == PolicyConfig::Kind::vsv)
    p.metric = Metric::uniform;  // these ignore scores
  return p;
}

json policy_to_json(const PolicyConfig& p) {
  json j;
  j["kind"] = policy_kind_name(p.kind);
  j["metric"] = metric_name(p.metric);
  j["update_scores"] = p.update_scores;
  j["downweight"] = p.downweight;
  j["inverse"] = p.inverse;
  if (!p.name.empty()) j["name"] = p.name;
  return j;
}

}  // namespace

TransformSpec transform_from_json_string(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::config, std::string("transform is not valid JSON: ") + e.what());
  }
  return parse_transform(j);
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::config, "config must be a JSON object");
  reject_unknown_keys(j,
                      {"dataset", "transform", "policies", "budget", "checkpoints", "repeats",
                       "seed", "train", "downweight_divisor", "histogram_bins"},
                      "config");

  ExperimentConfig cfg;
  require(j.contains("dataset"), ErrorKind::config, "missing key 'dataset'");
  const json& ds = j.at("dataset");
  require(ds.is_object() && ds.contains("kind"), ErrorKind::config,
          "dataset must be an object with a 'kind'");
  const std::string ds_kind = ds.at("kind").get<std::string>();
  if (ds_kind == "idx") {
    reject_unknown_keys(ds,
                        {"kind", "train_images", "train_labels", "test_images", "test_labels",
                         "class_a", "class_b", "n_train", "sample_seed", "n_test"},
                        "dataset");
    IdxSource s;
    s.train_images = ds.at("train_images").get<std::string>();
    s.train_labels = ds.at("train_labels").get<std::string>();
    s.test_images = ds.at("test_images").get<std::string>();
    s.test_labels = ds.at("test_labels").get<std::string>();
    s.class_a = ds.at("class_a").get<int>();
    s.class_b = ds.at("class_b").get<int>();
    s.n_train = ds.at("n_train").get<int>();
    if (ds.contains("sample_seed")) s.sample_seed = ds.at("sample_seed").get<std::uint64_t>();
    if (ds.contains("n_test")) s.n_test = ds.at("n_test").get<int>();
    cfg.source = s;
  } else if (ds_kind == "csv") {
    reject_unknown_keys(ds, {"kind", "train", "train_members", "test", "test_members"}, "dataset");
    CsvSource s;
    s.train = ds.at("train").get<std::string>();
    s.train_members = ds.at("train_members").get<std::string>();
    s.test = ds.at("test").get<std::string>();
    s.test_members = ds.at("test_members").get<std::string>();
    cfg.source = s;
  } else {
    raise(ErrorKind::config, "unknown dataset kind: " + ds_kind);
  }

  if (j.contains("transform")) cfg.transform = parse_transform(j.at("transform"));
  require(j.contains("policies") && j.at("policies").is_array(), ErrorKind::config,
          "missing key 'policies' (array)");
  for (const json& pj : j.at("policies")) cfg.policies.push_back(parse_policy(pj));
  require(j.contains("budget"), ErrorKind::config, "missing key 'budget'");
  cfg.budget = j.at("budget").get<int>();
  if (j.contains("checkpoints")) cfg.checkpoints = j.at("checkpoints").get<std::vector<int>>();
  if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
  if (j.contains("seed")) cfg.base_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("histogram_bins")) cfg.histogram_bins = j.at("histogram_bins").get<int>();
  if (j.contains("downweight_divisor")) {
    const std::string div = j.at("downweight_divisor").get<std::string>();
    if (div == "family_only")
      cfg.downweight_literal = true;
    else
      require(div == "family_plus_origin", ErrorKind::config,
              "downweight_divisor must be family_plus_origin or family_only");
  }

  if (j.contains("train")) {
    const json& tr = j.at("train");
    reject_unknown_keys(tr, {"C", "tol", "max_iter", "cv_grid", "folds"}, "train");
    if (tr.contains("cv_grid")) {
      cfg.train.use_cv = true;
      cfg.train.cv_grid = tr.at("cv_grid").get<std::vector<double>>();
      if (tr.contains("folds")) cfg.train.cv_folds = tr.at("folds").get<int>();
      require(!tr.contains("C"), ErrorKind::config, "give either C or cv_grid, not both");
    } else if (tr.contains("C")) {
      cfg.train.config.C = tr.at("C").get<double>();
    }
    if (tr.contains("tol")) cfg.train.config.tol = tr.at("tol").get<double>();
    if (tr.contains("max_iter")) cfg.train.config.max_iter = tr.at("max_iter").get<int>();
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string canonical_config_json(const ExperimentConfig& config) {
  json j;
  if (std::holds_alternative<IdxSource>(config.source)) {
    const auto& s = std::get<IdxSource>(config.source);
    j["dataset"] = {{"kind", "idx"},
                    {"train_images", s.train_images},
                    {"train_labels", s.train_labels},
                    {"test_images", s.test_images},
                    {"test_labels", s.test_labels},
                    {"class_a", s.class_a},
                    {"class_b", s.class_b},
                    {"n_train", s.n_train},
                    {"sample_seed", s.sample_seed},
                    {"n_test", s.n_test}};
  } else {
    const auto& s = std::get<CsvSource>(config.source);
    j["dataset"] = {{"kind", "csv"},
                    {"train", s.train},
                    {"train_members", s.train_members},
                    {"test", s.test},
                    {"test_members", s.test_members}};
  }
  if (config.transform) j["transform"] = transform_to_json(*config.transform);
  j["policies"] = json::array();
  for (const auto& p : config.policies) j["policies"].push_back(policy_to_json(p));
  j["budget"] = config.budget;
  j["checkpoints"] =
      config.checkpoints.empty() ? default_checkpoints(config.budget) : config.checkpoints;
  j["repeats"] = config.repeats;
  j["seed"] = config.base_seed;
  j["downweight_divisor"] = config.downweight_literal ? "family_only" : "family_plus_origin";
  j["histogram_bins"] = config.histogram_bins;
  json tr;
  if (config.train.use_cv) {
    tr["cv_grid"] = config.train.cv_grid;
    tr["folds"] = config.train.cv_folds;
  } else {
    tr["C"] = config.train.config.C;
  }
  tr["tol"] = config.train.config.tol;
  tr["max_iter"] = config.train.config.max_iter;
  j["train"] = tr;
  return j.dump(2);
}

std::string config_hash_hex(const ExperimentConfig& config) {
  const std::string text = canonical_config_json(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace augsel
