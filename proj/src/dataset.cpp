#include "augsel/dataset.hpp"

#include <cmath>
#include <fstream>

#include "augsel/rng.hpp"
#include "augsel/textio.hpp"

namespace augsel {

double Dataset::total_weight() const {
  double sum = 0.0;
  for (const auto& ex : examples) sum += ex.weight;
  return sum;
}

void Dataset::push_back(LabeledExample ex) {
  if (examples.empty() && feature_dim == 0) feature_dim = static_cast<int>(ex.features.size());
  require(static_cast<int>(ex.features.size()) == feature_dim, ErrorKind::invalid_argument,
          "example feature dimension does not match dataset");
  require(ex.label == 1 || ex.label == -1, ErrorKind::label, "labels must be +1 or -1");
  examples.push_back(std::move(ex));
}

void Dataset::validate_for_fit() const {
  require(!examples.empty(), ErrorKind::data, "dataset is empty");
  double w_pos = 0.0, w_neg = 0.0;
  for (const auto& ex : examples) {
    require(ex.weight >= 0.0 && std::isfinite(ex.weight), ErrorKind::data,
            "weights must be finite and nonnegative");
    require(ex.features.allFinite(), ErrorKind::data, "features must be finite");
    (ex.label > 0 ? w_pos : w_neg) += ex.weight;
  }
  require(w_pos + w_neg > 0.0, ErrorKind::data, "total weight must be positive");
  require(w_pos > 0.0 && w_neg > 0.0, ErrorKind::data,
          "both classes must be present with positive weight");
}

DesignMatrix to_design(const Dataset& data) {
  const int n = data.size();
  DesignMatrix d;
  d.X.resize(n, data.feature_dim);
  d.y.resize(n);
  d.w.resize(n);
  for (int i = 0; i < n; ++i) {
    d.X.row(i) = data.examples[i].features;
    d.y[i] = data.examples[i].label;
    d.w[i] = data.examples[i].weight;
  }
  return d;
}

Dataset load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open: " + path.string());
  Dataset data;
  std::string line;
  int lineno = 0;
  bool saw_rows = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!saw_rows) {
      // optional header: skip the first row when its leading cell is not numeric
      if (!parse_double(fields[0]).has_value()) continue;
    }
    require(fields.size() >= 2, ErrorKind::format,
            path.string() + ":" + std::to_string(lineno) + ": need a label and features");
    if (saw_rows)
      require(static_cast<int>(fields.size()) == data.feature_dim + 1, ErrorKind::format,
              path.string() + ":" + std::to_string(lineno) + ": ragged row");
    auto lab_val = parse_double(fields[0]);
    require(lab_val.has_value(), ErrorKind::parse,
            path.string() + ":" + std::to_string(lineno) + ": bad label cell");
    int label;
    if (*lab_val == 1.0)
      label = 1;
    else if (*lab_val == 0.0 || *lab_val == -1.0)
      label = -1;
    else
      raise(ErrorKind::label,
            path.string() + ":" + std::to_string(lineno) + ": label must be one of {0,1,-1,+1}");
    LabeledExample ex;
    ex.label = label;
    ex.weight = 1.0;
    ex.origin_id = data.size();
    ex.features.resize(static_cast<Eigen::Index>(fields.size()) - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      auto v = parse_double(fields[j]);
      require(v.has_value(), ErrorKind::parse,
              path.string() + ":" + std::to_string(lineno) + ": non-numeric feature cell");
      require(std::isfinite(*v), ErrorKind::parse,
              path.string() + ":" + std::to_string(lineno) + ": feature must be finite");
      ex.features[static_cast<Eigen::Index>(j) - 1] = *v;
    }
    if (!saw_rows) {
      data.feature_dim = static_cast<int>(ex.features.size());
      saw_rows = true;
    }
    data.push_back(std::move(ex));
  }
  require(saw_rows, ErrorKind::format, path.string() + ": no data rows");
  return data;
}

void save_feature_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  for (const auto& ex : data.examples) {
    out << (ex.label > 0 ? "1" : "-1");
    for (Eigen::Index j = 0; j < ex.features.size(); ++j) out << ',' << format_double(ex.features[j]);
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

namespace {

BinaryTask assemble(const std::vector<std::pair<RawImage, int>>& pairs,
                    const std::vector<std::size_t>& chosen, int class_a) {
  BinaryTask task;
  task.images.reserve(chosen.size());
  for (std::size_t pos = 0; pos < chosen.size(); ++pos) {
    const auto& [img, lab] = pairs[chosen[pos]];
    LabeledExample ex;
    auto flat = flatten_scaled(img);
    ex.features = Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
    ex.label = (lab == class_a) ? 1 : -1;
    ex.weight = 1.0;
    ex.origin_id = static_cast<int>(pos);
    (ex.label > 0 ? task.n_positive : task.n_negative)++;
    task.data.push_back(std::move(ex));
    task.images.push_back(img);
  }
  return task;
}

}  // namespace

BinaryTask make_binary_task(const std::vector<std::pair<RawImage, int>>& pairs, int class_a,
                            int class_b, int n_train, std::uint64_t seed) {
  require(class_a != class_b, ErrorKind::invalid_argument, "classes must differ");
  require(n_train > 0, ErrorKind::size, "empty training set rejected");
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].second == class_a || pairs[i].second == class_b) pool.push_back(i);
  require(static_cast<std::size_t>(n_train) <= pool.size(), ErrorKind::size,
          "not enough examples of the requested classes: have " + std::to_string(pool.size()) +
              ", need " + std::to_string(n_train));
  auto eng = rng::make_engine(seed);
  auto picks = rng::sample_indices(eng, pool.size(), static_cast<std::size_t>(n_train));
  std::vector<std::size_t> chosen(picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i) chosen[i] = pool[picks[i]];
  return assemble(pairs, chosen, class_a);
}

BinaryTask filter_binary(const std::vector<std::pair<RawImage, int>>& pairs, int class_a,
                         int class_b) {
  require(class_a != class_b, ErrorKind::invalid_argument, "classes must differ");
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].second == class_a || pairs[i].second == class_b) chosen.push_back(i);
  require(!chosen.empty(), ErrorKind::size, "no examples of the requested classes");
  return assemble(pairs, chosen, class_a);
}

}  // namespace augsel
