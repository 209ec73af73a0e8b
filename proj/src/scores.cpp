#include "augsel/scores.hpp"

#include <cmath>
#include <fstream>

#include "augsel/textio.hpp"

namespace augsel {

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::loss: return "loss";
    case Metric::influence: return "influence";
    case Metric::margin_abs: return "margin_abs";
    case Metric::margin_inv: return "margin_inv";
    case Metric::uniform: return "uniform";
  }
  return "?";
}

Metric metric_from_name(const std::string& name) {
  if (name == "loss") return Metric::loss;
  if (name == "influence") return Metric::influence;
  if (name == "margin_abs") return Metric::margin_abs;
  if (name == "margin_inv") return Metric::margin_inv;
  if (name == "uniform") return Metric::uniform;
  raise(ErrorKind::invalid_argument, "unknown metric: " + name);
}

void ScoreVector::validate() const {
  for (double v : values)
    require(v >= 0.0 && std::isfinite(v), ErrorKind::data, "scores must be finite and nonnegative");
}

void save_scores_csv(const ScoreVector& scores, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  out << "index,score,metric,model_version\n";
  const std::string tag = metric_name(scores.metric) + (scores.inverted ? ":inverted" : "");
  for (std::size_t i = 0; i < scores.values.size(); ++i)
    out << i << ',' << format_double(scores.values[i]) << ',' << tag << ','
        << scores.model_version << '\n';
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

ScoreVector load_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open: " + path.string());
  ScoreVector scores;
  std::string line;
  int lineno = 0;
  bool saw_rows = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!saw_rows && !parse_double(fields[0]).has_value()) continue;  // header
    require(fields.size() == 4, ErrorKind::format,
            path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
    auto idx = parse_double(fields[0]);
    auto val = parse_double(fields[1]);
    auto ver = parse_double(fields[3]);
    require(idx && val && ver, ErrorKind::parse,
            path.string() + ":" + std::to_string(lineno) + ": bad numeric cell");
    require(static_cast<int>(*idx) == static_cast<int>(scores.values.size()), ErrorKind::format,
            path.string() + ":" + std::to_string(lineno) + ": indices must be 0,1,2,...");
    std::string tag(fields[2]);
    bool inverted = false;
    if (auto pos = tag.find(":inverted"); pos != std::string::npos) {
      inverted = true;
      tag = tag.substr(0, pos);
    }
    Metric metric = metric_from_name(tag);
    if (!saw_rows) {
      scores.metric = metric;
      scores.inverted = inverted;
      scores.model_version = static_cast<int>(*ver);
      saw_rows = true;
    } else {
      require(metric == scores.metric && inverted == scores.inverted, ErrorKind::format,
              path.string() + ": metric tag must be uniform across rows");
    }
    scores.values.push_back(*val);
  }
  require(saw_rows, ErrorKind::format, path.string() + ": no score rows");
  scores.validate();
  return scores;
}

}  // namespace augsel
