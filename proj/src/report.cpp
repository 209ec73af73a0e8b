#include <fstream>
#include <sstream>

#include <json.hpp>

#include "augsel/experiment.hpp"
#include "augsel/textio.hpp"

namespace augsel {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  return out;
}

std::string stamp(const ExperimentReport& report) {
  json cfg = json::parse(report.config_json);
  return "# augsel " + std::string(kVersion) + " config_hash=" + report.config_hash +
         " seed=" + std::to_string(cfg.at("seed").get<std::uint64_t>());
}

}  // namespace

void write_report_files(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string header = stamp(report);

  {
    auto out = open_out(out_dir / "curves.csv");
    out << header << "\npolicy,repeat,budget,accuracy\n";
    for (const auto& outcome : report.policies)
      for (std::size_t r = 0; r < outcome.repeats.size(); ++r)
        for (const auto& [budget, acc] : outcome.repeats[r].curve)
          out << outcome.policy.display_name() << ',' << r << ',' << static_cast<long>(budget)
              << ',' << format_double(acc) << '\n';
  }
  {
    auto out = open_out(out_dir / "auc.csv");
    out << header << "\npolicy,auc_mean,auc_std\n";
    for (const auto& outcome : report.policies) {
      out << outcome.policy.display_name() << ',' << format_double(outcome.auc_mean) << ',';
      if (outcome.auc_std) out << format_double(*outcome.auc_std);
      out << '\n';
    }
  }
  {
    auto out = open_out(out_dir / "histogram.csv");
    out << header << "\nmetric,bin_lo,bin_hi,count\n";
    for (const auto& [metric, hist] : report.initial_histograms) {
      const double width =
          hist.counts.size() > 1 ? (hist.hi - hist.lo) / static_cast<double>(hist.counts.size()) : 0.0;
      for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        const double lo = hist.lo + width * static_cast<double>(b);
        const double hi = b + 1 == hist.counts.size() ? hist.hi : lo + width;
        out << metric_name(metric) << ',' << format_double(lo) << ',' << format_double(hi) << ','
            << hist.counts[b] << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir / "influence_pairs.csv");
    out << header << "\npolicy,index,initial_abs_influence,final_abs_influence\n";
    for (const auto& outcome : report.policies)
      for (std::size_t i = 0; i < outcome.influence_pairs.size(); ++i)
        out << outcome.policy.display_name() << ',' << i << ','
            << format_double(outcome.influence_pairs[i].first) << ','
            << format_double(outcome.influence_pairs[i].second) << '\n';
  }
  {
    json j;
    j["version"] = kVersion;
    j["config"] = json::parse(report.config_json);
    j["config_hash"] = report.config_hash;
    j["n_train"] = report.n_train;
    j["feature_dim"] = report.feature_dim;
    j["member_count"] = report.member_count;
    j["n_test_rows"] = report.n_test_rows;
    j["class_split"] = {{"positive", report.split_positive}, {"negative", report.split_negative}};
    j["unaugmented_accuracy"] = report.unaugmented_accuracy;
    j["policies"] = json::array();
    for (const auto& outcome : report.policies) {
      json p;
      p["name"] = outcome.policy.display_name();
      p["kind"] = policy_kind_name(outcome.policy.kind);
      p["metric"] = metric_name(outcome.policy.metric);
      p["realized_budget"] = outcome.realized_budget;
      p["repeats"] = outcome.repeats.size();
      json seeds = json::array();
      for (const auto& rep : outcome.repeats) seeds.push_back(rep.seed);
      p["repeat_seeds"] = seeds;
      p["auc_mean"] = outcome.auc_mean;
      if (outcome.auc_std)
        p["auc_std"] = *outcome.auc_std;
      else
        p["auc_std"] = nullptr;
      if (outcome.pair_correlation) {
        p["influence_pair_spearman"] = {{"rho", outcome.pair_correlation->rho},
                                        {"p_approx", outcome.pair_correlation->p_approx},
                                        {"p_is_approximate", true}};
      }
      j["policies"].push_back(p);
    }
    auto out = open_out(out_dir / "report.json");
    out << j.dump(2) << '\n';
  }
}

std::string render_report_summary(const std::filesystem::path& report_dir) {
  std::ifstream in(report_dir / "report.json");
  require(static_cast<bool>(in), ErrorKind::io,
          "no report.json under " + report_dir.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    raise(ErrorKind::format, std::string("report.json is not valid JSON: ") + e.what());
  }

  std::ostringstream out;
  out << "config_hash " << j.at("config_hash").get<std::string>() << "\n";
  out << "train n=" << j.at("n_train").get<int>() << " dim=" << j.at("feature_dim").get<int>()
      << " split=" << j.at("class_split").at("positive").get<int>() << "/"
      << j.at("class_split").at("negative").get<int>()
      << " members_per_point=" << j.at("member_count").get<int>() << "\n";
  out << "poisoned test rows=" << j.at("n_test_rows").get<int>()
      << " unaugmented_accuracy=" << format_double(j.at("unaugmented_accuracy").get<double>())
      << "\n\n";

  // AUC table, best first, dash for single-run policies
  struct Row {
    std::string name;
    double mean;
    std::string std;
  };
  std::vector<Row> rows;
  for (const auto& p : j.at("policies")) {
    Row row;
    row.name = p.at("name").get<std::string>();
    row.mean = p.at("auc_mean").get<double>();
    row.std = p.at("auc_std").is_null() ? "-" : format_double(p.at("auc_std").get<double>());
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.mean > b.mean; });
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  out << std::string(width - 6, ' ') << "policy  auc_mean  auc_std\n";
  for (const auto& r : rows) {
    out << std::string(width - r.name.size(), ' ') << r.name << "  " << format_double(r.mean)
        << "  " << r.std << "\n";
  }
  return out.str();
}

}  // namespace augsel
