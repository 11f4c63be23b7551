#include "safs/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "safs/common.hpp"

namespace safs {

namespace {

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out << format_double(values[i]);
    } else {
      out << values[i];
    }
  }
  return out.str();
}

std::string settings_list(const std::vector<SelectorSetting>& settings) {
  std::vector<double> values;
  for (const auto& s : settings) values.push_back(setting_value(s));
  return join(values);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

const EvaluationResult* find_result(const SafsReport& report, std::size_t n, std::size_t setting_index) {
  for (const auto& r : report.all_results) {
    if (r.n == n && r.setting_index == setting_index) return &r;
  }
  return nullptr;
}

}  // namespace

std::string architectures_csv(const SafsReport& report) {
  std::ostringstream out;
  out << "n,selector_setting,mean_mse\n";
  for (const auto& r : report.all_results) {
    out << r.n << ',' << format_double(setting_value(r.setting)) << ',' << format_double(r.mean_mse) << '\n';
  }
  return out.str();
}

std::string baseline_csv(const std::vector<EvaluationResult>& baseline, const SafsReport* report) {
  std::ostringstream out;
  out << "selector_setting,baseline_mse,safs_mse\n";
  for (const auto& b : baseline) {
    out << format_double(setting_value(b.setting)) << ',' << format_double(b.mean_mse) << ',';
    if (report != nullptr) {
      if (const auto* s = find_result(*report, report->best.n, b.setting_index)) out << format_double(s->mean_mse);
    }
    out << '\n';
  }
  return out.str();
}

std::string ranking_csv(const ImportanceRanking& ranking) {
  std::ostringstream out;
  write_ranking_csv(ranking, out);
  return out.str();
}

std::string report_text(const SafsReport& report) {
  const auto& c = report.config;
  std::ostringstream out;
  out << "# SAFS run report\n";
  out << "format_version = 1\n";
  out << "selector = " << to_string(c.selector) << '\n';
  out << "rows = " << report.rows << '\n';
  out << "continuous_features = " << report.continuous_features << '\n';
  out << "categorical_features = " << report.categorical_features << '\n';
  out << "recombined_width = " << report.recombined_width << '\n';
  out << "best_n = " << report.best.n << '\n';
  out << "best_selector_setting = " << format_double(setting_value(report.best.setting)) << '\n';
  out << "best_mse = " << format_double(report.best.mean_mse) << '\n';
  const auto failed = std::count_if(report.all_results.begin(), report.all_results.end(),
                                    [](const EvaluationResult& r) { return r.failed; });
  out << "architectures_evaluated = " << report.all_results.size() << '\n';
  out << "architectures_failed = " << failed << '\n';
  out << "top_k = " << c.top_k << '\n';
  out << "seed = " << c.seed << '\n';
  out << "n_grid = " << join(report.n_grid) << '\n';
  out << "selector_settings = " << settings_list(report.settings) << '\n';
  out << "cv_folds = " << c.cv_folds << '\n';
  out << "repeats = " << c.repeats << '\n';
  out << "mtry = " << c.selector_options.mtry << '\n';
  out << "min_leaf = " << c.selector_options.min_leaf << '\n';
  out << "refit_top_k = " << c.selector_options.refit_top_k << '\n';
  out << "learning_rate = " << format_double(c.train.learning_rate) << '\n';
  out << "epochs = " << c.train.epochs << '\n';
  out << "batch_size = " << c.train.batch_size << '\n';
  out << "weight_init_scale = " << format_double(c.train.weight_init_scale) << '\n';
  out << "sae_per_fold = " << (c.sae_per_fold ? "true" : "false") << '\n';
  out << "strict = " << (c.strict ? "true" : "false") << '\n';
  out << "wall_time_seconds = " << std::fixed << std::setprecision(3) << report.wall_time_seconds << '\n';
  out.unsetf(std::ios::floatfield);

  out << "\n[architectures]\n";
  out << std::left << std::setw(8) << "n" << std::setw(20) << "selector_setting" << "mean_mse\n";
  for (const auto& r : report.all_results) {
    out << std::setw(8) << r.n << std::setw(20) << format_double(setting_value(r.setting))
        << (r.failed ? "failed: " + r.error : format_double(r.mean_mse)) << '\n';
  }
  out << "\n[baseline]\n";
  out << std::setw(20) << "selector_setting" << "mean_mse\n";
  for (const auto& r : report.baseline_results) {
    out << std::setw(20) << format_double(setting_value(r.setting))
        << (r.failed ? "failed: " + r.error : format_double(r.mean_mse)) << '\n';
  }
  out << "\n[ranking]\n";
  out << std::setw(6) << "rank" << std::setw(32) << "feature" << "weight\n";
  for (std::size_t i = 0; i < report.ranking.size(); ++i) {
    out << std::setw(6) << (i + 1) << std::setw(32) << report.ranking.entries[i].name
        << format_double(report.ranking.entries[i].weight) << '\n';
  }
  return out.str();
}

void write_report_files(const SafsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / kArchitecturesFile, architectures_csv(report));
  write_file(dir / kRankingFile, ranking_csv(report.ranking));
  write_file(dir / kBaselineFile, baseline_csv(report.baseline_results, &report));
  write_file(dir / kReportFile, report_text(report));
}

void write_baseline_files(const std::vector<EvaluationResult>& baseline, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / kBaselineFile, baseline_csv(baseline, nullptr));
}

ReportSummary read_report(const std::filesystem::path& dir) {
  ReportSummary summary;
  {
    std::ifstream in(dir / kReportFile);
    if (!in) throw DataError("cannot open '" + (dir / kReportFile).string() + "'");
    std::string line;
    while (std::getline(in, line)) {
      const auto s = trim(line);
      if (s.empty() || s.front() == '#') continue;
      if (s.front() == '[') break;
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw DataError("report.txt: malformed line '" + std::string(s) + "'");
      summary.fields[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
    }
    for (const char* key : {"best_n", "best_mse", "top_k"}) {
      if (!summary.fields.count(key)) throw DataError(std::string("report.txt: missing '") + key + "'");
    }
    double top_k = 0.0;
    if (!try_parse_double(summary.fields["top_k"], top_k) || top_k < 1.0) {
      throw DataError("report.txt: top_k must be a positive integer");
    }
  }
  std::ifstream in(dir / kRankingFile);
  if (!in) throw DataError("cannot open '" + (dir / kRankingFile).string() + "'");
  summary.ranking = read_ranking_csv(in);
  return summary;
}

std::string format_summary(const ReportSummary& summary) {
  const auto field = [&](const std::string& key) {
    auto it = summary.fields.find(key);
    return it == summary.fields.end() ? std::string("-") : it->second;
  };
  std::ostringstream out;
  out << "best architecture: n = " << field("best_n");
  if (summary.fields.count("best_selector_setting")) {
    out << " (" << field("selector") << " setting " << field("best_selector_setting") << ")";
  }
  out << '\n';
  out << "best MSE: " << field("best_mse") << '\n';
  if (summary.ranking.empty()) {
    out << "(no features selected)\n";
    return out.str();
  }
  const auto k = static_cast<std::size_t>(parse_double(field("top_k")));
  const auto names = select_top_k(summary.ranking, k);
  std::size_t width = std::string("feature").size();
  for (const auto& n : names) width = std::max(width, n.size());
  out << '\n' << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(width + 2)) << "feature"
      << std::right << std::setw(10) << "weight" << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << std::left << std::setw(6) << (i + 1) << std::setw(static_cast<int>(width + 2)) << names[i]
        << std::right << std::setw(10) << std::fixed << std::setprecision(2) << summary.ranking.entries[i].weight
        << '\n';
  }
  return out.str();
}

}  // namespace safs
