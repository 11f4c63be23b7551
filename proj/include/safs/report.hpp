#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "safs/pipeline.hpp"
#include "safs/ranking.hpp"

namespace safs {

inline constexpr const char* kReportFile = "report.txt";
inline constexpr const char* kArchitecturesFile = "architectures.csv";
inline constexpr const char* kRankingFile = "ranking.csv";
inline constexpr const char* kBaselineFile = "baseline.csv";

/// `n,selector_setting,mean_mse`, one row per (n, setting) in grid order.
std::string architectures_csv(const SafsReport& report);
/// `selector_setting,baseline_mse,safs_mse`; safs_mse is taken at the best n
/// and left empty when no sweep ran.
std::string baseline_csv(const std::vector<EvaluationResult>& baseline, const SafsReport* report);
std::string ranking_csv(const ImportanceRanking& ranking);
/// Key-value header followed by plain-text tables.
std::string report_text(const SafsReport& report);

/// Writes all four report files into `dir` (created if absent).
void write_report_files(const SafsReport& report, const std::filesystem::path& dir);
void write_baseline_files(const std::vector<EvaluationResult>& baseline, const std::filesystem::path& dir);

struct ReportSummary {
  /// Header fields of report.txt, values verbatim.
  std::map<std::string, std::string> fields;
  ImportanceRanking ranking;
};

/// Reads report.txt and ranking.csv; throws DataError when either is malformed.
ReportSummary read_report(const std::filesystem::path& dir);

/// Best architecture, best MSE and the top-k ranking as an aligned table.
std::string format_summary(const ReportSummary& summary);

}  // namespace safs
