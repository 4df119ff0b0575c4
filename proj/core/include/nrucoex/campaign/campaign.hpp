#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nrucoex/campaign/config.hpp"
#include "nrucoex/campaign/run.hpp"
#include "nrucoex/metrics/occupancy.hpp"

namespace nrucoex::campaign {

struct CampaignRun {
  std::string label;
  std::uint64_t seed = 0;
  std::optional<RunResult> result;
  std::string error;

  bool ok() const { return result.has_value(); }
};

struct CampaignOptions {
  std::uint64_t seeds = 20;
  int parallelism = 1;
  // Nothing is written when empty.
  std::filesystem::path out;
  std::function<void(const CampaignRun&)> on_finished;
  RunOptions run;
};

// "Cat4/Cat2" -> "Cat4_Cat2"; used for output directory names.
std::string label_directory(std::string_view label);

// Every (access mode x seed) pair, results in (mode, seed) order regardless of parallelism.
std::vector<CampaignRun> run_campaign(const CampaignConfig& cfg, const CampaignOptions& options);

// Per-run data the report needs, as recovered from the run's CSV files.
struct ReportRun {
  std::string label;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::array<std::string, 2> operator_technology;
  struct Row {
    std::string metric;
    std::string scope;
    double value = 0.0;
  };
  std::vector<Row> metrics;
  std::map<std::string, std::string> device_technology;  // device id -> NR-U | WiGig
};

ReportRun report_run_from_csv(const std::string& run_info, const std::string& metrics, const std::string& scenario);
ReportRun report_run_from_dir(const std::filesystem::path& dir);
// All run directories below `root` (those holding a run_info.csv), sorted by path.
std::vector<ReportRun> load_runs(const std::filesystem::path& root);

struct BoxRow {
  std::string label;
  std::string metric;
  std::string technology;
  metrics::BoxStats stats;
  std::size_t samples = 0;
};

// Latency/goodput pool per-device values across seeds; occupancy pools one value per operator per run.
std::vector<BoxRow> emit_report(const std::vector<ReportRun>& runs);
// label,metric,technology,min,p5,p50,p95,max
void write_boxstats_csv(std::ostream& os, const std::vector<BoxRow>& rows);

}  // namespace nrucoex::campaign
