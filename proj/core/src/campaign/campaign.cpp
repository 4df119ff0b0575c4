#include "nrucoex/campaign/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace nrucoex::campaign {

std::string label_directory(std::string_view label) {
  std::string s(label);
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::string& text, std::size_t min_columns, const char* what) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() < min_columns) throw std::runtime_error(std::string("malformed row in ") + what + ": '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<CampaignRun> run_campaign(const CampaignConfig& cfg, const CampaignOptions& options) {
  if (options.seeds == 0) throw std::invalid_argument("run_campaign: at least one seed is required");
  if (options.parallelism < 1) throw std::invalid_argument("run_campaign: parallelism must be >= 1");
  const auto modes = cfg.modes();
  std::vector<CampaignRun> runs;
  for (const auto& m : modes)
    for (std::uint64_t k = 0; k < options.seeds; ++k) runs.push_back({m.label, cfg.first_seed + k, std::nullopt, {}});

  if (!options.out.empty()) {
    std::filesystem::create_directories(options.out);
    write_file(options.out / "config.txt", cfg.canonical());
  }

  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < runs.size();) {
      CampaignRun& run = runs[i];
      try {
        const auto mode = *find_access_mode(run.label);
        RunResult r = run_simulation(cfg, mode, run.seed, options.run);
        if (!options.out.empty())
          write_run_outputs(options.out / label_directory(run.label) / ("seed_" + std::to_string(run.seed)), r);
        run.result = std::move(r);
      } catch (const std::exception& e) {
        run.error = e.what();
      }
      if (options.on_finished) {
        std::lock_guard lock(report_mutex);
        options.on_finished(run);
      }
    }
  };
  const int threads = std::min<int>(options.parallelism, static_cast<int>(runs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!options.out.empty()) {
    std::string index = "label,seed,status,config_hash\n";
    std::vector<ReportRun> ok;
    for (const auto& r : runs) {
      index += r.label + "," + std::to_string(r.seed) + ",";
      if (r.ok()) {
        index += "ok," + hash_hex(r.result->config_hash) + "\n";
        ok.push_back(report_run_from_csv(r.result->run_info_csv, r.result->metrics_csv, r.result->scenario_csv));
      } else {
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        index += "error: " + msg + "," + hash_hex(cfg.hash()) + "\n";
      }
    }
    write_file(options.out / "runs.csv", index);
    if (!ok.empty()) {
      std::ostringstream os;
      write_boxstats_csv(os, emit_report(ok));
      write_file(options.out / "boxstats.csv", os.str());
    }
  }
  return runs;
}

ReportRun report_run_from_csv(const std::string& run_info, const std::string& metrics_text, const std::string& scenario) {
  ReportRun r;
  for (const auto& row : read_rows(run_info, 2, "run_info.csv")) {
    if (row[0] == "label") r.label = row[1];
    else if (row[0] == "seed") r.seed = std::stoull(row[1]);
    else if (row[0] == "config_hash") r.config_hash = row[1];
    else if (row[0] == "operator_a") r.operator_technology[0] = row[1];
    else if (row[0] == "operator_b") r.operator_technology[1] = row[1];
  }
  if (r.label.empty() || r.config_hash.empty()) throw std::runtime_error("run_info.csv lacks label or config_hash");
  for (const auto& row : read_rows(metrics_text, 3, "metrics.csv")) {
    double v = 0.0;
    const auto& s = row[2];
    if (std::from_chars(s.data(), s.data() + s.size(), v).ec != std::errc{})
      throw std::runtime_error("metrics.csv: bad value '" + s + "'");
    r.metrics.push_back({row[0], row[1], v});
  }
  for (const auto& row : read_rows(scenario, 7, "scenario.csv")) {
    const std::string& role = row[2];
    r.device_technology[row[0]] = (role == "gNB" || role == "UE") ? "NR-U" : "WiGig";
  }
  return r;
}

ReportRun report_run_from_dir(const std::filesystem::path& dir) {
  return report_run_from_csv(slurp(dir / "run_info.csv"), slurp(dir / "metrics.csv"), slurp(dir / "scenario.csv"));
}

std::vector<ReportRun> load_runs(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file() && entry.path().filename() == "run_info.csv") dirs.push_back(entry.path().parent_path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<ReportRun> runs;
  for (const auto& d : dirs) runs.push_back(report_run_from_dir(d));
  return runs;
}

std::vector<BoxRow> emit_report(const std::vector<ReportRun>& runs) {
  if (runs.empty()) throw std::invalid_argument("emit_report: no runs");
  for (const auto& r : runs)
    if (r.config_hash != runs.front().config_hash)
      throw std::invalid_argument("emit_report: runs come from different configurations (" + runs.front().config_hash +
                                  " vs " + r.config_hash + ")");

  // (label, metric, technology) -> samples
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> pools;
  for (const auto& r : runs) {
    for (const auto& m : r.metrics) {
      std::string tech;
      if (m.metric == "occupancy") {
        tech = r.operator_technology[m.scope == "A" ? 0 : 1];
      } else {
        auto it = r.device_technology.find(m.scope);
        if (it == r.device_technology.end()) throw std::runtime_error("metrics.csv names unknown device " + m.scope);
        tech = it->second;
      }
      pools[{r.label, m.metric, tech}].push_back(m.value);
    }
  }

  auto label_rank = [](const std::string& label) {
    const auto& modes = access_modes();
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (modes[i].label == label) return i;
    return modes.size();
  };
  auto metric_rank = [](const std::string& m) { return m == "occupancy" ? 0 : m == "latency_us" ? 1 : 2; };

  std::vector<BoxRow> rows;
  for (auto& [key, samples] : pools) {
    BoxRow row;
    std::tie(row.label, row.metric, row.technology) = key;
    row.stats = metrics::box_stats(samples);
    row.samples = samples.size();
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const BoxRow& a, const BoxRow& b) {
    return std::make_tuple(label_rank(a.label), a.label, metric_rank(a.metric), a.technology) <
           std::make_tuple(label_rank(b.label), b.label, metric_rank(b.metric), b.technology);
  });
  return rows;
}

void write_boxstats_csv(std::ostream& os, const std::vector<BoxRow>& rows) {
  os << "label,metric,technology,min,p5,p50,p95,max\n";
  for (const auto& r : rows)
    os << r.label << ',' << r.metric << ',' << r.technology << ',' << fmt(r.stats.min) << ',' << fmt(r.stats.p5) << ','
       << fmt(r.stats.p50) << ',' << fmt(r.stats.p95) << ',' << fmt(r.stats.max) << '\n';
}

}  // namespace nrucoex::campaign
