// Command-line front end: single runs, seeded campaigns and box-statistics reports.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nrucoex/campaign/campaign.hpp"
#include "nrucoex/campaign/config.hpp"
#include "nrucoex/campaign/run.hpp"

namespace nc = nrucoex::campaign;

namespace {

nc::CampaignConfig load(const std::string& path) {
  return path.empty() ? nc::CampaignConfig{} : nc::parse_config(path);
}

int cmd_run(const std::string& config, std::uint64_t seed, const std::string& trace, const std::string& out,
            const std::string& access) {
  const auto cfg = load(config);
  const std::string label = access.empty() ? cfg.nru_access : access;
  const auto mode = nc::find_access_mode(label);
  if (!mode) {
    std::cerr << "nrucoex: unknown access mode '" << label << "'\n";
    return 2;
  }
  nc::RunOptions opts;
  opts.trace = nc::parse_trace_selection(trace);
  const auto result = nc::run_simulation(cfg, *mode, seed, opts);
  nc::write_run_outputs(out, result);
  std::cerr << "run " << label << " seed " << seed << ": " << result.events << " events, "
            << result.wall_seconds << " s wall\n";
  return 0;
}

int cmd_campaign(const std::string& config, std::uint64_t seeds, int parallel, const std::string& out,
                 const std::string& timing) {
  const auto cfg = load(config);
  nc::CampaignOptions opts;
  opts.seeds = seeds;
  opts.parallelism = parallel;
  opts.out = out;
  opts.on_finished = [](const nc::CampaignRun& r) {
    if (r.ok())
      std::cerr << r.label << " seed " << r.seed << ": ok (" << r.result->wall_seconds << " s)\n";
    else
      std::cerr << r.label << " seed " << r.seed << ": FAILED: " << r.error << '\n';
  };
  const auto runs = nc::run_campaign(cfg, opts);
  if (!timing.empty()) {
    std::ofstream os(timing);
    os << "label,seed,wall_seconds,events\n";
    for (const auto& r : runs)
      if (r.ok()) os << r.label << ',' << r.seed << ',' << r.result->wall_seconds << ',' << r.result->events << '\n';
  }
  int failed = 0;
  for (const auto& r : runs) failed += r.ok() ? 0 : 1;
  if (failed > 0) {
    std::cerr << "nrucoex: " << failed << " of " << runs.size() << " runs failed\n";
    return 1;
  }
  return 0;
}

int cmd_report(const std::string& in, const std::string& out) {
  const auto rows = nc::emit_report(nc::load_runs(in));
  if (out.empty() || out == "-") {
    nc::write_boxstats_csv(std::cout, rows);
    return 0;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) {
    std::cerr << "nrucoex: cannot write " << out << '\n';
    return 1;
  }
  nc::write_boxstats_csv(os, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR-U / WiGig coexistence simulator"};
  app.require_subcommand(1);

  std::string config, trace, out, access, timing, in;
  std::uint64_t seed = 1, seeds = 20;
  int parallel = 1;

  auto* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("--config", config, "Configuration file (defaults apply when omitted)");
  run->add_option("--seed", seed, "Random seed")->required();
  run->add_option("--trace", trace, "Comma-separated traces: cam,mac,frames");
  run->add_option("--access", access, "Access mode label, overrides nru_access");
  run->add_option("--out", out, "Output directory")->required();

  auto* campaign = app.add_subcommand("campaign", "Run every access mode over a seed range");
  campaign->add_option("--config", config, "Configuration file");
  campaign->add_option("--seeds", seeds, "Number of seeds, starting at first_seed")->check(CLI::PositiveNumber);
  campaign->add_option("--parallel", parallel, "Concurrent runs")->check(CLI::PositiveNumber);
  campaign->add_option("--out", out, "Output directory")->required();
  campaign->add_option("--timing", timing, "Write per-run wall times to this CSV (kept out of --out)");

  auto* report = app.add_subcommand("report", "Box statistics over a campaign directory");
  report->add_option("--in", in, "Campaign output directory")->required();
  report->add_option("--out", out, "boxstats.csv path, '-' for stdout");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, seed, trace, out, access);
    if (*campaign) return cmd_campaign(config, seeds, parallel, out, timing);
    if (*report) return cmd_report(in, out);
  } catch (const nc::ConfigError& e) {
    std::cerr << "nrucoex: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nrucoex: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
