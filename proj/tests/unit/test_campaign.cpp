#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nrucoex/campaign/campaign.hpp"
#include "nrucoex/campaign/config.hpp"
#include "nrucoex/campaign/run.hpp"

using namespace nrucoex;
using namespace nrucoex::campaign;

namespace {

CampaignConfig short_reduced(SimTime duration = SimTime::ms(60)) {
  auto cfg = parse_config_text("scenario = reduced\n");
  cfg.duration = duration;
  return cfg;
}

ConfigErrorKind error_kind(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ConfigErrorKind::kMissingFile;
}

std::string error_key(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nrucoex_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = parse_config_text("");
  EXPECT_EQ(c.carrier_frequency_ghz, 58.0);
  EXPECT_EQ(c.bandwidth_hz, 2.16e9);
  EXPECT_EQ(c.tx_power_dbm, 17.0);
  EXPECT_EQ(c.noise_figure_db, 7.0);
  EXPECT_EQ(c.gnb_ed_threshold_dbm, -79.0);
  EXPECT_EQ(c.ue_ed_threshold_dbm, -69.0);
  EXPECT_EQ(c.wigig_ed_threshold_dbm, -79.0);
  EXPECT_EQ(c.cca_slot, SimTime::us(5));
  EXPECT_EQ(c.defer, SimTime::us(8));
  EXPECT_EQ(c.max_cot, SimTime::ms(9));
  EXPECT_EQ(c.cat4_cws_min, 15);
  EXPECT_EQ(c.cat4_cws_max, 1023);
  EXPECT_EQ(c.duty_on, SimTime::ms(9));
  EXPECT_EQ(c.duty_off, SimTime::ms(9));
  EXPECT_EQ(c.load_bps, 50e6);
  EXPECT_EQ(c.duration, SimTime::ms(1500));
  EXPECT_EQ(c.sites_per_operator, 3);
  EXPECT_EQ(c.users_per_operator, 12);
  EXPECT_EQ(c.modes().size(), 7u);
}

TEST(Config, AccessModeInstantiatesCategories) {
  const auto c = parse_config_text("nru_access = Cat4/Cat2\n");
  const auto mode = find_access_mode(c.nru_access);
  ASSERT_TRUE(mode);
  EXPECT_EQ(c.gnb_cam(mode->gnb).category, cam::Category::kCat4);
  EXPECT_EQ(c.ue_cam(mode->ue).category, cam::Category::kCat2);
  EXPECT_EQ(c.ue_cam(mode->ue).ed_threshold_dbm, -69.0);
}

TEST(Config, QuotedValuesAndUnits) {
  const auto c = parse_config_text("tx_power = \"10 dBm\"\nduration = 200 ms\ncca_slot = 9 us\nload = 100 Mbps\n");
  EXPECT_EQ(c.tx_power_dbm, 10.0);
  EXPECT_EQ(c.duration, SimTime::ms(200));
  EXPECT_EQ(c.cca_slot, SimTime::us(9));
  EXPECT_EQ(c.load_bps, 100e6);
}

TEST(Config, ErrorKindsNameTheKey) {
  EXPECT_EQ(error_kind("ed_threshold = \"-200 dBm\"\n"), ConfigErrorKind::kOutOfRange);
  EXPECT_EQ(error_key("ed_threshold = \"-200 dBm\"\n"), "ed_threshold");
  EXPECT_EQ(error_kind("no equals sign\n"), ConfigErrorKind::kSyntax);
  EXPECT_EQ(error_kind("bogus_key = 3\n"), ConfigErrorKind::kUnknownKey);
  EXPECT_EQ(error_key("bogus_key = 3\n"), "bogus_key");
  EXPECT_EQ(error_kind("nru_access = Cat5/Cat2\n"), ConfigErrorKind::kBadValue);
  EXPECT_EQ(error_kind("tx_power = 30 dBm\n"), ConfigErrorKind::kOutOfRange);
  EXPECT_EQ(error_kind("tx_power = 10 ms\n"), ConfigErrorKind::kBadValue);
  EXPECT_EQ(error_kind("tx_power = 1\ntx_power = 2\n"), ConfigErrorKind::kSyntax);
  EXPECT_EQ(error_kind("wigig_preamble_threshold = -70 dBm\n"), ConfigErrorKind::kOutOfRange);
  EXPECT_THROW(parse_config("/nonexistent/nrucoex.conf"), ConfigError);
  try {
    parse_config("/nonexistent/nrucoex.conf");
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.kind(), ConfigErrorKind::kMissingFile);
  }
}

TEST(Config, EdShorthandSetsBothThresholds) {
  const auto c = parse_config_text("ed_threshold = -75 dBm\n");
  EXPECT_EQ(c.gnb_ed_threshold_dbm, -75.0);
  EXPECT_EQ(c.wigig_ed_threshold_dbm, -75.0);
  EXPECT_EQ(c.ue_ed_threshold_dbm, -69.0);
}

TEST(Config, PresetAppliesBeforeExplicitSizes) {
  const auto c = parse_config_text("users_per_operator = 6\nscenario = reduced\n");
  EXPECT_EQ(c.sites_per_operator, 1);
  EXPECT_EQ(c.users_per_operator, 6);
}

TEST(Config, CanonicalRoundTripsAndHashTracksValues) {
  const auto a = parse_config_text("scenario = reduced\nload = 20 Mbps\n");
  const auto b = parse_config_text(a.canonical());
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), parse_config_text("").hash());
  EXPECT_EQ(hash_hex(0xabcULL), "0000000000000abc");
}

TEST(Run, SameSeedIsBitExact) {
  const auto cfg = short_reduced();
  const auto mode = *find_access_mode("Cat4/Cat2");
  const auto a = run_simulation(cfg, mode, 3);
  const auto b = run_simulation(cfg, mode, 3);
  EXPECT_EQ(a.metrics_csv, b.metrics_csv);
  EXPECT_EQ(a.scenario_csv, b.scenario_csv);
  EXPECT_EQ(a.run_info_csv, b.run_info_csv);
  EXPECT_EQ(a.events, b.events);
  const auto c = run_simulation(cfg, mode, 4);
  EXPECT_NE(a.scenario_csv, c.scenario_csv);
}

TEST(Run, WigigOnlyBaselineHasNoNrEmissions) {
  const auto cfg = short_reduced();
  const auto r = run_simulation(cfg, *find_access_mode("WiGig-only"), 1);
  EXPECT_EQ(r.nru_emissions, 0u);
  EXPECT_GT(r.wigig_emissions, 0u);
  EXPECT_EQ(r.operator_rat[0], radio::Rat::kWigig);
  EXPECT_EQ(r.operator_rat[1], radio::Rat::kWigig);
}

TEST(Run, MetricsRespectConservationAndBounds) {
  const auto cfg = short_reduced();
  for (const auto& label : {"On/On", "Cat3/Cat2", "OnOff/OnOff"}) {
    const auto r = run_simulation(cfg, *find_access_mode(label), 2);
    ASSERT_EQ(r.devices.size(), 8u);
    for (const auto& d : r.devices) {
      EXPECT_LE(d.delivered + d.lost, d.generated) << label;
      EXPECT_LE(d.goodput_mbps, 50.0 + 1e-9) << label;
      for (double l : d.latency_us) EXPECT_GT(l, 0.0);
    }
    for (double o : r.occupancy) {
      EXPECT_GE(o, 0.0);
      EXPECT_LE(o, 1.0);
    }
  }
}

TEST(Run, RunInfoNamesHashAndSeed) {
  const auto cfg = short_reduced();
  const auto r = run_simulation(cfg, *find_access_mode("Cat3/On"), 9);
  EXPECT_NE(r.run_info_csv.find("seed,9\n"), std::string::npos);
  EXPECT_NE(r.run_info_csv.find("config_hash," + hash_hex(cfg.hash()) + "\n"), std::string::npos);
  EXPECT_NE(r.run_info_csv.find("label,Cat3/On\n"), std::string::npos);
  EXPECT_EQ(r.metrics_csv.rfind("metric,scope,value\n", 0), 0u);
}

TEST(Campaign, ResultsIndependentOfParallelism) {
  auto cfg = short_reduced(SimTime::ms(30));
  cfg.campaign_sets = {"WiGig-only", "Cat4/Cat2"};
  CampaignOptions serial;
  serial.seeds = 3;
  CampaignOptions parallel = serial;
  parallel.parallelism = 4;
  const auto a = run_campaign(cfg, serial);
  const auto b = run_campaign(cfg, parallel);
  ASSERT_EQ(a.size(), 6u);
  ASSERT_EQ(b.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_TRUE(a[i].ok() && b[i].ok());
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].result->metrics_csv, b[i].result->metrics_csv);
  }
}

TEST(Campaign, WritesOutputTree) {
  auto cfg = short_reduced(SimTime::ms(20));
  cfg.campaign_sets = {"Cat4/On"};
  CampaignOptions opts;
  opts.seeds = 2;
  opts.out = scratch("tree");
  const auto runs = run_campaign(cfg, opts);
  ASSERT_EQ(runs.size(), 2u);
  for (const char* f : {"config.txt", "runs.csv", "boxstats.csv", "Cat4_On/seed_1/metrics.csv",
                        "Cat4_On/seed_2/run_info.csv", "Cat4_On/seed_2/scenario.csv"})
    EXPECT_TRUE(std::filesystem::exists(opts.out / f)) << f;
  const auto loaded = load_runs(opts.out);
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].seed, 1u);
  EXPECT_EQ(loaded[1].config_hash, hash_hex(cfg.hash()));
  std::filesystem::remove_all(opts.out);
}

TEST(Campaign, SevenModesTimesSeeds) {
  auto cfg = short_reduced(SimTime::ms(5));
  CampaignOptions opts;
  opts.seeds = 2;
  EXPECT_EQ(run_campaign(cfg, opts).size(), 14u);
  opts.seeds = 0;
  EXPECT_THROW(run_campaign(cfg, opts), std::invalid_argument);
}

namespace {

// Hand-built per-run CSVs: operator A NR-U (devices 0..`users`), operator B WiGig.
ReportRun synthetic_run(const std::string& label, std::uint64_t seed, const std::string& hash, int users,
                        double goodput) {
  std::string info = "key,value\nlabel," + label + "\nseed," + std::to_string(seed) + "\nconfig_hash," + hash +
                     "\noperator_a,NR-U\noperator_b,WiGig\n";
  std::string scenario = "id,operator,role,x,y,z,serving\n0,A,gNB,0,0,3,0\n";
  const int ap = users + 1;
  for (int u = 1; u <= users; ++u) scenario += std::to_string(u) + ",A,UE,1,1,1.5,0\n";
  scenario += std::to_string(ap) + ",B,AP,0,0,3," + std::to_string(ap) + "\n";
  for (int u = ap + 1; u <= ap + users; ++u) scenario += std::to_string(u) + ",B,STA,1,1,1.5," + std::to_string(ap) + "\n";
  std::string metrics = "metric,scope,value\noccupancy,A,0.2\noccupancy,B,0.1\n";
  for (int u = 1; u <= users; ++u) metrics += "latency_us," + std::to_string(u) + ",300\n";
  for (int u = ap + 1; u <= ap + users; ++u) metrics += "goodput_mbps," + std::to_string(u) + "," + std::to_string(goodput) + "\n";
  return report_run_from_csv(info, metrics, scenario);
}

const BoxRow* find_row(const std::vector<BoxRow>& rows, const std::string& metric, const std::string& tech) {
  for (const auto& r : rows)
    if (r.metric == metric && r.technology == tech) return &r;
  return nullptr;
}

}  // namespace

TEST(Report, PoolsDevicesAcrossSeeds) {
  std::vector<ReportRun> runs;
  for (std::uint64_t s = 1; s <= 20; ++s) runs.push_back(synthetic_run("Cat4/Cat2", s, "00ff", 12, 50.0));
  const auto rows = emit_report(runs);
  const auto* gp = find_row(rows, "goodput_mbps", "WiGig");
  ASSERT_NE(gp, nullptr);
  EXPECT_EQ(gp->samples, 240u);
  const auto* lat = find_row(rows, "latency_us", "NR-U");
  ASSERT_NE(lat, nullptr);
  EXPECT_EQ(lat->samples, 240u);
  const auto* occ = find_row(rows, "occupancy", "NR-U");
  ASSERT_NE(occ, nullptr);
  EXPECT_EQ(occ->samples, 20u);
  EXPECT_DOUBLE_EQ(occ->stats.p50, 0.2);
}

TEST(Report, SingleRunGivesDegenerateBox) {
  const auto rows = emit_report({synthetic_run("On/On", 1, "00ff", 1, 42.0)});
  const auto* gp = find_row(rows, "goodput_mbps", "WiGig");
  ASSERT_NE(gp, nullptr);
  EXPECT_EQ(gp->stats.min, 42.0);
  EXPECT_EQ(gp->stats.max, 42.0);
  std::ostringstream os;
  write_boxstats_csv(os, rows);
  EXPECT_EQ(os.str().rfind("label,metric,technology,min,p5,p50,p95,max\n", 0), 0u);
  EXPECT_NE(os.str().find("On/On,goodput_mbps,WiGig,42,42,42,42,42\n"), std::string::npos);
}

TEST(Report, MixedConfigurationsRejected) {
  const std::vector<ReportRun> runs{synthetic_run("On/On", 1, "00ff", 2, 50.0), synthetic_run("On/On", 2, "00fe", 2, 50.0)};
  EXPECT_THROW(emit_report(runs), std::invalid_argument);
  EXPECT_THROW(emit_report({}), std::invalid_argument);
}

TEST(Report, CampaignBoxstatsMatchReportFromDisk) {
  auto cfg = short_reduced(SimTime::ms(20));
  cfg.campaign_sets = {"WiGig-only", "Cat3/Cat2"};
  CampaignOptions opts;
  opts.seeds = 2;
  opts.out = scratch("report");
  run_campaign(cfg, opts);
  std::ostringstream os;
  write_boxstats_csv(os, emit_report(load_runs(opts.out)));
  std::ifstream in(opts.out / "boxstats.csv");
  std::stringstream disk;
  disk << in.rdbuf();
  EXPECT_EQ(os.str(), disk.str());
  std::filesystem::remove_all(opts.out);
}
