#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nrucoex/cam/channel_access.hpp"
#include "nrucoex/campaign/config.hpp"
#include "nrucoex/metrics/occupancy.hpp"
#include "nrucoex/radio/environment.hpp"

namespace nrucoex::campaign {

struct TraceSelection {
  bool cam = false;
  bool mac = false;
  bool frames = false;
};

// Parses "cam,mac,frames" (any subset).
TraceSelection parse_trace_selection(std::string_view list);

struct RunOptions {
  TraceSelection trace;
  // Keeps every emission, CCA verdict and emission-to-grant link for offline auditing.
  bool audit = false;
};

struct DeviceMetrics {
  radio::DeviceId id = 0;
  int operator_id = 0;
  radio::Role role = radio::Role::kUe;
  std::optional<double> mean_latency_us;
  std::vector<double> latency_us;
  double goodput_mbps = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t delivered_bytes = 0;
};

// An emission together with the channel grant that allowed it (NR-U only).
struct GrantedEmission {
  radio::Emission emission;
  cam::ChannelGrant grant;
};

struct RunResult {
  std::string label;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::array<radio::Rat, 2> operator_rat{radio::Rat::kNrU, radio::Rat::kWigig};
  SimTime duration;
  std::array<double, 2> occupancy{0.0, 0.0};
  std::array<metrics::OccupancyLedger, 2> occupancy_ledgers;
  std::array<std::uint64_t, 2> delivered_bytes{0, 0};
  std::vector<DeviceMetrics> devices;
  std::uint64_t events = 0;
  std::uint64_t nru_emissions = 0;
  std::uint64_t wigig_emissions = 0;
  double wall_seconds = 0.0;

  std::string scenario_csv;
  std::string metrics_csv;
  std::string run_info_csv;
  std::string cam_trace_csv;
  std::string mac_trace_csv;
  std::string frame_trace_csv;

  // Present when RunOptions::audit is set.
  std::shared_ptr<const radio::RadioEnvironment> environment;
  std::shared_ptr<const cam::CamTrace> cam_trace;
  std::vector<GrantedEmission> granted_emissions;
};

RunResult run_simulation(const CampaignConfig& cfg, const AccessMode& mode, std::uint64_t seed,
                         const RunOptions& options = {});

// metric,scope,value
std::string format_metrics_csv(const RunResult& r);

// Writes scenario.csv, metrics.csv, run_info.csv and any requested traces.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& r);

}  // namespace nrucoex::campaign
