#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nrucoex/cam/channel_access.hpp"
#include "nrucoex/radio/device.hpp"
#include "nrucoex/radio/environment.hpp"
#include "nrucoex/radio/scenario.hpp"
#include "nrucoex/sim/time.hpp"

namespace nrucoex::campaign {

using sim::SimTime;

enum class ConfigErrorKind { kMissingFile, kSyntax, kUnknownKey, kOutOfRange, kBadValue };
std::string_view to_string(ConfigErrorKind k);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string key, int line, const std::string& message);
  ConfigErrorKind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  ConfigErrorKind kind_;
  std::string key_;
  int line_;
};

// One coexistence configuration of the campaign: gNB CAM / UE CAM, or the WiGig-only baseline.
struct AccessMode {
  std::string label;
  bool wigig_only = false;
  cam::Category gnb = cam::Category::kCat1;
  cam::Category ue = cam::Category::kCat1;
};

// WiGig-only, On/On, OnOff/OnOff, Cat4/On, Cat4/Cat2, Cat3/On, Cat3/Cat2.
const std::vector<AccessMode>& access_modes();
std::optional<AccessMode> find_access_mode(std::string_view label);

struct CampaignConfig {
  // Scenario
  std::string scenario = "full";
  double floor_x_m = 60.0;
  double floor_y_m = 20.0;
  int sites_per_operator = 3;
  int users_per_operator = 12;
  double bs_height_m = 3.0;
  double user_height_m = 1.5;
  double max_user_distance_m = 20.0;
  std::array<radio::Rat, 2> coexistence_rats{radio::Rat::kNrU, radio::Rat::kWigig};

  // Radio
  double carrier_frequency_ghz = 58.0;
  double bandwidth_hz = 2.16e9;
  double tx_power_dbm = 17.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 7.0;
  int bs_rows = 8, bs_cols = 8;
  int user_rows = 4, user_cols = 4;
  double element_gain_dbi = 8.0;
  bool shadowing = true;

  // NR-U channel access
  double gnb_ed_threshold_dbm = -79.0;
  double ue_ed_threshold_dbm = -69.0;
  cam::SensingMode gnb_sensing = cam::SensingMode::kOmni;
  cam::SensingMode ue_sensing = cam::SensingMode::kDirectional;
  SimTime cca_slot = SimTime::us(5);
  SimTime defer = SimTime::us(8);
  SimTime max_cot = SimTime::ms(9);
  int cat4_cws_min = 15;
  int cat4_cws_max = 1023;
  int cat3_cws = 15;
  SimTime cat2_defer = SimTime::us(25);
  SimTime duty_on = SimTime::ms(9);
  SimTime duty_off = SimTime::ms(9);

  // NR-U MAC
  int scs_khz = 120;
  int mac_ahead_slots = 2;
  int harq_max_transmissions = 4;
  double mcs_margin_db = 1.0;
  double overhead = 0.75;

  // WiGig
  double wigig_ed_threshold_dbm = -79.0;
  double wigig_preamble_threshold_dbm = -89.0;
  int wigig_cws_min = 15;
  int wigig_cws_max = 1023;
  int wigig_retry_limit = 7;
  SimTime wigig_preamble = SimTime::ns(1900);
  SimTime sifs = SimTime::us(3);
  SimTime ack_duration = SimTime::us(1);
  SimTime ack_timeout = SimTime::us(10);
  int association_attempts = 5;
  int wigig_max_aggregation = 8;

  // Traffic and campaign
  double load_bps = 50e6;
  int packet_bytes = 1500;
  SimTime duration = SimTime::ms(1500);
  std::string nru_access = "Cat4/Cat2";
  std::vector<std::string> campaign_sets;  // defaults to every access mode
  std::uint64_t first_seed = 1;

  radio::ScenarioParams scenario_params(const AccessMode& mode) const;
  radio::RadioParams radio_params() const;
  cam::CamConfig gnb_cam(cam::Category c) const;
  cam::CamConfig ue_cam(cam::Category c) const;
  std::vector<AccessMode> modes() const;

  // Every key with its resolved value, one "key = value" line each, in a fixed order.
  std::string canonical() const;
  // FNV-1a over canonical().
  std::uint64_t hash() const;
};

CampaignConfig parse_config_text(std::string_view text);
CampaignConfig parse_config(const std::filesystem::path& path);
// Applies one assignment on top of an existing config (CLI overrides, tests).
void apply_setting(CampaignConfig& cfg, std::string_view key, std::string_view value, int line = 0);

std::string hash_hex(std::uint64_t h);

}  // namespace nrucoex::campaign
