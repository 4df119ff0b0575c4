#include "nrucoex/campaign/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nrucoex/sim/rng.hpp"

namespace nrucoex::campaign {

std::string_view to_string(ConfigErrorKind k) {
  switch (k) {
    case ConfigErrorKind::kMissingFile: return "missing file";
    case ConfigErrorKind::kSyntax: return "syntax error";
    case ConfigErrorKind::kUnknownKey: return "unknown key";
    case ConfigErrorKind::kOutOfRange: return "out of range";
    case ConfigErrorKind::kBadValue: return "bad value";
  }
  return "?";
}

namespace {

std::string format_message(ConfigErrorKind kind, const std::string& key, int line, const std::string& message) {
  std::string out = "config";
  if (line > 0) out += ":" + std::to_string(line);
  out += ": " + std::string(to_string(kind));
  if (!key.empty()) out += " for key '" + key + "'";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

ConfigError::ConfigError(ConfigErrorKind kind, std::string key, int line, const std::string& message)
    : std::runtime_error(format_message(kind, key, line, message)), kind_(kind), key_(std::move(key)), line_(line) {}

const std::vector<AccessMode>& access_modes() {
  using cam::Category;
  static const std::vector<AccessMode> modes{
      {"WiGig-only", true, Category::kCat1, Category::kCat1},
      {"On/On", false, Category::kCat1, Category::kCat1},
      {"OnOff/OnOff", false, Category::kOnOff, Category::kOnOff},
      {"Cat4/On", false, Category::kCat4, Category::kCat1},
      {"Cat4/Cat2", false, Category::kCat4, Category::kCat2},
      {"Cat3/On", false, Category::kCat3, Category::kCat1},
      {"Cat3/Cat2", false, Category::kCat3, Category::kCat2},
  };
  return modes;
}

std::optional<AccessMode> find_access_mode(std::string_view label) {
  for (const auto& m : access_modes())
    if (m.label == label) return m;
  return std::nullopt;
}

radio::ScenarioParams CampaignConfig::scenario_params(const AccessMode& mode) const {
  radio::ScenarioParams p;
  p.floor_x_m = floor_x_m;
  p.floor_y_m = floor_y_m;
  p.sites_per_operator = sites_per_operator;
  p.users_per_operator = users_per_operator;
  p.bs_height_m = bs_height_m;
  p.user_height_m = user_height_m;
  p.max_user_distance_m = max_user_distance_m;
  p.bs_rows = bs_rows;
  p.bs_cols = bs_cols;
  p.user_rows = user_rows;
  p.user_cols = user_cols;
  p.element_gain_dbi = element_gain_dbi;
  p.operator_rat = mode.wigig_only ? std::array<radio::Rat, 2>{radio::Rat::kWigig, radio::Rat::kWigig}
                                   : coexistence_rats;
  return p;
}

radio::RadioParams CampaignConfig::radio_params() const {
  radio::RadioParams r;
  r.carrier_frequency_ghz = carrier_frequency_ghz;
  r.bandwidth_hz = bandwidth_hz;
  r.noise_psd_dbm_hz = noise_psd_dbm_hz;
  r.noise_figure_db = noise_figure_db;
  r.max_tx_power_dbm = std::max(tx_power_dbm, 17.0);
  r.shadowing = shadowing;
  return r;
}

namespace {

cam::CamConfig base_cam(const CampaignConfig& c, cam::Category cat) {
  cam::CamConfig cfg;
  cfg.category = cat;
  cfg.cca_slot = c.cca_slot;
  cfg.defer_interval = c.defer;
  cfg.max_cot = c.max_cot;
  cfg.cws_min = c.cat4_cws_min;
  cfg.cws_max = c.cat4_cws_max;
  cfg.cat3_cws = c.cat3_cws;
  cfg.cat2_defer = c.cat2_defer;
  cfg.duty_on = c.duty_on;
  cfg.duty_off = c.duty_off;
  return cfg;
}

}  // namespace

cam::CamConfig CampaignConfig::gnb_cam(cam::Category c) const {
  auto cfg = base_cam(*this, c);
  cfg.ed_threshold_dbm = gnb_ed_threshold_dbm;
  cfg.sensing_mode = gnb_sensing;
  return cfg;
}

cam::CamConfig CampaignConfig::ue_cam(cam::Category c) const {
  auto cfg = base_cam(*this, c);
  cfg.ed_threshold_dbm = ue_ed_threshold_dbm;
  cfg.sensing_mode = ue_sensing;
  return cfg;
}

std::vector<AccessMode> CampaignConfig::modes() const {
  if (campaign_sets.empty()) return access_modes();
  std::vector<AccessMode> out;
  for (const auto& label : campaign_sets) out.push_back(*find_access_mode(label));
  return out;
}

// ---------------------------------------------------------------- key table

namespace {

enum class Unit { kNone, kDbm, kDb, kDbi, kDbmPerHz, kFrequencyHz, kFrequencyGhz, kTime, kRate, kMeters, kBytes };

struct Quantity {
  double value = 0.0;
  std::string unit;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string normalize(std::string_view raw) {
  std::string s = trim(raw);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    s = trim(std::string_view(s).substr(1, s.size() - 2));
  // U+2212 MINUS SIGN
  for (std::size_t pos; (pos = s.find("\xE2\x88\x92")) != std::string::npos;) s.replace(pos, 3, "-");
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct KeySpec {
  std::string name;
  std::function<void(CampaignConfig&, const std::string& value, int line)> set;
  std::function<std::string(const CampaignConfig&)> get;
};

[[noreturn]] void fail(ConfigErrorKind kind, const std::string& key, int line, const std::string& msg) {
  throw ConfigError(kind, key, line, msg);
}

Quantity split_quantity(const std::string& key, const std::string& value, int line) {
  Quantity q;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if (first != last && *first == '+') ++first;
  auto r = std::from_chars(first, last, q.value);
  if (r.ec != std::errc{} || !std::isfinite(q.value)) fail(ConfigErrorKind::kBadValue, key, line, "'" + value + "' is not a number");
  q.unit = trim(std::string_view(r.ptr, static_cast<std::size_t>(last - r.ptr)));
  return q;
}

// Converts to the key's canonical unit; an empty unit means the canonical one.
double convert(const std::string& key, Unit unit, const Quantity& q, int line) {
  auto bad = [&]() -> double {
    fail(ConfigErrorKind::kBadValue, key, line, "unit '" + q.unit + "' not accepted here");
  };
  const std::string& u = q.unit;
  switch (unit) {
    case Unit::kNone: return u.empty() ? q.value : bad();
    case Unit::kDbm: return (u.empty() || u == "dBm") ? q.value : bad();
    case Unit::kDb: return (u.empty() || u == "dB") ? q.value : bad();
    case Unit::kDbi: return (u.empty() || u == "dBi" || u == "dB") ? q.value : bad();
    case Unit::kDbmPerHz: return (u.empty() || u == "dBm/Hz") ? q.value : bad();
    case Unit::kFrequencyHz:
    case Unit::kFrequencyGhz: {
      double hz;
      if (u == "Hz") hz = q.value;
      else if (u == "kHz") hz = q.value * 1e3;
      else if (u == "MHz") hz = q.value * 1e6;
      else if (u == "GHz") hz = q.value * 1e9;
      else if (u.empty()) return q.value;
      else return bad();
      return unit == Unit::kFrequencyHz ? hz : hz / 1e9;
    }
    case Unit::kTime: {
      // canonical: nanoseconds
      if (u == "ns") return q.value;
      if (u == "us" || u == "\xC2\xB5s" || u == "\xCE\xBCs") return q.value * 1e3;
      if (u == "ms") return q.value * 1e6;
      if (u == "s") return q.value * 1e9;
      return bad();
    }
    case Unit::kRate: {
      if (u.empty() || u == "bps" || u == "bit/s") return q.value;
      if (u == "kbps") return q.value * 1e3;
      if (u == "Mbps") return q.value * 1e6;
      if (u == "Gbps") return q.value * 1e9;
      return bad();
    }
    case Unit::kMeters: return (u.empty() || u == "m") ? q.value : bad();
    case Unit::kBytes: return (u.empty() || u == "B" || u == "bytes") ? q.value : bad();
  }
  return bad();
}

void check_range(const std::string& key, double v, double lo, double hi, const std::string& shown, int line) {
  if (v < lo || v > hi)
    fail(ConfigErrorKind::kOutOfRange, key, line,
         "value " + shown + " outside [" + format_double(lo) + ", " + format_double(hi) + "]");
}

KeySpec real(std::string name, double CampaignConfig::*field, Unit unit, double lo, double hi, std::string suffix) {
  KeySpec k;
  k.name = name;
  k.set = [name, field, unit, lo, hi](CampaignConfig& c, const std::string& value, int line) {
    const Quantity q = split_quantity(name, value, line);
    const double v = convert(name, unit, q, line);
    check_range(name, v, lo, hi, value, line);
    c.*field = v;
  };
  k.get = [field, suffix](const CampaignConfig& c) {
    return format_double(c.*field) + (suffix.empty() ? "" : " " + suffix);
  };
  return k;
}

KeySpec integer(std::string name, int CampaignConfig::*field, Unit unit, int lo, int hi) {
  KeySpec k;
  k.name = name;
  k.set = [name, field, unit, lo, hi](CampaignConfig& c, const std::string& value, int line) {
    const Quantity q = split_quantity(name, value, line);
    const double v = convert(name, unit, q, line);
    if (v != std::floor(v)) fail(ConfigErrorKind::kBadValue, name, line, "'" + value + "' is not an integer");
    check_range(name, v, lo, hi, value, line);
    c.*field = static_cast<int>(v);
  };
  k.get = [field](const CampaignConfig& c) { return std::to_string(c.*field); };
  return k;
}

KeySpec duration(std::string name, SimTime CampaignConfig::*field, const char* bare_unit, double lo_ns, double hi_ns) {
  KeySpec k;
  k.name = name;
  const std::string bare = bare_unit;
  k.set = [name, field, bare, lo_ns, hi_ns](CampaignConfig& c, const std::string& value, int line) {
    Quantity q = split_quantity(name, value, line);
    if (q.unit.empty()) q.unit = bare;
    const double ns = convert(name, Unit::kTime, q, line);
    check_range(name, ns, lo_ns, hi_ns, value, line);
    const double rounded = std::round(ns);
    if (std::abs(rounded - ns) > 1e-6 * std::max(1.0, std::abs(ns)))
      fail(ConfigErrorKind::kBadValue, name, line, "'" + value + "' is not a whole number of nanoseconds");
    c.*field = SimTime::ns(static_cast<std::int64_t>(rounded));
  };
  k.get = [field](const CampaignConfig& c) { return std::to_string((c.*field).ticks()) + " ns"; };
  return k;
}

KeySpec array_shape(std::string name, int CampaignConfig::*rows, int CampaignConfig::*cols) {
  KeySpec k;
  k.name = name;
  k.set = [name, rows, cols](CampaignConfig& c, const std::string& value, int line) {
    const auto x = value.find_first_of("xX");
    int r = 0, q = 0;
    bool ok = x != std::string::npos;
    if (ok) {
      const std::string a = trim(std::string_view(value).substr(0, x));
      const std::string b = trim(std::string_view(value).substr(x + 1));
      ok = std::from_chars(a.data(), a.data() + a.size(), r).ptr == a.data() + a.size() && !a.empty() &&
           std::from_chars(b.data(), b.data() + b.size(), q).ptr == b.data() + b.size() && !b.empty();
    }
    if (!ok) fail(ConfigErrorKind::kBadValue, name, line, "expected <rows>x<cols>, got '" + value + "'");
    if (r < 1 || r > 32 || q < 1 || q > 32) fail(ConfigErrorKind::kOutOfRange, name, line, "array size " + value + " outside 1x1..32x32");
    c.*rows = r;
    c.*cols = q;
  };
  k.get = [rows, cols](const CampaignConfig& c) { return std::to_string(c.*rows) + "x" + std::to_string(c.*cols); };
  return k;
}

KeySpec sensing(std::string name, cam::SensingMode CampaignConfig::*field) {
  KeySpec k;
  k.name = name;
  k.set = [name, field](CampaignConfig& c, const std::string& value, int line) {
    if (value == "omni") c.*field = cam::SensingMode::kOmni;
    else if (value == "directional") c.*field = cam::SensingMode::kDirectional;
    else fail(ConfigErrorKind::kBadValue, name, line, "expected omni or directional, got '" + value + "'");
  };
  k.get = [field](const CampaignConfig& c) {
    return std::string(c.*field == cam::SensingMode::kOmni ? "omni" : "directional");
  };
  return k;
}

KeySpec technology(std::string name, int index) {
  KeySpec k;
  k.name = name;
  k.set = [name, index](CampaignConfig& c, const std::string& value, int line) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (v == "nr-u" || v == "nru") c.coexistence_rats[static_cast<std::size_t>(index)] = radio::Rat::kNrU;
    else if (v == "wigig") c.coexistence_rats[static_cast<std::size_t>(index)] = radio::Rat::kWigig;
    else fail(ConfigErrorKind::kBadValue, name, line, "expected NR-U or WiGig, got '" + value + "'");
  };
  k.get = [index](const CampaignConfig& c) {
    return std::string(c.coexistence_rats[static_cast<std::size_t>(index)] == radio::Rat::kNrU ? "NR-U" : "WiGig");
  };
  return k;
}

void apply_scenario_preset(CampaignConfig& c, const std::string& value, int line) {
  if (value == "full") {
    c.sites_per_operator = 3;
    c.users_per_operator = 12;
  } else if (value == "reduced") {
    c.sites_per_operator = 1;
    c.users_per_operator = 4;
  } else {
    fail(ConfigErrorKind::kBadValue, "scenario", line, "expected full or reduced, got '" + value + "'");
  }
  c.scenario = value;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<KeySpec>& key_table() {
  using C = CampaignConfig;
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back({"scenario", apply_scenario_preset, [](const C& c) { return c.scenario; }});
    t.push_back(real("floor_length", &C::floor_x_m, Unit::kMeters, 1, 1000, "m"));
    t.push_back(real("floor_width", &C::floor_y_m, Unit::kMeters, 1, 1000, "m"));
    t.push_back(integer("sites_per_operator", &C::sites_per_operator, Unit::kNone, 1, 3));
    t.push_back(integer("users_per_operator", &C::users_per_operator, Unit::kNone, 1, 240));
    t.push_back(real("bs_height", &C::bs_height_m, Unit::kMeters, 0, 20, "m"));
    t.push_back(real("user_height", &C::user_height_m, Unit::kMeters, 0, 20, "m"));
    t.push_back(real("max_user_distance", &C::max_user_distance_m, Unit::kMeters, 1, 1000, "m"));
    t.push_back(technology("operator_a", 0));
    t.push_back(technology("operator_b", 1));

    t.push_back(real("carrier_frequency", &C::carrier_frequency_ghz, Unit::kFrequencyGhz, 0.5, 100, "GHz"));
    t.push_back(real("bandwidth", &C::bandwidth_hz, Unit::kFrequencyHz, 1e3, 1e10, "Hz"));
    t.push_back(real("tx_power", &C::tx_power_dbm, Unit::kDbm, -30, 17, "dBm"));
    t.push_back(real("noise_psd", &C::noise_psd_dbm_hz, Unit::kDbmPerHz, -200, -100, "dBm/Hz"));
    t.push_back(real("noise_figure", &C::noise_figure_db, Unit::kDb, 0, 30, "dB"));
    t.push_back(array_shape("bs_array", &C::bs_rows, &C::bs_cols));
    t.push_back(array_shape("user_array", &C::user_rows, &C::user_cols));
    t.push_back(real("element_gain", &C::element_gain_dbi, Unit::kDbi, 0, 20, "dBi"));
    t.push_back({"shadowing",
                 [](C& c, const std::string& v, int line) {
                   if (v == "on" || v == "true") c.shadowing = true;
                   else if (v == "off" || v == "false") c.shadowing = false;
                   else fail(ConfigErrorKind::kBadValue, "shadowing", line, "expected on or off, got '" + v + "'");
                 },
                 [](const C& c) { return std::string(c.shadowing ? "on" : "off"); }});

    t.push_back(real("gnb_ed_threshold", &C::gnb_ed_threshold_dbm, Unit::kDbm, -120, -20, "dBm"));
    t.push_back(real("ue_ed_threshold", &C::ue_ed_threshold_dbm, Unit::kDbm, -120, -20, "dBm"));
    t.push_back(sensing("gnb_sensing", &C::gnb_sensing));
    t.push_back(sensing("ue_sensing", &C::ue_sensing));
    t.push_back(duration("cca_slot", &C::cca_slot, "us", 1, 1e6));
    t.push_back(duration("defer", &C::defer, "us", 0, 1e6));
    t.push_back(duration("max_cot", &C::max_cot, "ms", 1e3, 1e9));
    t.push_back(integer("cat4_cws_min", &C::cat4_cws_min, Unit::kNone, 0, 65535));
    t.push_back(integer("cat4_cws_max", &C::cat4_cws_max, Unit::kNone, 0, 65535));
    t.push_back(integer("cat3_cws", &C::cat3_cws, Unit::kNone, 0, 65535));
    t.push_back(duration("cat2_defer", &C::cat2_defer, "us", 1, 1e6));
    t.push_back(duration("duty_on", &C::duty_on, "ms", 1e3, 1e10));
    t.push_back(duration("duty_off", &C::duty_off, "ms", 0, 1e10));

    t.push_back(integer("scs", &C::scs_khz, Unit::kNone, 120, 120));
    t.push_back(integer("mac_ahead_slots", &C::mac_ahead_slots, Unit::kNone, 1, 16));
    t.push_back(integer("harq_max_transmissions", &C::harq_max_transmissions, Unit::kNone, 1, 16));
    t.push_back(real("mcs_margin", &C::mcs_margin_db, Unit::kDb, 0, 20, "dB"));
    t.push_back(real("overhead", &C::overhead, Unit::kNone, 0.01, 1, ""));

    t.push_back(real("wigig_ed_threshold", &C::wigig_ed_threshold_dbm, Unit::kDbm, -120, -20, "dBm"));
    t.push_back(real("wigig_preamble_threshold", &C::wigig_preamble_threshold_dbm, Unit::kDbm, -120, -20, "dBm"));
    t.push_back(integer("wigig_cws_min", &C::wigig_cws_min, Unit::kNone, 1, 65535));
    t.push_back(integer("wigig_cws_max", &C::wigig_cws_max, Unit::kNone, 1, 65535));
    t.push_back(integer("wigig_retry_limit", &C::wigig_retry_limit, Unit::kNone, 1, 64));
    t.push_back(duration("wigig_preamble", &C::wigig_preamble, "us", 1, 1e6));
    t.push_back(duration("sifs", &C::sifs, "us", 1, 1e6));
    t.push_back(duration("ack_duration", &C::ack_duration, "us", 1, 1e6));
    t.push_back(duration("ack_timeout", &C::ack_timeout, "us", 1, 1e7));
    t.push_back(integer("association_attempts", &C::association_attempts, Unit::kNone, 1, 100));
    t.push_back(integer("wigig_max_aggregation", &C::wigig_max_aggregation, Unit::kNone, 1, 64));

    t.push_back(real("load", &C::load_bps, Unit::kRate, 1e3, 1e11, "bps"));
    t.push_back(integer("packet_size", &C::packet_bytes, Unit::kBytes, 1, 65535));
    t.push_back(duration("duration", &C::duration, "s", 1e3, 1e11));
    t.push_back({"nru_access",
                 [](C& c, const std::string& v, int line) {
                   if (!find_access_mode(v)) fail(ConfigErrorKind::kBadValue, "nru_access", line, "unknown access mode '" + v + "'");
                   c.nru_access = v;
                 },
                 [](const C& c) { return c.nru_access; }});
    t.push_back({"campaign_sets",
                 [](C& c, const std::string& v, int line) {
                   auto items = split_list(v);
                   if (items.empty()) fail(ConfigErrorKind::kBadValue, "campaign_sets", line, "empty list");
                   for (const auto& i : items)
                     if (!find_access_mode(i)) fail(ConfigErrorKind::kBadValue, "campaign_sets", line, "unknown access mode '" + i + "'");
                   c.campaign_sets = items;
                 },
                 [](const C& c) {
                   std::string out;
                   for (const auto& m : c.modes()) out += (out.empty() ? "" : ",") + m.label;
                   return out;
                 }});
    t.push_back({"first_seed",
                 [](C& c, const std::string& v, int line) {
                   std::uint64_t s = 0;
                   auto r = std::from_chars(v.data(), v.data() + v.size(), s);
                   if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
                     fail(ConfigErrorKind::kBadValue, "first_seed", line, "'" + v + "' is not a non-negative integer");
                   c.first_seed = s;
                 },
                 [](const C& c) { return std::to_string(c.first_seed); }});
    return t;
  }();
  return table;
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : key_table())
    if (k.name == key) return &k;
  return nullptr;
}

void validate(const CampaignConfig& c) {
  if (c.cat4_cws_max < c.cat4_cws_min)
    fail(ConfigErrorKind::kOutOfRange, "cat4_cws_max", 0, "must be >= cat4_cws_min");
  if (c.wigig_cws_max < c.wigig_cws_min)
    fail(ConfigErrorKind::kOutOfRange, "wigig_cws_max", 0, "must be >= wigig_cws_min");
  if (!(c.wigig_preamble_threshold_dbm < c.wigig_ed_threshold_dbm))
    fail(ConfigErrorKind::kOutOfRange, "wigig_preamble_threshold", 0, "must be below wigig_ed_threshold");
  if (c.ack_timeout <= c.sifs + c.ack_duration)
    fail(ConfigErrorKind::kOutOfRange, "ack_timeout", 0, "must exceed sifs + ack_duration");
}

}  // namespace

void apply_setting(CampaignConfig& cfg, std::string_view key, std::string_view value, int line) {
  const std::string k = trim(key);
  // Shorthand for the -79 dBm thresholds shared by gNBs and WiGig nodes.
  if (k == "ed_threshold") {
    CampaignConfig probe = cfg;
    try {
      find_key("gnb_ed_threshold")->set(probe, normalize(value), line);
      find_key("wigig_ed_threshold")->set(probe, normalize(value), line);
    } catch (const ConfigError& e) {
      throw ConfigError(e.kind(), k, line, std::string("via ") + e.key() + ": " + e.what());
    }
    cfg = probe;
    return;
  }
  const KeySpec* spec = find_key(k);
  if (spec == nullptr) fail(ConfigErrorKind::kUnknownKey, k, line, "");
  const std::string v = normalize(value);
  if (v.empty()) fail(ConfigErrorKind::kBadValue, k, line, "empty value");
  spec->set(cfg, v, line);
}

CampaignConfig parse_config_text(std::string_view text) {
  struct Line {
    int number;
    std::string key, value;
  };
  std::vector<Line> lines;
  std::istringstream is{std::string(text)};
  std::string raw;
  int number = 0;
  std::map<std::string, int> seen;
  while (std::getline(is, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ConfigErrorKind::kSyntax, "", number, "expected 'key = value', got '" + s + "'");
    Line l{number, trim(std::string_view(s).substr(0, eq)), trim(std::string_view(s).substr(eq + 1))};
    if (l.key.empty()) fail(ConfigErrorKind::kSyntax, "", number, "missing key before '='");
    if (auto [it, fresh] = seen.emplace(l.key, number); !fresh)
      fail(ConfigErrorKind::kSyntax, l.key, number, "duplicate key (first set on line " + std::to_string(it->second) + ")");
    lines.push_back(std::move(l));
  }
  CampaignConfig cfg;
  // The preset goes first so explicit sizes override it regardless of order.
  for (const auto& l : lines)
    if (l.key == "scenario") apply_setting(cfg, l.key, l.value, l.number);
  for (const auto& l : lines)
    if (l.key != "scenario") apply_setting(cfg, l.key, l.value, l.number);
  validate(cfg);
  return cfg;
}

CampaignConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorKind::kMissingFile, "", 0, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string CampaignConfig::canonical() const {
  std::string out;
  for (const auto& k : key_table()) out += k.name + " = " + k.get(*this) + "\n";
  return out;
}

std::uint64_t CampaignConfig::hash() const { return sim::fnv1a64(canonical()); }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace nrucoex::campaign
