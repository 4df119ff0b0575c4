#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "nrucoex/radio/environment.hpp"
#include "nrucoex/sim/rng.hpp"
#include "nrucoex/sim/simulator.hpp"

namespace nrucoex::cam {

using radio::DeviceId;
using sim::SimTime;

enum class Category { kCat1, kCat2, kCat3, kCat4, kOnOff };
enum class SensingMode { kOmni, kDirectional };

std::string_view to_string(Category c);

struct CamConfig {
  Category category = Category::kCat4;
  double ed_threshold_dbm = -79.0;
  SimTime cca_slot = SimTime::us(5);
  SimTime defer_interval = SimTime::us(8);
  SimTime max_cot = SimTime::ms(9);
  int cws_min = 15;
  int cws_max = 1023;
  int cat3_cws = 15;
  SimTime cat2_defer = SimTime::us(25);
  SimTime duty_on = SimTime::ms(9);
  SimTime duty_off = SimTime::ms(9);
  SensingMode sensing_mode = SensingMode::kOmni;

  static CamConfig gnb_default(Category c);
  static CamConfig ue_default(Category c);
};

struct ChannelGrant {
  std::uint64_t id = 0;
  SimTime granted_at;
  SimTime cot_deadline;
  DeviceId initiator = 0;
  Category category = Category::kCat1;

  bool covers(SimTime a, SimTime b) const { return a >= granted_at && b <= cot_deadline; }
};

enum class CamEventType { kDeferStart, kCounterFrozen, kGrant, kCotEnd, kOnOffEdge };
std::string_view to_string(CamEventType e);

struct CamEvent {
  SimTime time;
  DeviceId device = 0;
  Category category = Category::kCat1;
  CamEventType type = CamEventType::kGrant;
};

// One clear-channel assessment window and its verdict.
struct SensingRecord {
  DeviceId device = 0;
  SimTime start;
  SimTime end;
  bool busy = false;
  double max_power_dbm = 0.0;
  double threshold_dbm = 0.0;
  std::uint64_t grant_id = 0;  // grant this window led to, 0 otherwise
};

struct CamTrace {
  bool record_sensing = false;
  std::vector<CamEvent> events;
  std::vector<SensingRecord> sensing;
  std::vector<ChannelGrant> grants;

  // time_ns,device,category,event
  void write_csv(std::ostream& os) const;
};

// Exponential contention-window update from one HARQ feedback batch.
// >= 80% NACK doubles (2w+1, capped), otherwise resets; an empty batch leaves cws unchanged.
int cat4_update_cws(int cws, int acks, int nacks, int cws_min = 15, int cws_max = 1023);

// Duty-cycle phase anchored at t = 0.
bool onoff_is_on(SimTime t, SimTime on, SimTime off);

class ChannelAccessManager {
 public:
  struct Context {
    sim::Simulator* simulator = nullptr;
    const radio::RadioEnvironment* environment = nullptr;
    DeviceId device = 0;
    CamTrace* trace = nullptr;
    std::uint64_t seed = 0;
  };

  ChannelAccessManager(Context ctx, CamConfig cfg);
  virtual ~ChannelAccessManager() = default;
  ChannelAccessManager(const ChannelAccessManager&) = delete;
  ChannelAccessManager& operator=(const ChannelAccessManager&) = delete;

  Category category() const { return cfg_.category; }
  const CamConfig& config() const { return cfg_; }
  DeviceId device() const { return ctx_.device; }

  // Ask for the channel ahead of a transmission planned at `target`. Sensing
  // never starts before `not_before`. Outcome is observed via grant_covering().
  virtual void request_access(SimTime target, SimTime not_before) = 0;
  // Whether a transmission over [a, b) could ever be permitted (duty-cycle planning).
  virtual bool may_plan(SimTime a, SimTime b) const;
  virtual std::optional<ChannelGrant> grant_covering(SimTime a, SimTime b) const;
  virtual void on_harq_feedback(std::uint64_t grant_id, int acks, int nacks);
  virtual bool procedure_running() const { return false; }

  // The most recent grant whose COT is open at t.
  std::optional<ChannelGrant> active_grant(SimTime t) const;
  const radio::SensingRule& sensing_rule() const { return rule_; }
  std::uint64_t grants_issued() const { return grants_.size(); }
  void set_grant_listener(std::function<void(const ChannelGrant&)> fn) { listener_ = std::move(fn); }

  // UE responders inherit the deadline of the initiator's open COT.
  void set_cot_initiator(const ChannelAccessManager* initiator) { initiator_ = initiator; }

 protected:
  const ChannelGrant& issue_grant(SimTime at, SimTime deadline);
  SimTime inherited_deadline(SimTime t, SimTime fallback) const;
  bool sense(SimTime a, SimTime b, std::uint64_t* record_index = nullptr);
  void mark_sensing_grant(std::size_t first_record, std::uint64_t grant_id);
  void trace(CamEventType type, SimTime t);

  Context ctx_;
  CamConfig cfg_;
  radio::SensingRule rule_;
  std::vector<ChannelGrant> grants_;
  const ChannelAccessManager* initiator_ = nullptr;
  std::function<void(const ChannelGrant&)> listener_;
  std::uint64_t next_grant_seq_ = 1;
};

// Cat1: no sensing. Unbounded COT unless responding inside an initiator's COT.
class Cat1Cam final : public ChannelAccessManager {
 public:
  using ChannelAccessManager::ChannelAccessManager;
  void request_access(SimTime target, SimTime not_before) override;
  std::optional<ChannelGrant> grant_covering(SimTime a, SimTime b) const override;
};

// Cat2: one fixed defer window ending at the planned start, no back-off.
class Cat2Cam final : public ChannelAccessManager {
 public:
  using ChannelAccessManager::ChannelAccessManager;
  void request_access(SimTime target, SimTime not_before) override;
  // Synchronous form: senses [t - defer, t) against the emissions already known.
  std::optional<ChannelGrant> attempt(SimTime t);

 private:
  std::vector<SimTime> pending_targets_;
};

// Cat3 (fixed window) and Cat4 (exponential window): defer, then count idle CCA slots.
class BackoffCam final : public ChannelAccessManager {
 public:
  enum class Phase { kIdle, kDeferring, kCounting };

  BackoffCam(Context ctx, CamConfig cfg);
  void request_access(SimTime target, SimTime not_before) override;
  void on_harq_feedback(std::uint64_t grant_id, int acks, int nacks) override;
  bool procedure_running() const override { return phase_ != Phase::kIdle; }

  int cws() const { return cws_; }
  int counter() const { return counter_; }
  Phase phase() const { return phase_; }
  // Forces the next counter draw (tests, deterministic replays).
  void force_next_counter(int value) { forced_counter_ = value; }
  // Starts a procedure immediately; used by the MAC-independent tests.
  void start(SimTime target, SimTime not_before) { request_access(target, not_before); }

 private:
  void begin_defer(SimTime at);
  void on_defer_end(SimTime window_start);
  void on_slot_end(SimTime slot_start);
  void finish();

  sim::RngStream rng_;
  int cws_;
  int counter_ = 0;
  Phase phase_ = Phase::kIdle;
  std::optional<int> forced_counter_;
  std::size_t first_record_ = 0;

  struct Feedback {
    std::uint64_t grant_id = 0;
    int acks = 0;
    int nacks = 0;
    bool applied = false;
  };
  std::optional<Feedback> feedback_;
};

// Duty cycle: ON for duty_on, OFF for duty_off, no sensing.
class OnOffCam final : public ChannelAccessManager {
 public:
  OnOffCam(Context ctx, CamConfig cfg);
  void request_access(SimTime, SimTime) override {}
  bool may_plan(SimTime a, SimTime b) const override;
  std::optional<ChannelGrant> grant_covering(SimTime a, SimTime b) const override;
  bool is_on(SimTime t) const { return onoff_is_on(t, cfg_.duty_on, cfg_.duty_off); }

 private:
  void schedule_edge(SimTime t);
};

std::unique_ptr<ChannelAccessManager> make_cam(ChannelAccessManager::Context ctx, const CamConfig& cfg);

}  // namespace nrucoex::cam

namespace nrucoex::cam {

// Energy detection over [t - window, t): busy iff the aggregate sensed power
// reaches the threshold at any instant of the window.
inline bool sense(const radio::RadioEnvironment& env, DeviceId device, const radio::SensingRule& rule, SimTime window,
                  SimTime t) {
  return env.busy(device, rule, t - window, t);
}

}  // namespace nrucoex::cam
