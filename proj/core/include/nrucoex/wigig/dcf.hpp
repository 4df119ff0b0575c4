#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "nrucoex/radio/environment.hpp"
#include "nrucoex/sim/rng.hpp"
#include "nrucoex/sim/simulator.hpp"

namespace nrucoex::wigig {

using radio::DeviceId;
using sim::SimTime;

struct DetectionThresholds {
  double ed_threshold_dbm = -79.0;
  double preamble_threshold_dbm = -89.0;

  // Omnidirectional carrier sense with preamble detection of WiGig frames.
  radio::SensingRule rule() const;
};

enum class MediumState { kIdle, kBusy };

// Busy iff a WiGig preamble is heard above the preamble threshold or the
// aggregate received power reaches the ED threshold at t.
MediumState medium_state(const radio::RadioEnvironment& env, DeviceId device, const DetectionThresholds& th, SimTime t);

// Preamble plus payload at the MCS rate, rounded up to the nanosecond.
SimTime frame_duration(std::uint32_t bytes, double rate_mbps, SimTime preamble = SimTime::ns(1900));

struct DcfParams {
  SimTime slot = SimTime::us(5);
  SimTime defer = SimTime::us(8);
  int cws_min = 15;
  int cws_max = 1023;
  int retry_limit = 7;
};

enum class DcfPhase { kIdle, kDefer, kBackoff, kTx, kWaitAck };
enum class AckOutcome { kDone, kRetry, kDrop };

struct DcfState {
  int cws = 15;
  int counter = 0;
  int retries = 0;
  DcfPhase phase = DcfPhase::kIdle;
};

// Binary exponential back-off bookkeeping after one transmission attempt.
AckOutcome on_ack_or_timeout(DcfState& state, bool acked, const DcfParams& params);

/**
 * CSMA/CA contention of one device: wait for an idle defer interval, count a
 * uniform {0..cws} back-off over idle slots (frozen while busy) and hand the
 * medium to the caller at counter zero.
 *
 * A fresh counter is drawn after every attempt and keeps counting while the
 * queue is empty (post-backoff), so a frame reaching a settled DCF on an idle
 * medium only waits for the defer interval. A frame that finds the medium
 * busy with no counter pending draws one.
 */
class Dcf {
 public:
  using AccessFn = std::function<void(SimTime)>;

  Dcf(sim::Simulator& simulator, const radio::RadioEnvironment& env, DeviceId device, DcfParams params,
      DetectionThresholds thresholds, sim::RngStream rng);

  void access(AccessFn on_access);
  // Closes an attempt and starts the post-attempt back-off.
  AckOutcome report(bool acked);
  // The device's own emissions are not sensed; this keeps contention frozen while it transmits.
  void set_self_busy_until(SimTime t) { self_busy_until_ = std::max(self_busy_until_, t); }
  void force_next_counter(int value) { forced_ = value; }

  const DcfState& state() const { return state_; }
  const DcfParams& params() const { return params_; }
  bool contending() const { return running_; }
  bool waiting() const { return static_cast<bool>(on_access_); }

 private:
  bool busy(SimTime a, SimTime b) const;
  SimTime resume_time(SimTime now) const;
  void begin_defer(SimTime at);
  void on_defer_end(SimTime window_start);
  void on_slot_end(SimTime slot_start);
  void start_contention();
  void counter_expired();
  void grant();
  int draw();

  sim::Simulator& sim_;
  const radio::RadioEnvironment& env_;
  DeviceId device_;
  DcfParams params_;
  DetectionThresholds thresholds_;
  radio::SensingRule rule_;
  sim::RngStream rng_;
  DcfState state_;
  std::optional<int> forced_;
  SimTime self_busy_until_;
  AccessFn on_access_;
  bool running_ = false;
};

}  // namespace nrucoex::wigig
