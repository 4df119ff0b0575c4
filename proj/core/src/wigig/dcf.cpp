#include "nrucoex/wigig/dcf.hpp"

#include <cmath>
#include <stdexcept>

namespace nrucoex::wigig {

radio::SensingRule DetectionThresholds::rule() const {
  radio::SensingRule r;
  r.ed_threshold_dbm = ed_threshold_dbm;
  r.preamble_threshold_dbm = preamble_threshold_dbm;
  r.beam = radio::RxBeam::omni();
  r.exclude_own_cell = false;
  return r;
}

MediumState medium_state(const radio::RadioEnvironment& env, DeviceId device, const DetectionThresholds& th, SimTime t) {
  return env.busy(device, th.rule(), t, t + SimTime::ns(1)) ? MediumState::kBusy : MediumState::kIdle;
}

SimTime frame_duration(std::uint32_t bytes, double rate_mbps, SimTime preamble) {
  if (bytes == 0) throw std::invalid_argument("frame_duration: empty frame");
  if (!(rate_mbps > 0.0)) throw std::invalid_argument("frame_duration: rate must be positive");
  // bits / (Mbit/s) = microseconds; * 1000 for nanoseconds.
  const double ns = 8.0 * bytes * 1000.0 / rate_mbps;
  return preamble + SimTime::ns(static_cast<std::int64_t>(std::ceil(ns - 1e-9)));
}

AckOutcome on_ack_or_timeout(DcfState& state, bool acked, const DcfParams& params) {
  if (acked) {
    state.cws = params.cws_min;
    state.retries = 0;
    state.phase = DcfPhase::kIdle;
    return AckOutcome::kDone;
  }
  ++state.retries;
  if (state.retries >= params.retry_limit) {
    state.cws = params.cws_min;
    state.retries = 0;
    state.phase = DcfPhase::kIdle;
    return AckOutcome::kDrop;
  }
  state.cws = std::min(2 * state.cws + 1, params.cws_max);
  state.phase = DcfPhase::kIdle;
  return AckOutcome::kRetry;
}

Dcf::Dcf(sim::Simulator& simulator, const radio::RadioEnvironment& env, DeviceId device, DcfParams params,
         DetectionThresholds thresholds, sim::RngStream rng)
    : sim_(simulator),
      env_(env),
      device_(device),
      params_(params),
      thresholds_(thresholds),
      rule_(thresholds.rule()),
      rng_(std::move(rng)) {
  if (!(thresholds.preamble_threshold_dbm < thresholds.ed_threshold_dbm))
    throw std::invalid_argument("Dcf: preamble threshold must be below the ED threshold");
  state_.cws = params.cws_min;
}

int Dcf::draw() {
  if (forced_) {
    const int v = *forced_;
    forced_.reset();
    return v;
  }
  return static_cast<int>(rng_.uniform_int(0, static_cast<std::uint64_t>(state_.cws)));
}

void Dcf::access(AccessFn on_access) {
  if (on_access_) throw std::logic_error("Dcf::access: a frame is already waiting for the medium");
  on_access_ = std::move(on_access);
  if (forced_) state_.counter = draw();
  if (!running_) start_contention();
}

AckOutcome Dcf::report(bool acked) {
  const AckOutcome outcome = on_ack_or_timeout(state_, acked, params_);
  state_.counter = draw();
  if (!running_) start_contention();
  return outcome;
}

void Dcf::start_contention() {
  running_ = true;
  begin_defer(std::max(sim_.now(), self_busy_until_));
}

bool Dcf::busy(SimTime a, SimTime b) const { return self_busy_until_ > a || env_.busy(device_, rule_, a, b); }

SimTime Dcf::resume_time(SimTime now) const {
  return std::max({now, self_busy_until_, env_.busy_until(device_, rule_, now)});
}

void Dcf::begin_defer(SimTime at) {
  state_.phase = DcfPhase::kDefer;
  if (at > sim_.now()) {
    sim_.schedule(at, [this, at] { begin_defer(at); });
    return;
  }
  sim_.schedule(at + params_.defer, [this, at] { on_defer_end(at); });
}

void Dcf::on_defer_end(SimTime window_start) {
  const SimTime now = sim_.now();
  if (busy(window_start, now)) {
    if (state_.counter == 0 && on_access_) state_.counter = draw();
    begin_defer(resume_time(now));
    return;
  }
  if (state_.counter == 0) {
    counter_expired();
    return;
  }
  state_.phase = DcfPhase::kBackoff;
  sim_.schedule(now + params_.slot, [this, now] { on_slot_end(now); });
}

void Dcf::on_slot_end(SimTime slot_start) {
  const SimTime now = sim_.now();
  if (busy(slot_start, now)) {
    begin_defer(resume_time(now));
    return;
  }
  if (--state_.counter == 0) {
    counter_expired();
    return;
  }
  sim_.schedule(now + params_.slot, [this, now] { on_slot_end(now); });
}

void Dcf::counter_expired() {
  if (!on_access_) {
    running_ = false;
    state_.phase = DcfPhase::kIdle;
    return;
  }
  grant();
}

void Dcf::grant() {
  const SimTime now = sim_.now();
  // Frames starting at this very instant are not yet detectable: equal counters collide.
  if (self_busy_until_ > now) {
    state_.counter = draw();
    begin_defer(resume_time(now + SimTime::ns(1)));
    return;
  }
  running_ = false;
  state_.phase = DcfPhase::kTx;
  auto fn = std::move(on_access_);
  on_access_ = nullptr;
  fn(now);
}

}  // namespace nrucoex::wigig
