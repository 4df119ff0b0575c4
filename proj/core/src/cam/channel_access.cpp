#include "nrucoex/cam/channel_access.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nrucoex::cam {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kCat1: return "Cat1";
    case Category::kCat2: return "Cat2";
    case Category::kCat3: return "Cat3";
    case Category::kCat4: return "Cat4";
    case Category::kOnOff: return "OnOff";
  }
  return "?";
}

std::string_view to_string(CamEventType e) {
  switch (e) {
    case CamEventType::kDeferStart: return "defer_start";
    case CamEventType::kCounterFrozen: return "counter_frozen";
    case CamEventType::kGrant: return "grant";
    case CamEventType::kCotEnd: return "cot_end";
    case CamEventType::kOnOffEdge: return "onoff_edge";
  }
  return "?";
}

CamConfig CamConfig::gnb_default(Category c) {
  CamConfig cfg;
  cfg.category = c;
  cfg.ed_threshold_dbm = -79.0;
  cfg.sensing_mode = SensingMode::kOmni;
  return cfg;
}

CamConfig CamConfig::ue_default(Category c) {
  CamConfig cfg;
  cfg.category = c;
  cfg.ed_threshold_dbm = -69.0;
  cfg.sensing_mode = SensingMode::kDirectional;
  return cfg;
}

void CamTrace::write_csv(std::ostream& os) const {
  os << "time_ns,device,category,event\n";
  for (const auto& e : events)
    os << e.time.ticks() << ',' << e.device << ',' << to_string(e.category) << ',' << to_string(e.type) << '\n';
}

int cat4_update_cws(int cws, int acks, int nacks, int cws_min, int cws_max) {
  const int total = acks + nacks;
  if (total <= 0) return cws;
  // Integer form of nacks / total >= 0.8.
  if (5 * nacks >= 4 * total) return std::min(2 * cws + 1, cws_max);
  return cws_min;
}

bool onoff_is_on(SimTime t, SimTime on, SimTime off) { return (t % (on + off)) < on; }

ChannelAccessManager::ChannelAccessManager(Context ctx, CamConfig cfg) : ctx_(ctx), cfg_(cfg) {
  if (ctx_.simulator == nullptr || ctx_.environment == nullptr)
    throw std::invalid_argument("ChannelAccessManager: simulator and environment are required");
  rule_.ed_threshold_dbm = cfg_.ed_threshold_dbm;
  rule_.exclude_own_cell = true;
  const auto& dev = ctx_.environment->device(ctx_.device);
  if (cfg_.sensing_mode == SensingMode::kDirectional && dev.serving_cell != dev.id)
    rule_.beam = radio::RxBeam::toward(dev.serving_cell);
}

bool ChannelAccessManager::may_plan(SimTime, SimTime) const { return true; }

std::optional<ChannelGrant> ChannelAccessManager::grant_covering(SimTime a, SimTime b) const {
  for (auto it = grants_.rbegin(); it != grants_.rend(); ++it) {
    if (it->covers(a, b)) return *it;
    if (it->cot_deadline <= a && it->granted_at + cfg_.max_cot <= a) break;
  }
  return std::nullopt;
}

std::optional<ChannelGrant> ChannelAccessManager::active_grant(SimTime t) const {
  if (auto g = grant_covering(t, t)) {
    if (t < g->cot_deadline) return g;
  }
  return std::nullopt;
}

void ChannelAccessManager::on_harq_feedback(std::uint64_t, int, int) {}

const ChannelGrant& ChannelAccessManager::issue_grant(SimTime at, SimTime deadline) {
  ChannelGrant g;
  g.id = (static_cast<std::uint64_t>(ctx_.device) << 32) | next_grant_seq_++;
  g.granted_at = at;
  g.cot_deadline = deadline;
  g.initiator = ctx_.device;
  g.category = cfg_.category;
  grants_.push_back(g);
  if (ctx_.trace != nullptr) {
    ctx_.trace->grants.push_back(g);
    ctx_.trace->events.push_back({at, ctx_.device, cfg_.category, CamEventType::kGrant});
    if (!deadline.is_infinite())
      ctx_.trace->events.push_back({deadline, ctx_.device, cfg_.category, CamEventType::kCotEnd});
  }
  if (listener_) listener_(g);
  return grants_.back();
}

SimTime ChannelAccessManager::inherited_deadline(SimTime t, SimTime fallback) const {
  if (initiator_ != nullptr) {
    if (auto g = initiator_->active_grant(t); g && !g->cot_deadline.is_infinite()) return g->cot_deadline;
  }
  return fallback;
}

bool ChannelAccessManager::sense(SimTime a, SimTime b, std::uint64_t* record_index) {
  const auto& env = *ctx_.environment;
  const bool busy = env.busy(ctx_.device, rule_, a, b);
  if (ctx_.trace != nullptr && ctx_.trace->record_sensing) {
    if (record_index != nullptr) *record_index = ctx_.trace->sensing.size();
    ctx_.trace->sensing.push_back(
        {ctx_.device, a, b, busy, env.max_sensed_power_dbm(ctx_.device, rule_, a, b), rule_.ed_threshold_dbm, 0});
  }
  return busy;
}

void ChannelAccessManager::mark_sensing_grant(std::size_t first_record, std::uint64_t grant_id) {
  if (ctx_.trace == nullptr || !ctx_.trace->record_sensing) return;
  for (std::size_t i = first_record; i < ctx_.trace->sensing.size(); ++i)
    if (ctx_.trace->sensing[i].device == ctx_.device && ctx_.trace->sensing[i].grant_id == 0)
      ctx_.trace->sensing[i].grant_id = grant_id;
}

void ChannelAccessManager::trace(CamEventType type, SimTime t) {
  if (ctx_.trace != nullptr) ctx_.trace->events.push_back({t, ctx_.device, cfg_.category, type});
}

// ---------------------------------------------------------------- Cat1

void Cat1Cam::request_access(SimTime target, SimTime) {
  const SimTime now = ctx_.simulator->now();
  const SimTime deadline = inherited_deadline(std::max(now, target), SimTime::infinity());
  if (deadline.is_infinite() && !grants_.empty() && grants_.back().cot_deadline.is_infinite()) return;
  if (grant_covering(std::max(now, target), std::max(now, target))) return;
  issue_grant(now, deadline);
}

std::optional<ChannelGrant> Cat1Cam::grant_covering(SimTime a, SimTime b) const {
  const SimTime deadline = inherited_deadline(a, SimTime::infinity());
  if (b > deadline) return std::nullopt;
  ChannelGrant g;
  g.granted_at = a;
  g.cot_deadline = deadline;
  g.initiator = ctx_.device;
  g.category = Category::kCat1;
  if (!grants_.empty()) g.id = grants_.back().id;
  return g;
}

// ---------------------------------------------------------------- Cat2

void Cat2Cam::request_access(SimTime target, SimTime not_before) {
  if (std::find(pending_targets_.begin(), pending_targets_.end(), target) != pending_targets_.end()) return;
  const SimTime now = ctx_.simulator->now();
  const SimTime earliest = std::max(now, not_before);
  SimTime start = target.ticks() >= cfg_.cat2_defer.ticks() ? target - cfg_.cat2_defer : SimTime::zero();
  if (start < earliest) start = earliest;
  const SimTime end = start + cfg_.cat2_defer;
  pending_targets_.push_back(target);
  ctx_.simulator->schedule(end, [this, start, end, target] {
    std::erase(pending_targets_, target);
    std::uint64_t rec = 0;
    const bool busy = sense(start, end, &rec);
    if (!busy) {
      const auto& g = issue_grant(end, inherited_deadline(end, end + cfg_.max_cot));
      if (ctx_.trace != nullptr && ctx_.trace->record_sensing) mark_sensing_grant(rec, g.id);
    }
  });
}

std::optional<ChannelGrant> Cat2Cam::attempt(SimTime t) {
  const SimTime start = t.ticks() >= cfg_.cat2_defer.ticks() ? t - cfg_.cat2_defer : SimTime::zero();
  std::uint64_t rec = 0;
  if (sense(start, t, &rec)) return std::nullopt;
  const auto& g = issue_grant(t, inherited_deadline(t, t + cfg_.max_cot));
  mark_sensing_grant(rec, g.id);
  return g;
}

// ---------------------------------------------------------------- Cat3 / Cat4

BackoffCam::BackoffCam(Context ctx, CamConfig cfg)
    : ChannelAccessManager(ctx, cfg),
      rng_(ctx.seed, cfg.category == Category::kCat3 ? "cat3" : "cat4", ctx.device),
      cws_(cfg.category == Category::kCat3 ? cfg.cat3_cws : cfg.cws_min) {
  if (cfg.category != Category::kCat3 && cfg.category != Category::kCat4)
    throw std::invalid_argument("BackoffCam: category must be Cat3 or Cat4");
}

void BackoffCam::on_harq_feedback(std::uint64_t grant_id, int acks, int nacks) {
  if (cfg_.category != Category::kCat4) return;
  if (grants_.empty() || grants_.back().id != grant_id) return;
  // Only the reference (first) batch of a COT counts.
  if (feedback_ && feedback_->grant_id == grant_id) return;
  feedback_ = Feedback{grant_id, acks, nacks, false};
}

void BackoffCam::request_access(SimTime target, SimTime not_before) {
  if (phase_ != Phase::kIdle) return;
  if (cfg_.category == Category::kCat4) {
    if (feedback_ && !feedback_->applied && !grants_.empty() && feedback_->grant_id == grants_.back().id) {
      cws_ = cat4_update_cws(cws_, feedback_->acks, feedback_->nacks, cfg_.cws_min, cfg_.cws_max);
      feedback_->applied = true;
    }
  } else {
    cws_ = cfg_.cat3_cws;
  }
  if (forced_counter_) {
    counter_ = *forced_counter_;
    forced_counter_.reset();
  } else {
    counter_ = static_cast<int>(rng_.uniform_int(0, static_cast<std::uint64_t>(cws_)));
  }
  const SimTime now = ctx_.simulator->now();
  const SimTime needed = cfg_.defer_interval + cfg_.cca_slot * counter_;
  SimTime start = target.ticks() >= needed.ticks() ? target - needed : SimTime::zero();
  start = std::max({start, now, not_before});
  phase_ = Phase::kDeferring;
  first_record_ = (ctx_.trace != nullptr) ? ctx_.trace->sensing.size() : 0;
  ctx_.simulator->schedule(start, [this, start] { begin_defer(start); });
}

void BackoffCam::begin_defer(SimTime at) {
  phase_ = Phase::kDeferring;
  trace(CamEventType::kDeferStart, at);
  ctx_.simulator->schedule(at + cfg_.defer_interval, [this, at] { on_defer_end(at); });
}

void BackoffCam::on_defer_end(SimTime window_start) {
  const SimTime now = ctx_.simulator->now();
  if (sense(window_start, now)) {
    const SimTime resume = ctx_.environment->busy_until(ctx_.device, rule_, now);
    ctx_.simulator->schedule(resume, [this, resume] { begin_defer(resume); });
    return;
  }
  if (counter_ == 0) {
    finish();
    return;
  }
  phase_ = Phase::kCounting;
  ctx_.simulator->schedule(now + cfg_.cca_slot, [this, now] { on_slot_end(now); });
}

void BackoffCam::on_slot_end(SimTime slot_start) {
  const SimTime now = ctx_.simulator->now();
  if (sense(slot_start, now)) {
    trace(CamEventType::kCounterFrozen, now);
    const SimTime resume = ctx_.environment->busy_until(ctx_.device, rule_, now);
    phase_ = Phase::kDeferring;
    ctx_.simulator->schedule(resume, [this, resume] { begin_defer(resume); });
    return;
  }
  if (--counter_ == 0) {
    finish();
    return;
  }
  ctx_.simulator->schedule(now + cfg_.cca_slot, [this, now] { on_slot_end(now); });
}

void BackoffCam::finish() {
  const SimTime now = ctx_.simulator->now();
  phase_ = Phase::kIdle;
  const auto& g = issue_grant(now, now + cfg_.max_cot);
  mark_sensing_grant(first_record_, g.id);
}

// ---------------------------------------------------------------- OnOff

OnOffCam::OnOffCam(Context ctx, CamConfig cfg) : ChannelAccessManager(ctx, cfg) {
  if (cfg.duty_on <= SimTime::zero() || cfg.duty_off < SimTime::zero())
    throw std::invalid_argument("OnOffCam: invalid duty cycle");
  const SimTime now = ctx_.simulator->now();
  const SimTime period = cfg_.duty_on + cfg_.duty_off;
  ctx_.simulator->schedule(now - (now % period), [this] { schedule_edge(ctx_.simulator->now()); });
}

void OnOffCam::schedule_edge(SimTime t) {
  trace(CamEventType::kOnOffEdge, t);
  const SimTime period = cfg_.duty_on + cfg_.duty_off;
  const SimTime phase = t % period;
  if (phase < cfg_.duty_on) {
    const SimTime on_start = t - phase;
    issue_grant(on_start, on_start + cfg_.duty_on);
    ctx_.simulator->schedule(on_start + cfg_.duty_on, [this] { schedule_edge(ctx_.simulator->now()); });
  } else {
    ctx_.simulator->schedule(t - phase + period, [this] { schedule_edge(ctx_.simulator->now()); });
  }
}

bool OnOffCam::may_plan(SimTime a, SimTime b) const {
  if (!is_on(a)) return false;
  const SimTime period = cfg_.duty_on + cfg_.duty_off;
  return b <= a - (a % period) + cfg_.duty_on;
}

std::optional<ChannelGrant> OnOffCam::grant_covering(SimTime a, SimTime b) const {
  if (!may_plan(a, b)) return std::nullopt;
  const SimTime period = cfg_.duty_on + cfg_.duty_off;
  ChannelGrant g;
  g.id = (static_cast<std::uint64_t>(ctx_.device) << 32) | static_cast<std::uint64_t>(a / period + 1);
  g.granted_at = a - (a % period);
  g.cot_deadline = g.granted_at + cfg_.duty_on;
  g.initiator = ctx_.device;
  g.category = Category::kOnOff;
  return g;
}

std::unique_ptr<ChannelAccessManager> make_cam(ChannelAccessManager::Context ctx, const CamConfig& cfg) {
  switch (cfg.category) {
    case Category::kCat1: return std::make_unique<Cat1Cam>(ctx, cfg);
    case Category::kCat2: return std::make_unique<Cat2Cam>(ctx, cfg);
    case Category::kCat3:
    case Category::kCat4: return std::make_unique<BackoffCam>(ctx, cfg);
    case Category::kOnOff: return std::make_unique<OnOffCam>(ctx, cfg);
  }
  throw std::invalid_argument("make_cam: unknown category");
}

}  // namespace nrucoex::cam
