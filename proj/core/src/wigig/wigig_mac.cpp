#include "nrucoex/wigig/wigig_mac.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace nrucoex::wigig {

std::string_view to_string(FrameOutcome o) {
  switch (o) {
    case FrameOutcome::kAck: return "ack";
    case FrameOutcome::kTimeout: return "timeout";
    case FrameOutcome::kDrop: return "drop";
    case FrameOutcome::kProbe: return "probe";
    case FrameOutcome::kProbeResponse: return "probe_response";
  }
  return "?";
}

WigigBss::WigigBss(Context ctx, WigigConfig cfg, nru::McsTable table)
    : ctx_(std::move(ctx)), cfg_(cfg), table_(std::move(table)) {
  if (ctx_.simulator == nullptr || ctx_.environment == nullptr || ctx_.ledger == nullptr)
    throw std::invalid_argument("WigigBss: incomplete context");
  if (cfg_.ack_timeout <= cfg_.sifs + cfg_.ack_duration)
    throw std::invalid_argument("WigigBss: ACK timeout shorter than SIFS + ACK");
  ap_dcf_ = std::make_unique<Dcf>(*ctx_.simulator, *ctx_.environment, ctx_.ap, cfg_.dcf, cfg_.thresholds,
                                  sim::RngStream(ctx_.seed, "dcf", ctx_.ap));
  for (DeviceId id : ctx_.stas) {
    StaState s;
    s.id = id;
    s.dcf = std::make_unique<Dcf>(*ctx_.simulator, *ctx_.environment, id, cfg_.dcf, cfg_.thresholds,
                                  sim::RngStream(ctx_.seed, "dcf", id));
    stas_.push_back(std::move(s));
  }
}

WigigBss::StaState& WigigBss::sta(DeviceId id) {
  for (auto& s : stas_)
    if (s.id == id) return s;
  throw std::invalid_argument("WigigBss: STA not in this BSS");
}

const WigigBss::StaState& WigigBss::sta(DeviceId id) const {
  for (const auto& s : stas_)
    if (s.id == id) return s;
  throw std::invalid_argument("WigigBss: STA not in this BSS");
}

AssociationState WigigBss::association(DeviceId id) const { return sta(id).state; }
int WigigBss::sta_mcs(DeviceId id) const { return sta(id).mcs; }
int WigigBss::association_attempts(DeviceId id) const { return sta(id).attempts; }
Dcf& WigigBss::sta_dcf(DeviceId id) { return *sta(id).dcf; }

void WigigBss::record(const FrameTraceRow& row) {
  if (trace_on_) trace_.push_back(row);
}

radio::Emission WigigBss::make_emission(DeviceId src, DeviceId dst, SimTime start, SimTime duration,
                                        radio::EmissionKind kind) const {
  radio::Emission e;
  e.source = src;
  e.beam_target = dst;
  e.tx_power_dbm = cfg_.tx_power_dbm;
  e.start = start;
  e.end = start + duration;
  e.rat = radio::Rat::kWigig;
  e.kind = kind;
  e.cell = ctx_.ap;
  return e;
}

const radio::Emission& WigigBss::air(const radio::Emission& e) {
  const radio::Emission& placed = ctx_.environment->add_emission(e);
  if (ctx_.on_emission) ctx_.on_emission(placed);
  return placed;
}

bool WigigBss::decodes(DeviceId rx, const radio::Emission& e, const radio::RxBeam& beam, double threshold_db) const {
  // Half duplex: a device cannot receive while it transmits.
  const auto& env = *ctx_.environment;
  for (const radio::Emission* other : env.overlapping(e.start, e.end))
    if (other->source == rx) return false;
  return env.sinr_db(rx, e, beam) >= threshold_db;
}

void WigigBss::start() {
  sim::RngStream spread(ctx_.seed, "assoc", ctx_.ap);
  for (auto& s : stas_) {
    const double snr = ctx_.environment->snr_db(ctx_.ap, s.id, radio::RxBeam::toward(ctx_.ap));
    const auto sel = table_.select(snr, cfg_.mcs_margin_db);
    s.mcs = sel.index;
    s.rate_mbps = sel.spectral_efficiency;
    const auto offset = static_cast<std::int64_t>(
        spread.uniform_int(0, static_cast<std::uint64_t>(std::max<std::int64_t>(cfg_.association_spread.ticks(), 1) - 1)));
    const DeviceId id = s.id;
    ctx_.simulator->schedule(ctx_.simulator->now() + SimTime::ns(offset), [this, id] { probe(sta(id)); });
  }
}

void WigigBss::enqueue(DeviceId id, metrics::PacketId packet, std::uint32_t bytes) {
  auto& s = sta(id);
  switch (s.state) {
    case AssociationState::kFailed: ctx_.ledger->mark_lost(packet); return;
    case AssociationState::kPending: s.waiting.push_back({id, packet, bytes}); return;
    case AssociationState::kAssociated:
      queue_.push_back({id, packet, bytes});
      kick();
      return;
  }
}

// ---------------------------------------------------------------- association

void WigigBss::probe(StaState& s) {
  ++s.attempts;
  const std::uint64_t seq = ++s.probe_seq;
  const DeviceId id = s.id;
  s.dcf->access([this, id, seq](SimTime t) {
    auto& st = sta(id);
    const SimTime dur = frame_duration(cfg_.probe_bytes, table_.efficiency(0), cfg_.preamble);
    const radio::Emission& e = air(make_emission(id, ctx_.ap, t, dur, radio::EmissionKind::kWigigProbe));
    st.dcf->set_self_busy_until(e.end);
    ++counters_.probes;
    record({t, id, ctx_.ap, cfg_.probe_bytes, 0, st.attempts - 1, FrameOutcome::kProbe});
    ctx_.simulator->schedule(e.end, [this, copy = e] { on_probe_end(copy); });
    ctx_.simulator->schedule(e.end + cfg_.sifs + dur + SimTime::us(2), [this, id, seq] { on_probe_timeout(id, seq); });
  });
}

void WigigBss::on_probe_end(const radio::Emission& probe_emission) {
  if (!decodes(ctx_.ap, probe_emission, radio::RxBeam::omni(), table_.threshold_db(0))) return;
  const SimTime now = ctx_.simulator->now();
  const SimTime dur = frame_duration(cfg_.probe_bytes, table_.efficiency(0), cfg_.preamble);
  const SimTime resp_start = now + cfg_.sifs;
  if (ctx_.environment->transmitting(ctx_.ap, now, resp_start + dur)) return;
  ap_dcf_->set_self_busy_until(resp_start + dur);
  const DeviceId id = probe_emission.source;
  const std::uint64_t seq = sta(id).probe_seq;
  ctx_.simulator->schedule(resp_start, [this, id, seq, resp_start, dur] {
    const radio::Emission& e =
        air(make_emission(ctx_.ap, id, resp_start, dur, radio::EmissionKind::kWigigProbeResponse));
    record({resp_start, ctx_.ap, id, cfg_.probe_bytes, 0, 0, FrameOutcome::kProbeResponse});
    ctx_.simulator->schedule(e.end, [this, copy = e, id, seq] {
      auto& s = sta(id);
      if (s.state != AssociationState::kPending || s.probe_seq != seq) return;
      if (decodes(id, copy, radio::RxBeam::toward(ctx_.ap), table_.threshold_db(0))) on_associated(s);
    });
  });
}

void WigigBss::on_probe_timeout(DeviceId id, std::uint64_t seq) {
  auto& s = sta(id);
  if (s.state != AssociationState::kPending || s.probe_seq != seq) return;
  s.dcf->report(false);
  if (s.attempts >= cfg_.association_attempts) {
    s.state = AssociationState::kFailed;
    for (const auto& f : s.waiting) ctx_.ledger->mark_lost(f.packet);
    s.waiting.clear();
    return;
  }
  probe(s);
}

void WigigBss::on_associated(StaState& s) {
  s.state = AssociationState::kAssociated;
  s.dcf->report(true);
  for (const auto& f : s.waiting) queue_.push_back(f);
  s.waiting.clear();
  kick();
}

// ---------------------------------------------------------------- data

void WigigBss::kick() {
  if (busy_ || queue_.empty()) return;
  busy_ = true;
  ap_dcf_->access([this](SimTime t) { on_ap_access(t); });
}

void WigigBss::on_ap_access(SimTime t) {
  const DeviceId dest = queue_.front().sta;
  current_.clear();
  std::uint32_t bytes = 0;
  for (const auto& f : queue_) {
    if (static_cast<int>(current_.size()) >= std::max(cfg_.max_aggregation, 1)) break;
    if (f.sta != dest) continue;
    current_.push_back(f);
    bytes += f.bytes;
  }
  const auto& s = sta(dest);
  const SimTime dur = frame_duration(bytes, s.rate_mbps, cfg_.preamble);
  const radio::Emission& e = air(make_emission(ctx_.ap, dest, t, dur, radio::EmissionKind::kWigigData));
  ap_dcf_->set_self_busy_until(e.end);
  ++counters_.data_frames;
  const std::uint64_t attempt = ++attempt_;
  attempt_open_ = true;
  last_frame_start_ = t;
  ctx_.simulator->schedule(e.end, [this, copy = e] { on_data_end(copy); });
  ctx_.simulator->schedule(e.end + cfg_.ack_timeout, [this, attempt] {
    if (attempt == attempt_ && attempt_open_) finish_attempt(false);
  });
}

void WigigBss::on_data_end(const radio::Emission& e) {
  const DeviceId dest = current_.front().sta;
  const auto& s = sta(dest);
  if (!decodes(dest, e, radio::RxBeam::toward(ctx_.ap), table_.threshold_db(s.mcs))) return;
  const SimTime now = ctx_.simulator->now();
  for (const auto& f : current_) ctx_.ledger->deliver(f.packet, now);
  const SimTime ack_start = now + cfg_.sifs;
  const std::uint64_t attempt = attempt_;
  ctx_.simulator->schedule(ack_start, [this, dest, ack_start, attempt] {
    const radio::Emission& ack =
        air(make_emission(dest, ctx_.ap, ack_start, cfg_.ack_duration, radio::EmissionKind::kWigigAck));
    ctx_.simulator->schedule(ack.end, [this, copy = ack, attempt] {
      if (attempt != attempt_ || !attempt_open_) return;
      if (decodes(ctx_.ap, copy, radio::RxBeam::omni(), table_.threshold_db(0))) finish_attempt(true);
    });
  });
}

void WigigBss::finish_attempt(bool acked) {
  attempt_open_ = false;
  const int retries = ap_dcf_->state().retries;
  const AckOutcome outcome = ap_dcf_->report(acked);
  std::uint32_t bytes = 0;
  for (const auto& f : current_) bytes += f.bytes;
  const DeviceId dest = current_.front().sta;
  FrameTraceRow row{last_frame_start_, ctx_.ap, dest, bytes, sta(dest).mcs, retries, FrameOutcome::kAck};
  auto remove_current = [this] {
    std::erase_if(queue_, [this](const Frame& q) {
      return std::any_of(current_.begin(), current_.end(), [&q](const Frame& c) { return c.packet == q.packet; });
    });
  };
  switch (outcome) {
    case AckOutcome::kDone:
      ++counters_.acked;
      remove_current();
      break;
    case AckOutcome::kRetry:
      ++counters_.timeouts;
      row.outcome = FrameOutcome::kTimeout;
      break;
    case AckOutcome::kDrop:
      ++counters_.timeouts;
      ++counters_.drops;
      row.outcome = FrameOutcome::kDrop;
      for (const auto& f : current_) ctx_.ledger->mark_lost(f.packet);
      remove_current();
      break;
  }
  record(row);
  current_.clear();
  busy_ = false;
  kick();
}

void WigigBss::write_trace_csv(std::ostream& os) const {
  os << "t_start_ns,src,dst,bytes,mcs,retries,outcome\n";
  for (const auto& r : trace_)
    os << r.start.ticks() << ',' << r.source << ',' << r.destination << ',' << r.bytes << ',' << r.mcs << ','
       << r.retries << ',' << to_string(r.outcome) << '\n';
}

}  // namespace nrucoex::wigig
