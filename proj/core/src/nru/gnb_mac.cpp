#include "nrucoex/nru/gnb_mac.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace nrucoex::nru {

std::string_view to_string(SlotResult r) {
  switch (r) {
    case SlotResult::kAck: return "ack";
    case SlotResult::kNack: return "nack";
    case SlotResult::kFailed: return "failed";
    case SlotResult::kNoGrant: return "no_grant";
  }
  return "?";
}

NrGnbMac::NrGnbMac(Context ctx, NrMacConfig cfg, McsTable table)
    : ctx_(std::move(ctx)), cfg_(cfg), table_(std::move(table)) {
  if (ctx_.simulator == nullptr || ctx_.environment == nullptr || ctx_.ledger == nullptr || ctx_.gnb_cam == nullptr)
    throw std::invalid_argument("NrGnbMac: incomplete context");
  if (ctx_.ue_cams.size() != ctx_.ues.size()) throw std::invalid_argument("NrGnbMac: one CAM per UE required");
  if (cfg_.mac_ahead_slots < 1) throw std::invalid_argument("NrGnbMac: mac_ahead_slots must be >= 1");
  if (cfg_.feedback_symbol < 1 || cfg_.feedback_symbol >= cfg_.numerology.symbols_per_slot)
    throw std::invalid_argument("NrGnbMac: feedback symbol outside the slot");
  for (std::size_t i = 0; i < ctx_.ues.size(); ++i) {
    UeState u;
    u.id = ctx_.ues[i];
    u.index = i;
    u.cam = ctx_.ue_cams[i];
    ues_.push_back(std::move(u));
  }
}

NrGnbMac::UeState& NrGnbMac::ue(DeviceId id) {
  for (auto& u : ues_)
    if (u.id == id) return u;
  throw std::invalid_argument("NrGnbMac: UE not served by this gNB");
}

const NrGnbMac::UeState& NrGnbMac::ue(DeviceId id) const {
  for (const auto& u : ues_)
    if (u.id == id) return u;
  throw std::invalid_argument("NrGnbMac: UE not served by this gNB");
}

std::uint64_t NrGnbMac::buffered_bytes(DeviceId id) const { return ue(id).buffered; }
int NrGnbMac::ue_mcs(DeviceId id) const { return ue(id).mcs; }

void NrGnbMac::start() {
  const double symbol_s = cfg_.numerology.symbol.to_seconds();
  for (auto& u : ues_) {
    const double snr = ctx_.environment->snr_db(ctx_.gnb, u.id, radio::RxBeam::toward(ctx_.gnb));
    const auto sel = table_.select(snr, cfg_.mcs_margin_db);
    u.mcs = sel.index;
    u.bytes_per_symbol =
        std::max<std::uint32_t>(1, bytes_per_symbol(sel.spectral_efficiency, cfg_.bandwidth_hz, cfg_.overhead, symbol_s));
  }
  const SimTime slot = cfg_.numerology.slot();
  const SimTime now = ctx_.simulator->now();
  const std::int64_t first = (now.ticks() + slot.ticks() - 1) / slot.ticks();
  ctx_.simulator->schedule(cfg_.numerology.slot_start(first), [this, first] { on_slot(first); });
}

void NrGnbMac::enqueue(DeviceId id, metrics::PacketId packet, std::uint32_t bytes) {
  if (bytes == 0) return;
  auto& u = ue(id);
  u.rlc.push_back({packet, bytes});
  u.buffered += bytes;
}

void NrGnbMac::on_slot(std::int64_t m) {
  // Hop once so grants issued at this boundary are visible.
  ctx_.simulator->schedule_in(SimTime::zero(), [this, m] {
    transmit(m);
    schedule(m + cfg_.mac_ahead_slots);
  });
  ctx_.simulator->schedule(cfg_.numerology.slot_start(m + 1), [this, m] { on_slot(m + 1); });
}

void NrGnbMac::record(const SlotTraceRow& row) {
  if (trace_on_) trace_.push_back(row);
}

std::vector<Segment> NrGnbMac::pop_bytes(UeState& u, std::uint32_t bytes) {
  std::vector<Segment> out;
  while (bytes > 0 && !u.rlc.empty()) {
    Segment& front = u.rlc.front();
    const std::uint32_t take = std::min(bytes, front.bytes);
    out.push_back({front.packet, take});
    front.bytes -= take;
    bytes -= take;
    u.buffered -= take;
    if (front.bytes == 0) u.rlc.pop_front();
  }
  return out;
}

bool NrGnbMac::lbt_after_scheduling(const SlotAllocation& a) {
  if (a.empty()) return false;
  const SimTime end = a.airtime_end(cfg_.numerology.symbol);
  if (ctx_.gnb_cam->grant_covering(a.start, end)) return true;
  ctx_.gnb_cam->request_access(a.start, ctx_.simulator->now());
  return false;
}

void NrGnbMac::schedule(std::int64_t n) {
  const SimTime start = cfg_.numerology.slot_start(n);
  const SimTime sym = cfg_.numerology.symbol;
  int available = cfg_.numerology.symbols_per_slot;
  if (auto prev = allocations_.find(n - 1); prev != allocations_.end() && !prev->second.empty())
    available = cfg_.feedback_symbol;
  while (available > 0 && !ctx_.gnb_cam->may_plan(start, start + sym * available)) --available;
  if (available == 0) return;

  std::vector<RetxDemand> retx;
  for (std::uint32_t id : retx_queue_) {
    const auto& p = processes_.at(id);
    retx.push_back({p.ue(), id, p.symbols(), p.mcs(), p.tb_bytes()});
  }
  std::vector<UeDemand> demands;
  demands.reserve(ues_.size());
  for (const auto& u : ues_) demands.push_back({u.id, u.buffered, u.bytes_per_symbol, u.mcs});

  SlotAllocation a = schedule_slot(n, start, available, retx, demands, rr_);
  if (a.empty()) return;
  rr_ = a.next_rr;
  for (auto& alloc : a.ues) {
    if (alloc.retransmission) {
      std::erase(retx_queue_, alloc.harq_id);
      continue;
    }
    auto& u = ue(alloc.ue);
    const std::uint32_t id = next_harq_id_++;
    HarqProcess p(id, u.id, alloc.tb_bytes, alloc.mcs, alloc.symbols, table_.threshold_db(alloc.mcs),
                  cfg_.harq_max_transmissions);
    p.segments = pop_bytes(u, alloc.tb_bytes);
    processes_.emplace(id, std::move(p));
    alloc.harq_id = id;
  }
  ++counters_.slots_scheduled;
  lbt_after_scheduling(a);
  allocations_.emplace(n, std::move(a));
}

void NrGnbMac::requeue(const SlotAllocation& a) {
  ++counters_.slots_requeued;
  for (auto it = a.ues.rbegin(); it != a.ues.rend(); ++it) {
    record({a.start, it->ue, it->symbols, it->mcs, it->tb_bytes, SlotResult::kNoGrant});
    if (it->retransmission) {
      retx_queue_.push_front(it->harq_id);
      continue;
    }
    auto node = processes_.extract(it->harq_id);
    auto& u = ue(it->ue);
    const auto& segs = node.mapped().segments;
    for (auto s = segs.rbegin(); s != segs.rend(); ++s) {
      // Merge with a partially sent remainder of the same packet.
      if (!u.rlc.empty() && u.rlc.front().packet == s->packet)
        u.rlc.front().bytes += s->bytes;
      else
        u.rlc.push_front(*s);
      u.buffered += s->bytes;
    }
  }
}

void NrGnbMac::transmit(std::int64_t m) {
  auto node = allocations_.extract(m);
  if (node.empty() || node.mapped().empty()) return;
  // Entries older than the pipeline can be dropped from the lookup map.
  allocations_.erase(allocations_.begin(), allocations_.lower_bound(m - 1));
  const SlotAllocation& a = node.mapped();
  const SimTime sym = cfg_.numerology.symbol;
  auto grant = ctx_.gnb_cam->grant_covering(a.start, a.airtime_end(sym));
  if (!grant) {
    requeue(a);
    // Keep a placeholder so the reserved feedback symbol of m + 1 stays consistent.
    allocations_.emplace(m, SlotAllocation{m, a.start, {}, a.next_rr});
    return;
  }
  ++counters_.slots_transmitted;
  allocations_.emplace(m, a);

  if (grant->id != last_grant_id_) {
    last_grant_id_ = grant->id;
    ReferenceBatch batch;
    batch.grant_id = grant->id;
    for (const auto& alloc : a.ues) batch.harq_ids.push_back(alloc.harq_id);
    batch.outstanding = static_cast<int>(batch.harq_ids.size());
    reference_.push_back(std::move(batch));
  }

  for (const auto& alloc : a.ues) {
    auto& p = processes_.at(alloc.harq_id);
    p.on_transmit();
    if (alloc.retransmission) ++counters_.retransmissions;
    radio::Emission e;
    e.source = ctx_.gnb;
    e.beam_target = alloc.ue;
    e.tx_power_dbm = cfg_.tx_power_dbm;
    e.start = a.start + sym * alloc.first_symbol;
    e.end = e.start + sym * alloc.symbols;
    e.rat = radio::Rat::kNrU;
    e.kind = radio::EmissionKind::kNrData;
    e.cell = ctx_.gnb;
    e.payload = alloc.harq_id;
    const auto g = *grant;
    auto air = [this, e, g, m, slot_start = a.start]() {
      const radio::Emission& placed = ctx_.environment->add_emission(e);
      if (ctx_.on_emission) ctx_.on_emission(placed, g);
      ctx_.simulator->schedule(placed.end, [this, copy = placed, slot_start, m] {
        on_dl_end(copy, slot_start, m);
      });
    };
    if (e.start == ctx_.simulator->now())
      air();
    else
      ctx_.simulator->schedule(e.start, air);
  }
}

void NrGnbMac::on_dl_end(const radio::Emission& signal, SimTime slot_start, std::int64_t m) {
  const auto harq_id = static_cast<std::uint32_t>(signal.payload);
  auto& p = processes_.at(harq_id);
  const SimTime now = ctx_.simulator->now();
  const bool was_decoded = p.decoded();
  const double sinr = ctx_.environment->sinr_db(p.ue(), signal, radio::RxBeam::toward(ctx_.gnb));
  if (p.combine(sinr) && !was_decoded)
    for (const auto& s : p.segments) ctx_.ledger->deliver_bytes(s.packet, s.bytes, now);

  const std::int64_t k = m + 1;
  const SimTime tf = cfg_.numerology.symbol_start(k, cfg_.feedback_symbol);
  auto& list = feedback_due_[k];
  const bool first = list.empty();
  list.push_back({harq_id, slot_start});
  ue(p.ue()).cam->request_access(tf, now);
  if (first)
    ctx_.simulator->schedule(tf, [this, k] {
      ctx_.simulator->schedule_in(SimTime::zero(), [this, k] { on_feedback_symbol(k); });
    });
}

void NrGnbMac::on_feedback_symbol(std::int64_t k) {
  auto node = feedback_due_.extract(k);
  if (node.empty()) return;
  const SimTime tf = ctx_.simulator->now();
  const SimTime sym = cfg_.numerology.symbol;
  for (const Pending& pending : node.mapped()) {
    const auto& p = processes_.at(pending.harq_id);
    auto& u = ue(p.ue());
    auto grant = u.cam->grant_covering(tf, tf + sym);
    if (!grant) {
      ++counters_.feedback_lost;
      resolve(pending.harq_id, false, pending.slot_start);
      continue;
    }
    radio::Emission e;
    e.source = u.id;
    e.beam_target = ctx_.gnb;
    e.tx_power_dbm = cfg_.tx_power_dbm;
    e.start = tf;
    e.end = tf + sym;
    e.rat = radio::Rat::kNrU;
    e.kind = radio::EmissionKind::kNrFeedback;
    e.cell = ctx_.gnb;
    e.orthogonal_group = ctx_.gnb;
    e.payload = pending.harq_id;
    const radio::Emission& placed = ctx_.environment->add_emission(e);
    if (ctx_.on_emission) ctx_.on_emission(placed, *grant);
    const bool report = p.decoded();
    ctx_.simulator->schedule(placed.end, [this, copy = placed, report, pending] {
      const double sinr = ctx_.environment->sinr_db(ctx_.gnb, copy, radio::RxBeam::toward(copy.source));
      const bool heard = sinr >= table_.threshold_db(0);
      if (!heard) ++counters_.feedback_lost;
      resolve(pending.harq_id, heard && report, pending.slot_start);
    });
  }
}

void NrGnbMac::resolve(std::uint32_t harq_id, bool ack, SimTime slot_start) {
  auto it = processes_.find(harq_id);
  if (it == processes_.end()) return;
  HarqProcess& p = it->second;

  for (auto& batch : reference_) {
    if (std::find(batch.harq_ids.begin(), batch.harq_ids.end(), harq_id) == batch.harq_ids.end()) continue;
    if (batch.outstanding == 0) continue;
    (ack ? batch.acks : batch.nacks) += 1;
    --batch.outstanding;
    std::erase(batch.harq_ids, harq_id);
    if (batch.outstanding == 0) ctx_.gnb_cam->on_harq_feedback(batch.grant_id, batch.acks, batch.nacks);
    break;
  }
  while (!reference_.empty() && reference_.front().outstanding == 0) reference_.pop_front();

  const SlotTraceRow base{slot_start, p.ue(), p.symbols(), p.mcs(), p.tb_bytes(), SlotResult::kAck};
  switch (harq_on_feedback(p, ack)) {
    case HarqOutcome::kDone:
      record(base);
      processes_.erase(it);
      break;
    case HarqOutcome::kRetransmit: {
      auto row = base;
      row.result = SlotResult::kNack;
      record(row);
      retx_queue_.push_back(harq_id);
      break;
    }
    case HarqOutcome::kFailed: {
      auto row = base;
      row.result = SlotResult::kFailed;
      record(row);
      if (!p.decoded()) {
        ++counters_.tb_failed;
        for (const auto& s : p.segments) ctx_.ledger->mark_lost(s.packet);
      }
      processes_.erase(it);
      break;
    }
  }
}

void NrGnbMac::write_trace_csv(std::ostream& os) const {
  os << "slot_start_ns,ue,symbols,mcs,tb_bytes,harq_result\n";
  for (const auto& r : trace_)
    os << r.slot_start.ticks() << ',' << r.ue << ',' << r.symbols << ',' << r.mcs << ',' << r.tb_bytes << ','
       << to_string(r.result) << '\n';
}

}  // namespace nrucoex::nru
