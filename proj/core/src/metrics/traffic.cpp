#include "nrucoex/metrics/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace nrucoex::metrics {

SimTime cbr_interarrival(double rate_bps, std::uint32_t packet_bytes) {
  if (!(rate_bps > 0.0) || packet_bytes == 0) throw std::invalid_argument("cbr: rate and packet size must be positive");
  const double ns = static_cast<double>(packet_bytes) * 8.0 * 1e9 / rate_bps;
  return SimTime::ns(std::max<std::int64_t>(1, std::llround(ns)));
}

SimTime CbrFlow::interarrival() const { return cbr_interarrival(rate_bps, packet_bytes); }

FlowId PacketLedger::add_flow(const CbrFlow& flow) {
  flows_.push_back(flow);
  counters_.emplace_back();
  next_sequence_.push_back(0);
  return static_cast<FlowId>(flows_.size() - 1);
}

std::optional<FlowId> PacketLedger::flow_to(DeviceId destination) const {
  for (FlowId i = 0; i < flows_.size(); ++i)
    if (flows_[i].destination == destination) return i;
  return std::nullopt;
}

PacketId PacketLedger::create(FlowId flow, SimTime now) {
  PacketRecord r;
  r.flow = flow;
  r.sequence = next_sequence_.at(flow)++;
  r.created_at = now;
  r.size_bytes = flows_[flow].packet_bytes;
  packets_.push_back(r);
  ++counters_[flow].generated;
  return packets_.size() - 1;
}

bool PacketLedger::deliver_bytes(PacketId id, std::uint32_t bytes, SimTime now) {
  PacketRecord& r = packets_.at(id);
  if (r.delivered_at || r.lost) return false;
  r.bytes_delivered = std::min(r.size_bytes, r.bytes_delivered + bytes);
  if (r.bytes_delivered < r.size_bytes) return false;
  if (now < r.created_at) throw std::logic_error("packet delivered before creation");
  r.delivered_at = now;
  ++counters_[r.flow].delivered;
  return true;
}

void PacketLedger::mark_lost(PacketId id) {
  PacketRecord& r = packets_.at(id);
  if (r.delivered_at || r.lost) return;
  r.lost = true;
  ++counters_[r.flow].lost;
}

std::vector<double> PacketLedger::latency_samples_us(FlowId flow) const {
  std::vector<double> out;
  for (const auto& p : packets_)
    if (p.flow == flow && p.delivered_at) out.push_back((*p.delivered_at - p.created_at).to_us());
  return out;
}

std::vector<double> PacketLedger::latency_samples_us() const {
  std::vector<double> out;
  for (const auto& p : packets_)
    if (p.delivered_at) out.push_back((*p.delivered_at - p.created_at).to_us());
  return out;
}

std::uint64_t PacketLedger::delivered_bits(FlowId flow) const {
  return counters_.at(flow).delivered * static_cast<std::uint64_t>(flows_.at(flow).packet_bytes) * 8ULL;
}

double PacketLedger::goodput_bps(FlowId flow, SimTime t_end) const {
  if (t_end <= SimTime::zero()) return 0.0;
  return static_cast<double>(delivered_bits(flow)) / t_end.to_seconds();
}

CbrSource::CbrSource(sim::Simulator& simulator, PacketLedger& ledger, FlowId flow, Sink sink)
    : sim_(simulator), ledger_(ledger), flow_(flow), interarrival_(ledger.flow(flow).interarrival()), sink_(std::move(sink)) {}

void CbrSource::start() {
  sim_.schedule(sim_.now() + ledger_.flow(flow_).start_offset, [this] { arrive(); });
}

void CbrSource::arrive() {
  const PacketId id = ledger_.create(flow_, sim_.now());
  sim_.schedule_in(interarrival_, [this] { arrive(); });
  sink_(id);
}

}  // namespace nrucoex::metrics
