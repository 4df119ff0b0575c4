#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nrucoex/radio/device.hpp"
#include "nrucoex/sim/rng.hpp"
#include "nrucoex/sim/simulator.hpp"

namespace nrucoex::metrics {

using radio::DeviceId;
using sim::SimTime;

using PacketId = std::uint64_t;
using FlowId = std::uint32_t;

struct CbrFlow {
  DeviceId source = 0;
  DeviceId destination = 0;
  double rate_bps = 50e6;
  std::uint32_t packet_bytes = 1500;
  SimTime start_offset;

  SimTime interarrival() const;
};

// packet_bits / rate, rounded to the nanosecond grid (exact at the defaults: 240 us).
SimTime cbr_interarrival(double rate_bps, std::uint32_t packet_bytes);

struct PacketRecord {
  FlowId flow = 0;
  std::uint64_t sequence = 0;
  SimTime created_at;
  std::optional<SimTime> delivered_at;
  std::uint32_t size_bytes = 0;
  std::uint32_t bytes_delivered = 0;
  bool lost = false;
};

struct FlowCounters {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t in_flight() const { return generated - delivered - lost; }
};

/**
 * Owns every application packet of a run. Packets may be delivered in
 * byte-granular pieces (transport blocks carry segments); a packet counts
 * as delivered once all its bytes arrived and it was not declared lost.
 */
class PacketLedger {
 public:
  FlowId add_flow(const CbrFlow& flow);
  const CbrFlow& flow(FlowId id) const { return flows_.at(id); }
  std::size_t flow_count() const { return flows_.size(); }
  std::optional<FlowId> flow_to(DeviceId destination) const;

  PacketId create(FlowId flow, SimTime now);
  // Returns true when this call completed the packet.
  bool deliver_bytes(PacketId id, std::uint32_t bytes, SimTime now);
  bool deliver(PacketId id, SimTime now) { return deliver_bytes(id, packet(id).size_bytes, now); }
  // Idempotent; a delivered packet cannot become lost.
  void mark_lost(PacketId id);

  const PacketRecord& packet(PacketId id) const { return packets_.at(id); }
  std::size_t packet_count() const { return packets_.size(); }
  const FlowCounters& counters(FlowId flow) const { return counters_.at(flow); }

  // delivered_at - created_at of every delivered packet (microseconds).
  std::vector<double> latency_samples_us(FlowId flow) const;
  std::vector<double> latency_samples_us() const;
  std::uint64_t delivered_bits(FlowId flow) const;
  // Delivered application bits / t_end.
  double goodput_bps(FlowId flow, SimTime t_end) const;

 private:
  std::vector<CbrFlow> flows_;
  std::vector<FlowCounters> counters_;
  std::vector<std::uint64_t> next_sequence_;
  std::vector<PacketRecord> packets_;
};

// Drives one CBR flow on the simulator; every arrival is handed to `sink`.
class CbrSource {
 public:
  using Sink = std::function<void(PacketId)>;
  CbrSource(sim::Simulator& simulator, PacketLedger& ledger, FlowId flow, Sink sink);
  void start();

 private:
  void arrive();

  sim::Simulator& sim_;
  PacketLedger& ledger_;
  FlowId flow_;
  SimTime interarrival_;
  Sink sink_;
};

}  // namespace nrucoex::metrics
