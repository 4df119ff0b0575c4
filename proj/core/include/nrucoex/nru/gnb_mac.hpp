#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string_view>
#include <vector>

#include "nrucoex/cam/channel_access.hpp"
#include "nrucoex/metrics/traffic.hpp"
#include "nrucoex/nru/harq.hpp"
#include "nrucoex/nru/mcs.hpp"
#include "nrucoex/nru/numerology.hpp"
#include "nrucoex/nru/scheduler.hpp"
#include "nrucoex/radio/environment.hpp"
#include "nrucoex/sim/simulator.hpp"

namespace nrucoex::nru {

struct NrMacConfig {
  Numerology numerology;
  int mac_ahead_slots = 2;
  double mcs_margin_db = 1.0;
  int harq_max_transmissions = 4;
  double bandwidth_hz = 2.16e9;
  double overhead = 0.75;
  double tx_power_dbm = 17.0;
  // Uplink symbol carrying the HARQ reports of the previous slot.
  int feedback_symbol = 13;
};

enum class SlotResult { kAck, kNack, kFailed, kNoGrant };
std::string_view to_string(SlotResult r);

struct SlotTraceRow {
  SimTime slot_start;
  DeviceId ue = 0;
  int symbols = 0;
  int mcs = 0;
  std::uint32_t tb_bytes = 0;
  SlotResult result = SlotResult::kAck;
};

struct NrMacCounters {
  std::uint64_t slots_scheduled = 0;
  std::uint64_t slots_transmitted = 0;
  std::uint64_t slots_requeued = 0;
  std::uint64_t feedback_lost = 0;
  std::uint64_t tb_failed = 0;
  std::uint64_t retransmissions = 0;
};

// Called for every emission the MAC puts on air, with the grant it relies on.
using EmissionSink = std::function<void(const radio::Emission&, const cam::ChannelGrant&)>;

/**
 * Downlink MAC of one gNB and the receive/feedback side of its UEs.
 *
 * At every slot boundary m the allocation made for slot m is either aired
 * (the CAM holds a grant covering its airtime) or returned to the buffers,
 * then slot m + K is scheduled and an LBT procedure requested for it.
 * Each UE reports ACK/NACK for slot m in one uplink symbol of slot m + 1.
 */
class NrGnbMac {
 public:
  struct Context {
    sim::Simulator* simulator = nullptr;
    radio::RadioEnvironment* environment = nullptr;
    metrics::PacketLedger* ledger = nullptr;
    DeviceId gnb = 0;
    std::vector<DeviceId> ues;
    cam::ChannelAccessManager* gnb_cam = nullptr;
    std::vector<cam::ChannelAccessManager*> ue_cams;  // parallel to ues
    EmissionSink on_emission;
  };

  NrGnbMac(Context ctx, NrMacConfig cfg, McsTable table = McsTable::nr_default());

  void start();
  void enqueue(DeviceId ue, metrics::PacketId packet, std::uint32_t bytes);

  // Requests channel access for an allocation; true when a grant already covers it.
  bool lbt_after_scheduling(const SlotAllocation& allocation);

  std::uint64_t buffered_bytes(DeviceId ue) const;
  int ue_mcs(DeviceId ue) const;
  const NrMacCounters& counters() const { return counters_; }
  void set_trace(bool on) { trace_on_ = on; }
  const std::vector<SlotTraceRow>& trace() const { return trace_; }
  // slot_start_ns,ue,symbols,mcs,tb_bytes,harq_result
  void write_trace_csv(std::ostream& os) const;

 private:
  struct UeState {
    DeviceId id = 0;
    std::size_t index = 0;
    cam::ChannelAccessManager* cam = nullptr;
    std::deque<Segment> rlc;
    std::uint64_t buffered = 0;
    int mcs = 0;
    std::uint32_t bytes_per_symbol = 1;
  };
  struct Pending {
    std::uint32_t harq_id = 0;
    SimTime slot_start;
  };
  struct ReferenceBatch {
    std::uint64_t grant_id = 0;
    std::vector<std::uint32_t> harq_ids;
    int acks = 0;
    int nacks = 0;
    int outstanding = 0;
  };

  UeState& ue(DeviceId id);
  const UeState& ue(DeviceId id) const;
  void on_slot(std::int64_t m);
  void transmit(std::int64_t m);
  void requeue(const SlotAllocation& a);
  void schedule(std::int64_t n);
  void on_dl_end(const radio::Emission& signal, SimTime slot_start, std::int64_t m);
  void on_feedback_symbol(std::int64_t slot);
  void resolve(std::uint32_t harq_id, bool ack, SimTime slot_start);
  std::vector<Segment> pop_bytes(UeState& u, std::uint32_t bytes);
  void record(const SlotTraceRow& row);

  Context ctx_;
  NrMacConfig cfg_;
  McsTable table_;
  std::vector<UeState> ues_;
  std::map<std::int64_t, SlotAllocation> allocations_;
  std::map<std::uint32_t, HarqProcess> processes_;
  std::deque<std::uint32_t> retx_queue_;
  std::map<std::int64_t, std::vector<Pending>> feedback_due_;  // keyed by the reporting slot
  std::size_t rr_ = 0;
  std::uint32_t next_harq_id_ = 1;
  std::uint64_t last_grant_id_ = 0;
  std::deque<ReferenceBatch> reference_;
  NrMacCounters counters_;
  bool trace_on_ = false;
  std::vector<SlotTraceRow> trace_;
};

}  // namespace nrucoex::nru
