#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

#include "nrucoex/metrics/traffic.hpp"
#include "nrucoex/nru/mcs.hpp"
#include "nrucoex/radio/environment.hpp"
#include "nrucoex/sim/simulator.hpp"
#include "nrucoex/wigig/dcf.hpp"

namespace nrucoex::wigig {

struct WigigConfig {
  DcfParams dcf;
  DetectionThresholds thresholds;
  SimTime preamble = SimTime::ns(1900);
  SimTime sifs = SimTime::us(3);
  SimTime ack_duration = SimTime::us(1);
  SimTime ack_timeout = SimTime::us(10);
  double mcs_margin_db = 1.0;
  double tx_power_dbm = 17.0;
  int association_attempts = 5;
  // Queued frames for the same STA sent in one PPDU under a single ACK; 1 disables.
  int max_aggregation = 8;
  std::uint32_t probe_bytes = 64;
  // STAs start their first probe uniformly within this window after run start.
  SimTime association_spread = SimTime::us(100);
};

enum class FrameOutcome { kAck, kTimeout, kDrop, kProbe, kProbeResponse };
std::string_view to_string(FrameOutcome o);

struct FrameTraceRow {
  SimTime start;
  DeviceId source = 0;
  DeviceId destination = 0;
  std::uint32_t bytes = 0;
  int mcs = 0;
  int retries = 0;
  FrameOutcome outcome = FrameOutcome::kAck;
};

enum class AssociationState { kPending, kAssociated, kFailed };

struct WigigCounters {
  std::uint64_t data_frames = 0;
  std::uint64_t acked = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t drops = 0;
  std::uint64_t probes = 0;
};

using WigigEmissionSink = std::function<void(const radio::Emission&)>;

/**
 * One WiGig BSS: the AP's downlink DCF queue, the STAs' ACK responses and the
 * probe/response association exchange at run start.
 */
class WigigBss {
 public:
  struct Context {
    sim::Simulator* simulator = nullptr;
    radio::RadioEnvironment* environment = nullptr;
    metrics::PacketLedger* ledger = nullptr;
    DeviceId ap = 0;
    std::vector<DeviceId> stas;
    std::uint64_t seed = 0;
    WigigEmissionSink on_emission;
  };

  WigigBss(Context ctx, WigigConfig cfg, nru::McsTable table = nru::McsTable::wigig_default());

  void start();
  void enqueue(DeviceId sta, metrics::PacketId packet, std::uint32_t bytes);

  AssociationState association(DeviceId sta) const;
  int sta_mcs(DeviceId sta) const;
  int association_attempts(DeviceId sta) const;
  std::size_t queue_length() const { return queue_.size(); }
  const WigigCounters& counters() const { return counters_; }
  Dcf& ap_dcf() { return *ap_dcf_; }
  Dcf& sta_dcf(DeviceId sta);

  void set_trace(bool on) { trace_on_ = on; }
  const std::vector<FrameTraceRow>& trace() const { return trace_; }
  // t_start_ns,src,dst,bytes,mcs,retries,outcome
  void write_trace_csv(std::ostream& os) const;

 private:
  struct Frame {
    DeviceId sta = 0;
    metrics::PacketId packet = 0;
    std::uint32_t bytes = 0;
  };
  struct StaState {
    DeviceId id = 0;
    int mcs = 0;
    double rate_mbps = 0.0;
    AssociationState state = AssociationState::kPending;
    int attempts = 0;
    std::unique_ptr<Dcf> dcf;
    std::deque<Frame> waiting;
    std::uint64_t probe_seq = 0;
  };

  StaState& sta(DeviceId id);
  const StaState& sta(DeviceId id) const;
  radio::Emission make_emission(DeviceId src, DeviceId dst, SimTime start, SimTime duration,
                                radio::EmissionKind kind) const;
  const radio::Emission& air(const radio::Emission& e);
  bool decodes(DeviceId rx, const radio::Emission& e, const radio::RxBeam& beam, double threshold_db) const;

  void kick();
  void on_ap_access(SimTime t);
  void on_data_end(const radio::Emission& e);
  void finish_attempt(bool acked);

  void probe(StaState& s);
  void on_probe_end(const radio::Emission& e);
  void on_probe_timeout(DeviceId sta, std::uint64_t seq);
  void on_associated(StaState& s);
  void record(const FrameTraceRow& row);

  Context ctx_;
  WigigConfig cfg_;
  nru::McsTable table_;
  std::unique_ptr<Dcf> ap_dcf_;
  std::vector<StaState> stas_;
  std::deque<Frame> queue_;
  std::vector<Frame> current_;  // aggregate of the open attempt
  bool busy_ = false;  // AP holds a frame in contention, on air or awaiting its ACK
  std::uint64_t attempt_ = 0;
  bool attempt_open_ = false;
  SimTime last_frame_start_;
  WigigCounters counters_;
  bool trace_on_ = false;
  std::vector<FrameTraceRow> trace_;
};

}  // namespace nrucoex::wigig
