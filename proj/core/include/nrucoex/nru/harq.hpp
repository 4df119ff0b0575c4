#pragma once

#include <cstdint>
#include <vector>

#include "nrucoex/metrics/traffic.hpp"
#include "nrucoex/radio/device.hpp"

namespace nrucoex::nru {

using radio::DeviceId;

// A byte range of one application packet carried inside a transport block.
struct Segment {
  metrics::PacketId packet = 0;
  std::uint32_t bytes = 0;
};

enum class HarqOutcome { kDone, kRetransmit, kFailed };

/**
 * One downlink HARQ process with Chase combining: every reception adds its
 * linear effective SINR to the soft buffer and the block decodes once the
 * sum reaches the MCS threshold.
 */
class HarqProcess {
 public:
  HarqProcess(std::uint32_t id, DeviceId ue, std::uint32_t tb_bytes, int mcs, int symbols, double threshold_db,
              int max_transmissions = 4);

  std::uint32_t id() const { return id_; }
  DeviceId ue() const { return ue_; }
  std::uint32_t tb_bytes() const { return tb_bytes_; }
  int mcs() const { return mcs_; }
  int symbols() const { return symbols_; }
  double threshold_db() const { return threshold_db_; }
  int max_transmissions() const { return max_transmissions_; }
  int transmissions() const { return transmissions_; }

  void on_transmit();
  // Receiver side. Returns true once the block is decoded.
  bool combine(double sinr_db);
  bool decoded() const { return decoded_; }
  double accumulated_sinr_linear() const { return accumulated_; }
  double accumulated_sinr_db() const;

  std::vector<Segment> segments;

 private:
  std::uint32_t id_;
  DeviceId ue_;
  std::uint32_t tb_bytes_;
  int mcs_;
  int symbols_;
  double threshold_db_;
  int max_transmissions_;
  int transmissions_ = 0;
  double accumulated_ = 0.0;
  bool decoded_ = false;
};

// Transmitter-side reaction to one feedback report.
HarqOutcome harq_on_feedback(const HarqProcess& process, bool ack);

}  // namespace nrucoex::nru
