#include "nrucoex/nru/harq.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nrucoex/radio/propagation.hpp"

namespace nrucoex::nru {

HarqProcess::HarqProcess(std::uint32_t id, DeviceId ue, std::uint32_t tb_bytes, int mcs, int symbols,
                         double threshold_db, int max_transmissions)
    : id_(id),
      ue_(ue),
      tb_bytes_(tb_bytes),
      mcs_(mcs),
      symbols_(symbols),
      threshold_db_(threshold_db),
      max_transmissions_(max_transmissions) {
  if (max_transmissions < 1) throw std::invalid_argument("HarqProcess: max_transmissions must be >= 1");
  if (symbols < 1) throw std::invalid_argument("HarqProcess: symbols must be >= 1");
}

void HarqProcess::on_transmit() {
  if (transmissions_ >= max_transmissions_) throw std::logic_error("HarqProcess: transmission limit exceeded");
  ++transmissions_;
}

bool HarqProcess::combine(double sinr_db) {
  if (!std::isnan(sinr_db)) accumulated_ += radio::db_to_linear(sinr_db);
  if (!decoded_ && accumulated_ >= radio::db_to_linear(threshold_db_)) decoded_ = true;
  return decoded_;
}

double HarqProcess::accumulated_sinr_db() const {
  return accumulated_ > 0.0 ? radio::linear_to_db(accumulated_) : -std::numeric_limits<double>::infinity();
}

HarqOutcome harq_on_feedback(const HarqProcess& process, bool ack) {
  if (process.transmissions() < 1) throw std::logic_error("harq_on_feedback: process was never transmitted");
  if (ack) return HarqOutcome::kDone;
  if (process.transmissions() < process.max_transmissions()) return HarqOutcome::kRetransmit;
  return HarqOutcome::kFailed;
}

}  // namespace nrucoex::nru
