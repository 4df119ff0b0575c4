#include <gtest/gtest.h>

#include <deque>
#include <memory>
#include <sstream>

#include "nrucoex/cam/channel_access.hpp"
#include "nrucoex/metrics/occupancy.hpp"
#include "nrucoex/metrics/traffic.hpp"
#include "nrucoex/nru/gnb_mac.hpp"
#include "nrucoex/nru/harq.hpp"
#include "nrucoex/nru/mcs.hpp"
#include "nrucoex/nru/numerology.hpp"
#include "nrucoex/nru/scheduler.hpp"
#include "support.hpp"

using namespace nrucoex;
using namespace nrucoex::nru;
using radio::DeviceId;
using radio::Role;
using sim::SimTime;
using testsupport::device;

TEST(Numerology, SymbolAndSlot) {
  Numerology n;
  EXPECT_EQ(n.symbol, SimTime::ns(8920));
  EXPECT_EQ(n.slot(), SimTime::ns(124'880));
  EXPECT_EQ(n.slot_start(3), SimTime::ns(374'640));
  EXPECT_EQ(n.symbol_start(1, 13), SimTime::ns(124'880 + 13 * 8920));
}

TEST(Mcs, Selection) {
  const auto t = McsTable::nr_default();
  ASSERT_EQ(t.size(), 12u);
  auto top = t.select(35.78);
  EXPECT_EQ(top.index, 11);
  EXPECT_FALSE(top.outage);
  EXPECT_DOUBLE_EQ(top.spectral_efficiency, 5.5);
  auto low = t.select(-5.5);
  EXPECT_TRUE(low.outage);
  EXPECT_EQ(low.index, 0);
  EXPECT_EQ(t.select(7.0 + 1.0).index, 4);
  EXPECT_EQ(t.select(7.0 + 1.0 - 1e-9).index, 3);
  EXPECT_FALSE(t.select(-1.0).outage);
  EXPECT_THROW(t.select(std::nan("")), std::invalid_argument);
}

TEST(Mcs, SelectionIsMonotoneInSinr) {
  const auto t = McsTable::nr_default();
  int prev = -1;
  for (double s = -10.0; s <= 40.0; s += 0.05) {
    const auto sel = t.select(s);
    ASSERT_GE(sel.index, prev);
    if (!sel.outage) ASSERT_LE(t.threshold_db(sel.index), s - 1.0 + 1e-12);
    prev = sel.index;
  }
}

TEST(Mcs, TableValidation) {
  EXPECT_THROW(McsTable({}, {}), std::invalid_argument);
  EXPECT_THROW(McsTable({1, 2}, {1}), std::invalid_argument);
  EXPECT_THROW(McsTable({1, 1}, {1, 2}), std::invalid_argument);
}

TEST(Mcs, BytesPerSymbol) {
  // 5.5 * 2.16e9 * 0.75 * 8.92e-6 / 8 = 9934.65
  EXPECT_EQ(bytes_per_symbol(5.5, 2.16e9, 0.75, 8.92e-6), 9934u);
  EXPECT_EQ(bytes_per_symbol(0.2, 2.16e9, 0.75, 8.92e-6), 361u);
}

TEST(Scheduler, PartialSymbolRoundsUp) {
  std::vector<UeDemand> d{{1, 3200, 1000, 5}};
  auto a = schedule_slot(0, SimTime::zero(), 14, {}, d, 0);
  ASSERT_EQ(a.ues.size(), 1u);
  EXPECT_EQ(a.ues[0].symbols, 4);
  EXPECT_EQ(a.ues[0].tb_bytes, 3200u);
  EXPECT_EQ(a.used_symbols(), 4);
}

TEST(Scheduler, TwoEqualUesSplitEvenly) {
  std::vector<UeDemand> d{{1, 50'000, 1000, 5}, {2, 50'000, 1000, 5}};
  auto a = schedule_slot(0, SimTime::zero(), 14, {}, d, 0);
  ASSERT_EQ(a.ues.size(), 2u);
  EXPECT_EQ(a.ues[0].symbols, 7);
  EXPECT_EQ(a.ues[1].symbols, 7);
  EXPECT_EQ(a.ues[1].first_symbol, 7);
}

TEST(Scheduler, EmptyBuffersGiveEmptyAllocation) {
  std::vector<UeDemand> d{{1, 0, 1000, 5}, {2, 0, 1000, 5}};
  EXPECT_TRUE(schedule_slot(0, SimTime::zero(), 14, {}, d, 1).empty());
}

TEST(Scheduler, RetransmissionsFirst) {
  std::vector<RetxDemand> r{{2, 77, 3, 4, 2400}};
  std::vector<UeDemand> d{{1, 50'000, 1000, 5}, {2, 50'000, 1000, 5}};
  auto a = schedule_slot(0, SimTime::zero(), 14, r, d, 0);
  ASSERT_EQ(a.ues.size(), 2u);
  EXPECT_TRUE(a.ues[0].retransmission);
  EXPECT_EQ(a.ues[0].harq_id, 77u);
  EXPECT_EQ(a.ues[0].first_symbol, 0);
  EXPECT_EQ(a.ues[0].symbols, 3);
  EXPECT_EQ(a.ues[1].ue, 1u);
  EXPECT_EQ(a.ues[1].first_symbol, 3);
  EXPECT_EQ(a.ues[1].symbols, 11);
}

namespace {

// Hand round-robin: a FIFO of UEs pulls one symbol at a time and goes to the
// back while it still needs more. Returns symbols per UE index and the next pointer.
std::pair<std::vector<int>, std::size_t> rr_oracle(const std::vector<int>& need, std::size_t start, int symbols) {
  const std::size_t n = need.size();
  std::vector<int> got(n, 0);
  std::deque<std::size_t> q;
  for (std::size_t k = 0; k < n; ++k)
    if (need[(start + k) % n] > 0) q.push_back((start + k) % n);
  std::size_t next = start % n;
  while (symbols > 0 && !q.empty()) {
    const std::size_t i = q.front();
    q.pop_front();
    if (got[i] == 0) next = (i + 1) % n;
    ++got[i];
    --symbols;
    if (got[i] < need[i]) q.push_back(i);
  }
  return {got, next};
}

}  // namespace

TEST(Scheduler, TwelveUesAllServedInOneSlot) {
  std::vector<UeDemand> d;
  for (DeviceId u = 0; u < 12; ++u) d.push_back({u, 1500, 1000, 3});
  auto a = schedule_slot(0, SimTime::zero(), 14, {}, d, 0);
  EXPECT_EQ(a.ues.size(), 12u);
  EXPECT_LE(a.used_symbols(), 14);
  for (const auto& u : a.ues) EXPECT_GE(u.symbols, 1);
}

TEST(Scheduler, MatchesRoundRobinOracleAcrossSlots) {
  sim::RngStream rng(21, "rr", 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 19);
    std::vector<std::uint64_t> buffers(n);
    std::vector<std::uint32_t> bps(n);
    for (std::size_t i = 0; i < n; ++i) {
      buffers[i] = rng.bernoulli(0.2) ? 0 : rng.uniform_int(1, 30'000);
      bps[i] = static_cast<std::uint32_t>(rng.uniform_int(300, 9934));
    }
    std::size_t rr = rng.uniform_int(0, n - 1);
    for (int slot = 0; slot < 6; ++slot) {
      const int avail = rng.bernoulli(0.5) ? 14 : 13;
      std::vector<UeDemand> d;
      std::vector<int> need(n);
      for (std::size_t i = 0; i < n; ++i) {
        d.push_back({static_cast<DeviceId>(i), buffers[i], bps[i], 1});
        need[i] = static_cast<int>((buffers[i] + bps[i] - 1) / bps[i]);
      }
      auto [want, want_next] = rr_oracle(need, rr, avail);
      auto a = schedule_slot(slot, SimTime::zero(), avail, {}, d, rr);

      std::vector<int> got(n, 0);
      int cursor = 0;
      for (const auto& u : a.ues) {
        ASSERT_EQ(u.first_symbol, cursor);  // TDMA: contiguous, disjoint
        cursor += u.symbols;
        got[u.ue] = u.symbols;
        ASSERT_LE(u.tb_bytes, buffers[u.ue]);
        buffers[u.ue] -= u.tb_bytes;
      }
      ASSERT_LE(cursor, avail);
      ASSERT_EQ(got, want) << "trial " << trial << " slot " << slot;
      if (!a.empty()) ASSERT_EQ(a.next_rr, want_next);
      rr = a.next_rr;
    }
  }
}

TEST(Scheduler, OverflowDefersRemainderInRoundRobinOrder) {
  std::vector<UeDemand> d;
  for (DeviceId u = 0; u < 20; ++u) d.push_back({u, 1000, 1000, 3});
  auto first = schedule_slot(0, SimTime::zero(), 14, {}, d, 0);
  EXPECT_EQ(first.ues.size(), 14u);
  EXPECT_EQ(first.next_rr, 14u);
  for (const auto& u : first.ues) d[u.ue].buffered_bytes = 0;
  auto second = schedule_slot(1, SimTime::zero(), 14, {}, d, first.next_rr);
  ASSERT_EQ(second.ues.size(), 6u);
  EXPECT_EQ(second.ues.front().ue, 14u);
  EXPECT_EQ(second.ues.back().ue, 19u);
}

TEST(Harq, ChaseCombiningAddsLinearSinr) {
  HarqProcess p(1, 5, 1000, 4, 2, 30.0);
  p.on_transmit();
  p.combine(10.0);
  p.on_transmit();
  p.combine(10.0);
  EXPECT_NEAR(p.accumulated_sinr_db(), 13.0103, 1e-4);
  EXPECT_FALSE(p.decoded());
}

TEST(Harq, FirstTransmissionDecodes) {
  HarqProcess p(1, 5, 1000, 4, 2, 7.0);
  p.on_transmit();
  EXPECT_TRUE(p.combine(9.0));
  EXPECT_EQ(harq_on_feedback(p, true), HarqOutcome::kDone);
  EXPECT_EQ(p.transmissions(), 1);
}

TEST(Harq, FourLowSinrAttemptsFail) {
  HarqProcess p(1, 5, 1000, 11, 2, 28.0);
  std::vector<HarqOutcome> out;
  for (int k = 0; k < 4; ++k) {
    p.on_transmit();
    p.combine(-3.0);
    out.push_back(harq_on_feedback(p, p.decoded()));
  }
  EXPECT_EQ(out, (std::vector<HarqOutcome>{HarqOutcome::kRetransmit, HarqOutcome::kRetransmit,
                                           HarqOutcome::kRetransmit, HarqOutcome::kFailed}));
  EXPECT_THROW(p.on_transmit(), std::logic_error);
  // Four copies of 0.5 linear sum to 2: +3.01 dB over one.
  EXPECT_NEAR(p.accumulated_sinr_db(), -3.0 + 6.0206, 1e-3);
}

TEST(Harq, FeedbackBeforeTransmissionIsAnError) {
  HarqProcess p(1, 5, 1000, 4, 2, 7.0);
  EXPECT_THROW(harq_on_feedback(p, false), std::logic_error);
}

TEST(Harq, AccumulationNeverDecreases) {
  sim::RngStream rng(2, "harq", 0);
  HarqProcess p(1, 5, 1000, 4, 2, 100.0, 50);
  double prev = 0.0;
  for (int k = 0; k < 50; ++k) {
    p.on_transmit();
    p.combine(rng.uniform() * 60.0 - 30.0);
    ASSERT_GE(p.accumulated_sinr_linear(), prev);
    prev = p.accumulated_sinr_linear();
  }
}

namespace {

struct Aired {
  radio::Emission e;
  cam::ChannelGrant g;
};

// gNB 0 with UEs 1 and 2; device 3 is an optional interferer of another cell.
struct NrBench {
  sim::Simulator sim;
  radio::RadioEnvironment env;
  metrics::PacketLedger ledger;
  cam::CamTrace trace;
  std::unique_ptr<cam::ChannelAccessManager> gnb_cam;
  std::vector<std::unique_ptr<cam::ChannelAccessManager>> ue_cams;
  std::unique_ptr<NrGnbMac> mac;
  std::vector<Aired> aired;
  std::vector<std::unique_ptr<metrics::CbrSource>> sources;
  std::vector<DeviceId> ues{1, 2};

  static std::vector<radio::Device> devices() {
    return {device(0, Role::kGnb, {20, 10, 3}, radio::AntennaArray(8, 8), 0),
            device(1, Role::kUe, {25, 10, 1.5}, radio::AntennaArray(4, 4), 0),
            device(2, Role::kUe, {20, 16, 1.5}, radio::AntennaArray(4, 4), 0),
            device(3, Role::kAp, {30, 10, 3}, radio::AntennaArray(8, 8), 3, 1)};
  }

  // loss(a, b) overrides for the gNB-UE and interferer links; others are LOS.
  explicit NrBench(cam::Category gnb, cam::Category ue, double gnb_ue_loss = -1.0, double interferer_gnb_loss = -1.0,
                   double interferer_ue_loss = -1.0, std::vector<DeviceId> ue_ids = {1, 2})
      : env(radio::RadioParams{}, devices(), links(gnb_ue_loss, interferer_gnb_loss, interferer_ue_loss)) {
    ues = std::move(ue_ids);
    trace.record_sensing = true;
    gnb_cam = cam::make_cam({&sim, &env, 0, &trace, 1}, cam::CamConfig::gnb_default(gnb));
    std::vector<cam::ChannelAccessManager*> raw;
    for (DeviceId u : ues) {
      ue_cams.push_back(cam::make_cam({&sim, &env, u, &trace, 1}, cam::CamConfig::ue_default(ue)));
      ue_cams.back()->set_cot_initiator(gnb_cam.get());
      raw.push_back(ue_cams.back().get());
    }
    NrGnbMac::Context ctx{&sim, &env, &ledger, 0, ues, gnb_cam.get(), raw,
                          [this](const radio::Emission& e, const cam::ChannelGrant& g) { aired.push_back({e, g}); }};
    mac = std::make_unique<NrGnbMac>(ctx, NrMacConfig{});
    mac->set_trace(true);
  }

  static std::vector<radio::LinkState> links(double gnb_ue, double i_gnb, double i_ue) {
    auto devs = devices();
    auto los = testsupport::los_links(devs);
    return testsupport::links_from(devs, [&](DeviceId a, DeviceId b) {
      if (a == 0 && (b == 1 || b == 2) && gnb_ue > 0) return gnb_ue;
      if (a == 0 && b == 3 && i_gnb > 0) return i_gnb;
      if ((a == 1 || a == 2) && b == 3 && i_ue > 0) return i_ue;
      return los[a * devs.size() + b].pathloss_db;
    });
  }

  void cbr(double rate_bps, SimTime offset = SimTime::zero()) {
    for (DeviceId u : ues) {
      metrics::CbrFlow f{0, u, rate_bps, 1500, offset};
      const auto flow = ledger.add_flow(f);
      sources.push_back(std::make_unique<metrics::CbrSource>(
          sim, ledger, flow, [this, u](metrics::PacketId p) { mac->enqueue(u, p, 1500); }));
      sources.back()->start();
    }
  }

  // Periodic bursts from the interferer: `on` of every `period`, starting at `phase`.
  void bursts(SimTime period, SimTime on, SimTime phase, SimTime until) {
    for (SimTime t = phase; t < until; t += period) {
      sim.schedule(t, [this, on] {
        env.add_emission(testsupport::emission(3, sim.now(), sim.now() + on, radio::Rat::kWigig));
      });
    }
  }
};

}  // namespace

TEST(NrMac, LinkAdaptationFromAlignedSnr) {
  NrBench b(cam::Category::kCat1, cam::Category::kCat1);
  b.mac->start();
  for (DeviceId u : b.ues) {
    const double snr = b.env.snr_db(0, u, radio::RxBeam::toward(0));
    EXPECT_EQ(b.mac->ue_mcs(u), McsTable::nr_default().select(snr).index);
  }
}

TEST(NrMac, SingleLinkLatencyAtLeastPipelineLead) {
  NrBench single(cam::Category::kCat1, cam::Category::kCat1, -1.0, -1.0, -1.0, {1});
  single.mac->start();
  single.cbr(50e6);
  single.sim.run_until(SimTime::ms(100));
  for (metrics::FlowId f = 0; f < single.ledger.flow_count(); ++f) {
    const auto lat = single.ledger.latency_samples_us(f);
    ASSERT_GT(lat.size(), 300u);
    for (double l : lat) ASSERT_GE(l, 250.0);
    const auto& c = single.ledger.counters(f);
    EXPECT_EQ(c.lost, 0u);
    EXPECT_EQ(c.delivered + c.lost + c.in_flight(), c.generated);
    EXPECT_LE(c.in_flight(), 3u);
  }
}

TEST(NrMac, EmissionsAreWholeSymbolsTdmaAndInsideGrants) {
  NrBench b(cam::Category::kCat4, cam::Category::kCat2);
  b.mac->start();
  b.cbr(400e6);
  b.sim.run_until(SimTime::ms(60));
  const Numerology num;
  ASSERT_GT(b.aired.size(), 100u);
  SimTime last_gnb_end;
  int grants_checked = 0;
  for (const auto& a : b.aired) {
    ASSERT_EQ(a.e.duration().ticks() % num.symbol.ticks(), 0);
    ASSERT_EQ(a.e.start.ticks() % num.symbol.ticks(), 0);
    ASSERT_GE(a.e.start, a.g.granted_at);
    ASSERT_LE(a.e.end, a.g.cot_deadline);
    if (a.g.category == cam::Category::kCat4 || a.g.category == cam::Category::kCat2) {
      ASSERT_LE(a.g.cot_deadline - a.g.granted_at, SimTime::ms(9));
      ++grants_checked;
    }
    if (a.e.source == 0) {
      ASSERT_GE(a.e.start, last_gnb_end);
      last_gnb_end = a.e.end;
    }
  }
  EXPECT_GT(grants_checked, 0);
  // One LBT serves many slots inside its COT.
  EXPECT_LT(b.gnb_cam->grants_issued() * 4, b.mac->counters().slots_transmitted);
  for (metrics::FlowId f = 0; f < b.ledger.flow_count(); ++f) {
    const auto& c = b.ledger.counters(f);
    EXPECT_EQ(c.delivered + c.lost + c.in_flight(), c.generated);
    EXPECT_GT(c.delivered, 0u);
    EXPECT_LE(b.ledger.delivered_bits(f), c.generated * 12000u);
  }
}

TEST(NrMac, NoGrantMeansNoEmissionAndDataReturnsToBuffer) {
  // A continuous interferer at -60 dBm keeps the gNB's omni CCA busy.
  NrBench b(cam::Category::kCat4, cam::Category::kCat2, -1.0, 77.0);
  b.env.add_emission(testsupport::emission(3, SimTime::zero(), SimTime::s(1), radio::Rat::kWigig));
  b.mac->start();
  const auto flow = b.ledger.add_flow({0, 1});
  for (int k = 0; k < 10; ++k) b.mac->enqueue(1, b.ledger.create(flow, SimTime::zero()), 1500);
  b.sim.run_until(SimTime::ms(5));
  EXPECT_TRUE(b.aired.empty());
  // Requeued bytes are pulled into the next planned slot again; none are lost.
  EXPECT_LE(b.mac->buffered_bytes(1), 15'000u);
  EXPECT_EQ(b.ledger.counters(flow).in_flight(), 10u);
  EXPECT_EQ(b.ledger.counters(flow).lost, 0u);
  EXPECT_GT(b.mac->counters().slots_requeued, 0u);
  EXPECT_EQ(b.mac->counters().slots_transmitted, 0u);
  bool no_grant_row = false;
  for (const auto& r : b.mac->trace()) no_grant_row = no_grant_row || r.result == SlotResult::kNoGrant;
  EXPECT_TRUE(no_grant_row);
}

TEST(NrMac, AlwaysOnSaturatedAirtimeApproachesOne) {
  NrBench b(cam::Category::kCat1, cam::Category::kCat1);
  b.mac->start();
  for (DeviceId u : b.ues) {
    const auto flow = b.ledger.add_flow({0, u});
    for (int k = 0; k < 20000; ++k) b.mac->enqueue(u, b.ledger.create(flow, SimTime::zero()), 1500);
  }
  b.sim.run_until(SimTime::ms(20));
  metrics::OccupancyLedger gnb, all;
  for (const auto& a : b.aired) {
    all.record(a.e.start, a.e.end);
    if (a.e.source == 0) gnb.record(a.e.start, a.e.end);
  }
  const SimTime from = SimTime::ms(1), to = SimTime::ms(19);
  const double window = static_cast<double>((to - from).ticks());
  EXPECT_GE(static_cast<double>(gnb.occupied_within(from, to).ticks()) / window, 13.0 / 14.0 - 0.01);
  EXPECT_GE(static_cast<double>(all.occupied_within(from, to).ticks()) / window, 0.99);
}

TEST(NrMac, HarqRecoversFromBurstInterference) {
  // Weak link (SNR ~19 dB) and an interferer that swamps the UEs in 1 of every 7 slots;
  // the period keeps retransmissions (4-5 slots later) out of the next burst.
  NrBench b(cam::Category::kCat1, cam::Category::kCat1, 118.0, 200.0, 50.0);
  const Numerology num;
  b.bursts(num.slot() * 7, num.slot(), num.slot() * 3, SimTime::ms(80));
  b.mac->start();
  b.cbr(50e6);
  b.sim.run_until(SimTime::ms(80));
  EXPECT_GT(b.mac->counters().retransmissions, 0u);
  EXPECT_EQ(b.mac->counters().tb_failed, 0u);
  for (metrics::FlowId f = 0; f < b.ledger.flow_count(); ++f) {
    const auto& c = b.ledger.counters(f);
    EXPECT_EQ(c.lost, 0u);
    EXPECT_LE(c.in_flight(), 6u);
  }
  bool nack = false;
  for (const auto& r : b.mac->trace()) nack = nack || r.result == SlotResult::kNack;
  EXPECT_TRUE(nack);
}

TEST(NrMac, PersistentFailureDropsAfterFourTransmissionsAndGrowsCws) {
  NrBench b(cam::Category::kCat4, cam::Category::kCat1, 118.0, 200.0, 40.0);
  b.env.add_emission(testsupport::emission(3, SimTime::zero(), SimTime::s(1), radio::Rat::kWigig));
  b.mac->start();
  const auto flow = b.ledger.add_flow({0, 1});
  for (int k = 0; k < 3; ++k) b.mac->enqueue(1, b.ledger.create(flow, SimTime::zero()), 1500);
  // The window update is applied by the next procedure, after the first COT expired.
  b.sim.schedule(SimTime::ms(12), [&] {
    for (int k = 0; k < 3; ++k) b.mac->enqueue(1, b.ledger.create(flow, b.sim.now()), 1500);
  });
  b.sim.run_until(SimTime::ms(30));
  EXPECT_EQ(b.ledger.counters(flow).delivered, 0u);
  EXPECT_EQ(b.ledger.counters(flow).lost, 6u);
  EXPECT_GE(b.mac->counters().tb_failed, 1u);
  int nacks = 0, failed = 0;
  for (const auto& r : b.mac->trace()) {
    nacks += r.result == SlotResult::kNack;
    failed += r.result == SlotResult::kFailed;
  }
  EXPECT_EQ(nacks, 3 * failed);
  auto* cat4 = dynamic_cast<cam::BackoffCam*>(b.gnb_cam.get());
  ASSERT_NE(cat4, nullptr);
  EXPECT_GT(cat4->cws(), 15);
}

TEST(NrMac, SlotTraceCsv) {
  NrBench b(cam::Category::kCat1, cam::Category::kCat1);
  b.mac->start();
  b.mac->enqueue(1, b.ledger.create(b.ledger.add_flow({0, 1}), SimTime::zero()), 1500);
  b.sim.run_until(SimTime::ms(2));
  std::ostringstream os;
  b.mac->write_trace_csv(os);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "slot_start_ns,ue,symbols,mcs,tb_bytes,harq_result");
  EXPECT_NE(s.find(",1,1,"), std::string::npos);
  EXPECT_NE(s.find(",ack"), std::string::npos);
}

TEST(NrMac, OnOffNeverTransmitsInOffPeriods) {
  NrBench b(cam::Category::kOnOff, cam::Category::kOnOff);
  b.mac->start();
  b.cbr(800e6);
  b.sim.run_until(SimTime::ms(60));
  ASSERT_FALSE(b.aired.empty());
  for (const auto& a : b.aired) {
    const SimTime phase = a.e.start % SimTime::ms(18);
    ASSERT_LT(phase, SimTime::ms(9));
    ASSERT_LE(phase + a.e.duration(), SimTime::ms(9));
  }
}
