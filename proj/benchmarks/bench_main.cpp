#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "nrucoex/campaign/config.hpp"
#include "nrucoex/campaign/run.hpp"
#include "nrucoex/metrics/occupancy.hpp"
#include "nrucoex/nru/scheduler.hpp"
#include "nrucoex/radio/scenario.hpp"
#include "nrucoex/sim/rng.hpp"
#include "nrucoex/sim/simulator.hpp"

using namespace nrucoex;
using sim::SimTime;

static void BM_EventThroughput(benchmark::State& state) {
  for (auto _ : state) {
    sim::Simulator s;
    std::uint64_t fired = 0;
    for (std::int64_t i = 0; i < state.range(0); ++i)
      s.schedule(SimTime::ns((i * 7919) % 1'000'000), [&fired] { ++fired; });
    s.run_until(SimTime::ms(1));
    benchmark::DoNotOptimize(fired);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EventThroughput)->Arg(1 << 12)->Arg(1 << 16);

static void BM_SinrFullFloor(benchmark::State& state) {
  auto env = radio::build_environment(radio::ScenarioParams{}, radio::RadioParams{}, 1);
  sim::RngStream rng(1, "bench", 0);
  const auto n = static_cast<std::int64_t>(env.size());
  std::vector<radio::Emission> drawn;
  for (int i = 0; i < state.range(0); ++i) {
    radio::Emission e;
    e.source = static_cast<radio::DeviceId>(rng.uniform_int(0, n - 1));
    e.beam_target = static_cast<radio::DeviceId>((e.source + 3) % n);
    e.start = SimTime::us(rng.uniform_int(0, 200));
    e.end = e.start + SimTime::us(rng.uniform_int(5, 100));
    drawn.push_back(e);
  }
  std::sort(drawn.begin(), drawn.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  std::vector<const radio::Emission*> signals;
  for (const auto& e : drawn) signals.push_back(&env.add_emission(e));
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& e = *signals[k++ % signals.size()];
    benchmark::DoNotOptimize(env.sinr_db(*e.beam_target, e, radio::RxBeam::toward(e.source)));
  }
}
BENCHMARK(BM_SinrFullFloor)->Arg(8)->Arg(64);

static void BM_ScheduleSlot(benchmark::State& state) {
  std::vector<nru::UeDemand> demands;
  for (int i = 0; i < state.range(0); ++i)
    demands.push_back({static_cast<radio::DeviceId>(i), 1500u * (1 + i % 4), 1000u + 300u * i, 7});
  std::size_t rr = 0;
  std::int64_t slot = 0;
  for (auto _ : state) {
    auto a = nru::schedule_slot(slot, SimTime::zero(), 13, {}, demands, rr);
    rr = a.next_rr;
    ++slot;
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_ScheduleSlot)->Arg(4)->Arg(12);

static void BM_OccupancyRecord(benchmark::State& state) {
  sim::RngStream rng(3, "bench", 0);
  for (auto _ : state) {
    metrics::OccupancyLedger l;
    for (int i = 0; i < 10'000; ++i) {
      const auto a = static_cast<std::int64_t>(rng.uniform_int(0, 10'000'000));
      l.record(SimTime::ns(a), SimTime::ns(a + 5000));
    }
    benchmark::DoNotOptimize(l.union_length());
  }
}
BENCHMARK(BM_OccupancyRecord);

static void BM_ShortRun(benchmark::State& state) {
  auto cfg = campaign::parse_config_text("duration = 100 ms\n");
  const auto& mode = *campaign::find_access_mode("Cat4/Cat2");
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(campaign::run_simulation(cfg, mode, seed++));
}
BENCHMARK(BM_ShortRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
