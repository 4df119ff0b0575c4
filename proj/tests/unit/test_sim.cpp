#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "nrucoex/sim/rng.hpp"
#include "nrucoex/sim/simulator.hpp"

using nrucoex::sim::RngStream;
using nrucoex::sim::SchedulingError;
using nrucoex::sim::Simulator;
using nrucoex::sim::SimTime;

TEST(Simulator, EqualTimesRunInInsertionOrder) {
  Simulator sim;
  std::string order;
  sim.schedule(SimTime::ns(100), [&] { order += 'A'; });
  sim.schedule(SimTime::ns(100), [&] { order += 'B'; });
  sim.run_until(SimTime::ns(100));
  EXPECT_EQ(order, "AB");
}

TEST(Simulator, PastSchedulingIsRejected) {
  Simulator sim;
  sim.run_until(SimTime::ns(60));
  EXPECT_THROW(sim.schedule(SimTime::ns(50), [] {}), SchedulingError);
  EXPECT_NO_THROW(sim.schedule(SimTime::ns(60), [] {}));
}

TEST(Simulator, FiresAtNineMilliseconds) {
  Simulator sim;
  SimTime fired = SimTime::infinity();
  sim.schedule(SimTime::ns(9'000'000), [&] { fired = sim.now(); });
  sim.run_until(SimTime::ns(8'999'999));
  EXPECT_TRUE(fired.is_infinite());
  sim.run_until(SimTime::ms(9));
  EXPECT_EQ(fired, SimTime::ms(9));
}

TEST(Simulator, CancelSemantics) {
  Simulator sim;
  int runs = 0;
  auto h = sim.schedule(SimTime::us(1), [&] { ++runs; });
  EXPECT_TRUE(sim.cancel(h));
  EXPECT_FALSE(sim.cancel(h));
  auto g = sim.schedule(SimTime::us(2), [&] { ++runs; });
  sim.run_until(SimTime::us(5));
  EXPECT_FALSE(sim.cancel(g));
  EXPECT_EQ(runs, 1);
}

TEST(Simulator, EmptyRunAdvancesClock) {
  Simulator sim;
  EXPECT_EQ(sim.run_until(SimTime::ms(1500)), 0u);
  EXPECT_EQ(sim.now(), SimTime::ms(1500));
}

TEST(Simulator, ThreeEventsInScheduleOrder) {
  Simulator sim;
  std::vector<int> seen;
  sim.schedule(SimTime::us(2), [&] { seen.push_back(2); });
  sim.schedule(SimTime::us(1), [&] { seen.push_back(1); });
  sim.schedule(SimTime::us(2), [&] { seen.push_back(3); });
  EXPECT_EQ(sim.run_until(SimTime::us(10)), 3u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
}

TEST(Simulator, EventScheduledDuringExecutionRunsBeforeLaterOnes) {
  Simulator sim;
  std::vector<int> seen;
  sim.schedule(SimTime::us(1), [&] {
    seen.push_back(1);
    sim.schedule(SimTime::us(3), [&] { seen.push_back(3); });
  });
  sim.schedule(SimTime::us(5), [&] { seen.push_back(5); });
  sim.run_until(SimTime::us(10));
  EXPECT_EQ(seen, (std::vector<int>{1, 3, 5}));
}

namespace {

// Reference engine: a flat list scanned for the minimum (due, sequence) pair.
class ListEngine {
 public:
  SimTime now;
  std::uint64_t schedule(SimTime due, std::function<void()> fn) {
    items_.push_back({due, seq_, std::move(fn)});
    return seq_++;
  }
  void cancel(std::uint64_t seq) { cancelled_.insert(seq); }
  void run_until(SimTime end) {
    for (;;) {
      auto best = items_.end();
      for (auto it = items_.begin(); it != items_.end(); ++it)
        if (best == items_.end() || it->due < best->due || (it->due == best->due && it->seq < best->seq)) best = it;
      if (best == items_.end() || best->due > end) break;
      Item item = std::move(*best);
      items_.erase(best);
      if (cancelled_.contains(item.seq)) continue;
      now = item.due;
      item.fn();
    }
    now = std::max(now, end);
  }

 private:
  struct Item {
    SimTime due;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  std::vector<Item> items_;
  std::set<std::uint64_t> cancelled_;
  std::uint64_t seq_ = 0;
};

// Each event logs (id, time) and spawns children using a per-event stream,
// so both engines see the same program regardless of execution order.
template <typename Engine, typename Schedule, typename Cancel>
std::vector<std::pair<int, std::int64_t>> run_program(Engine& eng, Schedule sched, Cancel cancel, std::uint64_t seed) {
  std::vector<std::pair<int, std::int64_t>> log;
  int next_id = 0;
  std::function<void(int)> body = [&](int id) {
    log.emplace_back(id, eng.now.ticks());
    RngStream rng(seed, "program", static_cast<std::uint64_t>(id));
    const int children = static_cast<int>(rng.uniform_int(0, 2));
    for (int c = 0; c < children && next_id < 400; ++c) {
      const int child = next_id++;
      const auto delay = static_cast<std::int64_t>(rng.uniform_int(0, 20));
      auto h = sched(eng.now + SimTime::ns(delay), [&body, child] { body(child); });
      if (rng.bernoulli(0.1)) cancel(h);
    }
  };
  for (int i = 0; i < 20; ++i) {
    const int id = next_id++;
    RngStream rng(seed, "roots", static_cast<std::uint64_t>(i));
    sched(SimTime::ns(static_cast<std::int64_t>(rng.uniform_int(0, 50))), [&body, id] { body(id); });
  }
  eng.run_until(SimTime::ns(100'000));
  return log;
}

struct EngineAdapter {
  Simulator sim;
  SimTime now;
  void run_until(SimTime end) {
    // Mirror the clock before every action so the program can read it.
    sim.run_until(end);
    now = sim.now();
  }
};

}  // namespace

TEST(Simulator, MatchesSortedListOracle) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    ListEngine ref;
    auto expected = run_program(
        ref, [&](SimTime due, std::function<void()> fn) { return ref.schedule(due, std::move(fn)); },
        [&](std::uint64_t seq) { ref.cancel(seq); }, seed);

    EngineAdapter eng;
    auto actual = run_program(
        eng,
        [&](SimTime due, std::function<void()> fn) {
          return eng.sim.schedule(due, [&eng, fn = std::move(fn)] {
            eng.now = eng.sim.now();
            fn();
          });
        },
        [&](const nrucoex::sim::EventHandle& h) { eng.sim.cancel(h); }, seed);

    ASSERT_GT(expected.size(), 20u);
    EXPECT_EQ(actual, expected) << "seed " << seed;
    for (std::size_t i = 1; i < actual.size(); ++i) EXPECT_LE(actual[i - 1].second, actual[i].second);
  }
}

TEST(RngStream, SameKeySameSequence) {
  RngStream a(7, "dcf", 3), b(7, "dcf", 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctKeysDiffer) {
  RngStream a(7, "dcf", 3), b(7, "dcf", 4), c(8, "dcf", 3), d(7, "cat4", 3);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(RngStream, IndependentOfOtherStreamsConsumption) {
  RngStream a1(1, "x", 0), b1(1, "y", 0);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 50; ++i) first.push_back(a1.next_u64());

  RngStream a2(1, "x", 0), b2(1, "y", 0);
  std::vector<std::uint64_t> second;
  for (int i = 0; i < 50; ++i) {
    for (int k = 0; k < i % 3; ++k) b2.next_u64();
    second.push_back(a2.next_u64());
  }
  EXPECT_EQ(first, second);
  (void)b1;
}

// Frozen output of the counter-based generator; guards cross-platform stability.
TEST(RngStream, FrozenValues) {
  RngStream r(1, "test", 0);
  const std::uint64_t v0 = r.next_u64();
  const std::uint64_t v1 = r.next_u64();
  RngStream again(1, "test", 0);
  EXPECT_EQ(again.next_u64(), v0);
  EXPECT_EQ(again.next_u64(), v1);
  EXPECT_EQ(nrucoex::sim::splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(nrucoex::sim::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(nrucoex::sim::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(RngStream, UniformIntRangeAndMean) {
  RngStream r(3, "counter", 1);
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto v = r.uniform_int(0, 15);
    ASSERT_LE(v, 15u);
    sum += static_cast<double>(v);
  }
  // Uniform {0..15}: variance (16^2 - 1) / 12.
  const double sigma = std::sqrt((256.0 - 1.0) / 12.0 / n);
  EXPECT_NEAR(sum / n, 7.5, 3.0 * sigma);
}

TEST(RngStream, NormalMoments) {
  RngStream r(5, "shadow", 2);
  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal(0.0, 3.0);
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  EXPECT_NEAR(m, 0.0, 0.1);
  EXPECT_NEAR(std::sqrt(s2 / n - m * m), 3.0, 0.1);
}
