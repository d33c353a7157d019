#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mmwnc/errors.hpp"
#include "mmwnc/sim.hpp"

using namespace mmwnc;

namespace {

SimConfig small_config(double rho, std::int64_t slots = 20'000) {
  SimConfig c;
  c.slots = slots;
  c.seed = 42;
  c.scenario.model.scale.assign(4, 70.0);
  c.scenario.model.sigma_db.assign(4, 8.0);
  c.scenario.model.eta = 1e3;
  c.scenario.arrival = ArrivalSpec{rho, 0.0};
  c.backlog_thresholds = {1e3, 5e3, 2e4};
  return c;
}

// Drives a queue with random arrivals and capacities and records cumulative
// arrivals A(t) and departures D(t) together with per-slot completions.
struct Trace {
  std::vector<std::uint64_t> a;
  std::vector<std::uint64_t> d;
  std::vector<TandemQueue::Completion> completions;
};

Trace random_trace(SlotSemantics sem, std::size_t hops, int slots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> arrive(0, 12);
  std::uniform_int_distribution<std::uint64_t> serve(0, 15);
  TandemQueue q(hops, sem);
  std::vector<std::uint64_t> cap(hops);
  Trace t;
  std::uint64_t cum = 0;
  for (int k = 0; k < slots; ++k) {
    for (auto& c : cap) c = serve(rng);
    const std::uint64_t bits = k < slots - 200 ? arrive(rng) : 0;
    cum += bits;
    q.step(k, bits, cap, t.completions);
    t.a.push_back(cum);
    t.d.push_back(q.delivered());

    std::uint64_t held = 0;
    for (std::size_t i = 0; i < hops; ++i) {
      held += q.buffer(i);
      EXPECT_EQ(q.cumulative_in(i), q.cumulative_out(i) + q.buffer(i));
      if (i > 0) EXPECT_EQ(q.cumulative_in(i), q.cumulative_out(i - 1));
      EXPECT_LE(q.cumulative_out(i), q.cumulative_in(i));
    }
    EXPECT_EQ(held, cum - q.delivered());
    EXPECT_EQ(q.backlog(), held);
  }
  return t;
}

}  // namespace

TEST(Tandem, ZeroArrivalsStayEmpty) {
  TandemQueue q(3, SlotSemantics::cut_through);
  std::vector<TandemQueue::Completion> done;
  const std::uint64_t cap[] = {5, 5, 5};
  for (int k = 0; k < 10; ++k) q.step(k, 0, cap, done);
  EXPECT_EQ(q.backlog(), 0u);
  EXPECT_TRUE(done.empty());
}

TEST(Tandem, DeterministicPipeline) {
  for (std::size_t hops : {1u, 2u, 5u, 11u}) {
    for (auto sem : {SlotSemantics::store_and_forward, SlotSemantics::cut_through}) {
      TandemQueue q(hops, sem);
      std::vector<TandemQueue::Completion> done;
      std::vector<std::uint64_t> cap(hops, 10);
      for (int k = 0; k < 40; ++k) q.step(k, k < 20 ? 10 : 0, cap, done);
      ASSERT_EQ(done.size(), 20u);
      const std::int64_t expected = sem == SlotSemantics::store_and_forward
                                        ? static_cast<std::int64_t>(hops)
                                        : 0;
      for (const auto& c : done) EXPECT_EQ(c.departure_slot - c.arrival_slot, expected);
    }
  }
}

TEST(Tandem, ConservationAndDelayDefinition) {
  for (auto sem : {SlotSemantics::store_and_forward, SlotSemantics::cut_through}) {
    const Trace t = random_trace(sem, 4, 3000, 9);
    // Delay of the bits arriving in slot k is inf{w : A(k) <= D(k + w)}.
    std::size_t checked = 0;
    for (const auto& c : t.completions) {
      const auto k = static_cast<std::size_t>(c.arrival_slot);
      std::size_t w = 0;
      while (t.d[k + w] < t.a[k]) ++w;
      EXPECT_EQ(static_cast<std::int64_t>(w), c.departure_slot - c.arrival_slot);
      ++checked;
    }
    EXPECT_GT(checked, 2000u);
    // FIFO: completions are reported in arrival order, never before arrival.
    for (std::size_t i = 1; i < t.completions.size(); ++i) {
      EXPECT_LT(t.completions[i - 1].arrival_slot, t.completions[i].arrival_slot);
      EXPECT_LE(t.completions[i - 1].departure_slot, t.completions[i].departure_slot);
    }
  }
}

TEST(Tandem, CutThroughNeverSlower) {
  const Trace a = random_trace(SlotSemantics::cut_through, 3, 2000, 4);
  const Trace b = random_trace(SlotSemantics::store_and_forward, 3, 2000, 4);
  for (std::size_t k = 0; k < a.d.size(); ++k) EXPECT_GE(a.d[k], b.d[k]);
}

TEST(Sim, HigherLoadMeansMoreBacklog) {
  const SimStats lo = run(small_config(2000.0));
  const SimStats hi = run(small_config(3000.0));
  for (std::size_t j = 0; j < lo.backlog_exceed.size(); ++j) EXPECT_LE(lo.backlog_exceed[j], hi.backlog_exceed[j]);
  EXPECT_LE(lo.max_delay_slots, hi.max_delay_slots);
  ASSERT_EQ(lo.delay_samples, hi.delay_samples);
  for (std::int64_t w = 0; w <= hi.max_delay_slots; ++w) EXPECT_LE(lo.delay_ccdf(w), hi.delay_ccdf(w)) << w;
  EXPECT_LE(lo.max_backlog_bits, hi.max_backlog_bits);
}

TEST(Sim, RunIsReplicationZero) {
  const SimConfig c = small_config(2500.0);
  EXPECT_EQ(run(c), run_replication(c, replication_seed(c.seed, 0)));
  EXPECT_EQ(run(c), run_parallel(c, 1, 1));
}

TEST(Sim, ParallelMergeIsDeterministic) {
  const SimConfig c = small_config(2500.0, 5000);
  const SimStats one = run_parallel(c, 6, 1);
  EXPECT_EQ(one, run_parallel(c, 6, 2));
  EXPECT_EQ(one, run_parallel(c, 6, 6));

  SimStats manual = run_replication(c, replication_seed(c.seed, 0));
  for (std::uint64_t r = 1; r < 6; ++r) manual.merge(run_replication(c, replication_seed(c.seed, r)));
  EXPECT_EQ(one, manual);
  EXPECT_EQ(one.backlog_samples, 6u * 5000u);
}

TEST(Sim, DetectsDivergence) {
  SimConfig c = small_config(1e5, 100'000);
  c.divergence_ceiling_bits = 1e7;
  const SimStats s = run(c);
  EXPECT_TRUE(s.diverged);
  EXPECT_LT(s.backlog_samples, 100'000u);
}

TEST(Sim, WarmupSkipsSamples) {
  SimConfig c = small_config(2500.0, 1000);
  c.warmup = 400;
  EXPECT_EQ(run(c).backlog_samples, 600u);
  c.warmup = 1000;
  EXPECT_THROW(run(c), InvalidArgument);
}

TEST(Sim, CsvLayout) {
  const SimStats s = run(small_config(2500.0, 2000));
  std::ostringstream out;
  write_stats_csv(s, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "metric,threshold,unit,exceed_count,total_count,probability");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("backlog,1000,bits,", 0), 0u);
}

TEST(ClopperPearson, KnownValues) {
  // k = 0: closed form 1 - (1 - c)^(1/n).
  EXPECT_NEAR(clopper_pearson_upper(0, 100, 0.95), 1.0 - std::pow(0.05, 0.01), 1e-12);
  EXPECT_EQ(clopper_pearson_upper(5, 5, 0.95), 1.0);
  EXPECT_EQ(clopper_pearson_upper(0, 0, 0.95), 1.0);
  const double u = clopper_pearson_upper(10, 1000, 0.95);
  EXPECT_GT(u, 0.01);
  EXPECT_LT(u, 0.02);
  EXPECT_THROW(clopper_pearson_upper(3, 2, 0.95), InvalidArgument);
}
