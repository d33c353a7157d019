#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mmwnc/channel.hpp"
#include "mmwnc/mgf_bounds.hpp"

namespace mmwnc {

/// When bits forwarded during a slot become servable at the next hop.
enum class SlotSemantics {
  /// Every hop serves only what it held at the start of the slot; fresh
  /// arrivals and forwarded bits wait for the next slot.
  store_and_forward,
  /// Hops are served in order within the slot, so bits can traverse several
  /// hops in one slot. This is the system D >= A (x) S the bounds describe.
  cut_through,
};

const char* to_string(SlotSemantics s);
SlotSemantics slot_semantics_from_string(const std::string& s);

/// A fluid FCFS tandem of buffers 0..n (buffer i feeds hop i+1) with bit
/// counts kept as integers. Each bit carries the slot it entered buffer 0.
class TandemQueue {
public:
  struct Chunk {
    std::int64_t slot;
    std::uint64_t bits;
  };
  /// All bits that arrived in `arrival_slot` reached the sink during `departure_slot`.
  struct Completion {
    std::int64_t arrival_slot;
    std::int64_t departure_slot;
  };

  TandemQueue(std::size_t hops, SlotSemantics semantics);

  /// Advances one slot. `capacity[i]` is the number of bits hop i+1 may move.
  void step(std::int64_t slot, std::uint64_t arrival_bits, std::span<const std::uint64_t> capacity,
            std::vector<Completion>& completed);

  std::size_t hops() const { return buffers_.size(); }
  std::uint64_t backlog() const;
  std::uint64_t buffer(std::size_t i) const { return level_[i]; }
  /// Bits that ever entered buffer i (exogenous for i = 0).
  std::uint64_t cumulative_in(std::size_t i) const { return in_[i]; }
  /// Bits that ever left buffer i.
  std::uint64_t cumulative_out(std::size_t i) const { return out_[i]; }
  std::uint64_t delivered() const { return out_.back(); }
  /// Arrival slots whose bits have not all reached the sink.
  std::size_t in_flight() const { return pending_.size(); }
  const std::deque<Chunk>& chunks(std::size_t i) const { return buffers_[i]; }

private:
  std::uint64_t move(std::size_t i, std::uint64_t bits, std::int64_t slot,
                     std::vector<Completion>& completed);
  void push(std::size_t i, Chunk c);

  SlotSemantics semantics_;
  std::vector<std::deque<Chunk>> buffers_;
  std::vector<std::uint64_t> level_;
  std::vector<std::uint64_t> in_;
  std::vector<std::uint64_t> out_;
  std::deque<Chunk> pending_;  // bits of each arrival slot not yet at the sink
  std::vector<std::uint64_t> served_;
};

struct SimScenario {
  SinrModel model;
  ArrivalSpec arrival;
};

struct SimConfig {
  std::int64_t slots = 1'000'000;
  std::uint64_t seed = 1;
  std::int64_t warmup = 0;
  SimScenario scenario;
  SlotSemantics semantics = SlotSemantics::cut_through;
  /// Backlog levels (bits) at which P(B > b) is counted.
  std::vector<double> backlog_thresholds;
  double divergence_ceiling_bits = 1e12;

  void validate() const;
};

struct SimStats {
  std::vector<double> backlog_thresholds;
  std::vector<std::uint64_t> backlog_exceed;
  std::uint64_t backlog_samples = 0;
  /// delay_hist[d]: arrival slots whose last bit reached the sink d slots later.
  std::vector<std::uint64_t> delay_hist;
  std::uint64_t delay_samples = 0;
  double max_backlog_bits = 0.0;
  std::int64_t max_delay_slots = 0;
  bool diverged = false;

  double backlog_ccdf(std::size_t threshold_index) const;
  std::uint64_t delay_exceed(std::int64_t w) const;
  /// P(W > w).
  double delay_ccdf(std::int64_t w) const;
  void merge(const SimStats& other);

  bool operator==(const SimStats&) const = default;
};

/// Seed of replication `index`: SplitMix64 applied to seed + index * golden gamma.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index);

/// One replication with seed replication_seed(config.seed, 0).
SimStats run(const SimConfig& config);
SimStats run_replication(const SimConfig& config, std::uint64_t stream_seed);

/// Independent replications merged in index order; `workers` = 0 picks the
/// hardware concurrency. The result does not depend on `workers`.
SimStats run_parallel(const SimConfig& config, int replications, int workers = 0);

/// One-sided upper Clopper-Pearson limit for a binomial proportion with
/// `k` successes in `n` trials at the given confidence (e.g. 0.95).
double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double confidence);

/// CSV with columns metric, threshold, unit, exceed_count, total_count, probability.
void write_stats_csv(const SimStats& stats, std::ostream& out);

}  // namespace mmwnc
