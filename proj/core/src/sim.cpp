#include "mmwnc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <random>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "mmwnc/errors.hpp"

namespace mmwnc {

const char* to_string(SlotSemantics s) {
  return s == SlotSemantics::store_and_forward ? "store_and_forward" : "cut_through";
}

SlotSemantics slot_semantics_from_string(const std::string& s) {
  if (s == "store_and_forward") return SlotSemantics::store_and_forward;
  if (s == "cut_through") return SlotSemantics::cut_through;
  throw InvalidArgument("unknown slot semantics '" + s + "'");
}

TandemQueue::TandemQueue(std::size_t hops, SlotSemantics semantics)
    : semantics_(semantics),
      buffers_(hops),
      level_(hops, 0),
      in_(hops, 0),
      out_(hops, 0),
      served_(hops, 0) {
  if (hops == 0) throw InvalidArgument("TandemQueue: need at least one hop");
}

std::uint64_t TandemQueue::backlog() const {
  std::uint64_t total = 0;
  for (auto b : level_) total += b;
  return total;
}

void TandemQueue::push(std::size_t i, Chunk c) {
  auto& q = buffers_[i];
  if (!q.empty() && q.back().slot == c.slot) {
    q.back().bits += c.bits;
  } else {
    q.push_back(c);
  }
  level_[i] += c.bits;
  in_[i] += c.bits;
}

std::uint64_t TandemQueue::move(std::size_t i, std::uint64_t bits, std::int64_t slot,
                                std::vector<Completion>& completed) {
  auto& q = buffers_[i];
  const bool last = i + 1 == buffers_.size();
  std::uint64_t moved = 0;
  while (bits > 0 && !q.empty()) {
    Chunk& front = q.front();
    const std::uint64_t take = std::min(bits, front.bits);
    const Chunk piece{front.slot, take};
    front.bits -= take;
    bits -= take;
    moved += take;
    level_[i] -= take;
    out_[i] += take;
    if (front.bits == 0) q.pop_front();
    if (!last) {
      push(i + 1, piece);
    } else {
      Chunk& head = pending_.front();
      head.bits -= piece.bits;
      if (head.bits == 0) {
        completed.push_back({head.slot, slot});
        pending_.pop_front();
      }
    }
  }
  return moved;
}

void TandemQueue::step(std::int64_t slot, std::uint64_t arrival_bits,
                       std::span<const std::uint64_t> capacity,
                       std::vector<Completion>& completed) {
  if (capacity.size() != buffers_.size())
    throw InvalidArgument("TandemQueue::step: one capacity per hop required");
  auto inject = [&] {
    if (arrival_bits == 0) return;
    push(0, {slot, arrival_bits});
    pending_.push_back({slot, arrival_bits});
  };
  const std::size_t hops = buffers_.size();
  if (semantics_ == SlotSemantics::cut_through) {
    inject();
    for (std::size_t i = 0; i < hops; ++i) {
      served_[i] = move(i, std::min(level_[i], capacity[i]), slot, completed);
    }
  } else {
    // Downstream first, so every hop only sees what it held at slot start.
    for (std::size_t i = hops; i-- > 0;) {
      served_[i] = move(i, std::min(level_[i], capacity[i]), slot, completed);
    }
    inject();
  }
}

void SimConfig::validate() const {
  if (slots <= 0) throw InvalidArgument("SimConfig: slots must be positive");
  if (warmup < 0 || warmup >= slots)
    throw InvalidArgument("SimConfig: warmup must satisfy 0 <= warmup < slots");
  scenario.arrival.validate();
  const auto& m = scenario.model;
  if (m.hops() == 0 || m.sigma_db.size() != m.hops())
    throw InvalidArgument("SimConfig: SINR model needs one scale and sigma per hop");
  if (!(m.eta > 0.0)) throw InvalidArgument("SimConfig: eta must be positive");
  for (std::size_t i = 0; i < m.hops(); ++i) {
    if (!(m.scale[i] >= 0.0) || !(m.sigma_db[i] >= 0.0))
      throw InvalidArgument("SimConfig: SINR scales and sigmas must be >= 0");
  }
  if (!(divergence_ceiling_bits > 0.0))
    throw InvalidArgument("SimConfig: divergence ceiling must be positive");
}

double SimStats::backlog_ccdf(std::size_t threshold_index) const {
  if (backlog_samples == 0) return 0.0;
  return static_cast<double>(backlog_exceed.at(threshold_index)) /
         static_cast<double>(backlog_samples);
}

std::uint64_t SimStats::delay_exceed(std::int64_t w) const {
  std::uint64_t count = 0;
  for (std::size_t d = static_cast<std::size_t>(std::max<std::int64_t>(w + 1, 0));
       d < delay_hist.size(); ++d) {
    count += delay_hist[d];
  }
  return count;
}

double SimStats::delay_ccdf(std::int64_t w) const {
  if (delay_samples == 0) return 0.0;
  return static_cast<double>(delay_exceed(w)) / static_cast<double>(delay_samples);
}

void SimStats::merge(const SimStats& other) {
  if (backlog_thresholds != other.backlog_thresholds)
    throw InvalidArgument("SimStats::merge: backlog thresholds differ");
  for (std::size_t i = 0; i < backlog_exceed.size(); ++i) backlog_exceed[i] += other.backlog_exceed[i];
  backlog_samples += other.backlog_samples;
  if (delay_hist.size() < other.delay_hist.size()) delay_hist.resize(other.delay_hist.size(), 0);
  for (std::size_t d = 0; d < other.delay_hist.size(); ++d) delay_hist[d] += other.delay_hist[d];
  delay_samples += other.delay_samples;
  max_backlog_bits = std::max(max_backlog_bits, other.max_backlog_bits);
  max_delay_slots = std::max(max_delay_slots, other.max_delay_slots);
  diverged = diverged || other.diverged;
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SimStats run_replication(const SimConfig& config, std::uint64_t stream_seed) {
  config.validate();
  const auto& model = config.scenario.model;
  const auto& arrival = config.scenario.arrival;
  const std::size_t hops = model.hops();

  SimStats stats;
  stats.backlog_thresholds = config.backlog_thresholds;
  stats.backlog_exceed.assign(config.backlog_thresholds.size(), 0);

  std::mt19937_64 rng(stream_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TandemQueue queue(hops, config.semantics);
  std::vector<std::uint64_t> capacity(hops);
  std::vector<TandemQueue::Completion> done;

  auto draw_capacities = [&] {
    for (std::size_t i = 0; i < hops; ++i) {
      const double z = normal(rng);
      const double gamma = model.scale[i] * std::pow(10.0, 0.1 * model.sigma_db[i] * z);
      // Fractions of a bit are dropped, so the simulated server is never
      // faster than the fluid one.
      capacity[i] = static_cast<std::uint64_t>(std::floor(model.eta * std::log1p(gamma)));
    }
  };
  auto record_delays = [&] {
    for (const auto& c : done) {
      if (c.arrival_slot < config.warmup) continue;
      const auto d = static_cast<std::size_t>(c.departure_slot - c.arrival_slot);
      if (stats.delay_hist.size() <= d) stats.delay_hist.resize(d + 1, 0);
      ++stats.delay_hist[d];
      ++stats.delay_samples;
      stats.max_delay_slots = std::max<std::int64_t>(stats.max_delay_slots, static_cast<std::int64_t>(d));
    }
    done.clear();
  };

  // Cumulative arrivals are floor(rho_a (k+1)) so fractional rates average out.
  auto cumulative_arrival = [&](std::int64_t k) {
    return static_cast<std::uint64_t>(std::floor(arrival.rho_a * static_cast<double>(k)));
  };
  const auto burst = static_cast<std::uint64_t>(std::floor(arrival.delta_b));

  std::int64_t k = 0;
  for (; k < config.slots; ++k) {
    draw_capacities();
    std::uint64_t bits = cumulative_arrival(k + 1) - cumulative_arrival(k);
    if (k == 0) bits += burst;
    queue.step(k, bits, capacity, done);
    record_delays();
    const auto b = static_cast<double>(queue.backlog());
    if (k >= config.warmup) {
      ++stats.backlog_samples;
      for (std::size_t j = 0; j < config.backlog_thresholds.size(); ++j) {
        if (b > config.backlog_thresholds[j]) ++stats.backlog_exceed[j];
      }
      stats.max_backlog_bits = std::max(stats.max_backlog_bits, b);
    }
    if (b > config.divergence_ceiling_bits) {
      stats.diverged = true;
      return stats;
    }
  }
  // Drain without new arrivals so every measured slot gets its delay sample.
  const std::int64_t drain_limit = k + config.slots;
  while (queue.in_flight() > 0) {
    if (k >= drain_limit) {
      stats.diverged = true;
      break;
    }
    draw_capacities();
    queue.step(k, 0, capacity, done);
    record_delays();
    ++k;
  }
  return stats;
}

SimStats run(const SimConfig& config) {
  return run_replication(config, replication_seed(config.seed, 0));
}

SimStats run_parallel(const SimConfig& config, int replications, int workers) {
  if (replications < 1) throw InvalidArgument("run_parallel: replications must be >= 1");
  config.validate();
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, replications);

  std::vector<SimStats> results(static_cast<std::size_t>(replications));
  std::vector<std::exception_ptr> errors(results.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < replications; r = next++) {
      try {
        results[r] = run_replication(config, replication_seed(config.seed, static_cast<std::uint64_t>(r)));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SimStats merged = std::move(results[0]);
  for (std::size_t r = 1; r < results.size(); ++r) merged.merge(results[r]);
  return merged;
}

double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0) return 1.0;
  if (k > n) throw InvalidArgument("clopper_pearson_upper: more successes than trials");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidArgument("clopper_pearson_upper: confidence must lie in (0, 1)");
  if (k == n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k) + 1.0, static_cast<double>(n - k),
                                confidence);
}

void write_stats_csv(const SimStats& stats, std::ostream& out) {
  out << "metric,threshold,unit,exceed_count,total_count,probability\n";
  for (std::size_t j = 0; j < stats.backlog_thresholds.size(); ++j) {
    out << "backlog," << stats.backlog_thresholds[j] << ",bits," << stats.backlog_exceed[j] << ','
        << stats.backlog_samples << ',' << stats.backlog_ccdf(j) << '\n';
  }
  for (std::int64_t w = 0; w < static_cast<std::int64_t>(stats.delay_hist.size()); ++w) {
    out << "delay," << w << ",slots," << stats.delay_exceed(w) << ',' << stats.delay_samples << ','
        << stats.delay_ccdf(w) << '\n';
  }
}

}  // namespace mmwnc
