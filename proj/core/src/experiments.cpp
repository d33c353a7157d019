#include "mmwnc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <thread>

#include "mmwnc/errors.hpp"
#include "mmwnc/power.hpp"
#include "mmwnc/sim.hpp"

namespace mmwnc {
namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

// Error text goes into a CSV cell, so separators are replaced.
std::string cell(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks write
// into their own slot, so the output order never depends on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

template <class F>
std::string capture_error(F&& f) {
  try {
    f();
    return {};
  } catch (const std::exception& e) {
    return e.what();
  }
}

}  // namespace

Scenario build_scenario(const ExperimentConfig& config) {
  Scenario s;
  s.topology = config.topology();
  s.channel = config.channel_for_topology();
  s.channel.validate(s.topology.hops());
  s.lambda_tot = lambda_total(s.channel, config.p_tot_w);
  switch (config.allocation) {
    case AllocationMode::optimal:
      s.allocation = optimal_allocation(s.channel, s.topology, config.p_tot_w).allocation();
      break;
    case AllocationMode::uniform:
      s.allocation = PowerAllocation::uniform(s.topology, s.lambda_tot);
      break;
    case AllocationMode::explicit_powers:
      s.allocation = PowerAllocation::from_powers(config.powers_w, s.channel.noise_power_w());
      break;
  }
  s.model = sinr_model(s.channel, s.topology, s.allocation);
  return s;
}

DiscretizationOptions discretization(const ExperimentConfig& config, double delta) {
  DiscretizationOptions o;
  o.delta = delta;
  o.tail_probability = config.tail_probability;
  return o;
}

SearchOptions search_options(const ExperimentConfig& config) {
  SearchOptions o;
  o.delay_cap = config.delay_cap_slots;
  return o;
}

int cmd_bound(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const Scenario s = build_scenario(config);
  const SearchOptions search = search_options(config);

  struct Point {
    std::size_t delta_index;
    double rho;
    double epsilon;
    bool delay;
  };
  std::vector<Point> points;
  for (std::size_t d = 0; d < config.delta.size(); ++d) {
    for (double rho : config.rho_a_bits) {
      for (double eps : config.epsilon) {
        points.push_back({d, rho, eps, false});
        points.push_back({d, rho, eps, true});
      }
    }
  }
  std::vector<HopClassDecomposition> decomps;
  for (double delta : config.delta) {
    decomps.push_back(HopClassDecomposition::from_model(s.model, discretization(config, delta)));
  }

  std::vector<BoundResult> results(points.size());
  std::vector<std::string> errors(points.size());
  parallel_for(points.size(), config.workers, [&](std::size_t i) {
    const Point& p = points[i];
    const ArrivalSpec arrival{p.rho, config.delta_b_bits};
    errors[i] = capture_error([&] {
      const auto& decomp = decomps[p.delta_index];
      results[i] = p.delay ? delay_bound(arrival, decomp, p.epsilon, search)
                           : backlog_bound(arrival, decomp, p.epsilon, search);
    });
  });

  out << "rho_a_bits_per_slot,delta,epsilon,kind,value,value_unit,theta_star_per_bit,margin,"
         "hop_classes,error\n";
  int failed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const BoundResult& r = results[i];
    const bool ok = errors[i].empty();
    failed += ok ? 0 : 1;
    out << fmt(p.rho) << ',' << fmt(config.delta[p.delta_index]) << ',' << fmt(p.epsilon) << ','
        << (p.delay ? "delay" : "backlog") << ',' << (ok ? fmt(r.value) : "") << ','
        << (p.delay ? "slots" : "bits") << ',' << (ok ? fmt(r.theta_star) : "") << ','
        << (ok ? fmt(r.margin) : "") << ',' << decomps[p.delta_index].class_count() << ','
        << cell(errors[i]) << '\n';
  }
  return failed;
}

int cmd_power(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const Topology topology = config.topology();
  const ChannelParams channel = config.channel_for_topology();
  const AllocationResult r = optimal_allocation(channel, topology, config.p_tot_w);
  const double lambda_tot_db = linear_to_db(lambda_total(channel, config.p_tot_w));
  out << "node,power_w,lambda_linear,lambda_db,c_star_linear,residual,lambda_tot_db\n";
  for (std::size_t i = 0; i < r.powers_w.size(); ++i) {
    out << i << ',' << fmt(r.powers_w[i]) << ',' << fmt(r.lambda[i]) << ','
        << fmt(linear_to_db(r.lambda[i])) << ',' << fmt(r.c_star) << ',' << fmt(r.residual) << ','
        << fmt(lambda_tot_db) << '\n';
  }
  return 0;
}

int cmd_sweep_mu(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const ChannelParams& channel = config.channel;
  const double lambda_tot = lambda_total(channel, config.p_tot_w);
  const double gain = db_to_linear(channel.kappa_db) * db_to_linear(-channel.alpha);
  const double sigma = channel.sigma_db.front();
  const SearchOptions search = search_options(config);
  const ArrivalSpec arrival{config.rho_a_bits.front(), config.delta_b_bits};

  struct Point {
    int n;
    double mu_db;
  };
  std::vector<Point> points;
  for (int n : config.sweep_n) {
    for (double mu_db : config.sweep_mu_db) points.push_back({n, mu_db});
  }
  std::vector<double> c(points.size(), NAN);
  std::vector<double> w(points.size(), NAN);
  std::vector<std::string> errors(points.size());
  parallel_for(points.size(), config.workers, [&](std::size_t i) {
    const Point& p = points[i];
    const double l = config.sweep_total_length_m / (p.n + 1);
    errors[i] = capture_error([&] {
      c[i] = solve_c_of_mu(p.n, l, channel.beta, db_to_linear(p.mu_db), lambda_tot);
      const LogNormalSinr law{gain * c[i], sigma};
      const auto decomp = HopClassDecomposition::homogeneous(
          law, static_cast<std::size_t>(p.n) + 1, channel.eta(),
          discretization(config, config.delta.front()));
      w[i] = delay_bound(arrival, decomp, config.sweep_epsilon, search).value;
    });
  });

  out << "mu_db,n,hop_length_m,c_linear,c_db,delay_slots,epsilon,error\n";
  int failed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    failed += errors[i].empty() ? 0 : 1;
    out << fmt(p.mu_db) << ',' << p.n << ',' << fmt(config.sweep_total_length_m / (p.n + 1)) << ','
        << fmt(c[i]) << ',' << (std::isnan(c[i]) ? "" : fmt(linear_to_db(c[i]))) << ','
        << fmt(w[i]) << ',' << fmt(config.sweep_epsilon) << ',' << cell(errors[i]) << '\n';
  }
  return failed;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const Scenario s = build_scenario(config);
  const SearchOptions search = search_options(config);
  const auto decomp =
      HopClassDecomposition::from_model(s.model, discretization(config, config.delta.front()));

  out << "rho_a_bits_per_slot,epsilon,kind,bound_value,bound_unit,exceed_count,total_count,"
         "empirical_probability,cp_upper_95,empirical_le_epsilon,diverged,error\n";
  int failed = 0;
  for (double rho : config.rho_a_bits) {
    const ArrivalSpec arrival{rho, config.delta_b_bits};
    const std::size_t m = config.epsilon.size();
    std::vector<BoundResult> backlog(m), delay(m);
    std::vector<std::string> backlog_err(m), delay_err(m);
    for (std::size_t j = 0; j < m; ++j) {
      backlog_err[j] = capture_error([&] { backlog[j] = backlog_bound(arrival, decomp, config.epsilon[j], search); });
      delay_err[j] = capture_error([&] { delay[j] = delay_bound(arrival, decomp, config.epsilon[j], search); });
    }

    SimConfig sim;
    sim.slots = config.sim_slots;
    sim.seed = config.sim_seed;
    sim.warmup = config.sim_warmup;
    sim.semantics = config.sim_semantics;
    sim.scenario = {s.model, arrival};
    for (std::size_t j = 0; j < m; ++j) {
      if (backlog_err[j].empty()) sim.backlog_thresholds.push_back(backlog[j].value);
    }
    const SimStats stats = run_parallel(sim, config.sim_replications, config.workers);

    std::size_t threshold = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double eps = config.epsilon[j];
      for (int kind = 0; kind < 2; ++kind) {
        const bool is_delay = kind == 1;
        const std::string& err = is_delay ? delay_err[j] : backlog_err[j];
        out << fmt(rho) << ',' << fmt(eps) << ',' << (is_delay ? "delay" : "backlog") << ',';
        if (!err.empty()) {
          ++failed;
          out << ",,,,,,," << (stats.diverged ? 1 : 0) << ',' << cell(err) << '\n';
          continue;
        }
        std::uint64_t exceed = 0;
        std::uint64_t total = 0;
        double value = 0.0;
        if (is_delay) {
          value = delay[j].value;
          exceed = stats.delay_exceed(static_cast<std::int64_t>(value));
          total = stats.delay_samples;
        } else {
          value = backlog[j].value;
          exceed = stats.backlog_exceed[threshold++];
          total = stats.backlog_samples;
        }
        const double p = total == 0 ? 0.0 : static_cast<double>(exceed) / static_cast<double>(total);
        out << fmt(value) << ',' << (is_delay ? "slots" : "bits") << ',' << exceed << ',' << total
            << ',' << fmt(p) << ',' << fmt(clopper_pearson_upper(exceed, total, 0.95)) << ','
            << (p <= eps ? 1 : 0) << ',' << (stats.diverged ? 1 : 0) << ",\n";
      }
    }
  }
  return failed;
}

}  // namespace mmwnc
