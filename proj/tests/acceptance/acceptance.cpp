// One PASS/FAIL line per acceptance criterion. `--criterion N` runs only N.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmwnc/channel.hpp"
#include "mmwnc/config.hpp"
#include "mmwnc/errors.hpp"
#include "mmwnc/experiments.hpp"
#include "mmwnc/mgf_bounds.hpp"
#include "mmwnc/netcalc.hpp"
#include "mmwnc/power.hpp"
#include "mmwnc/sim.hpp"
#include "mmwnc/specfun.hpp"
#include "oracles.hpp"

using namespace mmwnc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

ExperimentConfig table1() { return load_config(MMWNC_TABLE1_CONFIG); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// The reference ten-relay scenario at the given allocation mode and mu.
struct Setup {
  ExperimentConfig config;
  Scenario scenario;
};

Setup setup(AllocationMode mode = AllocationMode::optimal, double mu_db = -80.0) {
  Setup s;
  s.config = table1();
  s.config.allocation = mode;
  s.config.mu_db = {mu_db};
  s.scenario = build_scenario(s.config);
  return s;
}

void criterion1(Outcome& o) {
  const auto c = table1();
  const double db = linear_to_db(lambda_total(c.channel, c.p_tot_w));
  o.detail << "lambda_tot = " << db << " dB";
  o.check(std::abs(db - 134.0) <= 0.5, "lambda_tot off by more than 0.5 dB");
}

void criterion2(Outcome& o) {
  const Setup s = setup();
  const SinrModel& m = s.scenario.model;
  const LogNormalSinr law = m.law(1);
  double worst_gap = 0.0;
  int points = 0;
  for (double delta : {1e-2, 1e-3}) {
    const auto decomp = HopClassDecomposition::from_model(m, discretization(s.config, delta));
    const ThetaInterval region = stability_region(ArrivalSpec{1e9, 0.0}, decomp);
    o.check(!region.empty(), "empty stability region");
    if (region.empty()) return;
    for (int k = 1; k <= 10; ++k) {
      const double theta = region.hi * k / 10.5;
      const double u = decomp.classes[0].q->operator()(theta);
      const double exact = oracle::lognormal_inverse_moment(law.scale, law.sigma_db, theta * m.eta);
      o.check(u >= exact, "bound below quadrature at theta=" + std::to_string(theta));
      if (delta == 1e-3) {
        worst_gap = std::max(worst_gap, u / exact - 1.0);
        o.check(u <= 1.01 * exact, "delta=1e-3 bound more than 1% above quadrature");
      }
      ++points;
    }
  }
  o.detail << points << " points, worst delta=1e-3 excess " << worst_gap * 100 << "%";
}

void criterion3(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0;
  int cases = 0;
  for (int n : {1, 2}) {
    const int hops = n + 1;
    // Every way of grouping the hops into classes: all distinct, and all
    // identical, plus a mixed layout for three hops.
    std::vector<std::vector<int>> layouts = {std::vector<int>(hops, 1), {hops}};
    if (hops == 3) layouts.push_back({2, 1});
    for (const auto& layout : layouts) {
      for (int T = 1; T <= 6; ++T) {
        for (int trial = 0; trial < 5; ++trial) {
          std::vector<double> q_class;
          std::vector<double> q_hop;
          for (int mult : layout) {
            q_class.push_back(u(rng));
            for (int k = 0; k < mult; ++k) q_hop.push_back(q_class.back());
          }
          const double raw = oracle::raw_concatenation(q_hop, T);
          const double fast = network_mgf_bound(q_class, layout, T);
          worst = std::max(worst, rel(fast, raw));
          ++cases;
        }
      }
    }
  }
  o.detail << cases << " cases, worst relative difference " << worst;
  o.check(worst <= 1e-12, "multiset sum differs from raw enumeration");
}

void criterion4(Outcome& o) {
  // (a) m = 1 closed form against the truncated series.
  double worst_a = 0.0;
  for (int n : {1, 2, 10, 50}) {
    for (double v : {0.1, 0.5, 0.9, 0.97}) {
      for (int tau : {0, 1, 5, 20}) {
        const auto ref = oracle::binomial_tail_sum(tau, n, v, 20000);
        const double vv[] = {v};
        const double g = std::exp(log_m_series(vv, n, tau));
        o.check(g >= ref.sum * (1 - 1e-12), "G below the series");
        if (tau == 0) {
          o.check(std::abs(g - ref.sum) <= 1e-6 * ref.sum + ref.tail, "G at tau=0 off the series");
          worst_a = std::max(worst_a, rel(g, ref.sum));
        }
        const double k = specfun::k_func(tau, n, 1, v);
        o.check(std::abs(k - ref.sum) <= 1e-6 * ref.sum + ref.tail, "K off the series");
      }
    }
  }
  // (b) psi form against the relaxed double sum.
  double worst_b = 0.0;
  const std::vector<std::vector<double>> pairs = {{0.5, 0.25}, {0.9, 0.3}, {0.7, 0.65}, {0.2, 0.05}};
  for (const auto& v : pairs) {
    for (int n : {1, 2, 5, 10}) {
      for (int tau : {0, 1, 4, 10}) {
        const double ref = oracle::relaxed_double_sum(v, n, tau);
        const double psi = std::exp(log_m_series(v, n, tau));
        worst_b = std::max(worst_b, rel(psi, ref));
      }
    }
  }
  o.check(worst_b <= 1e-9, "psi form differs from double sum by more than 1e-9");
  // (c) coalescing classes. With one relay the relaxed two-class sum has the
  // same binomial weight as the one-class sum, so it must converge to it;
  // with more relays it stays above the one-class value.
  double worst_c = 0.0;
  for (double v : {0.3, 0.6, 0.9}) {
    const double one[] = {v};
    const double h1 = std::exp(log_m_series(one, 1, 0));
    const double two[] = {v * (1 + 1e-6), v};
    const double m2 = std::exp(log_m_series(two, 1, 0));
    worst_c = std::max(worst_c, rel(m2, h1));
    for (int n : {2, 10}) {
      const double hn = std::exp(log_m_series(one, n, 0));
      const double mn = std::exp(log_m_series(two, n, 0));
      o.check(mn >= hn * (1 - 1e-9), "coalesced two-class bound below the one-class bound");
    }
  }
  o.check(worst_c <= 0.01, "near-degenerate m=2 not within 1% of m=1");
  o.detail << "(a) tau=0 worst " << worst_a << ", (b) worst " << worst_b << ", (c) worst " << worst_c;
}

void criterion5(Outcome& o) {
  const auto c = table1();
  const ChannelParams p = c.channel_for_topology();
  const Topology t = c.topology();
  const double lam = lambda_total(p, c.p_tot_w);
  const auto r = optimal_allocation(p, t, c.p_tot_w);
  const SinrModel m = sinr_model(p, t, r.allocation());
  double spread = 0.0;
  for (double s : m.scale) spread = std::max(spread, rel(s, r.c_star));
  double sum = 0.0;
  for (double l : r.lambda) sum += l;
  o.check(spread < 1e-9, "SINR scales not equalized");
  o.check(rel(sum, lam) < 1e-9, "budget not saturated");
  o.check(r.residual < 1e-10 * lam, "residual too large");

  Topology one;
  one.n = 1;
  one.lengths_m = {700.0, 450.0};
  one.mu = {db_to_linear(-85.0)};
  ChannelParams p1 = p;
  p1.sigma_db = {8.0, 8.0};
  const double a = one.mu[0] * std::pow(700.0 * 450.0, p.beta);
  const double b = std::pow(700.0, p.beta) + std::pow(450.0, p.beta);
  const double root = 2.0 * lam / (b + std::sqrt(b * b + 4.0 * a * lam));
  const double quad = rel(optimal_allocation(p1, one, c.p_tot_w).c_star, root);
  o.check(quad < 1e-12, "n=1 quadratic mismatch");
  o.detail << "c* = " << r.c_star << ", spread " << spread << ", budget error " << rel(sum, lam)
           << ", residual/lambda " << r.residual / lam << ", quadratic " << quad;
}

void criterion6(Outcome& o) {
  const double lam = lambda_total(ChannelParams{}, 50.0);
  const double beta = 2.45;
  double worst_cross = 0.0;
  int pairs = 0;
  for (int n : {1, 2, 3, 5, 10, 20, 30, 50, 75, 100}) {
    for (double mu_db : {-140.0, -120.0, -100.0, -80.0, -60.0}) {
      const double l = 5000.0 / (n + 1);
      const double mu = db_to_linear(mu_db);
      ChannelParams p;
      p.sigma_db.assign(static_cast<std::size_t>(n) + 1, 8.0);
      const auto r = optimal_allocation(p, Topology::equal_spacing(n, l, mu), 50.0);
      worst_cross = std::max(worst_cross, rel(solve_c_of_mu(n, l, beta, mu, lam), r.c_star));
      ++pairs;
    }
  }
  o.check(worst_cross <= 1e-9, "c(mu) differs from the allocation's c*");

  double worst_small = 0.0;
  int small_points = 0;
  for (int n : {1, 2, 10, 20, 50, 100}) {
    const double l = 5000.0 / (n + 1);
    for (double x : {1e-6, 1e-5, 1e-4, 1e-3, 5e-3, 9e-3}) {
      const double mu = x * (n + 1) / lam;
      const double c = solve_c_of_mu(n, l, beta, mu, lam);
      worst_small = std::max(worst_small, rel(c_asymptote_small_mu(n, l, beta, mu, lam), c));
      ++small_points;
    }
  }
  o.check(worst_small <= 0.01, "small-mu closed form off by more than 1%");

  const double l200 = 5000.0 / 201.0;
  const double mu0 = 1e-6;
  const double k = calibrate_large_n_constant(200, l200, beta, mu0, lam);
  const double k2 = 2 * mu0 * solve_c_of_mu(200, l200, beta, 2 * mu0, lam);
  o.check(rel(k2, k) <= 0.05, "mu c(mu) not constant within 5% at n=200");
  o.detail << pairs << " pairs worst " << worst_cross << "; small-mu worst " << worst_small * 100
           << "% over " << small_points << " points; mu c(mu) drift " << rel(k2, k) * 100 << "%";
}

void criterion7(Outcome& o) {
  const Setup s = setup();
  const std::vector<double> rates = {1e9, 1.5e9, 2e9};
  const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
  const std::vector<double> deltas = {1e-2, 1e-3};
  const SearchOptions search = search_options(s.config);

  // bounds[d][r][e] for backlog and delay.
  std::vector<std::vector<std::vector<double>>> b(2), w(2);
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const auto decomp = HopClassDecomposition::from_model(s.scenario.model,
                                                          discretization(s.config, deltas[d]));
    for (double rho : rates) {
      std::vector<double> bb, ww;
      for (double e : eps) {
        bb.push_back(backlog_bound(ArrivalSpec{rho, 0.0}, decomp, e, search).value);
        ww.push_back(delay_bound(ArrivalSpec{rho, 0.0}, decomp, e, search).value);
      }
      b[d].push_back(bb);
      w[d].push_back(ww);
    }
  }

  // Monotone in the arrival rate.
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t r = 1; r < rates.size(); ++r) {
      for (std::size_t e = 0; e < eps.size(); ++e) {
        o.check(b[d][r][e] > b[d][r - 1][e], "backlog bound not increasing in rho");
        o.check(w[d][r][e] >= w[d][r - 1][e], "delay bound decreasing in rho");
      }
    }
  }

  // The two granularities agree at every rate, the highest one included.
  double worst_b = 0.0;
  double worst_w = 0.0;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    for (std::size_t e = 0; e < eps.size(); ++e) {
      worst_b = std::max(worst_b, rel(b[0][r][e], b[1][r][e]));
      const double dw = std::abs(w[0][r][e] - w[1][r][e]);
      worst_w = std::max(worst_w, dw);
      o.check(dw <= std::max(1.0, 0.1 * w[1][r][e]), "delay bounds for the two deltas differ");
    }
  }
  o.check(worst_b < 0.1, "backlog bounds for the two deltas differ by 10% or more");

  // Simulation against every bound.
  const std::int64_t slots = 10'000'000;
  std::uint64_t worst_count = 0;
  double worst_ratio = 0.0;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    SimConfig c;
    c.slots = slots;
    c.seed = 7;
    c.scenario = {s.scenario.model, ArrivalSpec{rates[r], 0.0}};
    c.semantics = s.config.sim_semantics;
    for (std::size_t d = 0; d < 2; ++d) {
      for (double x : b[d][r]) c.backlog_thresholds.push_back(x);
    }
    const SimStats st = run(c);
    o.check(!st.diverged, "simulation diverged");
    for (std::size_t d = 0; d < 2; ++d) {
      for (std::size_t e = 0; e < eps.size(); ++e) {
        const std::size_t j = d * eps.size() + e;
        const std::uint64_t kb = st.backlog_exceed[j];
        const std::uint64_t kw = st.delay_exceed(static_cast<std::int64_t>(w[d][r][e]));
        const double ub = clopper_pearson_upper(kb, st.backlog_samples, 0.95);
        const double uw = clopper_pearson_upper(kw, st.delay_samples, 0.95);
        o.check(st.backlog_ccdf(j) <= eps[e], "backlog violation frequency above epsilon");
        o.check(st.delay_ccdf(static_cast<std::int64_t>(w[d][r][e])) <= eps[e],
                "delay violation frequency above epsilon");
        o.check(ub <= 3 * eps[e] && uw <= 3 * eps[e], "Clopper-Pearson upper limit above 3 epsilon");
        worst_count = std::max({worst_count, kb, kw});
        worst_ratio = std::max({worst_ratio, ub / eps[e], uw / eps[e]});
      }
    }
  }
  o.detail << "delta gap: backlog " << worst_b * 100 << "%, delay " << worst_w
           << " slots; sim: max violations " << worst_count << ", max CP/eps " << worst_ratio
           << "; delays at eps=1e-4: " << w[0][0][3] << ", " << w[0][1][3] << ", " << w[0][2][3];
}

void criterion8(Outcome& o) {
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const ArrivalSpec a{1e9, 0.0};
  std::vector<std::vector<double>> gaps;
  for (double mu_db : {-80.0, -90.0, -100.0}) {
    std::vector<double> g;
    const Setup opt = setup(AllocationMode::optimal, mu_db);
    const Setup uni = setup(AllocationMode::uniform, mu_db);
    const auto dopt = HopClassDecomposition::from_model(opt.scenario.model, discretization(opt.config, 1e-2));
    const auto duni = HopClassDecomposition::from_model(uni.scenario.model, discretization(uni.config, 1e-2));
    for (double e : eps) {
      const double wo = delay_bound(a, dopt, e, search_options(opt.config)).value;
      const double wu = delay_bound(a, duni, e, search_options(uni.config)).value;
      if (mu_db == -80.0) o.check(wu > wo, "uniform allocation not worse at -80 dB");
      g.push_back(wu - wo);
    }
    gaps.push_back(g);
  }
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    double sum_prev = 0.0;
    double sum = 0.0;
    for (std::size_t e = 0; e < eps.size(); ++e) {
      o.check(gaps[k][e] <= gaps[k - 1][e], "gap grows as mu decreases");
      sum_prev += gaps[k - 1][e];
      sum += gaps[k][e];
    }
    o.check(sum < sum_prev, "gap does not shrink as mu decreases");
  }
  o.detail << "delay gap (slots) at eps=1e-2..1e-6:";
  const char* names[] = {" -80dB [", " -90dB [", " -100dB ["};
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    o.detail << names[k];
    for (std::size_t e = 0; e < eps.size(); ++e) o.detail << (e ? " " : "") << gaps[k][e];
    o.detail << "]";
  }
}

void criterion9(Outcome& o) {
  const auto cfg = table1();
  const double lam = lambda_total(cfg.channel, cfg.p_tot_w);
  const std::vector<int> ns = {1, 2, 10, 20, 50};
  const std::vector<double> mus = {-160, -150, -140, -130, -120, -110, -100, -90, -80, -70, -60};
  std::vector<std::vector<double>> c(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double l = 5000.0 / (ns[i] + 1);
    const double c0 = solve_c_of_mu(ns[i], l, cfg.channel.beta, 0.0, lam);
    for (double mu_db : mus) c[i].push_back(solve_c_of_mu(ns[i], l, cfg.channel.beta, db_to_linear(mu_db), lam));
    // Flat: the weakest interference barely moves c. Decay: the strongest
    // interference costs at least half of it, and c never increases with mu.
    o.check(rel(c[i].front(), c0) < 0.01, "n=" + std::to_string(ns[i]) + " not flat at -160 dB");
    o.check(c[i].back() < 0.5 * c0, "n=" + std::to_string(ns[i]) + " does not decay");
    for (std::size_t k = 1; k < mus.size(); ++k)
      o.check(c[i][k] <= c[i][k - 1], "c increases with mu for n=" + std::to_string(ns[i]));
  }
  for (std::size_t k = 0; k < mus.size(); ++k) {
    for (std::size_t i = 1; i < ns.size(); ++i) {
      const std::string where = "mu=" + std::to_string(static_cast<int>(mus[k])) + " dB, n=" +
                                std::to_string(ns[i - 1]) + " vs " + std::to_string(ns[i]);
      if (mus[k] <= -120) o.check(c[i][k] > c[i - 1][k], "larger n not better at " + where);
      if (mus[k] >= -90) o.check(c[i][k] < c[i - 1][k], "smaller n not better at " + where);
    }
  }
  for (std::size_t k : {std::size_t{4}, std::size_t{7}, std::size_t{10}}) {
    o.detail << "c at " << mus[k] << " dB:";
    for (std::size_t i = 0; i < ns.size(); ++i) o.detail << " n" << ns[i] << "=" << c[i][k];
    o.detail << "; ";
  }
}

void criterion10(Outcome& o) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> arrive(0, 12);
  std::uniform_int_distribution<std::uint64_t> serve(0, 15);
  std::size_t delays_checked = 0;
  for (auto sem : {SlotSemantics::store_and_forward, SlotSemantics::cut_through}) {
    const std::size_t hops = 11;
    TandemQueue q(hops, sem);
    std::vector<std::uint64_t> cap(hops);
    std::vector<TandemQueue::Completion> done;
    std::vector<std::uint64_t> a, d;
    std::uint64_t cum = 0;
    const int slots = 20'000;
    for (int k = 0; k < slots; ++k) {
      for (auto& c : cap) c = serve(rng);
      const std::uint64_t bits = k < slots - 2000 ? arrive(rng) : 0;
      cum += bits;
      q.step(k, bits, cap, done);
      a.push_back(cum);
      d.push_back(q.delivered());
      std::uint64_t held = 0;
      for (std::size_t i = 0; i < hops; ++i) {
        held += q.buffer(i);
        if (q.cumulative_in(i) != q.cumulative_out(i) + q.buffer(i) ||
            (i > 0 && q.cumulative_in(i) != q.cumulative_out(i - 1)))
          o.check(false, "flow conservation broken");
      }
      if (held != cum - q.delivered()) o.check(false, "backlog differs from A - D");
    }
    // Delay of slot k's bits equals inf{w : A(k) <= D(k + w)}.
    for (const auto& c : done) {
      const auto k = static_cast<std::size_t>(c.arrival_slot);
      std::size_t w = 0;
      while (d[k + w] < a[k]) ++w;
      if (static_cast<std::int64_t>(w) != c.departure_slot - c.arrival_slot)
        o.check(false, "delay differs from the A/D definition");
      ++delays_checked;
    }
  }

  // Constant arrivals through ample capacity: every bit spends one slot per hop.
  for (std::size_t n : {0u, 1u, 4u, 10u}) {
    TandemQueue q(n + 1, SlotSemantics::store_and_forward);
    std::vector<std::uint64_t> cap(n + 1, 100);
    std::vector<TandemQueue::Completion> done;
    for (int k = 0; k < 50; ++k) q.step(k, k < 30 ? 100 : 0, cap, done);
    o.check(done.size() == 30, "pipeline lost bits");
    for (const auto& c : done)
      o.check(c.departure_slot - c.arrival_slot == static_cast<std::int64_t>(n) + 1, "pipeline delay != n+1");
  }

  // Merging replications does not depend on how they were scheduled.
  SimConfig c;
  c.slots = 20'000;
  c.seed = 5;
  c.scenario.model.scale.assign(11, 70.0);
  c.scenario.model.sigma_db.assign(11, 8.0);
  c.scenario.model.eta = 1e3;
  c.scenario.arrival = ArrivalSpec{2500.0, 0.0};
  c.backlog_thresholds = {1e3, 1e4};
  const SimStats ref = run_parallel(c, 8, 1);
  o.check(ref == run_parallel(c, 8, 3), "merge depends on worker count (3)");
  o.check(ref == run_parallel(c, 8, 8), "merge depends on worker count (8)");
  SimStats manual = run_replication(c, replication_seed(c.seed, 0));
  for (std::uint64_t r = 1; r < 8; ++r) manual.merge(run_replication(c, replication_seed(c.seed, r)));
  o.check(ref == manual, "merged stats differ from sequential merge");
  o.detail << delays_checked << " delays checked against A/D, pipelines n+1, merge deterministic";
}

const std::vector<std::function<void(Outcome&)>> kCriteria = {
    criterion1, criterion2, criterion3, criterion4, criterion5,
    criterion6, criterion7, criterion8, criterion9, criterion10};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (which.empty()) {
    for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k) which.push_back(k);
  }
  int failures = 0;
  for (int k : which) {
    if (k < 1 || k > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", k);
      return 2;
    }
    Outcome o;
    try {
      kCriteria[k - 1](o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", k, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
