#include "mmwnc/netcalc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "mmwnc/errors.hpp"
#include "mmwnc/specfun.hpp"

namespace mmwnc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateGap = 1e-10;

// K is summed well past double precision because the psi weights cancel.
const specfun::SeriesTolerances kPsiSeriesTol{1e-17, 1'000'000};

void check_v(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("M bound: no hop classes");
  for (double x : v) {
    if (!(x >= 0.0)) throw InvalidArgument("M bound: V values must be >= 0");
    if (x >= 1.0) throw InstabilityError("M bound: stability condition violated (V >= 1)");
  }
}

std::vector<double> v_values(const ArrivalSpec& arrival, std::span<const double> q_hat,
                             double theta) {
  std::vector<double> v(q_hat.size());
  const double log_pa = arrival.log_pa(theta);
  for (std::size_t i = 0; i < q_hat.size(); ++i) {
    v[i] = q_hat[i] <= 0.0 ? 0.0 : std::exp(log_pa + std::log(q_hat[i]));
  }
  return v;
}

std::vector<double> merge_close(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<double> merged;
  for (double x : v) {
    // Descending order: the group's representative is its largest member.
    if (!merged.empty() && std::abs(merged.back() - x) < tol) continue;
    merged.push_back(x);
  }
  return merged;
}

double prefix(const ArrivalSpec& arrival, double theta, int time_gap) {
  return theta * arrival.delta_b - arrival.log_pa(theta) * static_cast<double>(time_gap);
}

struct Minimum {
  double theta = 0.0;
  double value = kInf;
};

Minimum golden_section(const std::function<double(double)>& f, double a, double b,
                       double rel_tol, Minimum best) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > rel_tol * std::abs(b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

Minimum grid_minimum(const std::vector<double>& values, const std::vector<double>& grid,
                     std::size_t& index) {
  Minimum best;
  index = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < best.value) {
      best = {grid[k], values[k]};
      index = k;
    }
  }
  return best;
}

Minimum refine(const std::function<double(double)>& f, const std::vector<double>& grid,
               std::size_t index, Minimum best, double rel_tol) {
  const double a = grid[index == 0 ? 0 : index - 1];
  const double b = grid[std::min(index + 1, grid.size() - 1)];
  if (!(b > a)) return best;
  return golden_section(f, a, b, rel_tol, best);
}

// Objective values that hit instability (possible only through rounding at
// the grid edge) are treated as +infinity.
template <class F>
double guarded(F&& f) {
  try {
    return f();
  } catch (const InstabilityError&) {
    return kInf;
  } catch (const DegenerateClassError&) {
    return kInf;
  }
}

struct PreparedSearch {
  ThetaInterval region;
  std::vector<double> grid;
  std::vector<std::vector<double>> q;  // q values per grid point
  int n = 0;
};

PreparedSearch prepare(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                       const SearchOptions& options) {
  arrival.validate();
  PreparedSearch p;
  p.region = stability_region(arrival, decomp);
  if (p.region.empty())
    throw UnstableSystemError("no theta > 0 satisfies the stability condition (rho_a = " +
                              std::to_string(arrival.rho_a) + " bits/slot)");
  p.grid = theta_grid(p.region, options);
  p.q.reserve(p.grid.size());
  for (double theta : p.grid) p.q.push_back(decomp.q_values(theta));
  p.n = decomp.relays();
  return p;
}

double margin_at(const ArrivalSpec& arrival, const HopClassDecomposition& decomp, double theta) {
  return 1.0 - std::exp(log_max_v(arrival, decomp, theta));
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw InvalidArgument("violation probability must lie in (0, 1]");
}

}  // namespace

double log_m_series(std::span<const double> v, int n, int tau) {
  check_v(v);
  const auto m = static_cast<int>(v.size());
  if (n < 0 || tau < 0) throw InvalidArgument("M bound: n and tau must be >= 0");
  if (m > n + 1) throw InvalidArgument("M bound: more classes than hops");
  if (m == 1) return specfun::log_g_func(tau, n, v[0]);

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (std::abs(v[i] - v[j]) < kDegenerateGap)
        throw DegenerateClassError("M bound: classes " + std::to_string(i) + " and " +
                                   std::to_string(j) + " have coincident V; merge them first");
    }
  }

  std::vector<long double> log_mag(m);
  std::vector<int> sign(m);
  long double peak = -kInf;
  for (int i = 0; i < m; ++i) {
    if (v[i] == 0.0) {
      log_mag[i] = -kInf;
      sign[i] = 0;
      continue;
    }
    long double lm = static_cast<long double>(m - 1) * std::log(static_cast<long double>(v[i])) +
                     specfun::log_k_func(tau, n, m, v[i], kPsiSeriesTol);
    int s = 1;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const long double diff = static_cast<long double>(v[i]) - static_cast<long double>(v[j]);
      lm -= std::log(std::abs(diff));
      if (diff < 0) s = -s;
    }
    log_mag[i] = lm;
    sign[i] = s;
    peak = std::max(peak, lm);
  }
  long double sum = 0.0L;
  for (int i = 0; i < m; ++i) {
    if (sign[i] != 0) sum += sign[i] * std::exp(log_mag[i] - peak);
  }
  if (!(sum > 0.0L))
    throw DegenerateClassError("M bound: psi-weighted sum lost all precision");
  return static_cast<double>(peak + std::log(sum));
}

double log_m_bound(const MBoundInput& input, double theta) {
  if (!(theta > 0.0)) throw InvalidArgument("M bound: theta must be positive");
  input.arrival.validate();
  const auto q = input.decomp.q_values(theta);
  const auto v = v_values(input.arrival, q, theta);
  return prefix(input.arrival, theta, input.time_gap) +
         log_m_series(v, input.decomp.relays(), input.tau());
}

double m_bound(const MBoundInput& input, double theta) {
  return std::exp(log_m_bound(input, theta));
}

double log_m_bound_merged(const ArrivalSpec& arrival, std::span<const double> q_hat, int n,
                          double theta, int time_gap, double merge_abs_tol) {
  const auto v = merge_close(v_values(arrival, q_hat, theta), merge_abs_tol);
  return prefix(arrival, theta, time_gap) + log_m_series(v, n, time_gap > 0 ? time_gap : 0);
}

double log_max_v(const ArrivalSpec& arrival, const HopClassDecomposition& decomp, double theta) {
  double worst = -kInf;
  for (double q : decomp.q_values(theta)) worst = std::max(worst, std::log(q));
  return arrival.log_pa(theta) + worst;
}

ThetaInterval stability_region(const ArrivalSpec& arrival, const HopClassDecomposition& decomp) {
  arrival.validate();
  if (decomp.classes.empty()) throw InvalidArgument("stability_region: no hop classes");
  double rate = kInf;
  for (const auto& c : decomp.classes) rate = std::min(rate, c.q->effective_rate_at_zero());
  // d/dtheta log V_i at 0 is rho_a minus the class service rate.
  if (!(arrival.rho_a < rate) || !(rate > 0.0)) return {};

  auto stable = [&](double theta) { return log_max_v(arrival, decomp, theta) < 0.0; };
  double lo = 0.0;
  double hi = 1.0 / rate;
  int doublings = 0;
  while (stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 64) return {0.0, lo};
  }
  if (lo == 0.0) {
    double t = hi;
    for (int i = 0; i < 200 && !stable(t); ++i) t *= 0.5;
    if (!stable(t)) return {};
    lo = t;
    hi = 2.0 * t;
    while (stable(hi)) {
      lo = hi;
      hi *= 2.0;
    }
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return {0.0, lo};
}

std::vector<double> theta_grid(const ThetaInterval& region, const SearchOptions& options) {
  if (region.empty()) throw InvalidArgument("theta_grid: empty region");
  if (options.grid_points < 2) throw InvalidArgument("theta_grid: need at least two points");
  const double a = std::log(options.grid_lo_fraction * region.hi);
  const double b = std::log(options.grid_hi_fraction * region.hi);
  std::vector<double> grid(static_cast<std::size_t>(options.grid_points));
  for (int k = 0; k < options.grid_points; ++k) {
    grid[k] = std::exp(a + (b - a) * k / (options.grid_points - 1));
  }
  return grid;
}

BoundResult backlog_bound(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                          double epsilon, const SearchOptions& options) {
  check_epsilon(epsilon);
  const PreparedSearch p = prepare(arrival, decomp, options);
  const double log_eps = std::log(epsilon);

  auto objective_q = [&](const std::vector<double>& q, double theta) {
    return guarded([&] {
      return (log_m_bound_merged(arrival, q, p.n, theta, 0, options.merge_abs_tol) - log_eps) /
             theta;
    });
  };
  std::vector<double> values(p.grid.size());
  for (std::size_t k = 0; k < p.grid.size(); ++k) values[k] = objective_q(p.q[k], p.grid[k]);
  std::size_t index = 0;
  Minimum best = grid_minimum(values, p.grid, index);
  if (!std::isfinite(best.value))
    throw UnstableSystemError("backlog bound: no finite value on the theta grid");
  best = refine([&](double theta) { return objective_q(decomp.q_values(theta), theta); }, p.grid,
                index, best, options.refine_rel_tol);

  BoundResult r;
  r.value = best.value;
  r.theta_star = best.theta;
  r.epsilon = epsilon;
  r.stable = true;
  r.margin = margin_at(arrival, decomp, best.theta);
  return r;
}

namespace {

struct DelayScanner {
  const ArrivalSpec& arrival;
  const HopClassDecomposition& decomp;
  const SearchOptions& options;
  PreparedSearch p;

  Minimum grid_min(int w, std::size_t& index) const {
    std::vector<double> values(p.grid.size());
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
      values[k] = guarded([&] {
        return log_m_bound_merged(arrival, p.q[k], p.n, p.grid[k], w, options.merge_abs_tol);
      });
    }
    return grid_minimum(values, p.grid, index);
  }

  Minimum refined(int w, std::size_t index, Minimum best) const {
    auto f = [&](double theta) {
      return guarded([&] {
        return log_m_bound_merged(arrival, decomp.q_values(theta), p.n, theta, w,
                                  options.merge_abs_tol);
      });
    };
    return refine(f, p.grid, index, best, options.refine_rel_tol);
  }
};

}  // namespace

std::vector<double> delay_profile(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                                  int w_max, const SearchOptions& options) {
  if (w_max < 0) throw InvalidArgument("delay_profile: w_max must be >= 0");
  const DelayScanner scan{arrival, decomp, options, prepare(arrival, decomp, options)};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w_max) + 1);
  for (int w = 0; w <= w_max; ++w) {
    std::size_t index = 0;
    out.push_back(scan.grid_min(w, index).value);
  }
  return out;
}

BoundResult delay_bound(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                        double epsilon, const SearchOptions& options) {
  check_epsilon(epsilon);
  if (options.delay_cap < 0) throw InvalidArgument("delay_bound: cap must be >= 0");
  const DelayScanner scan{arrival, decomp, options, prepare(arrival, decomp, options)};
  const double log_eps = std::log(epsilon);
  // Grid minima that come this close to log(epsilon) get a refined search.
  const double refine_band = 0.05 * std::max(1.0, std::abs(log_eps));

  int first_cross = -1;
  int last_fail = -1;
  int verify_until = -1;
  bool monotone = true;
  double prev = kInf;
  std::vector<Minimum> at_w;

  for (int w = 0; w <= options.delay_cap; ++w) {
    std::size_t index = 0;
    Minimum grid = scan.grid_min(w, index);
    if (w > 0 && grid.value > prev + 1e-12 * std::max(1.0, std::abs(prev))) monotone = false;
    prev = grid.value;

    Minimum best = grid;
    if (std::isfinite(grid.value) && grid.value > log_eps && grid.value - log_eps < refine_band)
      best = scan.refined(w, index, grid);
    at_w.push_back(best);

    if (best.value <= log_eps) {
      if (first_cross < 0) {
        first_cross = w;
        verify_until = std::min(options.delay_cap, 2 * w + 16);
      }
    } else {
      last_fail = w;
    }
    if (first_cross >= 0 && monotone && w >= verify_until) break;
  }

  if (first_cross < 0 || last_fail == options.delay_cap)
    throw CapExceededError("delay_bound: no delay up to " + std::to_string(options.delay_cap) +
                           " slots meets epsilon = " + std::to_string(epsilon));

  const int w_eps = monotone ? first_cross : last_fail + 1;
  BoundResult r;
  r.value = static_cast<double>(w_eps);
  r.theta_star = at_w[static_cast<std::size_t>(w_eps)].theta;
  r.epsilon = epsilon;
  r.stable = true;
  r.margin = margin_at(arrival, decomp, r.theta_star);
  r.monotone_verified = monotone;
  return r;
}

}  // namespace mmwnc
