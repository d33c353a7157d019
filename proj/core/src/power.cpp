#include "mmwnc/power.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmwnc/errors.hpp"

namespace mmwnc {
namespace {

// Root of an increasing function on [lo, hi] with f(lo) < 0 <= f(hi).
// Newton steps are used while they shrink the bracket quickly; a step that
// leaves the bracket, or a bracket that failed to halve, falls back to bisection.
template <class F, class DF>
long double increasing_root(F f, DF df, long double lo, long double hi, long double rel_tol) {
  long double x = hi;
  long double width = hi - lo;
  for (int it = 0; it < 4000; ++it) {
    const long double fx = f(x);
    if (fx == 0.0L) return x;
    (fx < 0.0L ? lo : hi) = x;
    const long double d = df(x);
    long double next = d > 0.0L ? x - fx / d : 0.5L * (lo + hi);
    const bool slow = it % 2 == 1 && (hi - lo) > 0.5L * width;
    if (it % 2 == 1) width = hi - lo;
    if (!(next > lo && next < hi) || slow) next = 0.5L * (lo + hi);
    if (std::abs(next - x) <= rel_tol * std::abs(next) || (hi - lo) <= rel_tol * hi) return next;
    x = next;
  }
  throw BracketError("root search did not converge");
}

}  // namespace

long double NuCoefficients::power_coefficient(int k) const {
  const int n = relays();
  long double a = 0.0L;
  for (int i = 0; i <= n + 1 - k; ++i) a += nu[i][k - 1];
  return a;
}

NuCoefficients nu_coefficients(const Topology& topology, double beta) {
  topology.validate();
  if (!(beta > 0.0)) throw InvalidArgument("nu_coefficients: beta must be positive");
  const int n = topology.n;
  auto lb = [&](int hop) {
    return std::pow(static_cast<long double>(topology.lengths_m[hop - 1]), static_cast<long double>(beta));
  };
  NuCoefficients out;
  out.nu.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    auto& row = out.nu[i];
    long double chain = 1.0L;  // prod_{u=1}^{k-1} mu_{i+u} l_{i+u}^beta
    for (int k = 1; k <= n - i + 1; ++k) {
      if (k > 1) chain *= static_cast<long double>(topology.mu[i + k - 2]) * lb(i + k - 1);
      row.push_back(chain * lb(i + k));
    }
  }
  return out;
}

long double budget_polynomial(const NuCoefficients& nu, long double lambda_tot, long double x) {
  const int n = nu.relays();
  long double acc = 0.0L;
  for (int k = n + 1; k >= 1; --k) acc = (acc + nu.power_coefficient(k)) * x;
  return acc - lambda_tot;
}

double solve_budget_polynomial(const NuCoefficients& nu, double lambda_tot) {
  if (!(lambda_tot > 0.0)) throw InvalidArgument("budget polynomial: lambda_tot must be positive");
  const int n = nu.relays();
  if (n < 0) throw InvalidArgument("budget polynomial: no coefficients");
  std::vector<long double> a(static_cast<std::size_t>(n) + 2, 0.0L);
  for (int k = 1; k <= n + 1; ++k) {
    a[k] = nu.power_coefficient(k);
    if (a[k] < 0.0L) throw InvalidArgument("budget polynomial: negative coefficient");
  }
  if (!(a[1] > 0.0L)) throw InvalidArgument("budget polynomial: linear coefficient must be positive");

  auto f = [&](long double x) {
    long double acc = 0.0L;
    for (int k = n + 1; k >= 1; --k) acc = (acc + a[k]) * x;
    return acc - lambda_tot;
  };
  auto df = [&](long double x) {
    long double acc = 0.0L;
    for (int k = n + 1; k >= 1; --k) acc = acc * x + k * a[k];
    return acc;
  };

  // Each positive term alone bounds the root: a_k x^k <= lambda_tot.
  long double hi = lambda_tot / a[1];
  for (int k = 2; k <= n + 1; ++k) {
    if (a[k] > 0.0L) hi = std::min(hi, std::pow(lambda_tot / a[k], 1.0L / k));
  }
  for (int i = 0; f(hi) < 0.0L; ++i) {
    if (i > 4000 || !std::isfinite(static_cast<double>(hi)))
      throw BracketError("budget polynomial: no finite upper bracket");
    hi *= 2.0L;
  }
  return static_cast<double>(increasing_root(f, df, 0.0L, hi, 1e-15L));
}

AllocationResult optimal_allocation(const ChannelParams& params, const Topology& topology,
                                    double p_tot_w) {
  topology.validate();
  params.validate(topology.hops());
  const double lambda_tot = lambda_total(params, p_tot_w);
  const NuCoefficients nu = nu_coefficients(topology, params.beta);
  const double c = solve_budget_polynomial(nu, lambda_tot);

  AllocationResult r;
  r.c_star = c;
  r.residual = static_cast<double>(std::abs(budget_polynomial(nu, lambda_tot, c)));
  const double n0 = params.noise_power_w();
  for (int i = 0; i <= topology.n; ++i) {
    long double lam = 0.0L;
    long double ck = 1.0L;
    for (int k = 1; k <= topology.n - i + 1; ++k) {
      ck *= c;
      lam += nu.at(i, k) * ck;
    }
    r.lambda.push_back(static_cast<double>(lam));
    r.powers_w.push_back(static_cast<double>(lam * n0));
  }
  return r;
}

double solve_c_of_mu(int n, double l, double beta, double mu, double lambda_tot) {
  if (n < 0) throw InvalidArgument("solve_c_of_mu: n must be >= 0");
  if (!(l > 0.0) || !(beta > 0.0) || !(lambda_tot > 0.0))
    throw InvalidArgument("solve_c_of_mu: l, beta and lambda_tot must be positive");
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidArgument("solve_c_of_mu: mu must lie in [0, 1]");
  const long double lb = std::pow(static_cast<long double>(l), static_cast<long double>(beta));
  if (mu == 0.0) return static_cast<double>(lambda_tot / ((n + 1) * lb));

  // In t = c mu l^beta the polynomial is
  //   t^(n+3) - (n+2+D) t^2 + (n+1+2D) t - D,  D = mu lambda_tot,
  // with a double root at t = 1.
  const long double d = static_cast<long double>(mu) * lambda_tot;
  std::vector<long double> p(static_cast<std::size_t>(n) + 4, 0.0L);  // p[k]: coefficient of t^k
  p[n + 3] = 1.0L;
  p[2] += -(n + 2 + d);
  p[1] += n + 1 + 2 * d;
  p[0] += -d;

  for (int pass = 0; pass < 2; ++pass) {
    // Synthetic division by (t - 1); the remainder is zero up to rounding.
    std::vector<long double> q(p.size() - 1);
    long double carry = 0.0L;
    for (std::size_t k = p.size() - 1; k >= 1; --k) {
      carry += p[k];
      q[k - 1] = carry;
    }
    p = std::move(q);
  }

  const int deg = static_cast<int>(p.size()) - 1;
  auto f = [&](long double t) {
    long double acc = 0.0L;
    for (int k = deg; k >= 0; --k) acc = acc * t + p[k];
    return acc;
  };
  auto df = [&](long double t) {
    long double acc = 0.0L;
    for (int k = deg; k >= 1; --k) acc = acc * t + k * p[k];
    return acc;
  };
  // The deflated polynomial has coefficients (n+1, n, ..., 1) on t..t^(n+1)
  // and constant -D, so its root lies below D / (n+1) and D^(1/(n+1)).
  const long double hi = std::min(d / (n + 1), std::pow(d, 1.0L / (n + 1)));
  const long double t = increasing_root(f, df, 0.0L, hi, 1e-16L);
  if (std::abs(t - 1.0L) < 1e-12L)
    throw DegenerateError("solve_c_of_mu: root coincides with c = 1/(mu l^beta) (mu lambda_tot = " +
                          std::to_string(static_cast<double>(d)) + ")");
  return static_cast<double>(t / (static_cast<long double>(mu) * lb));
}

double c_asymptote_small_mu(int n, double l, double beta, double mu, double lambda_tot) {
  const double x = 2.0 * lambda_tot * mu / (n + 1);
  return 2.0 * lambda_tot * std::pow(l, -beta) / (n * (1.0 + std::exp(x)) + 2.0);
}

double c_asymptote_large_n(double mu, double k) {
  if (!(mu > 0.0)) throw InvalidArgument("c_asymptote_large_n: mu must be positive");
  return k / mu;
}

double calibrate_large_n_constant(int n, double l, double beta, double mu0, double lambda_tot) {
  if (!(mu0 > 0.0)) throw InvalidArgument("calibration needs mu0 > 0");
  return mu0 * solve_c_of_mu(n, l, beta, mu0, lambda_tot);
}

}  // namespace mmwnc
