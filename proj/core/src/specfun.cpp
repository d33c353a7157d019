#include "mmwnc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "mmwnc/errors.hpp"

namespace mmwnc::specfun {
namespace {

__extension__ typedef unsigned __int128 u128;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRescale = 1e250;
const double kLogRescale = std::log(kRescale);

struct LogSeries {
  double log_value;
  std::int64_t terms;
};

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

LogSeries log_series(double b, double c, double x, const SeriesTolerances& tol) {
  if (!(c > 0.0)) throw InvalidArgument("hyp2f1_unit: c must be positive");
  if (!(x >= 0.0)) throw InvalidArgument("hyp2f1_unit: x must be non-negative");
  if (x >= 1.0) throw SeriesError("hyp2f1_unit: series diverges for x >= 1");
  if (b < 0.0 && !is_nonpositive_integer(b))
    throw InvalidArgument("hyp2f1_unit: negative non-integer b is not supported");
  if (!(tol.rel_tol > 0.0 && tol.rel_tol < 1.0) || tol.max_terms < 1)
    throw InvalidArgument("hyp2f1_unit: invalid tolerances");

  if (x == 0.0 || b == 0.0) return {0.0, 1};

  // Partial sums are kept as (sum, term) * exp(log_scale) so that values far
  // beyond double range near x -> 1 stay representable.
  long double sum = 1.0L;
  long double term = 1.0L;
  double log_scale = 0.0;
  const bool ratios_decreasing = b >= c;
  for (std::int64_t k = 0; k < tol.max_terms; ++k) {
    const double ratio = (b + static_cast<double>(k)) / (c + static_cast<double>(k)) * x;
    if (ratio == 0.0) return {std::log(static_cast<double>(sum)) + log_scale, k + 1};
    term *= ratio;
    sum += term;
    if (sum > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      log_scale += kLogRescale;
    }
    const double next_ratio =
        (b + static_cast<double>(k + 1)) / (c + static_cast<double>(k + 1)) * x;
    const double bound_ratio = ratios_decreasing ? next_ratio : x;
    if (bound_ratio < 1.0) {
      const long double tail = term * bound_ratio / (1.0 - bound_ratio);
      if (tail < tol.rel_tol * sum) {
        return {std::log(static_cast<double>(sum)) + log_scale, k + 2};
      }
    }
  }
  throw SeriesError("hyp2f1_unit: term cap of " + std::to_string(tol.max_terms) +
                    " reached before convergence (x = " + std::to_string(x) + ")");
}

}  // namespace

SeriesValue hyp2f1_unit(double b, double c, double x, const SeriesTolerances& tol) {
  const LogSeries s = log_series(b, c, x, tol);
  return {std::exp(s.log_value), s.terms, s.terms > kSlowSeriesTerms};
}

double log_hyp2f1_unit(double b, double c, double x, const SeriesTolerances& tol) {
  return log_series(b, c, x, tol).log_value;
}

double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  if (n <= 64) {
    u128 r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
      r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    }
    return static_cast<double>(r);
  }
  return std::exp(log_binomial(n, k));
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return -kInf;
  if (n <= 64) return std::log(binomial(n, k));
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double log_k_func(int tau, int n, int m, double x, const SeriesTolerances& tol) {
  if (tau < 0 || n < 0) throw InvalidArgument("k_func: tau and n must be non-negative");
  if (m < 1 || m > n + 1) throw InvalidArgument("k_func: m must lie in [1, n+1]");
  if (!(x >= 0.0 && x < 1.0)) throw SeriesError("k_func: x must lie in [0, 1)");
  if (x == 0.0) return tau == 0 ? 0.0 : -kInf;
  const int d = n + 1 - m;
  return static_cast<double>(tau) * std::log(x) + log_binomial(d + tau, d) +
         log_hyp2f1_unit(static_cast<double>(d + 1 + tau), static_cast<double>(tau + 1), x, tol);
}

double k_func(int tau, int n, int m, double x, const SeriesTolerances& tol) {
  return std::exp(log_k_func(tau, n, m, x, tol));
}

double log_g_func(int tau, int n, double x) {
  if (tau < 0 || n < 0) throw InvalidArgument("g_func: tau and n must be non-negative");
  if (!(x >= 0.0 && x < 1.0)) throw InvalidArgument("g_func: x must lie in [0, 1)");
  const double log_total = -static_cast<double>(n + 1) * std::log1p(-x);

  double log_g1 = log_total;
  if (tau > 0) {
    const double log_head = x == 0.0 ? -kInf
                                     : static_cast<double>(tau) * std::log(x) +
                                           log_binomial(n + tau, n);
    log_g1 += std::min(0.0, log_head);
  }

  // C(n+tau, n+1) vanishes at tau = 0, so x^(tau-1) is never formed there.
  double log_g2 = log_total;
  if (tau > 0 && x > 0.0) {
    const double log_sub = log_binomial(n + tau, n + 1) + static_cast<double>(tau - 1) * std::log(x);
    const double ratio = std::exp(log_sub - log_total);
    log_g2 = ratio < 1.0 ? log_total + std::log1p(-ratio) : kInf;
  } else if (tau > 0 && x == 0.0 && tau == 1) {
    // x^0 = 1: G2 = 1 - C(n+1, n+1) = 0.
    log_g2 = -kInf;
  }
  return std::min(log_g1, log_g2);
}

double g_func(int tau, int n, double x) { return std::exp(log_g_func(tau, n, x)); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_ccdf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_upper_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_upper_quantile: p must lie in (0, 1)");
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

}  // namespace mmwnc::specfun
