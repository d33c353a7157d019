#pragma once

#include <cstdint>

namespace mmwnc::specfun {

struct SeriesTolerances {
  double rel_tol = 1e-12;
  std::int64_t max_terms = 1'000'000;
};

/// Terms beyond which a series evaluation is flagged as slow (near x -> 1).
inline constexpr std::int64_t kSlowSeriesTerms = 100'000;

struct SeriesValue {
  double value = 0.0;
  std::int64_t terms = 0;
  bool slow = false;
};

/// 2F1(1, b; c; x) for 0 <= x < 1 by the term recurrence
/// t_{k+1} = t_k (b+k)/(c+k) x. Stops once a geometric bound on the
/// remaining tail drops below rel_tol times the partial sum.
/// Throws SeriesError for x >= 1 or when max_terms is exhausted.
SeriesValue hyp2f1_unit(double b, double c, double x, const SeriesTolerances& tol = {});

/// Same series, returned as log(value).
double log_hyp2f1_unit(double b, double c, double x, const SeriesTolerances& tol = {});

/// C(n, k). Zero when k < 0 or k > n. Exact (128-bit intermediates) for
/// n <= 64, lgamma beyond that.
double binomial(std::int64_t n, std::int64_t k);

/// log C(n, k); -infinity when the coefficient is zero.
double log_binomial(std::int64_t n, std::int64_t k);

/// K_{tau,n,m}(x) = x^tau C(n+1-m+tau, n+1-m) 2F1(1, n+2-m+tau; tau+1; x),
/// the tail sum sum_{k>=tau} C(n+1-m+k, k) x^k.
double k_func(int tau, int n, int m, double x, const SeriesTolerances& tol = {});
double log_k_func(int tau, int n, int m, double x, const SeriesTolerances& tol = {});

/// Elementary upper bound on K_{tau,n,1}(x): min of
///   G1 = min(1, x^tau C(n+tau, n)) / (1-x)^(n+1)
///   G2 = (1-x)^-(n+1) - C(n+tau, n+1) x^(tau-1).
double g_func(int tau, int n, double x);
double log_g_func(int tau, int n, double x);

/// Standard normal CDF and its complement.
double normal_cdf(double z);
double normal_ccdf(double z);

/// z such that normal_ccdf(z) = p, for 0 < p < 1.
double normal_upper_quantile(double p);

}  // namespace mmwnc::specfun
