#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "mmwnc/channel.hpp"

namespace mmwnc {

/// Controls the grid on which the inverse-moment bound is evaluated.
///
/// The grid is uniform with step `delta` for the first `uniform_cells`
/// cells and then widens geometrically (relative width `growth`, always a
/// multiple of delta) up to `u_max`. Any such grid yields a valid upper bound
/// on E[(1+X)^-s]; a sub-grid of the uniform delta-grid can only be looser.
/// `uniform_cells = 0` keeps the whole grid uniform.
struct DiscretizationOptions {
  double delta = 1e-2;
  /// u_max is the SINR level whose exceedance probability is tail_probability,
  /// unless u_max is set explicitly (> 0).
  double tail_probability = 1e-9;
  double u_max = 0.0;
  std::size_t uniform_cells = std::size_t{1} << 18;
  double growth = 1e-4;
};

struct UDeltaResult {
  double value = 1.0;
  /// u at which the minimum was attained.
  double u_at_min = 0.0;
  /// Upper bound on how much further the objective could fall beyond u_max:
  /// (1 + u_max)^-theta * (1 - F(u_max)).
  double truncation_slack = 0.0;
  /// Set when truncation_slack exceeds 1e-6 of the returned value.
  bool truncation_warning = false;
};

/// Upper bound on E[(1+X)^-theta] for a non-negative X with CDF `cdf`:
/// min over u = 0, delta, 2 delta, ..., u_max of
///   (1 + delta N)^-theta + sum_{k=1}^{N} a(k) F(k delta),  N = floor(u / delta),
///   a(k) = (1 + (k-1) delta)^-theta - (1 + k delta)^-theta.
UDeltaResult u_delta_bound(const std::function<double(double)>& cdf, double theta,
                           double delta, double u_max);

/// A log-normal SINR law collapsed onto a (possibly graded) delta grid.
/// Cell j carries P(b_{j-1} < X <= b_j) and the value (1 + b_{j-1})^-s; the
/// last cell holds the mass above u_max. Evaluating the inverse moment is
/// then a single weighted sum, independent of how the grid was built.
class DiscretizedLaw {
public:
  static DiscretizedLaw build(const LogNormalSinr& law, const DiscretizationOptions& options);

  /// Upper bound on E[(1+X)^-s], clamped to [0, 1]; exactly 1 at s = 0.
  double inverse_moment(double s) const;
  /// E[ln(1 + Y)] for the grid-floored variable Y; the slope of
  /// -log inverse_moment at s = 0.
  double mean_log1p() const;

  std::size_t cells() const { return prob_.size(); }
  double u_max() const { return u_max_; }
  double delta() const { return delta_; }

private:
  std::vector<double> log1p_left_;
  std::vector<double> prob_;
  double u_max_ = 0.0;
  double delta_ = 0.0;
};

/// q(theta) = U_{delta,gamma}(eta theta) for one hop class, memoised on the
/// exact theta values requested. Safe for concurrent use.
class QFunction {
public:
  QFunction(const LogNormalSinr& law, double eta, const DiscretizationOptions& options);

  double operator()(double theta) const;

  const LogNormalSinr& law() const { return law_; }
  const DiscretizedLaw& grid() const { return grid_; }
  double eta() const { return eta_; }
  /// eta * E[ln(1+Y)]: per-slot service rate of the discretised law, the
  /// limit of -log q(theta) / theta as theta -> 0.
  double effective_rate_at_zero() const { return eta_ * grid_.mean_log1p(); }
  std::size_t memo_size() const;

private:
  LogNormalSinr law_;
  double eta_;
  DiscretizedLaw grid_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<double, double> memo_;
};

/// Hops sharing one SINR distribution.
struct HopClass {
  LogNormalSinr law;
  std::vector<std::size_t> hops;  ///< 1-based hop indices
  std::shared_ptr<const QFunction> q;

  int multiplicity() const { return static_cast<int>(hops.size()); }
};

/// Partition of the n+1 hops into classes of identically distributed SINR.
struct HopClassDecomposition {
  std::vector<HopClass> classes;

  std::size_t class_count() const { return classes.size(); }
  std::size_t hop_count() const;
  /// Relay count n, i.e. hop_count() - 1.
  int relays() const { return static_cast<int>(hop_count()) - 1; }
  std::vector<double> q_values(double theta) const;
  std::vector<int> multiplicities() const;

  /// Two hops share a class iff their scale and sigma agree within
  /// relative `merge_rel_tol`.
  static HopClassDecomposition from_model(const SinrModel& model,
                                          const DiscretizationOptions& options,
                                          double merge_rel_tol = 1e-9);
  static HopClassDecomposition homogeneous(const LogNormalSinr& law, std::size_t hops,
                                           double eta, const DiscretizationOptions& options);
};

/// q for a single hop of `model`, built from scratch on the given grid.
double hop_q(const SinrModel& model, std::size_t hop, double theta,
             const DiscretizationOptions& options);

/// Composition-sum bound on the network service MGF over an interval of
/// `interval` slots:
///   sum over pi_1 + ... + pi_m = interval of
///   prod_i C(pi_i + |X_i| - 1, |X_i| - 1) q_i^pi_i.
/// Throws CapExceededError beyond 10^7 compositions.
double network_mgf_bound(std::span<const double> q_hat, std::span<const int> multiplicities,
                         int interval);
double network_mgf_bound(const HopClassDecomposition& decomp, double theta, int interval);

inline constexpr double kMaxCompositions = 1e7;

/// Deterministic token-bucket arrivals: rho_a bits every slot plus a one-off
/// burst delta_b. Its MGF envelope is e^{theta delta_b} p_a(theta)^(t-s) with
/// p_a(theta) = e^{theta rho_a}.
struct ArrivalSpec {
  double rho_a = 0.0;    ///< bits per slot
  double delta_b = 0.0;  ///< bits

  void validate() const;
  double log_pa(double theta) const { return theta * rho_a; }
};

}  // namespace mmwnc
