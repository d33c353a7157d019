#pragma once

#include <span>
#include <vector>

#include "mmwnc/mgf_bounds.hpp"

namespace mmwnc {

/// Arguments of M(theta, s, t) at steady state. Only s - t matters:
/// tau = max(s - t, 0) and the arrival prefactor is p_a^(t - s).
struct MBoundInput {
  ArrivalSpec arrival;
  HopClassDecomposition decomp;
  int time_gap = 0;  ///< s - t

  int tau() const { return time_gap > 0 ? time_gap : 0; }
};

struct ThetaInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(hi > lo); }
};

struct BoundResult {
  double value = 0.0;  ///< bits for backlog, slots for delay
  double theta_star = 0.0;
  double epsilon = 0.0;
  bool stable = false;
  double margin = 0.0;  ///< 1 - max_i V_i(theta_star)
  /// Delay only: false when inf_theta M was found to increase somewhere in w.
  bool monotone_verified = true;
};

struct SearchOptions {
  int grid_points = 200;
  double grid_lo_fraction = 1e-4;
  double grid_hi_fraction = 0.999;
  double refine_rel_tol = 1e-6;
  int delay_cap = 100'000;
  /// Classes whose V values differ by less than this are merged (V = max).
  double merge_abs_tol = 1e-10;
};

/// log of sum_i psi_i V_i^(m-1) K_{tau,n,m}(V_i) for m >= 2 distinct V values,
/// or log G_{tau,n}(V) for m = 1. `n` is the relay count.
/// Throws InstabilityError if some V >= 1 and DegenerateClassError if two V
/// values are closer than 1e-10.
double log_m_series(std::span<const double> v, int n, int tau);

/// log of the M(theta, s, t) bound.
double log_m_bound(const MBoundInput& input, double theta);
double m_bound(const MBoundInput& input, double theta);

/// Same bound after merging classes whose V values nearly coincide; always
/// at least as large as the exact psi-form would be on the merged values.
double log_m_bound_merged(const ArrivalSpec& arrival, std::span<const double> q_hat, int n,
                          double theta, int time_gap, double merge_abs_tol);

/// max_i log V_i(theta).
double log_max_v(const ArrivalSpec& arrival, const HopClassDecomposition& decomp, double theta);

/// (0, theta_max) on which max_i V_i(theta) < 1. log V is convex in theta and
/// vanishes at 0, so this set is always an interval.
ThetaInterval stability_region(const ArrivalSpec& arrival, const HopClassDecomposition& decomp);

BoundResult backlog_bound(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                          double epsilon, const SearchOptions& options = {});

BoundResult delay_bound(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                        double epsilon, const SearchOptions& options = {});

/// inf over theta of log M(theta, t + w, t) for w = 0..w_max, on the search grid.
std::vector<double> delay_profile(const ArrivalSpec& arrival, const HopClassDecomposition& decomp,
                                  int w_max, const SearchOptions& options = {});

/// The theta grid used by the searches.
std::vector<double> theta_grid(const ThetaInterval& region, const SearchOptions& options);

}  // namespace mmwnc
