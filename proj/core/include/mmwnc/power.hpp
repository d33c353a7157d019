#pragma once

#include <vector>

#include "mmwnc/channel.hpp"

namespace mmwnc {

/// nu[i][k-1] = nu_{i,k} for transmitter i = 0..n and k = 1..n-i+1, so that
/// lambda_i = sum_k nu_{i,k} c^k under a common per-hop SINR scale c.
/// Kept in extended precision: on long chains nu_{i,k} drops far below the
/// double range while nu_{i,k} c^k stays moderate.
struct NuCoefficients {
  std::vector<std::vector<long double>> nu;

  int relays() const { return static_cast<int>(nu.size()) - 1; }
  long double at(int i, int k) const { return nu[i][k - 1]; }
  /// Coefficient of x^k in the budget polynomial, sum_i nu_{i,k}.
  long double power_coefficient(int k) const;
};

/// nu_{i,k} = l_{i+k}^beta prod_{u=1}^{k-1} mu_{i+u} l_{i+u}^beta.
NuCoefficients nu_coefficients(const Topology& topology, double beta);

/// f(x) = sum_k (sum_i nu_{i,k}) x^k - lambda_tot, in extended precision.
long double budget_polynomial(const NuCoefficients& nu, long double lambda_tot, long double x);

/// The unique positive root of the budget polynomial.
double solve_budget_polynomial(const NuCoefficients& nu, double lambda_tot);

struct AllocationResult {
  std::vector<double> powers_w;
  std::vector<double> lambda;
  double c_star = 0.0;
  double residual = 0.0;  ///< |f(c_star)|

  PowerAllocation allocation() const { return PowerAllocation{lambda}; }
};

/// Sum-power-optimal allocation: every hop ends up with SINR scale
/// omega_i l_i^-beta = c_star.
AllocationResult optimal_allocation(const ChannelParams& params, const Topology& topology,
                                    double p_tot_w);

/// Common SINR factor c(mu) for n relays at equal spacing l with identical mu,
/// from the equal-spacing polynomial with its double root at c = 1/(mu l^beta)
/// divided out. mu = 0 returns the interference-free limit.
/// Throws DegenerateError when the root coincides with the removed one.
double solve_c_of_mu(int n, double l, double beta, double mu, double lambda_tot);

/// 2 lambda_tot l^-beta / (n (1 + exp(2 lambda_tot mu / (n+1))) + 2).
double c_asymptote_small_mu(int n, double l, double beta, double mu, double lambda_tot);

/// K / mu.
double c_asymptote_large_n(double mu, double k);

/// K = mu0 c(mu0), the one-point calibration of the large-n form.
double calibrate_large_n_constant(int n, double l, double beta, double mu0, double lambda_tot);

}  // namespace mmwnc
