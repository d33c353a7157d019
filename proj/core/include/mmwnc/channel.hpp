#pragma once

#include <cstddef>
#include <vector>

namespace mmwnc {

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);

/// Outdoor 60 GHz propagation parameters. Path loss in dB is
/// alpha + 10 beta log10(l) + xi with l in meters and xi ~ N(0, sigma^2).
struct ChannelParams {
  double alpha = 70.0;
  double beta = 2.45;
  std::vector<double> sigma_db{8.0};  ///< one entry per hop
  double kappa_db = 70.0;
  double bandwidth_hz = 500e6;
  double noise_density_dbm_per_mhz = -114.0;

  /// eta = W / ln 2, the Shannon service scale in bits per second.
  double eta() const;
  /// N0 = noise density times bandwidth, in Watts.
  double noise_power_w() const;
  double sigma_for(std::size_t hop) const;
  void validate(std::size_t hops) const;
};

/// Linear SNR budget lambda_tot = P_tot / N0.
double lambda_total(const ChannelParams& params, double p_tot_w);

/// A line of n relays between source (node 0) and destination (node n+1).
struct Topology {
  int n = 0;
  std::vector<double> lengths_m;  ///< l_1 .. l_{n+1}
  std::vector<double> mu;         ///< mu_1 .. mu_n, linear

  std::size_t hops() const { return static_cast<std::size_t>(n) + 1; }
  void validate() const;

  static Topology equal_spacing(int n, double hop_length_m, double mu);
};

/// Per-transmitter SNR lambda_i = P_i / N0 for nodes 0..n.
struct PowerAllocation {
  std::vector<double> lambda;

  void validate(const Topology& topology) const;
  double total() const;

  static PowerAllocation from_powers(const std::vector<double>& watts, double noise_power_w);
  static PowerAllocation uniform(const Topology& topology, double lambda_tot);
};

/// Log-normal SINR law gamma = scale * 10^(xi/10), xi ~ N(0, sigma_db^2).
struct LogNormalSinr {
  double scale = 1.0;
  double sigma_db = 0.0;

  double cdf(double x) const;
  double ccdf(double x) const;
  /// Smallest x with ccdf(x) <= p.
  double upper_quantile(double p) const;
  /// Realisation for a standard normal draw z.
  double sample(double z) const;
};

/// Per-hop SINR laws. Hop indices are 1-based throughout.
struct SinrModel {
  std::vector<double> scale;
  std::vector<double> sigma_db;
  double eta = 0.0;

  std::size_t hops() const { return scale.size(); }
  LogNormalSinr law(std::size_t hop) const;
};

/// omega_i = lambda_{i-1} / (1 + mu_i lambda_i) for i <= n, lambda_n for i = n+1.
double omega(const Topology& topology, const PowerAllocation& alloc, std::size_t hop);

SinrModel sinr_model(const ChannelParams& params, const Topology& topology,
                     const PowerAllocation& alloc);

double sinr_cdf(const SinrModel& model, std::size_t hop, double x);

}  // namespace mmwnc
