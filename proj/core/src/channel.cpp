#include "mmwnc/channel.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmwnc/errors.hpp"
#include "mmwnc/specfun.hpp"

namespace mmwnc {

double db_to_linear(double db) { return std::pow(10.0, 0.1 * db); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }

double ChannelParams::eta() const { return bandwidth_hz / std::log(2.0); }

double ChannelParams::noise_power_w() const {
  return dbm_to_watts(noise_density_dbm_per_mhz) * (bandwidth_hz / 1e6);
}

double ChannelParams::sigma_for(std::size_t hop) const {
  if (hop < 1 || hop > sigma_db.size())
    throw InvalidArgument("ChannelParams: no shadowing entry for hop " + std::to_string(hop));
  return sigma_db[hop - 1];
}

void ChannelParams::validate(std::size_t hops) const {
  if (!(beta > 0.0)) throw InvalidArgument("ChannelParams: beta must be positive");
  if (!(bandwidth_hz > 0.0)) throw InvalidArgument("ChannelParams: bandwidth must be positive");
  if (sigma_db.size() != hops)
    throw InvalidArgument("ChannelParams: expected " + std::to_string(hops) +
                          " shadowing entries, got " + std::to_string(sigma_db.size()));
  for (double s : sigma_db) {
    if (!(s >= 0.0)) throw InvalidArgument("ChannelParams: shadowing std must be >= 0");
  }
}

double lambda_total(const ChannelParams& params, double p_tot_w) {
  if (!(p_tot_w > 0.0)) throw InvalidArgument("lambda_total: power budget must be positive");
  return p_tot_w / params.noise_power_w();
}

void Topology::validate() const {
  if (n < 0) throw InvalidArgument("Topology: relay count must be >= 0");
  if (lengths_m.size() != hops())
    throw InvalidArgument("Topology: expected n+1 hop lengths");
  if (mu.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("Topology: expected n self-interference coefficients");
  for (double l : lengths_m) {
    if (!(l > 0.0)) throw InvalidArgument("Topology: hop lengths must be positive");
  }
  for (double m : mu) {
    if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgument("Topology: mu must lie in [0, 1]");
  }
}

Topology Topology::equal_spacing(int n, double hop_length_m, double mu) {
  Topology t;
  t.n = n;
  t.lengths_m.assign(static_cast<std::size_t>(n) + 1, hop_length_m);
  t.mu.assign(static_cast<std::size_t>(n), mu);
  t.validate();
  return t;
}

void PowerAllocation::validate(const Topology& topology) const {
  if (lambda.size() != topology.hops())
    throw InvalidArgument("PowerAllocation: expected one SNR per transmitting node (n+1)");
  for (double l : lambda) {
    if (!(l >= 0.0)) throw InvalidArgument("PowerAllocation: SNR values must be >= 0");
  }
}

double PowerAllocation::total() const { return std::accumulate(lambda.begin(), lambda.end(), 0.0); }

PowerAllocation PowerAllocation::from_powers(const std::vector<double>& watts,
                                             double noise_power_w) {
  PowerAllocation a;
  a.lambda.reserve(watts.size());
  for (double p : watts) a.lambda.push_back(p / noise_power_w);
  return a;
}

PowerAllocation PowerAllocation::uniform(const Topology& topology, double lambda_tot) {
  PowerAllocation a;
  a.lambda.assign(topology.hops(), lambda_tot / static_cast<double>(topology.hops()));
  return a;
}

double LogNormalSinr::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (sigma_db == 0.0) return x >= scale ? 1.0 : 0.0;
  return specfun::normal_cdf(10.0 / sigma_db * std::log10(x / scale));
}

double LogNormalSinr::ccdf(double x) const {
  if (x <= 0.0) return 1.0;
  if (sigma_db == 0.0) return x >= scale ? 0.0 : 1.0;
  return specfun::normal_ccdf(10.0 / sigma_db * std::log10(x / scale));
}

double LogNormalSinr::upper_quantile(double p) const {
  if (sigma_db == 0.0) return scale;
  return scale * std::pow(10.0, 0.1 * sigma_db * specfun::normal_upper_quantile(p));
}

double LogNormalSinr::sample(double z) const { return scale * std::pow(10.0, 0.1 * sigma_db * z); }

LogNormalSinr SinrModel::law(std::size_t hop) const {
  if (hop < 1 || hop > hops())
    throw InvalidArgument("SinrModel: hop index " + std::to_string(hop) + " out of range");
  return {scale[hop - 1], sigma_db[hop - 1]};
}

double omega(const Topology& topology, const PowerAllocation& alloc, std::size_t hop) {
  if (hop < 1 || hop > topology.hops())
    throw InvalidArgument("omega: hop index " + std::to_string(hop) + " out of range");
  if (alloc.lambda.size() != topology.hops())
    throw InvalidArgument("omega: allocation size does not match topology");
  const double tx = alloc.lambda[hop - 1];
  if (hop == topology.hops()) return tx;
  return tx / (1.0 + topology.mu[hop - 1] * alloc.lambda[hop]);
}

SinrModel sinr_model(const ChannelParams& params, const Topology& topology,
                     const PowerAllocation& alloc) {
  topology.validate();
  alloc.validate(topology);
  params.validate(topology.hops());

  const double gain = db_to_linear(params.kappa_db) * db_to_linear(-params.alpha);
  SinrModel model;
  model.eta = params.eta();
  model.scale.reserve(topology.hops());
  for (std::size_t i = 1; i <= topology.hops(); ++i) {
    model.scale.push_back(gain * omega(topology, alloc, i) *
                          std::pow(topology.lengths_m[i - 1], -params.beta));
  }
  model.sigma_db = params.sigma_db;
  return model;
}

double sinr_cdf(const SinrModel& model, std::size_t hop, double x) {
  if (!(x >= 0.0)) throw InvalidArgument("sinr_cdf: x must be non-negative");
  return model.law(hop).cdf(x);
}

}  // namespace mmwnc
