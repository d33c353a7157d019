#include "mmwnc/mgf_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "mmwnc/errors.hpp"
#include "mmwnc/specfun.hpp"

namespace mmwnc {

UDeltaResult u_delta_bound(const std::function<double(double)>& cdf, double theta,
                           double delta, double u_max) {
  if (!(theta >= 0.0)) throw InvalidArgument("u_delta_bound: theta must be >= 0");
  if (!(delta > 0.0)) throw InvalidArgument("u_delta_bound: delta must be positive");
  if (!(u_max > 0.0)) throw InvalidArgument("u_delta_bound: u_max must be positive");

  UDeltaResult result;
  if (theta == 0.0) return result;

  const auto cells = static_cast<std::int64_t>(std::floor(u_max / delta));
  long double weighted = 0.0L;  // sum_{k<=N} a(k) F(k delta)
  double prev_power = 1.0;      // (1 + (N-1) delta)^-theta
  double best = 1.0;            // N = 0
  double best_u = 0.0;
  double last_cdf = 0.0;
  for (std::int64_t k = 1; k <= cells; ++k) {
    const double u = static_cast<double>(k) * delta;
    const double power = std::pow(1.0 + u, -theta);
    last_cdf = cdf(u);
    weighted += static_cast<long double>(prev_power - power) * last_cdf;
    prev_power = power;
    const double h = static_cast<double>(static_cast<long double>(power) + weighted);
    if (h < best) {
      best = h;
      best_u = u;
    }
  }
  result.value = best;
  result.u_at_min = best_u;
  const double u_end = static_cast<double>(cells) * delta;
  result.truncation_slack = std::pow(1.0 + u_end, -theta) * (1.0 - last_cdf);
  result.truncation_warning = result.truncation_slack > 1e-6 * best;
  return result;
}

DiscretizedLaw DiscretizedLaw::build(const LogNormalSinr& law,
                                     const DiscretizationOptions& options) {
  if (!(options.delta > 0.0)) throw InvalidArgument("DiscretizedLaw: delta must be positive");
  if (!(law.scale > 0.0)) throw InvalidArgument("DiscretizedLaw: SINR scale must be positive");
  if (!(options.growth >= 0.0)) throw InvalidArgument("DiscretizedLaw: growth must be >= 0");

  const double delta = options.delta;
  double u_max = options.u_max;
  if (!(u_max > 0.0)) {
    if (law.sigma_db == 0.0) {
      u_max = law.scale + 2.0 * delta;
    } else {
      if (!(options.tail_probability > 0.0 && options.tail_probability < 1.0))
        throw InvalidArgument("DiscretizedLaw: tail probability must lie in (0, 1)");
      u_max = law.upper_quantile(options.tail_probability);
    }
  }
  const auto last_index = static_cast<std::int64_t>(std::ceil(u_max / delta));
  const std::int64_t uniform_limit =
      options.uniform_cells == 0
          ? last_index
          : std::min<std::int64_t>(last_index, static_cast<std::int64_t>(options.uniform_cells));

  DiscretizedLaw grid;
  grid.delta_ = delta;

  // Edges are kept as integer multiples of delta so the grid is a sub-grid of
  // the uniform one.
  std::int64_t left = 0;
  double left_cdf = 0.0;
  double left_ccdf = 1.0;
  long double total = 0.0L;
  auto push_cell = [&](double left_u, double prob) {
    if (prob <= 0.0) return;
    grid.log1p_left_.push_back(std::log1p(left_u));
    grid.prob_.push_back(prob);
    total += prob;
  };
  while (left < last_index) {
    std::int64_t width = 1;
    if (left >= uniform_limit && options.growth > 0.0) {
      width = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(options.growth * static_cast<double>(left)));
    }
    const std::int64_t right = std::min(left + width, last_index);
    const double right_u = static_cast<double>(right) * delta;
    const double right_cdf = law.cdf(right_u);
    const double right_ccdf = law.ccdf(right_u);
    // Differences are taken on whichever side of the median keeps precision.
    const double prob = right_cdf <= 0.5 ? right_cdf - left_cdf : left_ccdf - right_ccdf;
    push_cell(static_cast<double>(left) * delta, prob);
    left = right;
    left_cdf = right_cdf;
    left_ccdf = right_ccdf;
  }
  grid.u_max_ = static_cast<double>(last_index) * delta;
  push_cell(grid.u_max_, left_ccdf);

  // Round-off in the cell masses is assigned to the value-1 cell at u = 0 so
  // the bound never loses mass.
  const long double deficit = 1.0L - total;
  if (deficit > 0.0L) {
    if (!grid.log1p_left_.empty() && grid.log1p_left_.front() == 0.0) {
      grid.prob_.front() += static_cast<double>(deficit);
    } else {
      grid.log1p_left_.insert(grid.log1p_left_.begin(), 0.0);
      grid.prob_.insert(grid.prob_.begin(), static_cast<double>(deficit));
    }
  }
  return grid;
}

double DiscretizedLaw::inverse_moment(double s) const {
  if (!(s >= 0.0)) throw InvalidArgument("inverse_moment: exponent must be >= 0");
  if (s == 0.0) return 1.0;
  long double acc = 0.0L;
  for (std::size_t j = 0; j < prob_.size(); ++j) {
    acc += static_cast<long double>(prob_[j]) * std::exp(-s * log1p_left_[j]);
  }
  return std::clamp(static_cast<double>(acc), 0.0, 1.0);
}

double DiscretizedLaw::mean_log1p() const {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < prob_.size(); ++j) {
    acc += static_cast<long double>(prob_[j]) * log1p_left_[j];
  }
  return static_cast<double>(acc);
}

QFunction::QFunction(const LogNormalSinr& law, double eta, const DiscretizationOptions& options)
    : law_(law), eta_(eta), grid_(DiscretizedLaw::build(law, options)) {
  if (!(eta > 0.0)) throw InvalidArgument("QFunction: eta must be positive");
}

double QFunction::operator()(double theta) const {
  if (!(theta >= 0.0)) throw InvalidArgument("q(theta): theta must be >= 0");
  if (theta == 0.0) return 1.0;
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(theta); it != memo_.end()) return it->second;
  }
  const double value = grid_.inverse_moment(eta_ * theta);
  std::lock_guard lock(mutex_);
  memo_.emplace(theta, value);
  return value;
}

std::size_t QFunction::memo_size() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

std::size_t HopClassDecomposition::hop_count() const {
  std::size_t count = 0;
  for (const auto& c : classes) count += c.hops.size();
  return count;
}

std::vector<double> HopClassDecomposition::q_values(double theta) const {
  std::vector<double> q;
  q.reserve(classes.size());
  for (const auto& c : classes) q.push_back((*c.q)(theta));
  return q;
}

std::vector<int> HopClassDecomposition::multiplicities() const {
  std::vector<int> m;
  m.reserve(classes.size());
  for (const auto& c : classes) m.push_back(c.multiplicity());
  return m;
}

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

HopClassDecomposition HopClassDecomposition::from_model(const SinrModel& model,
                                                        const DiscretizationOptions& options,
                                                        double merge_rel_tol) {
  HopClassDecomposition decomp;
  for (std::size_t hop = 1; hop <= model.hops(); ++hop) {
    const LogNormalSinr law = model.law(hop);
    auto it = std::find_if(decomp.classes.begin(), decomp.classes.end(), [&](const HopClass& c) {
      return close_rel(c.law.scale, law.scale, merge_rel_tol) &&
             (c.law.sigma_db == law.sigma_db ||
              close_rel(c.law.sigma_db, law.sigma_db, merge_rel_tol));
    });
    if (it != decomp.classes.end()) {
      it->hops.push_back(hop);
    } else {
      decomp.classes.push_back(
          HopClass{law, {hop}, std::make_shared<const QFunction>(law, model.eta, options)});
    }
  }
  return decomp;
}

HopClassDecomposition HopClassDecomposition::homogeneous(const LogNormalSinr& law,
                                                         std::size_t hops, double eta,
                                                         const DiscretizationOptions& options) {
  if (hops == 0) throw InvalidArgument("homogeneous decomposition needs at least one hop");
  HopClass c{law, {}, std::make_shared<const QFunction>(law, eta, options)};
  for (std::size_t i = 1; i <= hops; ++i) c.hops.push_back(i);
  HopClassDecomposition decomp;
  decomp.classes.push_back(std::move(c));
  return decomp;
}

double hop_q(const SinrModel& model, std::size_t hop, double theta,
             const DiscretizationOptions& options) {
  const QFunction q(model.law(hop), model.eta, options);
  return q(theta);
}

namespace {

void enumerate_compositions(std::span<const double> log_q, std::span<const int> mult,
                            std::size_t index, int remaining, double log_acc,
                            long double& sum) {
  if (index + 1 == log_q.size()) {
    const int pi = remaining;
    const double term = log_acc + specfun::log_binomial(pi + mult[index] - 1, mult[index] - 1) +
                        (pi == 0 ? 0.0 : pi * log_q[index]);
    sum += std::exp(static_cast<long double>(term));
    return;
  }
  for (int pi = 0; pi <= remaining; ++pi) {
    const double term = log_acc + specfun::log_binomial(pi + mult[index] - 1, mult[index] - 1) +
                        (pi == 0 ? 0.0 : pi * log_q[index]);
    enumerate_compositions(log_q, mult, index + 1, remaining - pi, term, sum);
  }
}

}  // namespace

double network_mgf_bound(std::span<const double> q_hat, std::span<const int> multiplicities,
                         int interval) {
  if (interval < 0) throw InvalidArgument("network_mgf_bound: interval must be >= 0");
  if (q_hat.empty() || q_hat.size() != multiplicities.size())
    throw InvalidArgument("network_mgf_bound: need one multiplicity per class");
  for (int m : multiplicities) {
    if (m < 1) throw InvalidArgument("network_mgf_bound: multiplicities must be >= 1");
  }
  if (interval == 0) return 1.0;
  const auto m = static_cast<std::int64_t>(q_hat.size());
  if (specfun::binomial(interval + m - 1, m - 1) > kMaxCompositions)
    throw CapExceededError("network_mgf_bound: more than 1e7 compositions for interval " +
                           std::to_string(interval));

  std::vector<double> log_q(q_hat.size());
  for (std::size_t i = 0; i < q_hat.size(); ++i) {
    if (!(q_hat[i] >= 0.0)) throw InvalidArgument("network_mgf_bound: q values must be >= 0");
    log_q[i] = std::log(q_hat[i]);
  }
  long double sum = 0.0L;
  enumerate_compositions(log_q, multiplicities, 0, interval, 0.0, sum);
  return static_cast<double>(sum);
}

double network_mgf_bound(const HopClassDecomposition& decomp, double theta, int interval) {
  const std::vector<double> q = decomp.q_values(theta);
  const std::vector<int> m = decomp.multiplicities();
  return network_mgf_bound(q, m, interval);
}

void ArrivalSpec::validate() const {
  if (!(rho_a >= 0.0) || !std::isfinite(rho_a))
    throw InvalidArgument("arrival rate must be finite and >= 0");
  if (!(delta_b >= 0.0) || !std::isfinite(delta_b))
    throw InvalidArgument("arrival burst must be finite and >= 0");
}

}  // namespace mmwnc
