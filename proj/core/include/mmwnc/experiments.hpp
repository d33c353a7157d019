#pragma once

#include <iosfwd>

#include "mmwnc/config.hpp"
#include "mmwnc/mgf_bounds.hpp"
#include "mmwnc/netcalc.hpp"

namespace mmwnc {

/// A configured network with its power allocation applied.
struct Scenario {
  ChannelParams channel;
  Topology topology;
  PowerAllocation allocation;
  SinrModel model;
  double lambda_tot = 0.0;
};

Scenario build_scenario(const ExperimentConfig& config);
DiscretizationOptions discretization(const ExperimentConfig& config, double delta);
SearchOptions search_options(const ExperimentConfig& config);

/// Each command writes one CSV table and returns the number of rows that
/// carry an error instead of a value.
int cmd_bound(const ExperimentConfig& config, std::ostream& out);
int cmd_power(const ExperimentConfig& config, std::ostream& out);
int cmd_sweep_mu(const ExperimentConfig& config, std::ostream& out);
int cmd_simulate(const ExperimentConfig& config, std::ostream& out);

}  // namespace mmwnc
