#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmwnc/channel.hpp"
#include "mmwnc/sim.hpp"

namespace mmwnc {

enum class AllocationMode { optimal, uniform, explicit_powers };

const char* to_string(AllocationMode m);
AllocationMode allocation_mode_from_string(const std::string& s);

/// Everything a CLI run needs. dB-valued inputs are kept in dB here and
/// converted when the scenario is built.
struct ExperimentConfig {
  ChannelParams channel;

  int n = 10;
  /// Either one length per hop or a single value repeated on every hop.
  std::vector<double> hop_lengths_m{500.0};
  /// Self-interference in dB, one per relay or a single shared value.
  std::vector<double> mu_db{-80.0};

  double p_tot_w = 50.0;
  AllocationMode allocation = AllocationMode::optimal;
  std::vector<double> powers_w;

  std::vector<double> rho_a_bits{1e9, 1.5e9, 2e9};
  double delta_b_bits = 0.0;

  std::vector<double> epsilon{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  std::vector<double> delta{1e-2, 1e-3};
  double tail_probability = 1e-9;
  int delay_cap_slots = 100'000;

  std::vector<double> sweep_mu_db{-140.0, -130.0, -120.0, -110.0, -100.0, -90.0, -80.0, -70.0, -60.0};
  std::vector<int> sweep_n{1, 2, 10, 20, 50};
  double sweep_total_length_m = 5000.0;
  double sweep_epsilon = 1e-6;

  std::int64_t sim_slots = 1'000'000;
  std::uint64_t sim_seed = 1;
  std::int64_t sim_warmup = 0;
  int sim_replications = 1;
  int workers = 0;
  SlotSemantics sim_semantics = SlotSemantics::cut_through;

  void validate() const;

  /// Topology with the configured lengths and mu values expanded to n.
  Topology topology() const;
  /// Per-hop shadowing expanded to n+1 entries.
  ChannelParams channel_for_topology() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

/// Comma-separated numbers, e.g. "1e-2, 1e-3".
std::vector<double> parse_list(const std::string& text);

}  // namespace mmwnc
