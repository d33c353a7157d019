#include "mmwnc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mmwnc/errors.hpp"

namespace mmwnc {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "-inf" || s == "-Inf") return -INFINITY;
  if (s == "inf" || s == "Inf") return INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("not a number: '" + raw + "'");
  return v;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out;
}

std::vector<int> to_ints(const std::vector<double>& v, const std::string& key) {
  std::vector<int> out;
  for (double x : v) {
    if (x != std::floor(x)) throw ConfigError(key + ": expected integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

class Reader {
public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  void number(const char* key, double& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) out = parse_number(*v);
  }
  template <class Int>
  void integer(const char* key, Int& out) const {
    auto s = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!s) return;
    const std::string t = trim(*s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && ptr == t.data() + t.size() && !t.empty()) {
      out = v;
      return;
    }
    // Accept integral values written in floating notation, e.g. 1e7.
    const double d = parse_number(t);
    if (d != std::floor(d) || (d < 0.0 && std::is_unsigned_v<Int>))
      throw ConfigError(std::string(key) + ": expected an integer");
    out = static_cast<Int>(d);
  }
  void list(const char* key, std::vector<double>& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) out = parse_list(*v);
  }
  void text(const char* key, std::string& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) out = trim(*v);
  }

private:
  const pt::ptree& tree_;
};

const char* const kKnownKeys[] = {
    "channel.alpha", "channel.beta", "channel.sigma_db", "channel.kappa_db",
    "channel.bandwidth_hz", "channel.noise_density_dbm_per_mhz",
    "topology.n", "topology.hop_lengths_m", "topology.mu_db",
    "power.p_tot_w", "power.allocation", "power.powers_w",
    "arrival.rho_a_bits", "arrival.delta_b_bits",
    "bound.epsilon", "bound.delta", "bound.tail_probability", "bound.delay_cap_slots",
    "sweep.mu_db", "sweep.n", "sweep.total_length_m", "sweep.epsilon",
    "sim.slots", "sim.seed", "sim.warmup", "sim.replications", "sim.workers", "sim.semantics",
};

void reject_unknown(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      bool known = false;
      for (const char* k : kKnownKeys) known = known || full == k;
      if (!known) throw ConfigError("unknown config key '" + full + "'");
    }
  }
}

template <class T>
std::vector<T> expand(const std::vector<T>& v, std::size_t count, const char* what) {
  if (v.size() == count) return v;
  if (v.size() == 1) return std::vector<T>(count, v.front());
  throw ConfigError(std::string(what) + ": expected 1 or " + std::to_string(count) + " values, got " +
                    std::to_string(v.size()));
}

}  // namespace

const char* to_string(AllocationMode m) {
  switch (m) {
    case AllocationMode::optimal: return "optimal";
    case AllocationMode::uniform: return "uniform";
    case AllocationMode::explicit_powers: return "explicit";
  }
  return "optimal";
}

AllocationMode allocation_mode_from_string(const std::string& s) {
  if (s == "optimal") return AllocationMode::optimal;
  if (s == "uniform") return AllocationMode::uniform;
  if (s == "explicit") return AllocationMode::explicit_powers;
  throw ConfigError("unknown allocation mode '" + s + "' (optimal, uniform, explicit)");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number(item));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (n < 0) throw ConfigError("topology.n must be >= 0");
  const auto hops = static_cast<std::size_t>(n) + 1;
  expand(hop_lengths_m, hops, "topology.hop_lengths_m");
  expand(mu_db, static_cast<std::size_t>(n) == 0 ? 0 : static_cast<std::size_t>(n), "topology.mu_db");
  expand(channel.sigma_db, hops, "channel.sigma_db");
  if (!(p_tot_w > 0.0)) throw ConfigError("power.p_tot_w must be positive");
  if (allocation == AllocationMode::explicit_powers && powers_w.size() != hops)
    throw ConfigError("power.powers_w needs n+1 = " + std::to_string(hops) + " entries");
  if (rho_a_bits.empty()) throw ConfigError("arrival.rho_a_bits must not be empty");
  if (epsilon.empty()) throw ConfigError("bound.epsilon must not be empty");
  if (delta.empty()) throw ConfigError("bound.delta must not be empty");
  if (sweep_mu_db.empty()) throw ConfigError("sweep.mu_db must not be empty");
  if (sweep_n.empty()) throw ConfigError("sweep.n must not be empty");
  for (double e : epsilon) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("bound.epsilon values must lie in (0, 1)");
  }
  for (double d : delta) {
    if (!(d > 0.0)) throw ConfigError("bound.delta values must be positive");
  }
  for (double r : rho_a_bits) {
    if (!(r >= 0.0)) throw ConfigError("arrival.rho_a_bits values must be >= 0");
  }
  if (!(sweep_epsilon > 0.0 && sweep_epsilon < 1.0)) throw ConfigError("sweep.epsilon must lie in (0, 1)");
  if (sim_slots <= 0 || sim_warmup < 0 || sim_warmup >= sim_slots)
    throw ConfigError("sim: need slots > warmup >= 0");
  if (sim_replications < 1) throw ConfigError("sim.replications must be >= 1");
}

Topology ExperimentConfig::topology() const {
  validate();
  Topology t;
  t.n = n;
  t.lengths_m = expand(hop_lengths_m, static_cast<std::size_t>(n) + 1, "topology.hop_lengths_m");
  if (n > 0) {
    for (double db : expand(mu_db, static_cast<std::size_t>(n), "topology.mu_db")) {
      t.mu.push_back(db_to_linear(db));
    }
  }
  t.validate();
  return t;
}

ChannelParams ExperimentConfig::channel_for_topology() const {
  ChannelParams p = channel;
  p.sigma_db = expand(channel.sigma_db, static_cast<std::size_t>(n) + 1, "channel.sigma_db");
  return p;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  reject_unknown(tree);

  ExperimentConfig c;
  const Reader r(tree);
  r.number("channel.alpha", c.channel.alpha);
  r.number("channel.beta", c.channel.beta);
  r.list("channel.sigma_db", c.channel.sigma_db);
  r.number("channel.kappa_db", c.channel.kappa_db);
  r.number("channel.bandwidth_hz", c.channel.bandwidth_hz);
  r.number("channel.noise_density_dbm_per_mhz", c.channel.noise_density_dbm_per_mhz);

  r.integer("topology.n", c.n);
  r.list("topology.hop_lengths_m", c.hop_lengths_m);
  r.list("topology.mu_db", c.mu_db);

  r.number("power.p_tot_w", c.p_tot_w);
  std::string mode = to_string(c.allocation);
  r.text("power.allocation", mode);
  c.allocation = allocation_mode_from_string(mode);
  r.list("power.powers_w", c.powers_w);

  r.list("arrival.rho_a_bits", c.rho_a_bits);
  r.number("arrival.delta_b_bits", c.delta_b_bits);

  r.list("bound.epsilon", c.epsilon);
  r.list("bound.delta", c.delta);
  r.number("bound.tail_probability", c.tail_probability);
  r.integer("bound.delay_cap_slots", c.delay_cap_slots);

  r.list("sweep.mu_db", c.sweep_mu_db);
  std::vector<double> ns;
  r.list("sweep.n", ns);
  if (!ns.empty() || tree.get_optional<std::string>("sweep.n")) c.sweep_n = to_ints(ns, "sweep.n");
  r.number("sweep.total_length_m", c.sweep_total_length_m);
  r.number("sweep.epsilon", c.sweep_epsilon);

  r.integer("sim.slots", c.sim_slots);
  r.integer("sim.seed", c.sim_seed);
  r.integer("sim.warmup", c.sim_warmup);
  r.integer("sim.replications", c.sim_replications);
  r.integer("sim.workers", c.workers);
  std::string sem = to_string(c.sim_semantics);
  r.text("sim.semantics", sem);
  c.sim_semantics = slot_semantics_from_string(sem);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  pt::ptree tree;
  auto put = [&](const char* key, const std::string& value) {
    tree.put(pt::ptree::path_type(key, '.'), value);
  };
  put("channel.alpha", format_number(c.channel.alpha));
  put("channel.beta", format_number(c.channel.beta));
  put("channel.sigma_db", format_list(c.channel.sigma_db));
  put("channel.kappa_db", format_number(c.channel.kappa_db));
  put("channel.bandwidth_hz", format_number(c.channel.bandwidth_hz));
  put("channel.noise_density_dbm_per_mhz", format_number(c.channel.noise_density_dbm_per_mhz));

  put("topology.n", std::to_string(c.n));
  put("topology.hop_lengths_m", format_list(c.hop_lengths_m));
  put("topology.mu_db", format_list(c.mu_db));

  put("power.p_tot_w", format_number(c.p_tot_w));
  put("power.allocation", to_string(c.allocation));
  if (!c.powers_w.empty()) put("power.powers_w", format_list(c.powers_w));

  put("arrival.rho_a_bits", format_list(c.rho_a_bits));
  put("arrival.delta_b_bits", format_number(c.delta_b_bits));

  put("bound.epsilon", format_list(c.epsilon));
  put("bound.delta", format_list(c.delta));
  put("bound.tail_probability", format_number(c.tail_probability));
  put("bound.delay_cap_slots", std::to_string(c.delay_cap_slots));

  put("sweep.mu_db", format_list(c.sweep_mu_db));
  std::vector<double> ns(c.sweep_n.begin(), c.sweep_n.end());
  put("sweep.n", format_list(ns));
  put("sweep.total_length_m", format_number(c.sweep_total_length_m));
  put("sweep.epsilon", format_number(c.sweep_epsilon));

  put("sim.slots", std::to_string(c.sim_slots));
  put("sim.seed", std::to_string(c.sim_seed));
  put("sim.warmup", std::to_string(c.sim_warmup));
  put("sim.replications", std::to_string(c.sim_replications));
  put("sim.workers", std::to_string(c.workers));
  put("sim.semantics", to_string(c.sim_semantics));

  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

}  // namespace mmwnc
