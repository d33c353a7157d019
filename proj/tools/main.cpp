// mmwnc: delay/backlog bounds, power allocation and simulation for
// full-duplex 60 GHz relay chains.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mmwnc/config.hpp"
#include "mmwnc/errors.hpp"
#include "mmwnc/experiments.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string epsilon;
  std::string delta;
  std::string out_path;
  std::uint64_t seed = 0;
  std::int64_t slots = 0;
  int replications = 0;
  bool strict = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "INI config file (defaults to the built-in reference scenario)");
  cmd->add_option("--epsilon", o.epsilon, "Comma-separated violation probabilities");
  cmd->add_option("--delta", o.delta, "Comma-separated discretization steps");
  cmd->add_option("--seed", o.seed, "Simulation seed");
  cmd->add_option("--slots", o.slots, "Simulated slots per replication");
  cmd->add_option("--replications", o.replications, "Independent simulation replications");
  cmd->add_flag("--strict", o.strict, "Exit non-zero if any row carries an error");
  cmd->add_option("--out", o.out_path, "Write CSV here instead of stdout");
}

mmwnc::ExperimentConfig resolve(const Options& o, const CLI::App& cmd) {
  mmwnc::ExperimentConfig c = o.config_path.empty() ? mmwnc::ExperimentConfig{}
                                                    : mmwnc::load_config(o.config_path);
  if (cmd.count("--epsilon")) c.epsilon = mmwnc::parse_list(o.epsilon);
  if (cmd.count("--delta")) c.delta = mmwnc::parse_list(o.delta);
  if (cmd.count("--seed")) c.sim_seed = o.seed;
  if (cmd.count("--slots")) c.sim_slots = o.slots;
  if (cmd.count("--replications")) c.sim_replications = o.replications;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic network calculus bounds for multi-hop 60 GHz full-duplex relaying"};
  app.require_subcommand(1);

  Options opts;
  using Command = int (*)(const mmwnc::ExperimentConfig&, std::ostream&);
  struct Entry {
    const char* name;
    const char* help;
    Command run;
  };
  const Entry entries[] = {
      {"bound", "Backlog and delay bounds over the epsilon, rate and delta sweeps", mmwnc::cmd_bound},
      {"power", "Optimal sum-power allocation", mmwnc::cmd_power},
      {"sweep-mu", "c(mu) and the delay bound across self-interference and relay counts",
       mmwnc::cmd_sweep_mu},
      {"simulate", "Monte Carlo violation frequencies next to the analytical bounds",
       mmwnc::cmd_simulate},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, opts);
    subs.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const auto config = resolve(opts, *subs[i]);
      int failed = 0;
      if (opts.out_path.empty()) {
        failed = entries[i].run(config, std::cout);
      } else {
        std::ofstream out(opts.out_path);
        if (!out) {
          std::cerr << "error: cannot write " << opts.out_path << '\n';
          return 2;
        }
        failed = entries[i].run(config, out);
      }
      if (failed > 0) std::cerr << failed << " row(s) reported errors\n";
      return opts.strict && failed > 0 ? 1 : 0;
    } catch (const mmwnc::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
