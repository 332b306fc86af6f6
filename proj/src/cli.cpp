#include "fixedsnr/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <string>

#include "fixedsnr/errors.hpp"
#include "fixedsnr/report.hpp"

namespace fixedsnr {
namespace {

struct Options {
  NetworkParams net;
  SimulationParams sim;
  std::vector<int> ms{2, 3, 4};
  bool include_m5 = false;
  std::string dmax = "diagonal";
  std::string sub_reuse = "own-scale";
  std::string detection = "2";
  std::string mode = "synthetic";
  std::string format;
  std::string out;
  std::string trace;
};

void add_network_flags(CLI::App* app, Options& o, bool single_m) {
  if (single_m) {
    app->add_option("--m", o.net.m, "Grid parameter: n = m^6 nodes")->required();
  } else {
    app->add_option("--m", o.ms, "Grid parameters to sweep")->delimiter(',');
    app->add_flag("--include-m5", o.include_m5, "Append m = 5 to the sweep");
  }
  app->add_option("--alpha", o.net.alpha, "Path-loss exponent (> 2)");
  app->add_option("--snr0-db", o.net.snr0_db, "Worst-case SNR in dB");
  app->add_option("--k0", o.net.k0, "Guard factor for served sources");
  app->add_option("--b", o.net.b, "Block length in symbols");
  app->add_option("--seed", o.sim.seed, "Master seed");
  app->add_option("--max-colors", o.net.max_colors, "Colour budget per level");
  app->add_option("--dmax", o.dmax, "d_max convention: diagonal or realized");
  app->add_option("--sub-reuse", o.sub_reuse, "Sub-cluster reuse distance: own-scale or literal");
  app->add_flag("--allow-large-k0", o.net.allow_large_k0, "Accept k0 >= n^(1/6)");
  app->add_option("--format", o.format, "Output format: json or csv");
  app->add_option("--out", o.out, "Write the report to this file");
}

void add_simulation_flags(CLI::App* app, Options& o) {
  app->add_option("--trials", o.sim.trials, "Monte Carlo trials");
  app->add_option("--calibration-trials", o.sim.calibration_trials, "Trials used to fix the forwarding gains");
  app->add_option("--case", o.detection, "Exchange model: 1 (unit gains) or 2 (faded)");
  app->add_option("--mode", o.mode, "Interference model: synthetic or full");
  app->add_option("--parallel", o.sim.threads, "Worker threads (0 = all cores)");
  app->add_flag("--zero-perturbation", o.sim.zero_perturbation, "Force every amplitude perturbation to zero");
  app->add_flag("!--no-exchange-interference", o.sim.exchange_interference, "Drop exchange interference");
  app->add_flag("!--no-other-interference", o.sim.other_cluster_interference, "Drop other-cluster interference");
  app->add_option("--target-cluster", o.sim.target_cluster, "Reference cluster index");
  app->add_option("--target-sub", o.sim.target_sub, "Target sub-cluster position inside the cluster");
  app->add_option("--trace", o.trace, "Write per-trial component samples to this JSON file");
  app->add_option("--trace-trials", o.sim.trace_trials, "Number of trials kept in the trace");
}

void finish_options(Options& o) {
  o.net.dmax = parse_dmax(o.dmax);
  o.net.sub_reuse = parse_sub_reuse(o.sub_reuse);
  o.sim.detection = parse_detection(o.detection);
  o.sim.mode = parse_mode(o.mode);
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + o.out);
  f << text;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

int cmd_topology(Options& o, std::ostream& out) {
  finish_options(o);
  const Network net = build_network(o.net, o.sim.seed);
  if (!o.format.empty() && o.format != "json") throw ConfigError("topology supports json output only");
  emit(json_text(topology_json(net)), o, out);
  return kExitOk;
}

int cmd_simulate(Options& o, std::ostream& out, std::ostream& err) {
  finish_options(o);
  // Monte Carlo runs accept any guard factor; the served-source guarantee is
  // only reported, not enforced.
  if (o.net.k0 >= o.net.m && !o.net.allow_large_k0) {
    err << "warning: k0 = " << o.net.k0 << " is not below n^(1/6) = " << o.net.m << "\n";
  }
  o.net.allow_large_k0 = true;
  if (!o.trace.empty() && o.sim.trace_trials == 0) o.sim.trace_trials = std::min(o.sim.trials, 100);
  const SimulationResult r = simulate(o.net, o.sim);
  const std::string fmt = o.format.empty() ? "json" : o.format;
  if (fmt == "json") {
    emit(json_text(simulation_json(r, o.sim)), o, out);
  } else if (fmt == "csv") {
    emit(simulation_csv(r), o, out);
  } else {
    throw ConfigError("unknown format " + fmt);
  }
  if (!o.trace.empty()) {
    std::ofstream f(o.trace, std::ios::binary);
    if (!f) throw ConfigError("cannot open trace file " + o.trace);
    f << json_text(trace_json(r));
  }
  return kExitOk;
}

int cmd_sweep(Options& o, std::ostream& out) {
  finish_options(o);
  SweepConfig cfg;
  cfg.ms = o.ms;
  if (o.include_m5 && std::find(cfg.ms.begin(), cfg.ms.end(), 5) == cfg.ms.end()) cfg.ms.push_back(5);
  cfg.network = o.net;
  cfg.sim = o.sim;
  for (int m : cfg.ms) {
    NetworkParams p = o.net;
    p.m = m;
    p.validate();
  }
  const ScalingReport rep = sweep(cfg);
  const std::string fmt = o.format.empty() ? "csv" : o.format;
  if (fmt == "csv") {
    emit(sweep_csv(rep), o, out);
  } else if (fmt == "json") {
    emit(json_text(sweep_json(rep, cfg)), o, out);
  } else {
    throw ConfigError("unknown format " + fmt);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooperative relaying simulator for fixed-SNR wireless networks"};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);
  Options topo_o, sim_o, sweep_o;
  CLI::App* topo = app.add_subcommand("topology", "Build the grid, colourings and served sources");
  add_network_flags(topo, topo_o, true);
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the post-detection SINR");
  add_network_flags(sim, sim_o, true);
  add_simulation_flags(sim, sim_o);
  CLI::App* swp = app.add_subcommand("sweep", "Scaling sweep over several network sizes");
  add_network_flags(swp, sweep_o, false);
  add_simulation_flags(swp, sweep_o);
  swp->remove_option(swp->get_option("--trace"));
  swp->remove_option(swp->get_option("--trace-trials"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (*topo) return cmd_topology(topo_o, out);
    if (*sim) return cmd_simulate(sim_o, out, err);
    return cmd_sweep(sweep_o, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ColoringError& e) {
    err << "colouring error: " << e.what() << "\n";
    return kExitColoring;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace fixedsnr
