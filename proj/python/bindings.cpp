#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fixedsnr/analysis.hpp"
#include "fixedsnr/cli.hpp"
#include "fixedsnr/errors.hpp"
#include "fixedsnr/report.hpp"
#include "fixedsnr/scaling.hpp"

namespace py = pybind11;
using namespace fixedsnr;

namespace {

NetworkParams network(int m, double alpha, double snr0_db, int k0, int b, bool allow_large_k0) {
  NetworkParams p;
  p.m = m;
  p.alpha = alpha;
  p.snr0_db = snr0_db;
  p.k0 = k0;
  p.b = b;
  p.allow_large_k0 = allow_large_k0;
  return p;
}

SimulationParams simulation(int trials, int calibration_trials, int detection, const std::string& mode,
                            std::uint64_t seed, int threads, bool zero_perturbation) {
  SimulationParams s;
  s.trials = trials;
  s.calibration_trials = calibration_trials;
  s.detection = parse_detection(std::to_string(detection));
  s.mode = parse_mode(mode);
  s.seed = seed;
  s.threads = threads;
  s.zero_perturbation = zero_perturbation;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Fixed-SNR cooperative relaying simulator";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<ColoringError>(mod, "ColoringError", PyExc_RuntimeError);
  py::register_exception<InvariantError>(mod, "InvariantError", PyExc_RuntimeError);

  mod.def(
      "topology_json",
      [](int m, std::uint64_t seed, int k0, double alpha, int max_colors) {
        NetworkParams p = network(m, alpha, 10.0, k0, 100, false);
        p.max_colors = max_colors;
        return topology_json(build_network(p, seed)).dump();
      },
      py::arg("m"), py::arg("seed") = 1, py::arg("k0") = 2, py::arg("alpha") = 3.0, py::arg("max_colors") = 19);

  mod.def(
      "simulate_json",
      [](int m, int trials, int calibration_trials, int detection, const std::string& mode, std::uint64_t seed,
         int k0, double alpha, double snr0_db, int threads, bool zero_perturbation) {
        const SimulationParams s =
            simulation(trials, calibration_trials, detection, mode, seed, threads, zero_perturbation);
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate(network(m, alpha, snr0_db, k0, 100, true), s);
        }
        return simulation_json(r, s).dump();
      },
      py::arg("m"), py::arg("trials") = 10000, py::arg("calibration_trials") = 2000, py::arg("detection") = 2,
      py::arg("mode") = "synthetic", py::arg("seed") = 1, py::arg("k0") = 1, py::arg("alpha") = 3.0,
      py::arg("snr0_db") = 10.0, py::arg("threads") = 0, py::arg("zero_perturbation") = false);

  mod.def(
      "sweep_json",
      [](const std::vector<int>& ms, int trials, int k0, std::uint64_t seed, int threads) {
        SweepConfig cfg;
        cfg.ms = ms;
        cfg.network = network(ms.empty() ? 2 : ms.front(), 3.0, 10.0, k0, 100, false);
        cfg.sim = simulation(trials, 2000, 2, "synthetic", seed, threads, false);
        ScalingReport rep;
        {
          py::gil_scoped_release release;
          rep = sweep(cfg);
        }
        return sweep_json(rep, cfg).dump();
      },
      py::arg("ms") = std::vector<int>{2, 3, 4}, py::arg("trials") = 10000, py::arg("k0") = 1, py::arg("seed") = 1,
      py::arg("threads") = 0);

  mod.def(
      "ledger_total",
      [](int M, int b, int c0_cluster, int c0_sub) {
        const ChannelUseLedger l = ledger_total(M, b, c0_cluster, c0_sub);
        py::dict d;
        d["transmission"] = l.transmission;
        d["exchange"] = l.exchange;
        d["detection"] = l.detection;
        d["total"] = l.total;
        d["bound"] = l.bound;
        return d;
      },
      py::arg("M"), py::arg("b"), py::arg("c0_cluster"), py::arg("c0_sub"));

  mod.def("gmi_lower_bound", &gmi_lower_bound, py::arg("a_hat"), py::arg("gain_var"), py::arg("w_power"),
          py::arg("es") = 1.0);
  mod.def("gamma2_rate", &gamma2_rate, py::arg("beta2"));
  mod.def("error_prob_bound", &error_prob_bound, py::arg("b"), py::arg("rate_I"), py::arg("rate_gamma"));
  mod.def("isolation_capacity", &isolation_capacity, py::arg("n"), py::arg("snr0"));
  mod.def("network_sum_rate", &network_sum_rate, py::arg("served"), py::arg("gamma2"), py::arg("M"),
          py::arg("c0_cluster"), py::arg("c0_sub"));
  mod.def(
      "fit_exponent",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        const PowerFit f = fit_exponent(x, y);
        return py::make_tuple(f.slope, f.intercept, f.stderr_slope, f.r2);
      },
      py::arg("x"), py::arg("y"));

  mod.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"fixedsnr"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
