#include "fixedsnr/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "fixedsnr/errors.hpp"

namespace fixedsnr {

double isolation_capacity(double n, double snr0) {
  if (!(n > 0.0) || !(snr0 > 0.0)) throw ConfigError("isolation capacity needs positive n and SNR0");
  return n / 4.0 * std::log2(1.0 + snr0);
}

double network_sum_rate(long long served, double gamma2, int M, int c0_cluster, int c0_sub) {
  if (served < 0 || gamma2 < 0.0 || M < 1 || c0_cluster < 1 || c0_sub < 1) {
    throw ConfigError("sum rate needs non-negative rates and positive sizes");
  }
  return static_cast<double>(served) * gamma2 / (static_cast<double>(1 + c0_sub + c0_cluster) * M);
}

double rho(double sum_rate, double isolation) {
  if (!(isolation > 0.0)) throw ConfigError("isolation capacity must be positive");
  return sum_rate / isolation;
}

double multihop_baseline(double n, double c) {
  if (!(n > 0.0)) throw ConfigError("n must be positive");
  return c / std::sqrt(n);
}

PowerFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw ConfigError("power fit needs at least three paired points");
  const std::size_t N = x.size();
  std::vector<double> lx(N), ly(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("power fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("power fit needs distinct x values");
  PowerFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    sse += e * e;
  }
  f.stderr_slope = std::sqrt(sse / static_cast<double>(N - 2) / sxx);
  f.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return f;
}

SimulationResult simulate(const NetworkParams& params, const SimulationParams& sim) {
  sim.validate();
  SimulationResult res;
  res.net = build_network(params, sim.seed);
  DetectionContext ctx = build_context(res.net, sim);
  res.calibration = calibrate(ctx, sim.seed, sim.calibration_trials, sim.threads);
  const std::vector<TrialRecord> recs = run_trials(ctx, derive_seed(sim.seed, "trials", {}), sim.trials, sim.threads);
  res.gain = gain_statistics(recs, ctx.kappa());
  res.breakdown = interference_breakdown(recs, ctx.kappa());
  res.power = power_audit(recs);
  res.beta2 = sinr_beta2(res.gain, res.breakdown);
  res.beta2_output = sinr_beta2_from_output(res.gain, res.breakdown);
  res.gamma2 = gamma2_rate(res.beta2);
  const Network& net = res.net;
  const int M = params.M();
  res.ledger = ledger_total(M, params.b, net.cluster_colors.colors, net.sub_colors.colors);
  res.sum_rate = network_sum_rate(net.admissible.served_total, res.gamma2, M, net.cluster_colors.colors,
                                  net.sub_colors.colors);
  res.sum_rate_ledger = static_cast<double>(net.admissible.served_total) * res.gamma2 * params.b /
                        static_cast<double>(res.ledger.total);
  res.isolation = isolation_capacity(static_cast<double>(params.n()), params.snr0());
  res.rho = rho(res.sum_rate, res.isolation);
  res.rho_multihop = multihop_baseline(static_cast<double>(params.n()));
  res.error_bound = error_prob_bound(params.b, res.gamma2, 0.5 * res.gamma2);
  const int keep = std::min<int>(sim.trace_trials, static_cast<int>(recs.size()));
  res.trace.assign(recs.begin(), recs.begin() + keep);
  return res;
}

ScalingReport sweep(const SweepConfig& config) {
  ScalingReport rep;
  for (int m : config.ms) {
    ScalingPoint pt;
    pt.m = m;
    pt.M = m * m;
    pt.n = static_cast<long long>(pt.M) * pt.M * pt.M;
    try {
      NetworkParams np = config.network;
      np.m = m;
      SimulationParams sp = config.sim;
      sp.seed = derive_seed(config.sim.seed, "sweep-point", {static_cast<std::uint64_t>(m)});
      sp.trace_trials = 0;
      const SimulationResult r = simulate(np, sp);
      pt.served = r.net.admissible.served_total;
      pt.c0_cluster = r.net.cluster_colors.colors;
      pt.c0_sub = r.net.sub_colors.colors;
      pt.beta2 = r.beta2;
      pt.gamma2 = r.gamma2;
      pt.sum_rate = r.sum_rate;
      pt.rho = r.rho;
      pt.rho_multihop = r.rho_multihop;
      pt.total_channel_uses_per_b = r.ledger.total / np.b;
      pt.xi1 = r.calibration.xi1;
      pt.xi = r.calibration.xi;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    rep.points.push_back(pt);
  }
  std::vector<double> xs, sums, rhos;
  std::vector<double> ratio;
  for (const auto& p : rep.points) {
    if (!p.error.empty() || !(p.sum_rate > 0.0)) continue;
    xs.push_back(static_cast<double>(p.n));
    sums.push_back(p.sum_rate);
    rhos.push_back(p.rho);
    ratio.push_back(p.rho / p.rho_multihop);
  }
  if (xs.size() >= 3) {
    rep.sum_rate_fit = fit_exponent(xs, sums);
    rep.rho_fit = fit_exponent(xs, rhos);
  }
  rep.ratio_increasing = ratio.size() >= 2;
  for (std::size_t i = 1; i < ratio.size(); ++i)
    if (!(ratio[i] > ratio[i - 1])) rep.ratio_increasing = false;
  return rep;
}

}  // namespace fixedsnr
