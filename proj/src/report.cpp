#include "fixedsnr/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace fixedsnr {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json to_json(const NetworkParams& p) {
  return Json{{"m", p.m},
              {"M", p.M()},
              {"n", p.n()},
              {"alpha", p.alpha},
              {"snr0_db", p.snr0_db},
              {"k0", p.k0},
              {"b", p.b},
              {"max_colors", p.max_colors},
              {"dmax", to_string(p.dmax)},
              {"sub_reuse", to_string(p.sub_reuse)},
              {"allow_large_k0", p.allow_large_k0}};
}

Json to_json(const SimulationParams& p) {
  return Json{{"case", static_cast<int>(p.detection)},
              {"mode", to_string(p.mode)},
              {"trials", p.trials},
              {"calibration_trials", p.calibration_trials},
              {"seed", p.seed},
              {"zero_perturbation", p.zero_perturbation},
              {"exchange_interference", p.exchange_interference},
              {"other_cluster_interference", p.other_cluster_interference},
              {"target_cluster", p.target_cluster},
              {"target_sub", p.target_sub}};
}

Json to_json(const ChannelUseLedger& l) {
  return Json{{"M", l.M},
              {"b", l.b},
              {"c0_cluster", l.c0_cluster},
              {"c0_sub", l.c0_sub},
              {"transmission", l.transmission},
              {"exchange", l.exchange},
              {"detection", l.detection},
              {"total", l.total},
              {"bound", l.bound}};
}

Json to_json(const PowerFit& f) {
  return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"stderr", f.stderr_slope}, {"r2", f.r2}};
}

namespace {

Json rect_json(const Rect& r) { return Json::array({r.x0, r.x1, r.y0, r.y1}); }

}  // namespace

Json topology_json(const Network& net) {
  const ClusterPlan& plan = net.plan;
  Json subs = Json::array();
  for (const auto& s : plan.subs) {
    subs.push_back(Json{{"index", s.index},
                        {"cluster", s.cluster},
                        {"rect", rect_json(s.rect)},
                        {"color", net.sub_colors.color_of[s.index]}});
  }
  Json clusters = Json::array();
  for (const auto& c : plan.clusters) {
    clusters.push_back(Json{{"index", c.index},
                            {"sub_clusters", c.subs},
                            {"center", Json::array({c.center.x, c.center.y})},
                            {"color", net.cluster_colors.color_of[c.index]},
                            {"served", net.admissible.per_cluster[c.index].size()}});
  }
  Json pairs = Json::array();
  for (NodeId v : net.topo.transmit) pairs.push_back(Json::array({v, net.pairing.destination_of[v]}));
  const ChannelUseLedger ledger =
      ledger_total(plan.M, net.params.b, net.cluster_colors.colors, net.sub_colors.colors);
  return Json{{"params", to_json(net.params)},
              {"side", net.topo.side},
              {"d_max", net.d_max},
              {"d_max_diagonal", net.topo.d_max},
              {"d_max_realized", net.pairing.realized_dmax},
              {"transmit_count", net.topo.transmit.size()},
              {"receive_count", net.topo.receive.size()},
              {"idle_count", net.topo.idle.size()},
              {"dropped_receive_count", plan.dropped.size()},
              {"cluster_threshold", net.cluster_colors.threshold},
              {"sub_threshold", net.sub_colors.threshold},
              {"c0_cluster", net.cluster_colors.colors},
              {"c0_sub", net.sub_colors.colors},
              {"served_total", net.admissible.served_total},
              {"ledger", to_json(ledger)},
              {"clusters", clusters},
              {"sub_clusters", subs},
              {"pairs", pairs}};
}

Json simulation_json(const SimulationResult& r, const SimulationParams& sim) {
  const GainStatistics& g = r.gain;
  const InterferenceBreakdown& w = r.breakdown;
  const double k2 = g.kappa * g.kappa;
  return Json{
      {"params", to_json(r.net.params)},
      {"simulation", to_json(sim)},
      {"served_total", r.net.admissible.served_total},
      {"c0_cluster", r.net.cluster_colors.colors},
      {"c0_sub", r.net.sub_colors.colors},
      {"calibration",
       Json{{"xi1", r.calibration.xi1}, {"xi", r.calibration.xi}, {"c9", r.calibration.c9},
            {"c10", r.calibration.c10}, {"trials", r.calibration.trials}}},
      {"gain",
       Json{{"kappa", g.kappa}, {"mean_A", g.mean_A}, {"var_A", g.var_A}, {"mean_A_raw", g.mean_A_raw},
            {"var_A_raw", g.var_A_raw}, {"se_mean_A_raw", g.se_mean_A_raw}}},
      {"interference",
       Json{{"multiuser", w.multiuser}, {"mac_noise", w.mac_noise}, {"exchange_noise", w.exchange_noise},
            {"exchange", w.exchange}, {"exchange_se", w.se_exchange}, {"detection_noise", w.detection_noise},
            {"other", w.other}, {"other_se", w.se_other}, {"total", w.total},
            {"multiuser_raw", w.multiuser_raw}, {"total_raw", w.total / k2}}},
      {"power", Json{{"max_forward", r.power.max_forward_power}, {"max_relay", r.power.max_relay_power}}},
      {"beta2", r.beta2},
      {"beta2_output", r.beta2_output},
      {"gamma2_bits", r.gamma2},
      {"sum_rate", r.sum_rate},
      {"sum_rate_ledger", r.sum_rate_ledger},
      {"isolation_capacity", r.isolation},
      {"rho", r.rho},
      {"rho_in_unit_interval", r.rho > 0.0 && r.rho <= 1.0},
      {"rho_multihop", r.rho_multihop},
      {"error_bound_half_rate", r.error_bound},
      {"ledger", to_json(r.ledger)}};
}

Json trace_json(const SimulationResult& r) {
  auto c = [](std::complex<double> z) { return Json::array({z.real(), z.imag()}); };
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TrialRecord& t = r.trace[i];
    rows.push_back(Json{{"trial", i},
                        {"signal", c(t.signal)},
                        {"multiuser", c(t.multiuser_s)},
                        {"mac_noise", c(t.mac_noise_s)},
                        {"exchange_noise", c(t.exchange_noise_s)},
                        {"exchange", c(t.exchange_s)},
                        {"detection_noise", c(t.detection_noise_s)},
                        {"other", c(t.other_s)},
                        {"z", c(t.z_direct)},
                        {"A", c(t.A)}});
  }
  return Json{{"node", 0}, {"trials", rows}};
}

const char* const kSweepCsvHeader =
    "m,M,n,served,c0_cluster,c0_sub,gamma2_bits,sum_rate,rho,rho_multihop,total_channel_uses_per_b";

namespace {

std::string csv_row(int m, int M, long long n, long long served, int c0c, int c0s, double gamma2, double sum,
                    double rho_v, double mh, long long uses) {
  std::ostringstream os;
  os << m << ',' << M << ',' << n << ',' << served << ',' << c0c << ',' << c0s << ',' << format_double(gamma2)
     << ',' << format_double(sum) << ',' << format_double(rho_v) << ',' << format_double(mh) << ',' << uses
     << '\n';
  return os.str();
}

}  // namespace

std::string sweep_csv(const ScalingReport& rep) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& p : rep.points) {
    if (!p.error.empty()) continue;
    out += csv_row(p.m, p.M, p.n, p.served, p.c0_cluster, p.c0_sub, p.gamma2, p.sum_rate, p.rho, p.rho_multihop,
                   p.total_channel_uses_per_b);
  }
  return out;
}

std::string simulation_csv(const SimulationResult& r) {
  const NetworkParams& p = r.net.params;
  return std::string(kSweepCsvHeader) + "\n" +
         csv_row(p.m, p.M(), p.n(), r.net.admissible.served_total, r.net.cluster_colors.colors,
                 r.net.sub_colors.colors, r.gamma2, r.sum_rate, r.rho, r.rho_multihop, r.ledger.total / p.b);
}

Json sweep_json(const ScalingReport& rep, const SweepConfig& config) {
  Json pts = Json::array();
  for (const auto& p : rep.points) {
    Json j{{"m", p.m}, {"M", p.M}, {"n", p.n}};
    if (!p.error.empty()) {
      j["error"] = p.error;
    } else {
      j["served"] = p.served;
      j["c0_cluster"] = p.c0_cluster;
      j["c0_sub"] = p.c0_sub;
      j["beta2"] = p.beta2;
      j["gamma2_bits"] = p.gamma2;
      j["sum_rate"] = p.sum_rate;
      j["rho"] = p.rho;
      j["rho_multihop"] = p.rho_multihop;
      j["total_channel_uses_per_b"] = p.total_channel_uses_per_b;
      j["xi1"] = p.xi1;
      j["xi"] = p.xi;
    }
    pts.push_back(std::move(j));
  }
  Json out{{"params", to_json(config.network)}, {"simulation", to_json(config.sim)}, {"points", pts}};
  out["sum_rate_fit"] = rep.sum_rate_fit ? to_json(*rep.sum_rate_fit) : Json(nullptr);
  out["rho_fit"] = rep.rho_fit ? to_json(*rep.rho_fit) : Json(nullptr);
  out["ratio_to_multihop_increasing"] = rep.ratio_increasing;
  return out;
}

}  // namespace fixedsnr
