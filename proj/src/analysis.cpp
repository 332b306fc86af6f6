#include "fixedsnr/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "fixedsnr/errors.hpp"
#include "fixedsnr/stats.hpp"

namespace fixedsnr {

double gmi_lower_bound(double a_hat, double gain_var, double w_power, double es) {
  if (gain_var < 0.0 || w_power < 0.0 || es <= 0.0) throw ConfigError("GMI needs non-negative powers");
  if (w_power + es * gain_var <= 0.0) throw ConfigError("GMI needs a positive noise floor");
  return std::log2(1.0 + a_hat * a_hat * es / (w_power + es * gain_var));
}

GainStatistics gain_statistics(const std::vector<TrialRecord>& records, double kappa) {
  if (records.size() < 2) throw ConfigError("gain statistics need at least two trials");
  if (!(kappa > 0.0)) throw ConfigError("gain scale must be positive");
  CompensatedSum re, im;
  for (const auto& r : records) {
    re.add(r.A.real());
    im.add(r.A.imag());
  }
  const double N = static_cast<double>(records.size());
  const std::complex<double> mean(re.value() / N, im.value() / N);
  CompensatedSum dev;
  for (const auto& r : records) dev.add(std::norm(r.A - mean));
  GainStatistics g;
  g.trials = static_cast<int>(records.size());
  g.kappa = kappa;
  g.mean_A = mean.real();
  g.var_A = dev.value() / (N - 1.0);
  g.mean_A_raw = g.mean_A / kappa;
  g.var_A_raw = g.var_A / (kappa * kappa);
  g.se_mean_A_raw = std::sqrt(g.var_A_raw / N);
  return g;
}

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class Get>
Moments moments(const std::vector<TrialRecord>& records, Get get) {
  CompensatedSum s, s2;
  for (const auto& r : records) {
    const double x = get(r);
    s.add(x);
    s2.add(x * x);
  }
  const double N = static_cast<double>(records.size());
  Moments m;
  m.mean = s.value() / N;
  const double var = std::max(0.0, s2.value() / N - m.mean * m.mean) * N / std::max(1.0, N - 1.0);
  m.se = std::sqrt(var / N);
  return m;
}

}  // namespace

InterferenceBreakdown interference_breakdown(const std::vector<TrialRecord>& records, double kappa) {
  if (records.empty()) throw ConfigError("breakdown needs trials");
  InterferenceBreakdown w;
  w.trials = static_cast<int>(records.size());
  w.kappa = kappa;
  w.multiuser = moments(records, [](const TrialRecord& r) { return r.multiuser; }).mean;
  w.mac_noise = moments(records, [](const TrialRecord& r) { return r.mac_noise; }).mean;
  w.exchange_noise = moments(records, [](const TrialRecord& r) { return r.exchange_noise; }).mean;
  const Moments ex = moments(records, [](const TrialRecord& r) { return r.exchange; });
  w.exchange = ex.mean;
  w.se_exchange = ex.se;
  w.detection_noise = moments(records, [](const TrialRecord& r) { return r.detection_noise; }).mean;
  const Moments ot = moments(records, [](const TrialRecord& r) { return r.other; });
  w.other = ot.mean;
  w.se_other = ot.se;
  w.total = w.multiuser + w.mac_noise + w.exchange_noise + w.exchange + w.detection_noise + w.other;
  w.multiuser_raw = w.multiuser / (kappa * kappa);
  w.z_second_moment = moments(records, [](const TrialRecord& r) { return std::norm(r.z_direct); }).mean;
  return w;
}

double sinr_beta2(const GainStatistics& g, const InterferenceBreakdown& w, double es) {
  const double denom = w.total + es * g.var_A;
  if (!(denom > 0.0)) throw InvariantError("non-positive interference power");
  return g.mean_A * g.mean_A * es / denom;
}

double sinr_beta2_from_output(const GainStatistics& g, const InterferenceBreakdown& w) {
  const double a2 = g.mean_A * g.mean_A;
  return a2 / (w.z_second_moment - a2);
}

double gamma2_rate(double beta2) {
  if (beta2 < 0.0) throw ConfigError("beta2 must be non-negative");
  return 0.5 * std::log2(1.0 + beta2);
}

double error_prob_bound(int b, double rate_I, double rate_gamma) {
  if (b < 1) throw ConfigError("block length must be positive");
  const double factor = std::exp2(-(rate_I - rate_gamma));
  double p = 1.0;
  for (int i = 0; i < b; ++i) p *= factor;
  return std::clamp(p, 0.0, 1.0);
}

ErrorBound error_bound(int b, double rate_I, double rate_gamma) {
  return {error_prob_bound(b, rate_I, rate_gamma), rate_gamma > rate_I};
}

PowerAudit power_audit(const std::vector<TrialRecord>& records) {
  PowerAudit a;
  if (records.empty()) return a;
  const std::size_t nodes = records.front().forward_power.size();
  const double N = static_cast<double>(records.size());
  for (std::size_t k = 0; k < nodes; ++k) {
    CompensatedSum f, r;
    for (const auto& rec : records) {
      f.add(rec.forward_power[k]);
      r.add(rec.relay_power[k]);
    }
    a.max_forward_power = std::max(a.max_forward_power, f.value() / N);
    a.max_relay_power = std::max(a.max_relay_power, r.value() / N);
  }
  return a;
}

}  // namespace fixedsnr
