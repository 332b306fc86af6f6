#pragma once

#include <vector>

#include "fixedsnr/protocol.hpp"

namespace fixedsnr {

// Achievable rate log2(1 + a^2 Es / (W + Es * gain_var)) of a link whose gain
// is known only through its mean `a_hat`.
double gmi_lower_bound(double a_hat, double gain_var, double w_power, double es = 1.0);

struct GainStatistics {
  int trials = 0;
  double kappa = 0.0;       // full-gain scale, A = kappa * A_raw
  double mean_A = 0.0;      // real part of the sample mean
  double var_A = 0.0;       // E|A - mean|^2
  double mean_A_raw = 0.0;
  double var_A_raw = 0.0;
  double se_mean_A_raw = 0.0;
};

GainStatistics gain_statistics(const std::vector<TrialRecord>& records, double kappa);

// Per-dimension powers of every non-signal term at the target, full gain.
struct InterferenceBreakdown {
  int trials = 0;
  double kappa = 0.0;
  double multiuser = 0.0;
  double mac_noise = 0.0;
  double exchange_noise = 0.0;
  double exchange = 0.0;
  double detection_noise = 0.0;
  double other = 0.0;
  double total = 0.0;
  double se_exchange = 0.0;
  double se_other = 0.0;
  double multiuser_raw = 0.0;  // multiuser / kappa^2

  // Second moment of the detector output, estimated from the raw samples.
  double z_second_moment = 0.0;
};

InterferenceBreakdown interference_breakdown(const std::vector<TrialRecord>& records, double kappa);

double sinr_beta2(const GainStatistics& g, const InterferenceBreakdown& w, double es = 1.0);

// Same quantity recomputed from E|Z|^2 - mean^2 alone.
double sinr_beta2_from_output(const GainStatistics& g, const InterferenceBreakdown& w);

// 1/2 log2(1 + beta2) for real-valued Gaussian inputs.
double gamma2_rate(double beta2);

// min(1, 2^(-b (I - Gamma))), evaluated as a b-fold product so that each extra
// block bit multiplies the bound by exactly the same factor.
double error_prob_bound(int b, double rate_I, double rate_gamma);

struct ErrorBound {
  double value = 1.0;
  bool vacuous = false;  // set when the code rate exceeds the achievable rate
};

ErrorBound error_bound(int b, double rate_I, double rate_gamma);

struct PowerAudit {
  double max_forward_power = 0.0;  // largest per-node mean
  double max_relay_power = 0.0;
};

PowerAudit power_audit(const std::vector<TrialRecord>& records);

}  // namespace fixedsnr
