#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fixedsnr/analysis.hpp"
#include "fixedsnr/params.hpp"
#include "fixedsnr/protocol.hpp"

namespace fixedsnr {

// Sum of n/2 isolated point-to-point capacities of 1/2 log2(1 + SNR0).
double isolation_capacity(double n, double snr0);

// served * gamma2 / ((1 + c0_sub + c0_cluster) * M).
double network_sum_rate(long long served, double gamma2, int M, int c0_cluster, int c0_sub);

double rho(double sum_rate, double isolation);

// c / sqrt(n), the efficiency of interference-avoiding multi-hop relaying.
double multihop_baseline(double n, double c = 1.0);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
};

// Least-squares fit of log y against log x.
PowerFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// Everything a single simulate run reports.
struct SimulationResult {
  Network net;
  Calibration calibration;
  GainStatistics gain;
  InterferenceBreakdown breakdown;
  PowerAudit power;
  ChannelUseLedger ledger;
  double beta2 = 0.0;
  double beta2_output = 0.0;
  double gamma2 = 0.0;
  double sum_rate = 0.0;
  double sum_rate_ledger = 0.0;  // served * gamma2 * b / ledger total
  double isolation = 0.0;
  double rho = 0.0;
  double rho_multihop = 0.0;
  double error_bound = 0.0;  // block error bound at half the achievable rate
  std::vector<TrialRecord> trace;
};

SimulationResult simulate(const NetworkParams& params, const SimulationParams& sim);

struct ScalingPoint {
  int m = 0;
  int M = 0;
  long long n = 0;
  long long served = 0;
  int c0_cluster = 0;
  int c0_sub = 0;
  double beta2 = 0.0;
  double gamma2 = 0.0;
  double sum_rate = 0.0;
  double rho = 0.0;
  double rho_multihop = 0.0;
  long long total_channel_uses_per_b = 0;
  double xi1 = 0.0;
  double xi = 0.0;
  std::string error;  // empty when the point succeeded
};

struct SweepConfig {
  std::vector<int> ms{2, 3, 4};
  NetworkParams network;
  SimulationParams sim;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  std::optional<PowerFit> sum_rate_fit;
  std::optional<PowerFit> rho_fit;
  bool ratio_increasing = false;
};

// Evaluates every m independently; a failing point is recorded and skipped.
ScalingReport sweep(const SweepConfig& config);

}  // namespace fixedsnr
