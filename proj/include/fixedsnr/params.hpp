#pragma once

#include <cstdint>
#include <string>

namespace fixedsnr {

enum class DmaxConvention { kFullDiagonal, kRealizedPairs };

// Relay reuse distance used by the sub-cluster coloring.
//   kOwnScale : 2*sqrt(2)*sqrt(M), the sub-cluster analogue of the cluster rule
//   kLiteral  : 2*sqrt(2)*M, the cluster rule applied unchanged
enum class SubClusterReuse { kOwnScale, kLiteral };

struct NetworkParams {
  int m = 2;  // n = m^6 nodes, M = m^2
  double alpha = 3.0;
  double snr0_db = 10.0;
  int k0 = 2;
  int b = 100;
  int max_colors = 19;
  DmaxConvention dmax = DmaxConvention::kFullDiagonal;
  SubClusterReuse sub_reuse = SubClusterReuse::kOwnScale;
  // Lets Monte Carlo runs use a guard factor k0 >= n^(1/6), at the cost of
  // the served-source guarantee.
  bool allow_large_k0 = false;

  int M() const { return m * m; }
  int side() const { return m * m * m; }
  long long n() const { return static_cast<long long>(side()) * side(); }
  double snr0() const;

  // Throws ConfigError on any out-of-range value.
  void validate() const;
};

enum class DetectionCase { kUnitExchange = 1, kFadedExchange = 2 };
enum class InterferenceMode { kSynthetic, kFull };

struct SimulationParams {
  DetectionCase detection = DetectionCase::kFadedExchange;
  InterferenceMode mode = InterferenceMode::kSynthetic;
  int trials = 10000;
  std::uint64_t seed = 1;
  int calibration_trials = 2000;
  int threads = 0;  // 0 selects the hardware concurrency
  bool zero_perturbation = false;
  bool exchange_interference = true;
  bool other_cluster_interference = true;
  int target_cluster = 0;
  int target_sub = 0;  // position inside the target cluster, row-major
  int trace_trials = 0;

  void validate() const;
};

std::string to_string(DmaxConvention v);
std::string to_string(SubClusterReuse v);
std::string to_string(DetectionCase v);
std::string to_string(InterferenceMode v);

DmaxConvention parse_dmax(const std::string& s);
SubClusterReuse parse_sub_reuse(const std::string& s);
DetectionCase parse_detection(const std::string& s);
InterferenceMode parse_mode(const std::string& s);

}  // namespace fixedsnr
