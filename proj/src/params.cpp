#include "fixedsnr/params.hpp"

#include <cmath>

#include "fixedsnr/errors.hpp"

namespace fixedsnr {

double NetworkParams::snr0() const { return std::pow(10.0, snr0_db / 10.0); }

void NetworkParams::validate() const {
  if (m < 2 || m > 10) throw ConfigError("m must be in [2, 10], got " + std::to_string(m));
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw ConfigError("alpha must exceed 2");
  if (!std::isfinite(snr0_db)) throw ConfigError("snr0-db must be finite");
  if (k0 < 0) throw ConfigError("k0 must be non-negative");
  if (b < 1) throw ConfigError("b must be at least 1");
  if (max_colors < 1) throw ConfigError("max-colors must be positive");
  // n^(1/6) equals m exactly.
  if (!allow_large_k0 && k0 >= m) {
    throw ConfigError("k0 = " + std::to_string(k0) + " violates k0 < n^(1/6) = " +
                      std::to_string(m));
  }
}

void SimulationParams::validate() const {
  if (trials < 1) throw ConfigError("trials must be positive");
  if (calibration_trials < 1) throw ConfigError("calibration trials must be positive");
  if (threads < 0) throw ConfigError("parallel must be non-negative");
  if (target_cluster < 0 || target_sub < 0) throw ConfigError("target indices must be non-negative");
  if (trace_trials < 0) throw ConfigError("trace count must be non-negative");
}

std::string to_string(DmaxConvention v) {
  return v == DmaxConvention::kFullDiagonal ? "diagonal" : "realized";
}
std::string to_string(SubClusterReuse v) {
  return v == SubClusterReuse::kOwnScale ? "own-scale" : "literal";
}
std::string to_string(DetectionCase v) {
  return v == DetectionCase::kUnitExchange ? "1" : "2";
}
std::string to_string(InterferenceMode v) {
  return v == InterferenceMode::kSynthetic ? "synthetic" : "full";
}

DmaxConvention parse_dmax(const std::string& s) {
  if (s == "diagonal") return DmaxConvention::kFullDiagonal;
  if (s == "realized") return DmaxConvention::kRealizedPairs;
  throw ConfigError("unknown dmax convention: " + s);
}
SubClusterReuse parse_sub_reuse(const std::string& s) {
  if (s == "own-scale") return SubClusterReuse::kOwnScale;
  if (s == "literal") return SubClusterReuse::kLiteral;
  throw ConfigError("unknown sub-cluster reuse rule: " + s);
}
DetectionCase parse_detection(const std::string& s) {
  if (s == "1") return DetectionCase::kUnitExchange;
  if (s == "2") return DetectionCase::kFadedExchange;
  throw ConfigError("case must be 1 or 2, got " + s);
}
InterferenceMode parse_mode(const std::string& s) {
  if (s == "synthetic") return InterferenceMode::kSynthetic;
  if (s == "full") return InterferenceMode::kFull;
  throw ConfigError("mode must be full or synthetic, got " + s);
}

}  // namespace fixedsnr
