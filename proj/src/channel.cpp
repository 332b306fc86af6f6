#include "fixedsnr/channel.hpp"

#include <cmath>
#include <limits>

#include "fixedsnr/errors.hpp"

namespace fixedsnr {

double path_amplitude(double d, double snr0, double alpha, double d_max) {
  if (!(d > 0.0)) throw ConfigError("link distance must be positive");
  return std::sqrt(snr0) * std::pow(d_max / d, alpha / 2.0);
}

PowerControl power_control(Point source, const ClusterPlan& plan, int cluster,
                           const GridTopology& topo, double d_max, double alpha, int k0) {
  const long long guard = static_cast<long long>(k0) * plan.M;
  if (plan.point_cluster_gap_sq(source, cluster) < guard * guard) {
    throw ConfigError("source is closer than k0*M to the cluster");
  }
  const Cluster& cl = plan.clusters.at(cluster);
  PowerControl pc;
  pc.centre_distance = distance(cl.center, source);
  pc.tx_power = std::pow(pc.centre_distance / d_max, alpha);
  if (pc.tx_power > 1.0 + 1e-12) throw InvariantError("power control exceeds the unit power budget");
  pc.delta.reserve(cl.nodes.size());
  for (NodeId w : cl.nodes) {
    pc.delta.push_back(std::pow(pc.centre_distance / distance(source, topo.position(w)), alpha / 2.0) - 1.0);
  }
  return pc;
}

double perturbation_bound(int k0, double alpha) {
  if (k0 <= 2) return std::numeric_limits<double>::infinity();
  return std::pow(1.0 - 2.0 / k0, -alpha / 2.0) - 1.0;
}

CVector mac_output(const CMatrix& H, const RMatrix& gain, const RVector& X, const CVector& noise,
                   double snr0) {
  if (H.rows() != gain.rows() || H.cols() != gain.cols() || H.cols() != X.size() ||
      H.rows() != noise.size()) {
    throw ConfigError("MAC dimensions do not agree");
  }
  const CMatrix Hg = H.cwiseProduct(gain.cast<std::complex<double>>());
  return std::sqrt(snr0) * (Hg * X.cast<std::complex<double>>()) + noise;
}

void fill_complex_normal(Stream& rng, CMatrix& out) {
  // Column-major fill order, fixed so draws stay reproducible.
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = rng.complex_normal();
}

void fill_complex_normal(Stream& rng, CVector& out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.complex_normal();
}

void fill_normal(Stream& rng, RVector& out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.normal();
}

int annulus_index(double rho, double width) {
  if (!(width > 0.0) || rho < 0.0) throw ConfigError("annulus needs positive width and distance");
  return static_cast<int>(std::floor(rho / width));
}

int annulus_index_sq(long long rho_sq, long long width_sq) {
  if (width_sq <= 0 || rho_sq < 0) throw ConfigError("annulus needs positive width and distance");
  int k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rho_sq) / width_sq)));
  while (static_cast<long long>(k + 1) * (k + 1) * width_sq <= rho_sq) ++k;
  while (k > 0 && static_cast<long long>(k) * k * width_sq > rho_sq) --k;
  return k;
}

double sub_ring_width(int M) { return 2.0 * std::sqrt(2.0 * M); }
double cluster_ring_width(int M) { return 2.0 * std::sqrt(2.0) * M; }

}  // namespace fixedsnr
