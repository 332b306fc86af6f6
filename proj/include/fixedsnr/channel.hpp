#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fixedsnr/rng.hpp"
#include "fixedsnr/topology.hpp"

namespace fixedsnr {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Received amplitude sqrt(SNR0) * (d_max / d)^(alpha/2) for a unit-power link.
double path_amplitude(double d, double snr0, double alpha, double d_max);

struct PowerControl {
  double tx_power = 0.0;       // (d(v, centre) / d_max)^alpha
  double centre_distance = 0.0;
  std::vector<double> delta;   // one entry per cluster node, row-major
};

// Transmit power that equalises the received amplitude at the cluster centre,
// together with the per-node amplitude error relative to the centre. Throws
// ConfigError when the source sits closer than k0*M to the cluster.
PowerControl power_control(Point source, const ClusterPlan& plan, int cluster,
                           const GridTopology& topo, double d_max, double alpha, int k0);

// Worst-case relative amplitude error for a source at k0*M from a cluster of
// radius M: (1 - 2/k0)^(-alpha/2) - 1. Infinite for k0 <= 2.
double perturbation_bound(int k0, double alpha);

// Y = sqrt(snr0) * (gain .* H) * X + noise.
CVector mac_output(const CMatrix& H, const RMatrix& gain, const RVector& X, const CVector& noise,
                   double snr0);

void fill_complex_normal(Stream& rng, CMatrix& out);
void fill_complex_normal(Stream& rng, CVector& out);
void fill_normal(Stream& rng, RVector& out);

// Ring index floor(rho / width); ring 0 is the exclusion disc.
int annulus_index(double rho, double width);
// Exact variant on squared integer distances: largest k with k^2 * width_sq <= rho_sq.
int annulus_index_sq(long long rho_sq, long long width_sq);
// Ring widths for exchange interference between sub-clusters and for
// cross-cluster interference during detection.
double sub_ring_width(int M);
double cluster_ring_width(int M);

}  // namespace fixedsnr
