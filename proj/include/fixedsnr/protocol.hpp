#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fixedsnr/channel.hpp"
#include "fixedsnr/params.hpp"
#include "fixedsnr/topology.hpp"

namespace fixedsnr {

// Network channel uses per block of b symbols, by protocol phase.
struct ChannelUseLedger {
  int M = 0;
  int b = 0;
  int c0_cluster = 0;
  int c0_sub = 0;
  long long transmission = 0;  // b * floor(M/2)
  long long exchange = 0;      // c0_sub * M * b
  long long detection = 0;     // c0_cluster * M * b
  long long total = 0;
  long long bound = 0;         // (2 c0 + 1) M b with c0 the larger colour count
};

ChannelUseLedger ledger_total(int M, int b, int c0_cluster, int c0_sub);

struct RelaySelection {
  int target = -1;
  std::vector<int> candidates;  // sub-clusters of the target's cluster with centre distance >= M/3
  std::vector<int> relays;      // first floor(M/2) candidates, row-major
};

// Throws InvariantError when fewer than ceil(M/2) candidates exist.
RelaySelection select_relays(const ClusterPlan& plan, int target_sub);

// Source slots of one cluster. Slot g*M + i addresses destination node i of
// sub-cluster group_subs[g]; group 0 is the detection target. Slots whose
// destination has no admissible source carry a virtual unit-gain source.
struct SlotTable {
  int cluster = -1;
  std::vector<int> group_subs;
  std::vector<NodeId> destination;
  std::vector<NodeId> source;  // -1 for virtual slots
};

SlotTable build_slot_table(const Network& net, int cluster, int target_position);

// Exchange interferer as seen by one relay sub-cluster.
struct ExchangeInterferer {
  int sub = -1;
  int cluster = -1;
  int relay_slot = -1;      // index into the reference relays when shared, else -1
  RMatrix mac_gain;         // M x M^2, this sub-cluster's own MAC amplitude factors
  RMatrix cross;            // (slot p, receiver j) amplitude ratio to the wanted exchange link
  int ring = 0;
};

struct RelayGeometry {
  int sub = -1;
  RMatrix mac_gain;  // M x M^2 factors 1 + Delta_h
  RMatrix det_gain;  // target node n x relay node k: 1 + Delta_q
  RMatrix to_reference_target;  // used only for foreign emitters: physical amplitude to the reference target
  std::vector<ExchangeInterferer> interferers;
  double exchange_variance = 0.0;  // synthetic per-entry variance
};

// One simultaneously active cluster of the reference cluster's colour.
struct ForeignCluster {
  int cluster = -1;
  int target = -1;
  SlotTable slots;
  std::vector<RelayGeometry> relays;
  int ring = 0;
};

// Static description of a detection experiment, independent of the draws.
struct DetectionContext {
  int M = 0;
  double snr0 = 0.0;
  double alpha = 0.0;
  double d_max = 0.0;
  DetectionCase detection = DetectionCase::kFadedExchange;
  InterferenceMode mode = InterferenceMode::kSynthetic;
  bool exchange_interference = true;
  bool other_interference = true;
  bool zero_perturbation = false;
  int cluster = -1;
  int target = -1;
  SlotTable slots;
  RelaySelection selection;
  std::vector<RelayGeometry> relays;
  std::vector<ForeignCluster> foreign;
  std::vector<RMatrix> calibration_gains;  // MAC factors of every forwarding sub-cluster
  double gain = 0.0;                  // sqrt(SNR0) * (d_max / M)^(alpha/2)
  double other_factor = 0.0;          // sum over same-colour clusters of k^-alpha
  double xi1 = 1.0;
  double xi = 1.0;

  int slots_count() const { return M * M; }
  // Full gain sqrt(SNR0) * gain / (xi * xi1) of the coherent output.
  double kappa() const;
};

DetectionContext build_context(const Network& net, const SimulationParams& sim);

// Per-trial output at one target node.
struct TrialRecord {
  std::complex<double> A;  // coefficient of the wanted symbol, full gain
  double multiuser = 0.0;  // conditional variances given the fades
  double mac_noise = 0.0;
  double exchange_noise = 0.0;
  double exchange = 0.0;   // conditional in synthetic mode, sampled in full mode
  double detection_noise = 1.0;
  double other = 0.0;      // conditional in synthetic mode, sampled in full mode
  // Tagged component samples; their sum equals z_direct.
  std::complex<double> signal, multiuser_s, mac_noise_s, exchange_noise_s, exchange_s,
      detection_noise_s, other_s;
  std::complex<double> z_direct;
  double completeness_error = 0.0;  // max relative gap over target nodes
  // Per reference relay node, expected over symbols and noise given the fades:
  // forwarded power E|Y / xi1|^2 and relayed power E|Z1|^2.
  std::vector<double> forward_power;
  std::vector<double> relay_power;
  std::vector<double> foreign_relay_power;
};

// Stages of one channel use, exposed for inspection and testing.
struct MacDraw {
  CMatrix H;
  CVector noise;
  CVector Y;
};

MacDraw run_transmission(const RelayGeometry& relay, const RVector& X, double snr0, Stream& rng);

struct ExchangeOutput {
  CMatrix received;  // (k, j): what relay node k holds for slot j after phase compensation
  CMatrix gamma;     // (j, k): |f_jk|^2 off the diagonal, 1 on it
};

// F: (j, k) fade from node j to node k. N3, E: (j, k) noise and interference at k in slot j.
ExchangeOutput run_exchange(const CVector& Y, const CMatrix& F, const CMatrix& N3, const CMatrix& E,
                            double xi1, DetectionCase detection);

// Z1_k = (1/xi) sum_j U_kj * received(k, j) with U = Q^H H1^H.
CVector relay_forward(const CMatrix& U, const CMatrix& received, double xi);

// Z = sum_r gain * (det_gain_r .* Q_r) Z1_r + N4 + O.
CVector coherent_detect(const std::vector<CVector>& z1, const std::vector<CMatrix>& Q,
                        const std::vector<RelayGeometry>& relays, double gain, const CVector& N4,
                        const CVector& O);

// Runs one trial. run_seed selects the stream family; `node` is the target node
// reported in the record.
TrialRecord run_trial(const DetectionContext& ctx, std::uint64_t run_seed, long long trial, int node = 0);

struct Calibration {
  double xi1 = 1.0;
  double xi = 1.0;
  double c9 = 0.0;   // xi1 / M
  double c10 = 0.0;  // xi / M^2
  int trials = 0;
};

// Sets ctx.xi1 and ctx.xi from dedicated calibration streams.
Calibration calibrate(DetectionContext& ctx, std::uint64_t seed, int trials, int threads);

std::vector<TrialRecord> run_trials(const DetectionContext& ctx, std::uint64_t seed, int trials,
                                    int threads);

// Invokes fn(i) for i in [0, count) over a fixed partition of worker threads.
template <class Fn>
void parallel_for(long long count, int threads, Fn&& fn);

int resolve_threads(int requested);

}  // namespace fixedsnr

#include "fixedsnr/parallel.ipp"
