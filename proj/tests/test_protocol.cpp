#include <doctest.h>

#include <cmath>
#include <random>

#include "fixedsnr/analysis.hpp"
#include "fixedsnr/errors.hpp"
#include "fixedsnr/protocol.hpp"
#include "oracles.hpp"

using namespace fixedsnr;
using cd = std::complex<double>;

namespace {

Network network(int m, int k0 = 1, std::uint64_t seed = 1) {
  NetworkParams p;
  p.m = m;
  p.k0 = k0;
  p.allow_large_k0 = true;
  return build_network(p, seed);
}

SimulationParams sim_params(DetectionCase c, InterferenceMode mode = InterferenceMode::kSynthetic) {
  SimulationParams s;
  s.detection = c;
  s.mode = mode;
  s.threads = 2;
  return s;
}

// Independent Monte Carlo of the zero-perturbation detector with unit exchange
// gains and no noise: A_raw and the multiuser power of target node 0, written
// as plain loops over the matched-filter expansion.
struct OracleMoments {
  double mean_A = 0.0;
  double var_A = 0.0;
  double multiuser = 0.0;
};

OracleMoments oracle_case1(int M, int relays, int trials, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  auto cn = [&] { return cd(nd(gen), nd(gen)); };
  const int K = M * M;
  std::vector<cd> A(trials);
  double mu = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<cd> row(K, 0.0);
    for (int r = 0; r < relays; ++r) {
      std::vector<std::vector<cd>> H(M, std::vector<cd>(K)), Q(M, std::vector<cd>(M));
      for (auto& v : H)
        for (auto& x : v) x = cn();
      for (auto& v : Q)
        for (auto& x : v) x = cn();
      // coefficient of slot i at target node 0:
      // sum_k Q[0][k] sum_j (sum_n conj(Q[n][k]) conj(H[j][n])) H[j][i]
      for (int k = 0; k < M; ++k) {
        for (int j = 0; j < M; ++j) {
          cd u = 0.0;
          for (int n = 0; n < M; ++n) u += std::conj(Q[n][k]) * std::conj(H[j][n]);
          for (int i = 0; i < K; ++i) row[i] += Q[0][k] * u * H[j][i];
        }
      }
    }
    A[t] = row[0];
    for (int i = 1; i < K; ++i) mu += std::norm(row[i]);
  }
  OracleMoments o;
  cd mean = 0.0;
  for (auto a : A) mean += a;
  mean /= double(trials);
  o.mean_A = mean.real();
  for (auto a : A) o.var_A += std::norm(a - mean);
  o.var_A /= (trials - 1);
  o.multiuser = mu / trials;
  return o;
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("ledger arithmetic") {
    const ChannelUseLedger l = ledger_total(4, 100, 3, 3);
    CHECK(l.transmission == 200);
    CHECK(l.exchange == 1200);
    CHECK(l.detection == 1200);
    CHECK(l.total == 2600);
    CHECK(l.bound == 2800);
    const ChannelUseLedger one = ledger_total(16, 7, 1, 1);
    CHECK(one.bound == 3 * 16 * 7);
    CHECK(one.total == 7 * 8 + 2 * 16 * 7);
    CHECK(one.total <= one.bound);
    CHECK(ledger_total(9, 10, 2, 2).transmission == 40);
    CHECK_THROWS_AS(ledger_total(4, 0, 1, 1), ConfigError);
  }

  TEST_CASE("relay selection follows the centre-distance filter") {
    for (int m = 2; m <= 6; ++m) {
      CAPTURE(m);
      const Network net = network(m);
      const int M = m * m;
      for (const auto& cl : net.plan.clusters) {
        for (int target : cl.subs) {
          const RelaySelection sel = select_relays(net.plan, target);
          std::vector<int> want;
          for (int s : cl.subs) {
            if (s != target && net.plan.sub_center_distance(s, target) >= M / 3.0 - 1e-12) want.push_back(s);
          }
          CHECK(sel.candidates == want);
          CHECK(2 * sel.candidates.size() >= static_cast<std::size_t>(M));
          CHECK(sel.relays.size() == static_cast<std::size_t>(M / 2));
          CHECK(std::find(sel.relays.begin(), sel.relays.end(), target) == sel.relays.end());
          for (int s : sel.relays) CHECK(net.plan.sub_center_distance(s, target) >= M / 3.0 - 1e-12);
        }
      }
    }
  }

  TEST_CASE("M = 4 corner target keeps at least two relays") {
    const Network net = network(2);
    const RelaySelection sel = select_relays(net.plan, 0);
    CHECK(sel.candidates.size() >= 2);
    CHECK(sel.relays.size() == 2);
  }

  TEST_CASE("M = 16 centre target equals the brute-force filter truncated to 8") {
    const Network net = network(4);
    const Cluster& cl = net.plan.clusters[0];
    const int target = cl.subs[5];  // second row, second column
    const RelaySelection sel = select_relays(net.plan, target);
    std::vector<int> want;
    for (int s : cl.subs) {
      if (s == target) continue;
      const PointD a = net.plan.sub_center(s), b = net.plan.sub_center(target);
      if (std::hypot(a.x - b.x, a.y - b.y) >= 16.0 / 3.0) want.push_back(s);
    }
    want.resize(8);
    CHECK(sel.relays == want);
  }

  TEST_CASE("edge-gap reading of the relay filter leaves too few candidates") {
    // Sub-cluster gaps inside a 3 x 3 block never reach M/3 from its centre.
    const Network net = network(3);
    const Cluster& cl = net.plan.clusters[0];
    const int centre = cl.subs[4];
    int far = 0;
    for (int s : cl.subs)
      if (s != centre && oracle::set_distance(net.topo, net.plan.subs[s].nodes, net.plan.subs[centre].nodes) >= 3.0)
        ++far;
    CHECK(far == 0);
    CHECK_NOTHROW(select_relays(net.plan, centre));
  }

  TEST_CASE("exchange stage: unit gains and faded gains agree when every fade is one") {
    Stream s(2, "exchange-test");
    const int M = 4;
    CVector Y(M);
    CMatrix F(M, M), N3(M, M), E(M, M);
    fill_complex_normal(s, Y);
    fill_complex_normal(s, F);
    fill_complex_normal(s, N3);
    fill_complex_normal(s, E);
    const ExchangeOutput unit = run_exchange(Y, F, N3, E, 1.7, DetectionCase::kUnitExchange);
    const ExchangeOutput ones =
        run_exchange(Y, CMatrix::Constant(M, M, cd(1.0, 0.0)), N3, E, 1.7, DetectionCase::kFadedExchange);
    for (int k = 0; k < M; ++k) {
      for (int j = 0; j < M; ++j) {
        CHECK(unit.received(k, j).real() == ones.received(k, j).real());
        CHECK(unit.received(k, j).imag() == ones.received(k, j).imag());
      }
    }
    const ExchangeOutput faded = run_exchange(Y, F, N3, E, 1.7, DetectionCase::kFadedExchange);
    for (int k = 0; k < M; ++k) {
      CHECK(faded.gamma(k, k) == 1.0);
      CHECK(faded.received(k, k) == Y(k) / 1.7);
      for (int j = 0; j < M; ++j) {
        if (j == k) continue;
        CHECK(faded.gamma(j, k).real() == doctest::Approx(std::norm(F(j, k))));
        const cd want = std::conj(F(j, k)) * (F(j, k) * Y(j) / 1.7 + N3(j, k) + E(j, k));
        CHECK(std::abs(faded.received(k, j) - want) < 1e-12);
      }
    }
  }

  TEST_CASE("isolated sub-cluster without fading holds Y plus exchange noise") {
    Stream s(3, "iso");
    const int M = 4;
    CVector Y(M);
    CMatrix N3(M, M);
    fill_complex_normal(s, Y);
    fill_complex_normal(s, N3);
    const ExchangeOutput out = run_exchange(Y, CMatrix::Zero(M, M), N3, CMatrix::Zero(M, M), 1.0,
                                            DetectionCase::kUnitExchange);
    for (int k = 0; k < M; ++k)
      for (int j = 0; j < M; ++j) CHECK(out.received(k, j) == (j == k ? Y(j) : Y(j) + N3(j, k)));
  }

  TEST_CASE("degenerate matched filter with constant fades") {
    // One relay of M = 2 nodes, every fade equal to one, one active symbol and
    // no noise. With constant fades the cross terms do not average out, so the
    // output is gain * sqrt(SNR0) * M^3 * x / (xi xi1).
    const int M = 2, K = 4;
    const double snr0 = 10.0, xi = 3.0, xi1 = 2.0, gain = 5.0, x = 0.7;
    RelayGeometry rg;
    rg.mac_gain = RMatrix::Ones(M, K);
    rg.det_gain = RMatrix::Ones(M, M);
    const CMatrix H = CMatrix::Constant(M, K, 1.0);
    RVector X = RVector::Zero(K);
    X(0) = x;
    const CVector Y = mac_output(H, rg.mac_gain, X, CVector::Zero(M), snr0);
    const CMatrix Q = CMatrix::Constant(M, M, 1.0);
    const CMatrix U = Q.adjoint() * H.leftCols(M).adjoint();
    const ExchangeOutput ex = run_exchange(Y, CMatrix::Constant(M, M, 1.0), CMatrix::Zero(M, M),
                                           CMatrix::Zero(M, M), xi1, DetectionCase::kUnitExchange);
    const CVector z1 = relay_forward(U, ex.received, xi);
    const CVector z = coherent_detect({z1}, {Q}, {rg}, gain, CVector::Zero(M), CVector::Zero(M));
    for (int n = 0; n < M; ++n) CHECK(z(n).real() == doctest::Approx(gain * std::sqrt(snr0) * 8.0 * x / (xi * xi1)));
  }

  TEST_CASE("tagged components reconstruct the detector output") {
    for (int m : {2, 3}) {
      for (auto c : {DetectionCase::kUnitExchange, DetectionCase::kFadedExchange}) {
        for (auto mode : {InterferenceMode::kSynthetic, InterferenceMode::kFull}) {
          const Network net = network(m);
          DetectionContext ctx = build_context(net, sim_params(c, mode));
          ctx.xi1 = 3.0 * m * m;
          ctx.xi = 2.0 * m * m;
          for (int t = 0; t < 20; ++t) {
            const TrialRecord r = run_trial(ctx, 99, t);
            CHECK(r.completeness_error < 1e-10);
            const cd sum = r.signal + r.multiuser_s + r.mac_noise_s + r.exchange_noise_s + r.exchange_s +
                           r.detection_noise_s + r.other_s;
            CHECK(std::abs(sum - r.z_direct) <= 1e-10 * (std::abs(r.z_direct) + 1.0));
            CHECK(r.detection_noise == 1.0);
          }
        }
      }
    }
  }

  TEST_CASE("trials are reproducible and independent of the thread count") {
    const Network net = network(2);
    DetectionContext ctx = build_context(net, sim_params(DetectionCase::kFadedExchange));
    const auto a = run_trials(ctx, 5, 64, 1);
    const auto b = run_trials(ctx, 5, 64, 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].A == b[i].A);
      CHECK(a[i].z_direct == b[i].z_direct);
    }
  }

  TEST_CASE("signal gain mean at zero perturbation") {
    for (auto c : {DetectionCase::kUnitExchange, DetectionCase::kFadedExchange}) {
      for (int m : {2, 3}) {
        CAPTURE(m);
        const Network net = network(m);
        SimulationParams sp = sim_params(c);
        sp.zero_perturbation = true;
        DetectionContext ctx = build_context(net, sp);
        calibrate(ctx, 4, 300, 2);
        const auto recs = run_trials(ctx, 8, 6000, 2);
        const GainStatistics g = gain_statistics(recs, ctx.kappa());
        const int M = m * m;
        const double oracle = (M / 2) * double(M) * M;
        CHECK(std::abs(g.mean_A_raw - oracle) <= 3.0 * g.se_mean_A_raw);
      }
    }
  }

  TEST_CASE("second moments agree with an independent loop implementation") {
    const Network net = network(2);
    SimulationParams sp = sim_params(DetectionCase::kUnitExchange);
    sp.zero_perturbation = true;
    sp.exchange_interference = false;
    sp.other_cluster_interference = false;
    DetectionContext ctx = build_context(net, sp);
    const auto recs = run_trials(ctx, 31, 40000, 2);
    const GainStatistics g = gain_statistics(recs, ctx.kappa());
    const InterferenceBreakdown w = interference_breakdown(recs, ctx.kappa());
    const OracleMoments o = oracle_case1(4, 2, 40000, 17);
    CHECK(g.mean_A_raw == doctest::Approx(o.mean_A).epsilon(0.03));
    CHECK(g.var_A_raw == doctest::Approx(o.var_A).epsilon(0.05));
    CHECK(w.multiuser_raw == doctest::Approx(o.multiuser).epsilon(0.05));
  }

  TEST_CASE("forwarded and relayed powers stay within the unit budget") {
    for (int m : {2, 3}) {
      CAPTURE(m);
      const Network net = network(m);
      DetectionContext ctx = build_context(net, sim_params(DetectionCase::kFadedExchange));
      const Calibration cal = calibrate(ctx, 6, 2000, 2);
      CHECK(cal.xi1 > 0.0);
      CHECK(cal.c9 == doctest::Approx(cal.xi1 / (m * m)));
      const auto recs = run_trials(ctx, 7, 2000, 2);
      const PowerAudit a = power_audit(recs);
      CHECK(a.max_forward_power <= 1.05);
      CHECK(a.max_relay_power <= 1.05);
    }
  }

  TEST_CASE("forwarded power budget at M = 16") {
    const Network net = network(4);
    DetectionContext ctx = build_context(net, sim_params(DetectionCase::kFadedExchange));
    calibrate(ctx, 6, 200, 2);
    const auto recs = run_trials(ctx, 7, 200, 2);
    CHECK(power_audit(recs).max_forward_power <= 1.05);
  }

  TEST_CASE("exchange interference geometry is dominated by the ring bound") {
    const Network net = network(3);
    const DetectionContext ctx = build_context(net, sim_params(DetectionCase::kFadedExchange, InterferenceMode::kFull));
    const int M = ctx.M;
    double ring_bound = 0.0;
    for (int k = 1; k < 2000; ++k) ring_bound += 8.0 * M_PI * k / std::pow(2.0 * k, ctx.alpha);
    bool any = false;
    for (const auto& rg : ctx.relays) {
      CHECK(rg.exchange_variance <= ring_bound);
      for (int p = 0; p < M; ++p) {
        for (int j = 0; j < M; ++j) {
          if (p == j) continue;
          double s = 0.0;
          for (const auto& ei : rg.interferers) s += ei.cross(p, j) * ei.cross(p, j);
          CHECK(s <= rg.exchange_variance + 1e-15);
          any = any || s > 0.0;
        }
      }
    }
    CHECK(any);
  }

  TEST_CASE("full exchange interference stays below the synthetic model") {
    const Network net = network(3);
    SimulationParams full = sim_params(DetectionCase::kFadedExchange, InterferenceMode::kFull);
    SimulationParams syn = sim_params(DetectionCase::kFadedExchange, InterferenceMode::kSynthetic);
    DetectionContext cf = build_context(net, full);
    DetectionContext cs = build_context(net, syn);
    for (DetectionContext* c : {&cf, &cs}) {
      c->xi1 = 30.0;
      c->xi = 40.0;
    }
    const InterferenceBreakdown wf = interference_breakdown(run_trials(cf, 3, 1500, 2), cf.kappa());
    const InterferenceBreakdown ws = interference_breakdown(run_trials(cs, 3, 1500, 2), cs.kappa());
    CHECK(wf.exchange > 0.0);
    CHECK(wf.exchange <= ws.exchange + 3.0 * ws.se_exchange);
  }

  TEST_CASE("other-cluster interference: full simulation stays below the synthetic model") {
    // m = 5 is the smallest grid with two same-colour clusters.
    const Network net = network(5);
    int ref = -1;
    for (int c = 0; c < static_cast<int>(net.plan.clusters.size()) && ref < 0; ++c)
      for (int d = 0; d < static_cast<int>(net.plan.clusters.size()); ++d)
        if (d != c && net.cluster_colors.color_of[d] == net.cluster_colors.color_of[c]) ref = c;
    REQUIRE(ref >= 0);
    SimulationParams full = sim_params(DetectionCase::kFadedExchange, InterferenceMode::kFull);
    full.target_cluster = ref;
    full.exchange_interference = false;
    SimulationParams syn = full;
    syn.mode = InterferenceMode::kSynthetic;
    DetectionContext cf = build_context(net, full);
    DetectionContext cs = build_context(net, syn);
    CHECK(!cf.foreign.empty());
    CHECK(cs.other_factor > 0.0);
    for (DetectionContext* c : {&cf, &cs}) {
      c->xi1 = 90.0;
      c->xi = 300.0;
    }
    const InterferenceBreakdown wf = interference_breakdown(run_trials(cf, 4, 60, 2), cf.kappa());
    const InterferenceBreakdown ws = interference_breakdown(run_trials(cs, 4, 60, 2), cs.kappa());
    CHECK(wf.other > 0.0);
    CHECK(wf.other <= ws.other + 3.0 * ws.se_other);
  }

  TEST_CASE("unknown targets are rejected") {
    const Network net = network(2);
    SimulationParams sp = sim_params(DetectionCase::kFadedExchange);
    sp.target_cluster = 5;
    CHECK_THROWS_AS(build_context(net, sp), ConfigError);
    sp.target_cluster = 0;
    sp.target_sub = 4;
    CHECK_THROWS_AS(build_context(net, sp), ConfigError);
  }
}
