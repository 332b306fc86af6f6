#include "fixedsnr/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fixedsnr/errors.hpp"
#include "fixedsnr/stats.hpp"

namespace fixedsnr {

using cd = std::complex<double>;

ChannelUseLedger ledger_total(int M, int b, int c0_cluster, int c0_sub) {
  if (M < 1 || b < 1 || c0_cluster < 1 || c0_sub < 1) {
    throw ConfigError("ledger needs positive M, b and colour counts");
  }
  ChannelUseLedger l;
  l.M = M;
  l.b = b;
  l.c0_cluster = c0_cluster;
  l.c0_sub = c0_sub;
  l.transmission = static_cast<long long>(b) * (M / 2);
  l.exchange = static_cast<long long>(c0_sub) * M * b;
  l.detection = static_cast<long long>(c0_cluster) * M * b;
  l.total = l.transmission + l.exchange + l.detection;
  l.bound = static_cast<long long>(2 * std::max(c0_cluster, c0_sub) + 1) * M * b;
  return l;
}

RelaySelection select_relays(const ClusterPlan& plan, int target_sub) {
  if (target_sub < 0 || target_sub >= static_cast<int>(plan.subs.size())) {
    throw ConfigError("target sub-cluster out of range");
  }
  const int M = plan.M;
  const Cluster& cl = plan.clusters.at(plan.subs[target_sub].cluster);
  const Rect& t = plan.subs[target_sub].rect;
  RelaySelection sel;
  sel.target = target_sub;
  for (int s : cl.subs) {
    if (s == target_sub) continue;
    const Rect& r = plan.subs[s].rect;
    // Twice the centre offsets are integers, so the comparison is exact.
    const long long dx = (r.x0 + r.x1) - (t.x0 + t.x1);
    const long long dy = (r.y0 + r.y1) - (t.y0 + t.y1);
    if (9 * (dx * dx + dy * dy) >= 4LL * M * M) sel.candidates.push_back(s);
  }
  if (2 * static_cast<int>(sel.candidates.size()) < M) {
    throw InvariantError("only " + std::to_string(sel.candidates.size()) +
                         " relay candidates for M = " + std::to_string(M));
  }
  sel.relays.assign(sel.candidates.begin(), sel.candidates.begin() + M / 2);
  return sel;
}

SlotTable build_slot_table(const Network& net, int cluster, int target_position) {
  const ClusterPlan& plan = net.plan;
  const int M = plan.M;
  if (cluster < 0 || cluster >= static_cast<int>(plan.clusters.size())) {
    throw ConfigError("target cluster out of range");
  }
  if (target_position < 0 || target_position >= M) throw ConfigError("target sub-cluster out of range");
  const Cluster& cl = plan.clusters[cluster];
  SlotTable st;
  st.cluster = cluster;
  st.group_subs.push_back(cl.subs[target_position]);
  for (int s : cl.subs)
    if (s != st.group_subs.front()) st.group_subs.push_back(s);
  const long long guard = static_cast<long long>(net.params.k0) * M;
  for (int s : st.group_subs) {
    for (NodeId w : plan.subs[s].nodes) {
      const NodeId v = net.pairing.source_of[w];
      const bool served = plan.point_cluster_gap_sq(net.topo.position(v), cluster) >= guard * guard;
      st.destination.push_back(w);
      st.source.push_back(served ? v : -1);
    }
  }
  return st;
}

double DetectionContext::kappa() const { return std::sqrt(snr0) * gain / (xi * xi1); }

namespace {

RMatrix mac_gain_for(const Network& net, const SlotTable& st, int sub, double alpha, bool zero) {
  const int M = net.plan.M;
  RMatrix g = RMatrix::Ones(M, M * M);
  if (zero) return g;
  const PointD c = net.plan.clusters[st.cluster].center;
  const auto& nodes = net.plan.subs[sub].nodes;
  for (int slot = 0; slot < M * M; ++slot) {
    if (st.source[slot] < 0) continue;
    const Point v = net.topo.position(st.source[slot]);
    const double dc = distance(c, v);
    for (int k = 0; k < M; ++k) {
      g(k, slot) = std::pow(dc / distance(v, net.topo.position(nodes[k])), alpha / 2.0);
    }
  }
  return g;
}

RMatrix det_gain_for(const Network& net, int relay_sub, int target_sub, double alpha, bool zero) {
  const int M = net.plan.M;
  RMatrix g = RMatrix::Ones(M, M);
  if (zero) return g;
  const auto& rn = net.plan.subs[relay_sub].nodes;
  const auto& tn = net.plan.subs[target_sub].nodes;
  for (int n = 0; n < M; ++n)
    for (int k = 0; k < M; ++k)
      g(n, k) = std::pow(M / distance(net.topo.position(rn[k]), net.topo.position(tn[n])), alpha / 2.0);
  return g;
}

}  // namespace

DetectionContext build_context(const Network& net, const SimulationParams& sim) {
  sim.validate();
  const ClusterPlan& plan = net.plan;
  const int M = plan.M;
  DetectionContext ctx;
  ctx.M = M;
  ctx.snr0 = net.params.snr0();
  ctx.alpha = net.params.alpha;
  ctx.d_max = net.d_max;
  ctx.detection = sim.detection;
  ctx.mode = sim.mode;
  ctx.exchange_interference = sim.exchange_interference;
  ctx.other_interference = sim.other_cluster_interference;
  ctx.zero_perturbation = sim.zero_perturbation;
  ctx.cluster = sim.target_cluster;
  ctx.slots = build_slot_table(net, sim.target_cluster, sim.target_sub);
  ctx.target = ctx.slots.group_subs.front();
  ctx.selection = select_relays(plan, ctx.target);
  ctx.gain = std::sqrt(ctx.snr0) * std::pow(ctx.d_max / M, ctx.alpha / 2.0);
  const bool full = sim.mode == InterferenceMode::kFull;
  const double a = ctx.alpha;
  const bool zero = sim.zero_perturbation;

  // Slot tables of foreign clusters, built on demand with the same target position.
  std::map<int, SlotTable> tables;
  tables[ctx.cluster] = ctx.slots;
  auto table_of = [&](int cluster) -> const SlotTable& {
    auto it = tables.find(cluster);
    if (it == tables.end()) it = tables.emplace(cluster, build_slot_table(net, cluster, sim.target_sub)).first;
    return it->second;
  };

  for (int s : ctx.selection.relays) {
    RelayGeometry rg;
    rg.sub = s;
    rg.mac_gain = mac_gain_for(net, ctx.slots, s, a, zero);
    rg.det_gain = det_gain_for(net, s, ctx.target, a, zero);
    ctx.relays.push_back(std::move(rg));
  }

  if (ctx.exchange_interference) {
    const long long ring_sq = 8LL * M;
    for (std::size_t r = 0; r < ctx.relays.size(); ++r) {
      RelayGeometry& rg = ctx.relays[r];
      const int color = net.sub_colors.color_of[rg.sub];
      const auto& own = plan.subs[rg.sub].nodes;
      for (int s = 0; s < static_cast<int>(plan.subs.size()); ++s) {
        if (s == rg.sub || net.sub_colors.color_of[s] != color) continue;
        if (plan.subs[s].cluster < 0) continue;
        const int ring = annulus_index_sq(plan.sub_gap_sq(s, rg.sub), ring_sq);
        if (ring < 1) throw InvariantError("same-colour sub-clusters inside the exclusion disc");
        rg.exchange_variance += std::pow(2.0 * ring, -a);
        if (!full) continue;
        ExchangeInterferer ei;
        ei.sub = s;
        ei.cluster = plan.subs[s].cluster;
        ei.ring = ring;
        const auto it = std::find(ctx.selection.relays.begin(), ctx.selection.relays.end(), s);
        ei.relay_slot = it == ctx.selection.relays.end() ? -1 : static_cast<int>(it - ctx.selection.relays.begin());
        ei.mac_gain = mac_gain_for(net, table_of(ei.cluster), s, a, zero);
        ei.cross = RMatrix::Zero(M, M);
        const auto& other = plan.subs[s].nodes;
        for (int p = 0; p < M; ++p) {
          for (int j = 0; j < M; ++j) {
            if (p == j) continue;
            const double want = distance(net.topo.position(own[p]), net.topo.position(own[j]));
            const double hit = distance(net.topo.position(other[p]), net.topo.position(own[j]));
            ei.cross(p, j) = std::pow(want / hit, a / 2.0);
          }
        }
        rg.interferers.push_back(std::move(ei));
      }
    }
  }

  if (ctx.other_interference) {
    const int color = net.cluster_colors.color_of[ctx.cluster];
    const long long ring_sq = 8LL * M * M;
    for (int c = 0; c < static_cast<int>(plan.clusters.size()); ++c) {
      if (c == ctx.cluster || net.cluster_colors.color_of[c] != color) continue;
      const int ring = annulus_index_sq(plan.cluster_gap_sq(c, ctx.cluster), ring_sq);
      if (ring < 1) throw InvariantError("same-colour clusters inside the exclusion disc");
      ctx.other_factor += std::pow(static_cast<double>(ring), -a);
      if (!full) continue;
      ForeignCluster fc;
      fc.cluster = c;
      fc.ring = ring;
      fc.slots = table_of(c);
      fc.target = fc.slots.group_subs.front();
      const RelaySelection sel = select_relays(plan, fc.target);
      const auto& tn = plan.subs[ctx.target].nodes;
      for (int s : sel.relays) {
        RelayGeometry rg;
        rg.sub = s;
        rg.mac_gain = mac_gain_for(net, fc.slots, s, a, zero);
        rg.det_gain = RMatrix::Ones(M, M);
        rg.to_reference_target = RMatrix(M, M);
        const auto& rn = plan.subs[s].nodes;
        for (int n = 0; n < M; ++n)
          for (int k = 0; k < M; ++k)
            rg.to_reference_target(n, k) = path_amplitude(
                distance(net.topo.position(rn[k]), net.topo.position(tn[n])), ctx.snr0, a, ctx.d_max);
        fc.relays.push_back(std::move(rg));
      }
      ctx.foreign.push_back(std::move(fc));
    }
  }

  // Every sub-cluster that forwards a MAC observation shares the xi1 budget.
  std::vector<int> seen;
  auto add_cal = [&](int s, const SlotTable& st) {
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) return;
    seen.push_back(s);
    ctx.calibration_gains.push_back(mac_gain_for(net, st, s, a, zero));
  };
  for (int s : ctx.slots.group_subs) add_cal(s, ctx.slots);
  for (const auto& rg : ctx.relays)
    for (const auto& ei : rg.interferers) add_cal(ei.sub, table_of(ei.cluster));
  for (const auto& fc : ctx.foreign)
    for (const auto& rg : fc.relays) add_cal(rg.sub, fc.slots);
  return ctx;
}

MacDraw run_transmission(const RelayGeometry& relay, const RVector& X, double snr0, Stream& rng) {
  const Eigen::Index M = relay.mac_gain.rows();
  MacDraw d;
  d.H.resize(M, relay.mac_gain.cols());
  d.noise.resize(M);
  fill_complex_normal(rng, d.H);
  fill_complex_normal(rng, d.noise);
  d.Y = mac_output(d.H, relay.mac_gain, X, d.noise, snr0);
  return d;
}

ExchangeOutput run_exchange(const CVector& Y, const CMatrix& F, const CMatrix& N3, const CMatrix& E,
                            double xi1, DetectionCase detection) {
  const Eigen::Index M = Y.size();
  ExchangeOutput out;
  out.received.resize(M, M);
  out.gamma.resize(M, M);
  const bool faded = detection == DetectionCase::kFadedExchange;
  for (Eigen::Index k = 0; k < M; ++k) {
    for (Eigen::Index j = 0; j < M; ++j) {
      const cd y = Y(j) / xi1;
      if (j == k) {
        out.received(k, j) = y;
        out.gamma(j, k) = 1.0;
        continue;
      }
      const cd f = faded ? F(j, k) : cd(1.0, 0.0);
      out.received(k, j) = std::conj(f) * (f * y + N3(j, k) + E(j, k));
      out.gamma(j, k) = std::norm(f);
    }
  }
  return out;
}

CVector relay_forward(const CMatrix& U, const CMatrix& received, double xi) {
  return U.cwiseProduct(received).rowwise().sum() / xi;
}

CVector coherent_detect(const std::vector<CVector>& z1, const std::vector<CMatrix>& Q,
                        const std::vector<RelayGeometry>& relays, double gain, const CVector& N4,
                        const CVector& O) {
  CVector z = N4 + O;
  for (std::size_t r = 0; r < relays.size(); ++r) {
    z += gain * (relays[r].det_gain.cast<cd>().cwiseProduct(Q[r]) * z1[r]);
  }
  return z;
}

namespace {

struct RelayDraw {
  MacDraw mac;
  CMatrix F, N3, Q;
};

RelayDraw draw_relay(const RelayGeometry& rg, const RVector& X, double snr0, Stream& rng) {
  const Eigen::Index M = rg.mac_gain.rows();
  RelayDraw d;
  d.mac = run_transmission(rg, X, snr0, rng);
  d.F.resize(M, M);
  d.N3.resize(M, M);
  d.Q.resize(M, M);
  fill_complex_normal(rng, d.F);
  fill_complex_normal(rng, d.N3);
  fill_complex_normal(rng, d.Q);
  for (Eigen::Index k = 0; k < M; ++k) d.N3(k, k) = 0.0;
  return d;
}

CMatrix matched_filter(const CMatrix& H, const CMatrix& Q) {
  const Eigen::Index M = Q.rows();
  return Q.adjoint() * H.leftCols(M).adjoint();
}

struct RelayPowers {
  RVector forward;
  RVector relay;
};

// Expected forwarded and relayed powers given the fades, for a relay whose
// exchange carries only noise plus an optional synthetic interference floor.
RelayPowers conditional_powers(const RelayGeometry& rg, const RelayDraw& d, const CMatrix& U,
                               const CMatrix& gamma, bool faded, const DetectionContext& ctx, double sigma_e) {
  const Eigen::Index M = U.rows();
  const CMatrix Hm = d.mac.H.cwiseProduct(rg.mac_gain.cast<cd>());
  const CMatrix T = U.cwiseProduct(gamma.transpose());
  RVector wpow(M);
  for (Eigen::Index k = 0; k < M; ++k) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < M; ++j)
      if (j != k) s += std::norm(U(k, j)) * (faded ? std::norm(d.F(j, k)) : 1.0);
    wpow(k) = s;
  }
  RelayPowers p;
  p.forward = (ctx.snr0 * Hm.cwiseAbs2().rowwise().sum().array() + 1.0) / (ctx.xi1 * ctx.xi1);
  p.relay = (ctx.snr0 * (T * Hm).cwiseAbs2().rowwise().sum() + T.cwiseAbs2().rowwise().sum()) /
                (ctx.xi1 * ctx.xi1 * ctx.xi * ctx.xi) +
            wpow * ((1.0 + sigma_e) / (ctx.xi * ctx.xi));
  return p;
}

}  // namespace

TrialRecord run_trial(const DetectionContext& ctx, std::uint64_t run_seed, long long trial, int node) {
  const int M = ctx.M;
  const int K = M * M;
  const auto t = static_cast<std::uint64_t>(trial);
  const std::size_t nr = ctx.relays.size();
  const bool full = ctx.mode == InterferenceMode::kFull;
  const bool faded = ctx.detection == DetectionCase::kFadedExchange;

  RVector X(K);
  {
    Stream sx(run_seed, "source-symbols", {t});
    fill_normal(sx, X);
  }
  std::map<int, RVector> foreign_x;
  auto symbols_of = [&](int cluster) -> const RVector& {
    if (cluster == ctx.cluster) return X;
    auto it = foreign_x.find(cluster);
    if (it == foreign_x.end()) {
      RVector x(K);
      Stream s(run_seed, "cluster-symbols", {t, static_cast<std::uint64_t>(cluster)});
      fill_normal(s, x);
      it = foreign_x.emplace(cluster, std::move(x)).first;
    }
    return it->second;
  };

  std::vector<RelayDraw> draws;
  draws.reserve(nr);
  for (std::size_t r = 0; r < nr; ++r) {
    Stream rs(run_seed, "relay", {t, r});
    draws.push_back(draw_relay(ctx.relays[r], X, ctx.snr0, rs));
  }

  // Exchange interference, indexed (slot j, receiver k).
  std::vector<CMatrix> E(nr, CMatrix::Zero(M, M));
  if (ctx.exchange_interference) {
    std::map<int, CVector> foreign_y;
    for (std::size_t r = 0; r < nr; ++r) {
      const RelayGeometry& rg = ctx.relays[r];
      if (!full) {
        if (rg.exchange_variance <= 0.0) continue;
        Stream se(run_seed, "exchange-synthetic", {t, r});
        fill_complex_normal(se, E[r]);
        E[r] *= std::sqrt(rg.exchange_variance);
        for (int k = 0; k < M; ++k) E[r](k, k) = 0.0;
        continue;
      }
      for (std::size_t i = 0; i < rg.interferers.size(); ++i) {
        const ExchangeInterferer& ei = rg.interferers[i];
        const CVector* y = nullptr;
        if (ei.relay_slot >= 0) {
          y = &draws[ei.relay_slot].mac.Y;
        } else {
          auto it = foreign_y.find(ei.sub);
          if (it == foreign_y.end()) {
            Stream sm(run_seed, "interferer-mac", {t, static_cast<std::uint64_t>(ei.sub)});
            RelayGeometry tmp;
            tmp.mac_gain = ei.mac_gain;
            it = foreign_y.emplace(ei.sub, run_transmission(tmp, symbols_of(ei.cluster), ctx.snr0, sm).Y).first;
          }
          y = &it->second;
        }
        CMatrix fade(M, M);
        Stream sf(run_seed, "interferer-fade", {t, r, i});
        fill_complex_normal(sf, fade);
        for (int j = 0; j < M; ++j)
          for (int k = 0; k < M; ++k)
            if (j != k) E[r](j, k) += ei.cross(j, k) * fade(j, k) * (*y)(j) / ctx.xi1;
      }
    }
  }

  // Physical route: exchange, relay forwarding and detection.
  TrialRecord rec;
  std::vector<CVector> z1(nr);
  std::vector<CMatrix> U(nr), Q(nr), gamma(nr);
  for (std::size_t r = 0; r < nr; ++r) {
    const RelayDraw& d = draws[r];
    const ExchangeOutput ex = run_exchange(d.mac.Y, d.F, d.N3, E[r], ctx.xi1, ctx.detection);
    U[r] = matched_filter(d.mac.H, d.Q);
    Q[r] = d.Q;
    gamma[r] = ex.gamma;
    z1[r] = relay_forward(U[r], ex.received, ctx.xi);
  }

  CVector N4(M);
  {
    Stream sn(run_seed, "detection-noise", {t});
    fill_complex_normal(sn, N4);
  }

  CVector O = CVector::Zero(M);
  if (full) {
    for (std::size_t f = 0; f < ctx.foreign.size(); ++f) {
      const ForeignCluster& fc = ctx.foreign[f];
      const RVector& xf = symbols_of(fc.cluster);
      for (std::size_t r = 0; r < fc.relays.size(); ++r) {
        const RelayGeometry& rg = fc.relays[r];
        Stream sr(run_seed, "foreign-relay", {t, f, r});
        const RelayDraw d = draw_relay(rg, xf, ctx.snr0, sr);
        const ExchangeOutput ex = run_exchange(d.mac.Y, d.F, d.N3, CMatrix::Zero(M, M), ctx.xi1, ctx.detection);
        const CMatrix Uf = matched_filter(d.mac.H, d.Q);
        const CVector zf = relay_forward(Uf, ex.received, ctx.xi);
        const RelayPowers pw = conditional_powers(rg, d, Uf, ex.gamma, faded, ctx, 0.0);
        rec.foreign_relay_power.insert(rec.foreign_relay_power.end(), pw.relay.data(), pw.relay.data() + M);
        CMatrix fade(M, M);
        Stream so(run_seed, "foreign-fade", {t, f, r});
        fill_complex_normal(so, fade);
        O += rg.to_reference_target.cast<cd>().cwiseProduct(fade) * zf;
      }
    }
  }

  // Coefficient route, one tagged term per noise source.
  const double inv = 1.0 / (ctx.xi * ctx.xi1);
  const double sq = std::sqrt(ctx.snr0);
  CMatrix C = CMatrix::Zero(M, K);
  CVector mac_n = CVector::Zero(M), exn = CVector::Zero(M), exi = CVector::Zero(M);
  RVector var_n2 = RVector::Zero(M), var_n3 = RVector::Zero(M), var_ex = RVector::Zero(M);
  for (std::size_t r = 0; r < nr; ++r) {
    const RelayDraw& d = draws[r];
    const CMatrix G = ctx.gain * ctx.relays[r].det_gain.cast<cd>().cwiseProduct(d.Q);
    const CMatrix T = U[r].cwiseProduct(gamma[r].transpose());
    const CMatrix GT = (G * T) * inv;
    const CMatrix THm = T * d.mac.H.cwiseProduct(ctx.relays[r].mac_gain.cast<cd>());
    C += (sq * inv) * (G * THm);
    mac_n += GT * d.mac.noise;
    var_n2 += GT.cwiseAbs2().rowwise().sum();
    // W(k, j) = U(k, j) conj(f_jk) for j != k.
    CMatrix W = U[r];
    for (int k = 0; k < M; ++k) {
      for (int j = 0; j < M; ++j) {
        W(k, j) = j == k ? cd(0.0, 0.0) : (faded ? U[r](k, j) * std::conj(d.F(j, k)) : U[r](k, j));
      }
    }
    const CMatrix Gs = G / ctx.xi;
    exn += Gs * W.cwiseProduct(d.N3.transpose()).rowwise().sum();
    exi += Gs * W.cwiseProduct(E[r].transpose()).rowwise().sum();
    const RVector wpow = W.cwiseAbs2().rowwise().sum();
    const RVector g2 = Gs.cwiseAbs2() * wpow;
    var_n3 += g2;
    if (!full) var_ex += ctx.relays[r].exchange_variance * g2;

    // Forwarded and relayed powers conditional on this trial's fades.
    const double sigma_e = full ? 0.0 : ctx.relays[r].exchange_variance;
    const RVector fwd = (ctx.snr0 * d.mac.H.cwiseAbs2().cwiseProduct(ctx.relays[r].mac_gain.cwiseAbs2()).rowwise().sum()
                             .array() + 1.0) / (ctx.xi1 * ctx.xi1);
    RVector rel = (ctx.snr0 * THm.cwiseAbs2().rowwise().sum() + T.cwiseAbs2().rowwise().sum()) /
                      (ctx.xi1 * ctx.xi1 * ctx.xi * ctx.xi) +
                  wpow * ((1.0 + sigma_e) / (ctx.xi * ctx.xi));
    if (full) {
      const CVector ez = W.cwiseProduct(E[r].transpose()).rowwise().sum() / ctx.xi;
      rel += ez.cwiseAbs2();
    }
    rec.forward_power.insert(rec.forward_power.end(), fwd.data(), fwd.data() + M);
    rec.relay_power.insert(rec.relay_power.end(), rel.data(), rel.data() + M);
  }

  CVector signal(M), multi(M);
  RVector var_mu(M);
  const CVector cx = C * X.cast<cd>();
  for (int n = 0; n < M; ++n) {
    signal(n) = C(n, n) * X(n);
    multi(n) = cx(n) - signal(n);
    var_mu(n) = C.row(n).cwiseAbs2().sum() - std::norm(C(n, n));
  }

  RVector var_other = RVector::Zero(M);
  if (!full && ctx.other_factor > 0.0) {
    Stream so(run_seed, "other-synthetic", {t});
    for (int n = 0; n < M; ++n) {
      const double own = std::norm(C(n, n)) + var_mu(n) + var_n2(n) + var_n3(n) + var_ex(n);
      var_other(n) = ctx.other_factor * own;
      O(n) = std::sqrt(var_other(n)) * so.complex_normal();
    }
  }

  const CVector z = coherent_detect(z1, Q, ctx.relays, ctx.gain, N4, O);
  for (int n = 0; n < M; ++n) {
    const cd sum = signal(n) + multi(n) + mac_n(n) + exn(n) + exi(n) + N4(n) + O(n);
    const double scale = std::abs(signal(n)) + std::abs(multi(n)) + std::abs(mac_n(n)) + std::abs(exn(n)) +
                         std::abs(exi(n)) + std::abs(N4(n)) + std::abs(O(n));
    rec.completeness_error = std::max(rec.completeness_error, std::abs(z(n) - sum) / std::max(scale, 1e-300));
  }

  rec.A = C(node, node);
  rec.multiuser = var_mu(node);
  rec.mac_noise = var_n2(node);
  rec.exchange_noise = var_n3(node);
  rec.exchange = full ? std::norm(exi(node)) : var_ex(node);
  rec.detection_noise = 1.0;
  rec.other = full ? std::norm(O(node)) : var_other(node);
  rec.signal = signal(node);
  rec.multiuser_s = multi(node);
  rec.mac_noise_s = mac_n(node);
  rec.exchange_noise_s = exn(node);
  rec.exchange_s = exi(node);
  rec.detection_noise_s = N4(node);
  rec.other_s = O(node);
  rec.z_direct = z(node);
  return rec;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<TrialRecord> run_trials(const DetectionContext& ctx, std::uint64_t seed, int trials, int threads) {
  if (trials < 1) throw ConfigError("trials must be positive");
  std::vector<TrialRecord> out(trials);
  parallel_for(trials, resolve_threads(threads), [&](long long i) { out[i] = run_trial(ctx, seed, i); });
  for (const auto& r : out) {
    if (!(r.completeness_error <= 1e-10)) {
      throw InvariantError("detector output differs from the sum of its components");
    }
  }
  return out;
}

namespace {

double max_node_mean(const std::vector<std::vector<double>>& per_trial) {
  if (per_trial.empty() || per_trial.front().empty()) return 0.0;
  const std::size_t nodes = per_trial.front().size();
  double best = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    CompensatedSum s;
    for (const auto& row : per_trial) s.add(row[k]);
    best = std::max(best, s.value() / per_trial.size());
  }
  return best;
}

}  // namespace

Calibration calibrate(DetectionContext& ctx, std::uint64_t seed, int trials, int threads) {
  if (trials < 1) throw ConfigError("calibration trials must be positive");
  const int M = ctx.M;
  const int K = M * M;
  const int workers = resolve_threads(threads);

  // xi1: largest mean MAC output power over all forwarding nodes, averaged
  // over fades with the symbol and noise expectation taken in closed form.
  const std::uint64_t s1 = derive_seed(seed, "calibrate-xi1", {});
  std::vector<std::vector<double>> power(trials);
  parallel_for(trials, workers, [&](long long i) {
    const auto t = static_cast<std::uint64_t>(i);
    RVector X(K);
    Stream sx(s1, "symbols", {t});
    fill_normal(sx, X);
    auto& row = power[i];
    row.reserve(ctx.calibration_gains.size() * M);
    for (std::size_t c = 0; c < ctx.calibration_gains.size(); ++c) {
      Stream sm(s1, "mac", {t, c});
      RelayGeometry tmp;
      tmp.mac_gain = ctx.calibration_gains[c];
      const MacDraw d = run_transmission(tmp, X, ctx.snr0, sm);
      const RVector p = ctx.snr0 * d.H.cwiseAbs2().cwiseProduct(tmp.mac_gain.cwiseAbs2()).rowwise().sum().array() + 1.0;
      row.insert(row.end(), p.data(), p.data() + M);
    }
  });
  ctx.xi1 = std::sqrt(max_node_mean(power));

  // xi: largest mean relay output power with xi = 1.
  ctx.xi = 1.0;
  const std::vector<TrialRecord> recs = run_trials(ctx, derive_seed(seed, "calibrate-xi", {}), trials, workers);
  std::vector<std::vector<double>> relay(trials), foreign(trials);
  for (int i = 0; i < trials; ++i) {
    relay[i] = recs[i].relay_power;
    foreign[i] = recs[i].foreign_relay_power;
  }
  ctx.xi = std::sqrt(std::max(max_node_mean(relay), max_node_mean(foreign)));

  Calibration cal;
  cal.xi1 = ctx.xi1;
  cal.xi = ctx.xi;
  cal.c9 = ctx.xi1 / M;
  cal.c10 = ctx.xi / (static_cast<double>(M) * M);
  cal.trials = trials;
  return cal;
}

}  // namespace fixedsnr
