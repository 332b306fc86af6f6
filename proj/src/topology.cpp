#include "fixedsnr/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fixedsnr/errors.hpp"
#include "fixedsnr/rng.hpp"

namespace fixedsnr {

long long distance_sq(Point a, Point b) {
  const long long dx = a.x - b.x;
  const long long dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Point a, Point b) { return std::sqrt(static_cast<double>(distance_sq(a, b))); }

double distance(PointD a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

long long axis_gap(int lo_a, int hi_a, int lo_b, int hi_b) {
  if (hi_a < lo_b) return lo_b - hi_a;
  if (hi_b < lo_a) return lo_a - hi_b;
  return 0;
}

}  // namespace

long long gap_sq(const Rect& a, const Rect& b) {
  const long long gx = axis_gap(a.x0, a.x1, b.x0, b.x1);
  const long long gy = axis_gap(a.y0, a.y1, b.y0, b.y1);
  return gx * gx + gy * gy;
}

long long gap_sq(Point p, const Rect& r) { return gap_sq(Rect{p.x, p.x, p.y, p.y}, r); }

GridTopology build_grid(const NetworkParams& params) {
  params.validate();
  GridTopology t;
  t.m = params.m;
  t.M = params.M();
  t.side = params.side();
  t.n = t.side * t.side;
  t.half_width = t.side / 2;
  t.d_max = std::sqrt(2.0) * (t.side - 1);
  const int rx0 = t.receive_x0();
  for (int y = 1; y <= t.side; ++y) {
    for (int x = 1; x <= t.side; ++x) {
      const NodeId v = t.id({x, y});
      if (x <= t.half_width) {
        t.transmit.push_back(v);
      } else if (x >= rx0) {
        t.receive.push_back(v);
      } else {
        t.idle.push_back(v);
      }
    }
  }
  return t;
}

Pairing pair_sources(const GridTopology& topo, std::uint64_t seed) {
  if (topo.transmit.size() != topo.receive.size()) {
    throw InvariantError("transmit and receive halves differ in size");
  }
  std::vector<NodeId> shuffled = topo.receive;
  Stream rng(seed, "pairing");
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
  }
  Pairing p;
  p.destination_of.assign(topo.n, -1);
  p.source_of.assign(topo.n, -1);
  long long longest = 0;
  for (std::size_t i = 0; i < topo.transmit.size(); ++i) {
    const NodeId v = topo.transmit[i];
    const NodeId w = shuffled[i];
    p.destination_of[v] = w;
    p.source_of[w] = v;
    longest = std::max(longest, distance_sq(topo.position(v), topo.position(w)));
  }
  p.realized_dmax = std::sqrt(static_cast<double>(longest));
  return p;
}

long long ClusterPlan::sub_gap_sq(int a, int b) const { return gap_sq(subs[a].rect, subs[b].rect); }

long long ClusterPlan::cluster_gap_sq(int a, int b) const {
  if (a == b) return 0;
  long long best = -1;
  for (int sa : clusters[a].subs) {
    for (int sb : clusters[b].subs) {
      const long long g = sub_gap_sq(sa, sb);
      if (best < 0 || g < best) best = g;
    }
  }
  return best;
}

long long ClusterPlan::point_cluster_gap_sq(Point p, int cluster) const {
  long long best = -1;
  for (int s : clusters[cluster].subs) {
    const long long g = gap_sq(p, subs[s].rect);
    if (best < 0 || g < best) best = g;
  }
  return best;
}

double ClusterPlan::sub_distance(int a, int b) const {
  return std::sqrt(static_cast<double>(sub_gap_sq(a, b)));
}

double ClusterPlan::cluster_distance(int a, int b) const {
  return std::sqrt(static_cast<double>(cluster_gap_sq(a, b)));
}

PointD ClusterPlan::sub_center(int s) const {
  const Rect& r = subs[s].rect;
  return {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)};
}

double ClusterPlan::sub_center_distance(int a, int b) const {
  const PointD ca = sub_center(a);
  const PointD cb = sub_center(b);
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

ClusterPlan partition_clusters(const GridTopology& topo) {
  const int s = topo.m;  // sub-cluster side
  const int M = topo.M;
  if (topo.side != s * M || topo.half_width < s) {
    throw ConfigError("receive half cannot be tiled by sub-clusters");
  }
  ClusterPlan plan;
  plan.M = M;
  plan.sub_side = s;
  const int sub_cols = topo.half_width / s;
  const int sub_rows = topo.side / s;  // equals M
  const int rx0 = topo.receive_x0();

  // Sub-clusters indexed row-major by their top-left corner.
  std::vector<std::vector<int>> grid(sub_rows, std::vector<int>(sub_cols));
  for (int r = 0; r < sub_rows; ++r) {
    for (int c = 0; c < sub_cols; ++c) {
      SubCluster sc;
      sc.index = static_cast<int>(plan.subs.size());
      sc.rect = {rx0 + c * s, rx0 + c * s + s - 1, 1 + r * s, r * s + s};
      for (int y = sc.rect.y0; y <= sc.rect.y1; ++y)
        for (int x = sc.rect.x0; x <= sc.rect.x1; ++x) sc.nodes.push_back(topo.id({x, y}));
      grid[r][c] = sc.index;
      plan.subs.push_back(std::move(sc));
    }
  }

  // Full clusters are s x s blocks of sub-clusters; the remaining sub-columns
  // are filled row-major into clusters of M sub-clusters.
  std::vector<std::vector<int>> groups;
  const int block_cols = sub_cols / s;
  for (int br = 0; br < sub_rows / s; ++br) {
    for (int bc = 0; bc < block_cols; ++bc) {
      std::vector<int> g;
      for (int r = br * s; r < br * s + s; ++r)
        for (int c = bc * s; c < bc * s + s; ++c) g.push_back(grid[r][c]);
      groups.push_back(std::move(g));
    }
  }
  std::vector<int> rest;
  for (int r = 0; r < sub_rows; ++r)
    for (int c = block_cols * s; c < sub_cols; ++c) rest.push_back(grid[r][c]);
  for (std::size_t i = 0; i + M <= rest.size(); i += M) {
    groups.emplace_back(rest.begin() + static_cast<long>(i), rest.begin() + static_cast<long>(i + M));
  }

  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });

  plan.sub_of_node.assign(topo.n, -1);
  plan.cluster_of_node.assign(topo.n, -1);
  for (std::size_t ci = 0; ci < groups.size(); ++ci) {
    Cluster cl;
    cl.index = static_cast<int>(ci);
    cl.subs = groups[ci];
    double sx = 0.0, sy = 0.0;
    for (int si : cl.subs) {
      plan.subs[si].cluster = cl.index;
      for (NodeId v : plan.subs[si].nodes) {
        cl.nodes.push_back(v);
        plan.sub_of_node[v] = si;
        plan.cluster_of_node[v] = cl.index;
        const Point p = topo.position(v);
        sx += p.x;
        sy += p.y;
      }
    }
    std::sort(cl.nodes.begin(), cl.nodes.end());
    cl.center = {sx / cl.nodes.size(), sy / cl.nodes.size()};
    plan.clusters.push_back(std::move(cl));
  }
  for (NodeId v : topo.receive)
    if (plan.cluster_of_node[v] < 0) plan.dropped.push_back(v);
  return plan;
}

std::vector<std::vector<int>> GroupAssignment::classes() const {
  std::vector<std::vector<int>> out(colors);
  for (std::size_t i = 0; i < color_of.size(); ++i) out[color_of[i]].push_back(static_cast<int>(i));
  return out;
}

double default_threshold(int M, GroupLevel level, SubClusterReuse reuse) {
  const double scale = (level == GroupLevel::kCluster || reuse == SubClusterReuse::kLiteral)
                           ? static_cast<double>(M)
                           : std::sqrt(static_cast<double>(M));
  return 2.0 * std::sqrt(2.0) * scale;
}

GroupAssignment color_groups(const ClusterPlan& plan, GroupLevel level, double threshold,
                             int max_colors) {
  if (!(threshold > 0.0)) throw ConfigError("colouring threshold must be positive");
  const int count = level == GroupLevel::kCluster ? static_cast<int>(plan.clusters.size())
                                                  : static_cast<int>(plan.subs.size());
  std::vector<long long> gaps(static_cast<std::size_t>(count) * count, 0);
  for (int a = 0; a < count; ++a) {
    for (int b = a + 1; b < count; ++b) {
      const long long g = level == GroupLevel::kCluster ? plan.cluster_gap_sq(a, b) : plan.sub_gap_sq(a, b);
      gaps[a * count + b] = gaps[b * count + a] = g;
    }
  }
  const double t2 = threshold * threshold;
  GroupAssignment out;
  out.level = level;
  out.threshold = threshold;
  out.color_of.assign(count, -1);
  std::vector<int> used;
  for (int v = 0; v < count; ++v) {
    used.assign(out.colors + 1, 0);
    for (int u = 0; u < v; ++u) {
      if (static_cast<double>(gaps[v * count + u]) < t2) used[out.color_of[u]] = 1;
    }
    int c = 0;
    while (used[c]) ++c;
    out.color_of[v] = c;
    out.colors = std::max(out.colors, c + 1);
    if (out.colors > max_colors) {
      throw ColoringError(std::string(level == GroupLevel::kCluster ? "cluster" : "sub-cluster") +
                          " colouring needs more than " + std::to_string(max_colors) + " colours");
    }
  }
  return out;
}

AdmissibleSets admissible_sources(const GridTopology& topo, const ClusterPlan& plan,
                                  const Pairing& pairing, int k0) {
  if (k0 < 0) throw ConfigError("k0 must be non-negative");
  const long long guard = static_cast<long long>(k0) * plan.M;
  AdmissibleSets out;
  out.per_cluster.resize(plan.clusters.size());
  for (const Cluster& cl : plan.clusters) {
    for (NodeId w : cl.nodes) {
      const NodeId v = pairing.source_of[w];
      if (v < 0) throw InvariantError("receive node without a source");
      if (plan.point_cluster_gap_sq(topo.position(v), cl.index) >= guard * guard) {
        out.per_cluster[cl.index].push_back({v, w});
      }
    }
    out.served_total += static_cast<long long>(out.per_cluster[cl.index].size());
  }
  return out;
}

std::vector<std::vector<NodeId>> build_collections(const ClusterPlan& plan, const std::vector<int>& group) {
  std::vector<std::vector<NodeId>> out(plan.M);
  for (int s : group) {
    const auto& nodes = plan.subs.at(s).nodes;
    if (static_cast<int>(nodes.size()) != plan.M) throw InvariantError("sub-cluster size differs from M");
    for (int p = 0; p < plan.M; ++p) out[p].push_back(nodes[p]);
  }
  return out;
}

Network build_network(const NetworkParams& params, std::uint64_t seed) {
  Network net;
  net.params = params;
  net.topo = build_grid(params);
  net.pairing = pair_sources(net.topo, seed);
  net.plan = partition_clusters(net.topo);
  const int M = params.M();
  net.cluster_colors = color_groups(net.plan, GroupLevel::kCluster,
                                    default_threshold(M, GroupLevel::kCluster, params.sub_reuse),
                                    params.max_colors);
  net.sub_colors = color_groups(net.plan, GroupLevel::kSubCluster,
                                default_threshold(M, GroupLevel::kSubCluster, params.sub_reuse),
                                params.max_colors);
  net.admissible = admissible_sources(net.topo, net.plan, net.pairing, params.k0);
  net.d_max = params.dmax == DmaxConvention::kFullDiagonal ? net.topo.d_max : net.pairing.realized_dmax;
  return net;
}

}  // namespace fixedsnr
