#pragma once

#include <cstdint>
#include <vector>

#include "fixedsnr/params.hpp"

namespace fixedsnr {

using NodeId = int;

struct Point {
  int x = 0;  // column, 1-based
  int y = 0;  // row, 1-based
};

struct PointD {
  double x = 0.0;
  double y = 0.0;
};

// Inclusive integer rectangle of grid positions.
struct Rect {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

long long distance_sq(Point a, Point b);
double distance(Point a, Point b);
double distance(PointD a, Point b);
// Squared gap between closest members; zero when the rectangles touch-share a node.
long long gap_sq(const Rect& a, const Rect& b);
long long gap_sq(Point p, const Rect& r);

// Square grid of side m^3 split by a vertical line into a transmit half on
// the left and a receive half on the right. For odd sides the middle column
// takes part in neither half.
struct GridTopology {
  int m = 0;
  int M = 0;
  int side = 0;
  int n = 0;
  int half_width = 0;
  double d_max = 0.0;  // corner-to-corner diagonal
  std::vector<NodeId> transmit;
  std::vector<NodeId> receive;
  std::vector<NodeId> idle;

  NodeId id(Point p) const { return (p.y - 1) * side + (p.x - 1); }
  Point position(NodeId v) const { return {v % side + 1, v / side + 1}; }
  int receive_x0() const { return side - half_width + 1; }
};

GridTopology build_grid(const NetworkParams& params);

struct Pairing {
  std::vector<NodeId> destination_of;  // -1 for nodes that do not transmit
  std::vector<NodeId> source_of;       // -1 for nodes that do not receive
  double realized_dmax = 0.0;          // longest source-destination distance
};

// Uniformly random bijection from transmit to receive nodes.
Pairing pair_sources(const GridTopology& topo, std::uint64_t seed);

struct SubCluster {
  int index = 0;
  int cluster = -1;
  Rect rect;
  std::vector<NodeId> nodes;  // row-major
};

struct Cluster {
  int index = 0;
  std::vector<int> subs;      // row-major
  std::vector<NodeId> nodes;  // row-major over the whole cluster
  PointD center;
};

struct ClusterPlan {
  int M = 0;
  int sub_side = 0;
  std::vector<SubCluster> subs;
  std::vector<Cluster> clusters;
  std::vector<int> sub_of_node;      // -1 outside every sub-cluster
  std::vector<int> cluster_of_node;  // -1 outside every cluster
  std::vector<NodeId> dropped;       // receive nodes left out of the tiling

  long long sub_gap_sq(int a, int b) const;
  long long cluster_gap_sq(int a, int b) const;
  long long point_cluster_gap_sq(Point p, int cluster) const;
  double sub_distance(int a, int b) const;
  double cluster_distance(int a, int b) const;
  // Distance between the centres of two sub-clusters.
  double sub_center_distance(int a, int b) const;
  PointD sub_center(int s) const;
};

// Tiles the receive half with sqrt(M) x sqrt(M) sub-clusters and groups them
// into M x M clusters. Sub-cluster columns that do not fill a whole cluster
// column are grouped row-major into clusters of M sub-clusters.
ClusterPlan partition_clusters(const GridTopology& topo);

enum class GroupLevel { kCluster, kSubCluster };

struct GroupAssignment {
  GroupLevel level = GroupLevel::kCluster;
  double threshold = 0.0;
  std::vector<int> color_of;
  int colors = 0;

  std::vector<std::vector<int>> classes() const;
};

double default_threshold(int M, GroupLevel level, SubClusterReuse reuse);

// Greedy colouring in row-major order of the conflict graph whose edges join
// members closer than `threshold`. Throws ColoringError past `max_colors`.
GroupAssignment color_groups(const ClusterPlan& plan, GroupLevel level, double threshold,
                             int max_colors = 19);

struct AdmissiblePair {
  NodeId source = -1;
  NodeId destination = -1;
};

struct AdmissibleSets {
  std::vector<std::vector<AdmissiblePair>> per_cluster;
  long long served_total = 0;
};

// A source is served when it lies at least k0*M from every node of its
// destination's cluster.
AdmissibleSets admissible_sources(const GridTopology& topo, const ClusterPlan& plan,
                                  const Pairing& pairing, int k0);

// Collection p holds the p-th node of every sub-cluster in `group`.
std::vector<std::vector<NodeId>> build_collections(const ClusterPlan& plan,
                                                   const std::vector<int>& group);

// Everything that depends only on geometry and the pairing draw.
struct Network {
  NetworkParams params;
  GridTopology topo;
  Pairing pairing;
  ClusterPlan plan;
  GroupAssignment cluster_colors;
  GroupAssignment sub_colors;
  AdmissibleSets admissible;
  double d_max = 0.0;
};

Network build_network(const NetworkParams& params, std::uint64_t seed);

}  // namespace fixedsnr
