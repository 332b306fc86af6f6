#include <doctest.h>

#include <map>
#include <set>

#include "fixedsnr/errors.hpp"
#include "fixedsnr/topology.hpp"
#include "oracles.hpp"

using namespace fixedsnr;

namespace {

NetworkParams params_for(int m, int k0 = 1) {
  NetworkParams p;
  p.m = m;
  p.k0 = k0;
  p.allow_large_k0 = true;
  return p;
}

}  // namespace

TEST_SUITE("topology") {
  TEST_CASE("grid sizes and halves") {
    const GridTopology t2 = build_grid(params_for(2));
    CHECK(t2.n == 64);
    CHECK(t2.transmit.size() == 32);
    CHECK(t2.receive.size() == 32);
    CHECK(t2.idle.empty());
    CHECK(t2.d_max == doctest::Approx(7.0 * std::sqrt(2.0)));

    const GridTopology t3 = build_grid(params_for(3));
    CHECK(t3.side == 27);
    CHECK(t3.transmit.size() == 27 * 13);
    CHECK(t3.receive.size() == 27 * 13);
    CHECK(t3.idle.size() == 27);
    for (NodeId v : t3.idle) CHECK(t3.position(v).x == 14);
    for (NodeId v : t3.transmit) CHECK(t3.position(v).x <= 13);
    for (NodeId v : t3.receive) CHECK(t3.position(v).x >= 15);
  }

  TEST_CASE("parameter validation") {
    NetworkParams p;
    p.m = 1;
    CHECK_THROWS_AS(build_grid(p), ConfigError);
    p = NetworkParams{};
    p.alpha = 2.0;
    CHECK_THROWS_AS(build_grid(p), ConfigError);
    p = NetworkParams{};
    p.m = 2;
    p.k0 = 2;  // n^(1/6) = 2
    CHECK_THROWS_AS(build_grid(p), ConfigError);
    p.allow_large_k0 = true;
    CHECK_NOTHROW(build_grid(p));
    p = NetworkParams{};
    p.b = 0;
    CHECK_THROWS_AS(build_grid(p), ConfigError);
  }

  TEST_CASE("pairing is a seeded bijection") {
    const GridTopology t = build_grid(params_for(3));
    const Pairing a = pair_sources(t, 11);
    const Pairing b = pair_sources(t, 11);
    const Pairing c = pair_sources(t, 12);
    CHECK(a.destination_of == b.destination_of);
    CHECK(a.destination_of != c.destination_of);
    std::set<NodeId> hit;
    for (NodeId v : t.transmit) {
      const NodeId w = a.destination_of[v];
      REQUIRE(w >= 0);
      CHECK(a.source_of[w] == v);
      hit.insert(w);
    }
    CHECK(hit.size() == t.receive.size());
    for (NodeId w : t.receive) CHECK(a.destination_of[a.source_of[w]] == w);
    for (NodeId v : t.idle) {
      CHECK(a.destination_of[v] == -1);
      CHECK(a.source_of[v] == -1);
    }
    double longest = 0.0;
    for (NodeId v : t.transmit) longest = std::max(longest, oracle::node_distance(t, v, a.destination_of[v]));
    CHECK(a.realized_dmax == doctest::Approx(longest));
  }

  TEST_CASE("pairing marginals are uniform") {
    const GridTopology t = build_grid(params_for(2));
    const int draws = 4000;
    std::map<std::pair<NodeId, NodeId>, int> counts;
    for (int s = 0; s < draws; ++s) {
      const Pairing p = pair_sources(t, 1000 + s);
      counts[{t.transmit[0], p.destination_of[t.transmit[0]]}]++;
    }
    // Chi-square with 31 degrees of freedom; 70 is far in the upper tail.
    const double expected = draws / 32.0;
    double chi2 = 0.0;
    for (NodeId w : t.receive) {
      const double o = counts[{t.transmit[0], w}];
      chi2 += (o - expected) * (o - expected) / expected;
    }
    CHECK(chi2 < 70.0);
  }

  TEST_CASE("partition for m = 2") {
    const GridTopology t = build_grid(params_for(2));
    const ClusterPlan plan = partition_clusters(t);
    CHECK(plan.clusters.size() == 2);
    CHECK(plan.subs.size() == 8);
    const NodeId corner = t.id({5, 1});
    CHECK(plan.cluster_of_node[corner] == 0);
    CHECK(plan.sub_of_node[corner] == 0);
    CHECK(plan.dropped.empty());
    std::size_t total = 0;
    for (const auto& c : plan.clusters) total += c.nodes.size();
    CHECK(total == static_cast<std::size_t>(t.n / 2));
  }

  TEST_CASE("partition covers every receive node once") {
    for (int m = 2; m <= 5; ++m) {
      CAPTURE(m);
      const GridTopology t = build_grid(params_for(m));
      const ClusterPlan plan = partition_clusters(t);
      const int M = m * m;
      CHECK(static_cast<int>(plan.clusters.size()) == M / 2);
      std::vector<int> seen(t.n, 0);
      for (const auto& cl : plan.clusters) {
        CHECK(static_cast<int>(cl.subs.size()) == M);
        CHECK(static_cast<int>(cl.nodes.size()) == M * M);
        for (int s : cl.subs) {
          CHECK(plan.subs[s].cluster == cl.index);
          CHECK(static_cast<int>(plan.subs[s].nodes.size()) == M);
          for (NodeId v : plan.subs[s].nodes) {
            seen[v]++;
            CHECK(plan.sub_of_node[v] == s);
            CHECK(plan.cluster_of_node[v] == cl.index);
          }
        }
      }
      for (NodeId v : plan.dropped) seen[v]++;
      for (NodeId v : t.receive) CHECK(seen[v] == 1);
      for (NodeId v : t.transmit) CHECK(seen[v] == 0);
      if (m % 2 == 0) {
        CHECK(plan.dropped.empty());
      }
    }
  }

  TEST_CASE("distances agree with node-pair brute force") {
    for (int m : {2, 3}) {
      CAPTURE(m);
      const GridTopology t = build_grid(params_for(m));
      const ClusterPlan plan = partition_clusters(t);
      for (std::size_t a = 0; a < plan.clusters.size(); ++a) {
        for (std::size_t b = 0; b < plan.clusters.size(); ++b) {
          const double want = a == b ? 0.0 : oracle::set_distance(t, plan.clusters[a].nodes, plan.clusters[b].nodes);
          CHECK(plan.cluster_distance(static_cast<int>(a), static_cast<int>(b)) == doctest::Approx(want));
          if (a != b) CHECK(plan.cluster_distance(static_cast<int>(a), static_cast<int>(b)) > 0.0);
        }
      }
      for (std::size_t a = 0; a < plan.subs.size(); a += 3) {
        for (std::size_t b = 0; b < plan.subs.size(); ++b) {
          const double want = a == b ? 0.0 : oracle::set_distance(t, plan.subs[a].nodes, plan.subs[b].nodes);
          CHECK(plan.sub_distance(static_cast<int>(a), static_cast<int>(b)) == doctest::Approx(want));
        }
      }
    }
  }

  TEST_CASE("colourings are proper with the expected class counts") {
    // Counts from an independent greedy implementation working on node sets.
    const std::map<int, std::pair<int, int>> expected{
        {2, {2, 8}}, {3, {4, 15}}, {4, {8, 18}}, {5, {10, 19}}, {6, {12, 18}}};
    for (const auto& [m, counts] : expected) {
      CAPTURE(m);
      const GridTopology t = build_grid(params_for(m));
      const ClusterPlan plan = partition_clusters(t);
      const int M = m * m;
      const GroupAssignment cl = color_groups(plan, GroupLevel::kCluster,
                                              default_threshold(M, GroupLevel::kCluster, SubClusterReuse::kOwnScale));
      const GroupAssignment sub = color_groups(
          plan, GroupLevel::kSubCluster, default_threshold(M, GroupLevel::kSubCluster, SubClusterReuse::kOwnScale));
      CHECK(cl.colors == counts.first);
      CHECK(sub.colors == counts.second);
      CHECK(cl.colors <= 19);
      CHECK(sub.colors <= 19);
      for (const auto& cls : cl.classes()) {
        for (std::size_t i = 0; i < cls.size(); ++i)
          for (std::size_t j = i + 1; j < cls.size(); ++j)
            CHECK(plan.cluster_distance(cls[i], cls[j]) >= 2.0 * std::sqrt(2.0) * M);
      }
      for (const auto& cls : sub.classes()) {
        for (std::size_t i = 0; i < cls.size(); ++i)
          for (std::size_t j = i + 1; j < cls.size(); ++j)
            CHECK(plan.sub_distance(cls[i], cls[j]) >= 2.0 * std::sqrt(2.0 * M));
      }
    }
  }

  TEST_CASE("two clusters at m = 2 need two colours") {
    const GridTopology t = build_grid(params_for(2));
    const ClusterPlan plan = partition_clusters(t);
    CHECK(plan.cluster_distance(0, 1) < 2.0 * std::sqrt(2.0) * 4);
    const GroupAssignment g = color_groups(plan, GroupLevel::kCluster, 2.0 * std::sqrt(2.0) * 4);
    CHECK(g.colors == 2);
  }

  TEST_CASE("the cluster reuse distance applied to sub-clusters overflows the colour budget") {
    const GridTopology t = build_grid(params_for(3));
    const ClusterPlan plan = partition_clusters(t);
    CHECK_THROWS_AS(color_groups(plan, GroupLevel::kSubCluster,
                                 default_threshold(9, GroupLevel::kSubCluster, SubClusterReuse::kLiteral)),
                    ColoringError);
    const GroupAssignment wide = color_groups(plan, GroupLevel::kSubCluster, 2.0 * std::sqrt(2.0) * 9, 1000);
    CHECK(wide.colors > 19);
  }

  TEST_CASE("served sources match a brute-force filter") {
    for (int k0 : {0, 1, 2}) {
      CAPTURE(k0);
      const NetworkParams p = params_for(2, k0);
      const GridTopology t = build_grid(p);
      const ClusterPlan plan = partition_clusters(t);
      const Pairing pr = pair_sources(t, 5);
      const AdmissibleSets adm = admissible_sources(t, plan, pr, k0);
      long long total = 0;
      for (const auto& cl : plan.clusters) {
        std::vector<NodeId> want;
        for (NodeId w : cl.nodes) {
          const NodeId v = pr.source_of[w];
          if (oracle::point_set_distance(t, v, cl.nodes) >= k0 * 4) want.push_back(v);
        }
        std::vector<NodeId> got;
        for (const auto& a : adm.per_cluster[cl.index]) got.push_back(a.source);
        CHECK(got == want);
        total += static_cast<long long>(want.size());
      }
      CHECK(adm.served_total == total);
      if (k0 == 0) CHECK(adm.served_total == t.n / 2);
    }
  }

  TEST_CASE("served count is non-increasing in k0") {
    const GridTopology t = build_grid(params_for(3));
    const ClusterPlan plan = partition_clusters(t);
    const Pairing pr = pair_sources(t, 3);
    long long prev = admissible_sources(t, plan, pr, 0).served_total;
    CHECK(prev == static_cast<long long>(plan.clusters.size()) * 81);
    for (int k0 = 1; k0 <= 5; ++k0) {
      const long long cur = admissible_sources(t, plan, pr, k0).served_total;
      CHECK(cur <= prev);
      prev = cur;
    }
  }

  TEST_CASE("served count averages to its exact expectation") {
    // Under a uniform bijection the source of w is uniform over the transmit
    // half, so the expected served count is a sum of per-destination fractions.
    for (auto [m, k0] : {std::pair{2, 1}, std::pair{4, 2}}) {
      CAPTURE(m);
      const GridTopology t = build_grid(params_for(m, k0));
      const ClusterPlan plan = partition_clusters(t);
      const int M = m * m;
      double expected = 0.0;
      for (const auto& cl : plan.clusters) {
        // Every node of a cluster sees the same set of far-away sources.
        int far = 0;
        for (NodeId v : t.transmit) {
          if (plan.point_cluster_gap_sq(t.position(v), cl.index) >= 1LL * k0 * M * k0 * M) ++far;
        }
        expected += static_cast<double>(cl.nodes.size()) * far / t.transmit.size();
      }
      if (m == 2) CHECK(expected == doctest::Approx(12.0));
      if (m == 4) CHECK(expected == doctest::Approx(974.0).epsilon(1e-3));
      const int draws = m == 2 ? 2000 : 60;
      double s = 0.0, s2 = 0.0;
      for (int d = 0; d < draws; ++d) {
        const double x = static_cast<double>(admissible_sources(t, plan, pair_sources(t, 77 + d), k0).served_total);
        s += x;
        s2 += x * x;
      }
      const double mean = s / draws;
      const double se = std::sqrt((s2 / draws - mean * mean) / draws);
      CHECK(std::abs(mean - expected) <= 4.0 * se + 1e-9);
    }
  }

  TEST_CASE("collections partition a group") {
    const GridTopology t = build_grid(params_for(2));
    const ClusterPlan plan = partition_clusters(t);
    const auto single = build_collections(plan, {3});
    CHECK(single.size() == 4);
    for (const auto& c : single) CHECK(c.size() == 1);
    const auto triple = build_collections(plan, {0, 3, 6});
    CHECK(triple.size() == 4);
    std::set<NodeId> all;
    for (std::size_t p = 0; p < triple.size(); ++p) {
      CHECK(triple[p].size() == 3);
      for (std::size_t g = 0; g < 3; ++g) {
        CHECK(plan.sub_of_node[triple[p][g]] == std::vector<int>{0, 3, 6}[g]);
        all.insert(triple[p][g]);
      }
    }
    CHECK(all.size() == 12);
    const Network net = build_network(params_for(2), 1);
    for (const auto& cls : net.sub_colors.classes()) {
      std::set<NodeId> cover;
      for (const auto& c : build_collections(net.plan, cls)) cover.insert(c.begin(), c.end());
      std::size_t want = 0;
      for (int s : cls) want += net.plan.subs[s].nodes.size();
      CHECK(cover.size() == want);
    }
  }
}
