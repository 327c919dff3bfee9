#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "doctest.h"
#include "gnarl/environments.hpp"
#include "gnarl/metrics.hpp"
#include "gnarl/oracles.hpp"
#include "gnarl/rng.hpp"
#include "gnarl/validators.hpp"
#include "helpers.hpp"

using namespace gnarl;

namespace {

Graph weighted(int n, std::vector<Edge> edges, std::vector<double> w) { return Graph(n, std::move(edges), false, std::move(w)); }

std::vector<int> identity(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

double path_cost(const Graph& g, const std::vector<int>& pred, int v) {
  double c = 0.0;
  for (int k = 0; pred[static_cast<std::size_t>(v)] != v && k <= g.node_count(); ++k) {
    c += g.weight(pred[static_cast<std::size_t>(v)], v);
    v = pred[static_cast<std::size_t>(v)];
  }
  return c;
}

}  // namespace

TEST_CASE("check_bfs examples") {
  CHECK(check_bfs(testutil::path_graph(3), 0, {0, 0, 1}));
  CHECK_FALSE(check_bfs(testutil::cycle_graph(3), 0, {0, 0, 1}));
  CHECK(check_bfs(testutil::cycle_graph(3), 0, {0, 0, 0}));
  CHECK_FALSE(check_bfs(testutil::cycle_graph(3), 0, {0, 0, 2}));
  CHECK(check_bfs(Graph(4, {{0, 1}, {2, 3}}, false), 0, {0, 0, 2, 3}));
  CHECK_FALSE(check_bfs(Graph(4, {{0, 1}, {2, 3}}, false), 0, {0, 0, 2, 2}));
  CHECK_FALSE(check_bfs(testutil::path_graph(3), 0, {1, 0, 1}));
}

TEST_CASE("check_dfs examples") {
  CHECK(check_dfs(Graph(1, {}, false), {0}));
  CHECK(check_dfs(testutil::path_graph(3), {0, 0, 1}));
  CHECK(check_dfs(testutil::path_graph(3), {1, 2, 2}));
  // A DFS from 2 would continue from 1 into 0, so 0 cannot remain a root.
  CHECK_FALSE(check_dfs(testutil::path_graph(3), {0, 2, 2}));
  CHECK_FALSE(check_dfs(testutil::path_graph(3), {1, 0, 1}));
}

TEST_CASE("check_dfs agrees with enumerated DFS executions") {
  // Every graph on up to 5 nodes, every predecessor array.
  for (int n = 1; n <= 5; ++n) {
    const int pairs = n * (n - 1) / 2;
    for (std::uint32_t bits = 0; bits < (1u << pairs); ++bits) {
      const Graph g = testutil::from_bits(n, bits, false);
      const auto valid = testutil::dfs_outputs(g);
      std::vector<int> pred(static_cast<std::size_t>(n), 0);
      for (;;) {
        CHECK(check_dfs(g, pred) == static_cast<bool>(valid.count(pred)));
        int i = 0;
        while (i < n && ++pred[static_cast<std::size_t>(i)] == n) pred[static_cast<std::size_t>(i++)] = 0;
        if (i == n) break;
      }
    }
  }
  // Every connected graph on 6 nodes: accepted outputs plus single-entry mutations of one of them.
  int connected = 0;
  for (std::uint32_t bits = 0; bits < (1u << 15); ++bits) {
    const Graph g = testutil::from_bits(6, bits, false);
    if (!g.connected()) continue;
    ++connected;
    const auto valid = testutil::dfs_outputs(g);
    for (const auto& p : valid) CHECK(check_dfs(g, p));
    std::vector<int> m = *valid.begin();
    for (int v = 0; v < 6; ++v)
      for (int u = 0; u < 6; ++u) {
        const int keep = m[static_cast<std::size_t>(v)];
        m[static_cast<std::size_t>(v)] = u;
        CHECK(check_dfs(g, m) == static_cast<bool>(valid.count(m)));
        m[static_cast<std::size_t>(v)] = keep;
      }
  }
  CHECK(connected == 26704);
  // Random graphs on 7 nodes, directed included.
  Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    const Graph g = generate_er(7, 0.2 + 0.5 * rng.uniform(), rng.next_u64(), t % 4 == 0);
    const auto valid = testutil::dfs_outputs(g);
    for (const auto& p : valid) CHECK(check_dfs(g, p));
    std::vector<int> p = *valid.begin();
    for (int k = 0; k < 20; ++k) {
      std::vector<int> q = p;
      q[rng.below(7)] = static_cast<int>(rng.below(7));
      CHECK(check_dfs(g, q) == static_cast<bool>(valid.count(q)));
    }
  }
}

TEST_CASE("check_bellman_ford examples") {
  CHECK(check_bellman_ford(weighted(2, {{0, 1}}, {0.4}), 0, {0, 0}));
  // 4-cycle 0-1-2-3-0 with a heavy edge 0-3: node 3 is cheaper through 2.
  const Graph c = weighted(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {0.1, 0.1, 0.1, 0.9});
  CHECK(check_bellman_ford(c, 0, {0, 0, 1, 2}));
  CHECK_FALSE(check_bellman_ford(c, 0, {0, 0, 1, 0}));
  CHECK(check_bellman_ford(weighted(3, {{0, 1}}, {0.4}), 0, {0, 0, 2}));
  CHECK_FALSE(check_bellman_ford(weighted(3, {{0, 1}}, {0.4}), 0, {0, 1, 2}));
}

TEST_CASE("check_mst examples") {
  const Graph tree = weighted(4, {{0, 1}, {1, 2}, {1, 3}}, {0.3, 0.2, 0.9});
  CHECK(check_mst(tree, {0, 0, 1, 1}));
  CHECK(check_mst(tree, {1, 1, 1, 1}));
  const Graph c3 = weighted(3, {{0, 1}, {1, 2}, {0, 2}}, {1, 2, 3});
  CHECK(check_mst(c3, {0, 0, 1}));
  CHECK_FALSE(check_mst(c3, {0, 0, 0}));
  const Graph c4 = testutil::cycle_graph(4).with_weights({1, 1, 1, 1});
  CHECK(check_mst(c4, {0, 0, 1, 2}));
  CHECK(check_mst(c4, {0, 0, 1, 0}));
  CHECK_FALSE(check_mst(c4, {0, 0, 2, 3}));
}

TEST_CASE("validators accept reference outputs and reject mutations") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const Graph g = with_uniform_weights(generate_er(n, 0.4, rng.next_u64()), rng.next_u64());
    const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    Instance inst{std::make_shared<const Graph>(g), nullptr, 0, ""};
    auto inputs = std::make_shared<FeatureStore>();
    inputs->add({"v_s", Location::node, FeatureKind::mask_one, Stage::input, 0}, g);
    inputs->set_node("v_s", s, 1.0);
    inputs->add({"A", Location::edge, FeatureKind::scalar, Stage::input, 0}, g);
    inputs->values("A") = *g.weights();
    inst.inputs = inputs;

    const auto parse = [](const std::string& text) {
      std::vector<int> out;
      std::size_t i = 0;
      while (i < text.size()) {
        std::size_t used = 0;
        out.push_back(std::stoi(text.substr(i), &used));
        i += used;
        while (i < text.size() && text[i] == ' ') ++i;
      }
      return out;
    };
    const auto bf = parse(*make_environment("bellman_ford")->reference_solution(inst));
    const auto mst = parse(*make_environment("mst_prim")->reference_solution(inst));
    const auto dist = shortest_distances(g, s);
    const auto hops = bfs_distances(g, s);
    const double msf = msf_weight(g);
    CHECK(check_bellman_ford(g, s, bf));
    const bool conn = g.connected();
    if (conn) CHECK(check_mst(g, mst));

    // Mutate one pred entry along an existing edge; acceptance must follow the reference metric.
    for (int k = 0; k < 10; ++k) {
      const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const auto nb = g.neighbors(v);
      if (nb.empty()) continue;
      const int u = nb[rng.below(nb.size())];
      auto m = bf;
      m[static_cast<std::size_t>(v)] = u;
      bool same = v != s && !std::isinf(dist[static_cast<std::size_t>(v)]);
      if (same) {
        // Valid iff still a tree rooted at s whose path costs all match.
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        int x = v;
        for (int i = 0; i <= n && m[static_cast<std::size_t>(x)] != x; ++i) x = m[static_cast<std::size_t>(x)];
        same = x == s;
        for (int w = 0; same && w < n; ++w)
          if (!std::isinf(dist[static_cast<std::size_t>(w)]))
            same = std::abs(path_cost(g, m, w) - dist[static_cast<std::size_t>(w)]) <= 1e-9;
      }
      CHECK(check_bellman_ford(g, s, m) == same);

      std::vector<int> bpred = identity(n);
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      for (int w = 0; w < n; ++w)
        for (int x : g.neighbors(w))
          if (hops[static_cast<std::size_t>(w)] >= 0 && hops[static_cast<std::size_t>(x)] == hops[static_cast<std::size_t>(w)] + 1)
            bpred[static_cast<std::size_t>(x)] = w;
      CHECK(check_bfs(g, s, bpred));
      auto bm = bpred;
      bm[static_cast<std::size_t>(v)] = u;
      const bool depth_ok = v != s && hops[static_cast<std::size_t>(v)] >= 0 &&
                            hops[static_cast<std::size_t>(u)] == hops[static_cast<std::size_t>(v)] - 1;
      CHECK(check_bfs(g, s, bm) == (depth_ok || bm == bpred));

      auto mm = mst;
      mm[static_cast<std::size_t>(v)] = u;
      if (conn && mm != mst) {
        // With distinct random weights the spanning forest is unique.
        CHECK_FALSE(check_mst(g, mm));
      }
    }
    (void)msf;
  }
}

TEST_CASE("critical fraction") {
  for (int n = 3; n <= 12; ++n) {
    const Graph k = complete_graph(n);
    CHECK(critical_fraction_targeted(k) == doctest::Approx((n - 1.0) / n).epsilon(1e-12));
    CHECK(std::abs(critical_fraction_targeted(k) - (n - 1.0) / n) <= 1e-9);
    const auto est = critical_fraction_random(k, 50, n);
    CHECK(std::abs(est.mean - (n - 1.0) / n) <= 1e-9);
    CHECK(est.std_error == doctest::Approx(0.0));
  }
  CHECK(critical_fraction_targeted(testutil::path_graph(3)) == doctest::Approx(1.0 / 3));
  CHECK(critical_fraction(testutil::path_graph(3), {1, 0, 2}) == doctest::Approx(1.0 / 3));
  CHECK(critical_fraction(testutil::path_graph(3), {0, 1, 2}) == doctest::Approx(2.0 / 3));
  CHECK(critical_fraction(Graph(3, {{0, 1}}, false), {0, 1, 2}) == doctest::Approx(1.0 / 3));

  const Graph ba = generate_ba(20, 2, 1);
  const auto a = critical_fraction_random(ba, 200, 42);
  const auto b = critical_fraction_random(ba, 200, 42);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean > 0.0);
  CHECK(a.mean <= 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(critical_fraction_random(generate_ba(20, 1 + seed % 3, seed), RgcOptions{}.samples, seed).std_error <= 0.01);
    const Graph er = generate_er(20, 0.2, seed);
    if (er.connected()) CHECK(critical_fraction_random(er, RgcOptions{}.samples, seed).std_error <= 0.01);
  }
  CHECK(robustness(ba, RemovalStrategy::random, 200, 42) == a.mean);
  CHECK(robustness(ba, RemovalStrategy::targeted, 200, 42) == critical_fraction_targeted(ba));
}

TEST_CASE("evaluation metrics") {
  CHECK(pointer_micro_f1({0, 0, 1, 2}, {0, 0, 1, 1}) == doctest::Approx(0.75));
  CHECK(estimated_graph_accuracy(0.9, 16) == doctest::Approx(std::pow(0.9, 16)));

  const auto env = make_environment("dfs");
  std::vector<Instance> insts;
  for (int i = 0; i < 30; ++i) insts.push_back(env->make_instance(generate_er(8, 0.3, i), i, "g" + std::to_string(i)));
  const BatchPolicy expert = [&](const std::vector<const MdpState*>& ss) {
    std::vector<std::vector<double>> out;
    for (const auto* s : ss) out.push_back(expert_dfs(*s));
    return out;
  };
  EvalOptions opts;
  opts.temperatures = {0.0, 1.0};
  opts.repeats = 5;
  opts.seed = 3;
  const auto rep = evaluate(*env, insts, expert, opts);
  REQUIRE(rep.summaries.size() == 2);
  CHECK(rep.rows.size() == 30 + 30 * 5);
  for (const auto& s : rep.summaries) {
    CHECK(s.solution_correctness == 1.0);
    CHECK(s.graph_accuracy <= s.solution_correctness);
  }
  CHECK(rep.summaries[1].unique_mean >= 1.0);
  opts.workers = 3;
  const auto rep3 = evaluate(*env, insts, expert, opts);
  REQUIRE(rep3.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) CHECK(rep3.rows[i].solution == rep.rows[i].solution);
  CHECK(rep.to_csv().find("graph_id") != std::string::npos);
  CHECK(rep.to_json().find("solution_correctness") != std::string::npos);

  // Bellman-Ford with distinct weights: correctness and graph accuracy coincide.
  const auto bf = make_environment("bellman_ford");
  std::vector<Instance> binsts;
  for (int i = 0; i < 30; ++i) binsts.push_back(bf->make_instance(generate_er(8, 0.4, i), i, "b" + std::to_string(i)));
  const BatchPolicy bexpert = [&](const std::vector<const MdpState*>& ss) {
    std::vector<std::vector<double>> out;
    for (const auto* s : ss) out.push_back(expert_bellman_ford(*s));
    return out;
  };
  const auto brep = evaluate(*bf, binsts, bexpert, {});
  CHECK(brep.summaries[0].solution_correctness == 1.0);
  CHECK(brep.summaries[0].graph_accuracy == brep.summaries[0].solution_correctness);
}
