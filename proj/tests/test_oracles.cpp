#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gnarl/environments.hpp"
#include "gnarl/oracles.hpp"
#include "gnarl/rng.hpp"
#include "helpers.hpp"

using namespace gnarl;

namespace {

MdpState play(const Environment& env, const Instance& inst, const std::vector<int>& actions) {
  MdpState s = env.reset(inst);
  for (int a : actions) s = step(env, s, a).next;
  return s;
}

Graph weighted(int n, std::vector<Edge> edges, std::vector<double> w) { return Graph(n, std::move(edges), false, std::move(w)); }

Graph random_complete(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  std::vector<double> w;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      e.push_back({u, v});
      w.push_back(rng.uniform_open_closed());
    }
  return Graph(n, e, false, w);
}

double brute_force_tsp(const Graph& g) {
  std::vector<int> perm(static_cast<std::size_t>(g.node_count() - 1));
  std::iota(perm.begin(), perm.end(), 1);
  double best = kInf;
  do {
    std::vector<int> tour{0};
    tour.insert(tour.end(), perm.begin(), perm.end());
    best = std::min(best, tour_length(g, tour));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double exhaustive_mvc(const Graph& g) {
  const int n = g.node_count();
  double best = kInf;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    bool ok = true;
    for (const auto& e : g.edges())
      if (!((bits >> e.u) & 1u) && !((bits >> e.v) & 1u)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    double w = 0.0;
    for (int v = 0; v < n; ++v)
      if ((bits >> v) & 1u) w += g.node_weight(v);
    best = std::min(best, w);
  }
  return best;
}

double cover_weight_of(const Graph& g, const std::vector<int>& nodes) {
  double w = 0.0;
  for (int v : nodes) w += g.node_weight(v);
  return w;
}

void check_distribution(const std::vector<double>& p, const std::vector<char>& mask) {
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] >= 0.0);
    if (p[i] > 0.0) CHECK(mask[i]);
    z += p[i];
  }
  CHECK(std::abs(z - 1.0) <= 1e-12);
}

Graph graph_for(const std::string& env, int n, std::uint64_t seed) {
  if (env == "tsp") return generate_euclidean_complete(n, seed);
  if (env == "mst_prim") {
    for (std::uint64_t k = 0;; ++k) {
      Graph g = generate_er(n, 0.4, derive_seed(seed, k));
      if (g.connected()) return g;
    }
  }
  if (env == "mvc") return generate_ba(n, 2, seed);
  return generate_er(n, 0.35, seed);
}

}  // namespace

TEST_CASE("BFS expert examples") {
  const auto env = make_environment("bfs");
  const auto star = testutil::with_start(env->make_instance(testutil::star_graph(3), 1), 0);
  const auto p = expert_bfs(play(*env, star, {0}));
  CHECK(p == std::vector<double>{0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3});

  const auto path = testutil::with_start(env->make_instance(testutil::path_graph(3), 1), 0);
  CHECK(expert_bfs(play(*env, path, {0, 1})) == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(expert_bfs(env->reset(path)) == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(expert_bfs(play(*env, path, {0, 1, 1, 2})), ExpertError);
}

TEST_CASE("DFS expert examples") {
  const auto env = make_environment("dfs");
  const auto inst = env->make_instance(testutil::path_graph(4), 1);
  CHECK(expert_dfs(env->reset(inst)) == std::vector<double>(4, 0.25));

  // psi_1 = 0 unreached while its only neighbour is already reached.
  MdpState s = env->reset(env->make_instance(testutil::path_graph(2), 1));
  s.state.set_node("reach", 1, 1.0);
  s = step(*env, s, 0).next;
  CHECK(expert_dfs(s) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("Bellman-Ford expert examples") {
  const auto env = make_environment("bellman_ford");
  const Graph g = weighted(3, {{0, 1}, {0, 2}}, {0.5, 0.5});
  const auto inst = testutil::with_start(env->make_instance(g, 1), 0);
  MdpState s = env->reset(inst);
  CHECK(expert_bellman_ford(s) == std::vector<double>{1.0, 0.0, 0.0});
  s.state.set_node("mask", 0, 1.0);
  s.state.set_node("mask", 2, 1.0);
  s.state.set_node("d", 2, 0.1);
  env->transition(s, 0);
  CHECK(expert_bellman_ford(s) == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("MST-Prim expert examples") {
  const auto env = make_environment("mst_prim");
  // Star centre 0 with leaves 1, 2, 3; leaf weights 0.2, 0.5, 0.9.
  const Graph g = weighted(4, {{0, 1}, {0, 2}, {0, 3}}, {0.2, 0.5, 0.9});
  const auto inst = testutil::with_start(env->make_instance(g, 1), 0);
  MdpState s = play(*env, inst, {0, 1});
  // psi_1 = 0 still has improving edges to 2 and 3.
  CHECK(expert_mst_prim(s) == std::vector<double>{1.0, 0.0, 0.0, 0.0});

  // Queued 1 (key 0.2) and 2 (key 0.5), centre has nothing left to offer.
  const Graph h = weighted(5, {{0, 1}, {0, 2}, {1, 3}, {2, 4}}, {0.2, 0.5, 0.4, 0.1});
  const auto inst2 = testutil::with_start(env->make_instance(h, 1), 0);
  MdpState t = play(*env, inst2, {0, 1, 0, 2});
  CHECK(expert_mst_prim(t) == std::vector<double>{0.0, 1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("TSP exact tour") {
  CHECK(tsp_exact_tour(weighted(3, {{0, 1}, {0, 2}, {1, 2}}, {1, 3, 2})) == std::vector<int>{0, 1, 2});
  // Unit square 0-1-2-3 with diagonals of weight 10.
  const Graph sq = weighted(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {1, 10, 1, 1, 10, 1});
  const auto t = tsp_exact_tour(sq);
  CHECK(tour_length(sq, t) == 4.0);
  CHECK(t == std::vector<int>{0, 1, 2, 3});
  for (int n = 4; n <= 8; ++n)
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Graph g = random_complete(n, derive_seed(n, seed));
      const auto tour = tsp_exact_tour(g);
      CHECK(tour.size() == static_cast<std::size_t>(n));
      CHECK(tour[0] == 0);
      CHECK(tour_length(g, tour) == doctest::Approx(brute_force_tsp(g)).epsilon(1e-12));
    }
  CHECK_THROWS(tsp_exact_tour(generate_euclidean_complete(17, 1)));
}

TEST_CASE("TSP expert follows the oracle tour from v_s") {
  const auto env = make_environment("tsp");
  const Graph g = weighted(3, {{0, 1}, {0, 2}, {1, 2}}, {1, 3, 2});
  const auto inst = testutil::with_start(env->make_instance(g, 1), 1);
  const std::vector<int> tour{0, 1, 2};
  MdpState s = env->reset(inst);
  CHECK(tsp_expert_from_tour(tour, s) == std::vector<double>{0.0, 1.0, 0.0});
  s = step(*env, s, 1).next;
  CHECK(tsp_expert_from_tour(tour, s) == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("MVC exact cover") {
  CHECK(mvc_exact_cover(Graph(2, {{0, 1}}, false).with_node_weights({1, 2})) == std::vector<int>{0});
  CHECK(mvc_exact_cover(testutil::cycle_graph(3).with_node_weights({1, 1, 1})) == std::vector<int>{0, 1});
  CHECK(mvc_exact_cover(testutil::cycle_graph(3)) == std::vector<int>{0, 1});
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Graph g = with_uniform_node_weights(generate_ba(16, 1 + static_cast<int>(seed % 4), seed), seed);
    const auto c = mvc_exact_cover(g);
    std::vector<char> in(16, 0);
    for (int v : c) in[static_cast<std::size_t>(v)] = 1;
    CHECK(is_vertex_cover(g, in));
    CHECK(cover_weight_of(g, c) == doctest::Approx(exhaustive_mvc(g)).epsilon(1e-12));
  }
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Graph g = with_uniform_node_weights(generate_er(12, 0.3, seed), seed);
    CHECK(cover_weight_of(g, mvc_exact_cover(g)) == doctest::Approx(exhaustive_mvc(g)).epsilon(1e-12));
  }
}

TEST_CASE("MVC expert and approximation") {
  const auto env = make_environment("mvc");
  const auto inst = env->make_instance(testutil::path_graph(4), 1);
  MdpState s = env->reset(inst);
  CHECK(mvc_expert({1, 2}, s) == std::vector<double>{0.0, 0.5, 0.5, 0.0});
  s = step(*env, s, 1).next;
  CHECK(mvc_expert({1, 2}, s) == std::vector<double>{0.0, 0.0, 1.0, 0.0});

  const auto edge = mvc_approx(Graph(2, {{0, 1}}, false));
  CHECK_FALSE(edge.empty());

  const Graph star = testutil::star_graph(6).with_node_weights(std::vector<double>(7, 1.0));
  CHECK(cover_weight_of(star, mvc_approx(star)) <= 2.0 / 0.9 + 1e-12);

  double ratio_sum = 0.0;
  const int k = 40;
  for (int i = 0; i < k; ++i) {
    const Graph g = with_uniform_node_weights(generate_ba(16, 1 + i % 10, i), derive_seed(i, 1));
    const auto a = mvc_approx(g);
    std::vector<char> in(16, 0);
    for (int v : a) in[static_cast<std::size_t>(v)] = 1;
    CHECK(is_vertex_cover(g, in));
    const double r = cover_weight_of(g, a) / cover_weight_of(g, mvc_exact_cover(g));
    CHECK(r <= 2.0 / 0.9 + 1e-9);
    ratio_sum += r;
  }
  CHECK(ratio_sum / k <= 2.223);
}

TEST_CASE("expert distributions stay inside the mask") {
  for (const std::string name : {"bfs", "dfs", "bellman_ford", "mst_prim", "tsp", "mvc"}) {
    CAPTURE(name);
    const auto env = make_environment(name);
    Rng rng(derive_seed(5, name.size()));
    int states = 0;
    for (int i = 0; states < 1000; ++i) {
      const auto inst = env->make_instance(graph_for(name, 4 + i % 9, rng.next_u64()), rng.next_u64());
      const Policy expert = make_expert_policy(*env, inst);
      MdpState s = env->reset(inst);
      bool done = env->terminal(s);
      while (!done) {
        const auto p = expert(s);
        check_distribution(p, env->mask(s));
        ++states;
        const auto r = step(*env, s, choose_action(p, env->mask(s), ActionMode::sample(1.0), rng));
        s = r.next;
        done = r.terminal || r.truncated;
      }
    }
  }
}

TEST_CASE("sampled expert rollouts solve the CLRS problems") {
  for (const std::string name : {"bfs", "dfs", "bellman_ford", "mst_prim"}) {
    CAPTURE(name);
    const auto env = make_environment(name);
    Rng rng(derive_seed(6, name.size()));
    for (int i = 0; i < 200; ++i) {
      const Graph g = graph_for(name, 4 + i % 13, rng.next_u64());
      const auto inst = env->make_instance(g, rng.next_u64());
      RolloutOptions ro;
      ro.mode = i % 2 ? ActionMode::sample(1.0) : ActionMode::greedy_mode();
      ro.seed = rng.next_u64();
      const auto ep = rollout(*env, inst, make_expert_policy(*env, inst), ro);
      CHECK(ep.terminal);
      CHECK(env->solved(ep.final_state));
      const auto pred = pointer_values(ep.final_state);
      if (name == "dfs") CHECK(check_dfs(g, pred));
      if (name == "bellman_ford") CHECK(check_bellman_ford(*inst.graph, testutil::start_of(inst), pred));
      if (name == "mst_prim") CHECK(check_mst(*inst.graph, pred));
    }
  }
}

TEST_CASE("weak experts take the best one-step reward") {
  const auto tsp = make_environment("tsp");
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto inst = tsp->make_instance(generate_euclidean_complete(7, rng.next_u64()), rng.next_u64());
    MdpState s = tsp->reset(inst);
    s = step(*tsp, s, weak_expert_action(*tsp, s)).next;
    while (!tsp->terminal(s)) {
      const auto m = tsp->mask(s);
      int best = -1;
      double best_r = -kInf;
      for (int v = 0; v < 7; ++v)
        if (m[static_cast<std::size_t>(v)]) {
          const double r = step(*tsp, s, v).reward;
          if (r > best_r) best_r = r, best = v;
        }
      const int a = weak_expert_action(*tsp, s);
      CHECK(a == best);
      s = step(*tsp, s, a).next;
    }
  }

  const auto mvc = make_environment("mvc");
  const auto inst = mvc->make_instance(testutil::path_graph(4).with_node_weights({0.5, 0.3, 0.3, 0.9}), 1);
  MdpState s = mvc->reset(inst);
  CHECK(weak_expert_action(*mvc, s) == 1);
  CHECK(mvc_coverage_greedy_action(s) == 1);
  s = step(*mvc, s, 1).next;
  CHECK(weak_expert_action(*mvc, s) == 2);

  EnvOptions opts;
  opts.rgc.samples = 30;
  const auto rgc = make_environment("rgc", opts);
  const auto rinst = rgc->make_instance(generate_ba(9, 2, 3), 4);
  const auto& renv = dynamic_cast<const RgcEnvironment&>(*rgc);
  MdpState r0 = rgc->reset(rinst);
  double best = -kInf;
  Edge be{-1, -1};
  for (int u = 0; u < 9; ++u)
    for (int v = u + 1; v < 9; ++v)
      if (!r0.g().has_edge(u, v)) {
        const double f = renv.robustness_of(r0.g().with_edge(u, v), *r0.context);
        if (f > best + 1e-12) best = f, be = {u, v};
      }
  const int u = weak_expert_action(*rgc, r0);
  CHECK(u == be.u);
  const MdpState r1 = step(*rgc, r0, u).next;
  CHECK(weak_expert_action(*rgc, r1) == be.v);
}
