#include <cmath>
#include <set>

#include "doctest.h"
#include "gnarl/environments.hpp"
#include "gnarl/oracles.hpp"
#include "gnarl/rng.hpp"
#include "helpers.hpp"

using namespace gnarl;
using testutil::uniform_policy;

TEST_CASE("choose_action: greedy ties go to the lowest index") {
  Rng rng(1);
  const std::vector<char> all{1, 1, 1, 1};
  CHECK(choose_action({0.1, 0.4, 0.4, 0.1}, all, ActionMode::greedy_mode(), rng) == 1);
  CHECK(choose_action({0.1, 0.4, 0.4, 0.1}, {1, 0, 1, 1}, ActionMode::greedy_mode(), rng) == 2);
  CHECK(choose_action({0.1, 0.4, 0.4, 0.1}, all, ActionMode::sample(0.0), rng) == 1);
  CHECK_THROWS(choose_action({0.0, 1.0}, {1, 0}, ActionMode::greedy_mode(), rng));
  CHECK_THROWS(choose_action({0.0, 1.0}, {1, 0}, ActionMode::sample(1.0), rng));
}

TEST_CASE("choose_action: tiny temperature equals greedy") {
  Rng gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(gen.below(10));
    std::vector<double> p(static_cast<std::size_t>(n));
    std::vector<char> m(static_cast<std::size_t>(n), 1);
    double z = 0.0;
    for (double& x : p) z += (x = gen.uniform() + 1e-3);
    for (double& x : p) x /= z;
    Rng a(trial), b(trial);
    CHECK(choose_action(p, m, ActionMode::sample(1e-6), a) == choose_action(p, m, ActionMode::greedy_mode(), b));
  }
}

TEST_CASE("choose_action: temperature 1 samples the distribution") {
  Rng rng(3);
  const std::vector<double> p{0.2, 0.8};
  int ones = 0;
  for (int i = 0; i < 20000; ++i) ones += choose_action(p, {1, 1}, ActionMode::sample(1.0), rng);
  CHECK(std::abs(ones / 20000.0 - 0.8) < 0.02);
}

TEST_CASE("uniform TSP rollout on n=5 visits every node once") {
  const auto env = make_environment("tsp");
  const auto inst = env->make_instance(generate_euclidean_complete(5, 2), 3);
  RolloutOptions ro;
  ro.mode = ActionMode::sample(1.0);
  ro.seed = 9;
  const Episode ep = rollout(*env, inst, uniform_policy(*env), ro);
  CHECK(ep.length() == 5);
  std::set<int> seen(ep.trajectory.actions.begin(), ep.trajectory.actions.end());
  CHECK(seen.size() == 5);
  CHECK(ep.terminal);
  CHECK_FALSE(ep.truncated);
}

TEST_CASE("BFS expert on a path graph") {
  const auto env = make_environment("bfs");
  const auto inst = testutil::with_start(env->make_instance(testutil::path_graph(3), 1), 0);
  RolloutOptions ro;
  const Episode ep = rollout(*env, inst, make_expert_policy(*env, inst), ro);
  CHECK(ep.terminal);
  CHECK(pointer_values(ep.final_state) == std::vector<int>{0, 0, 1});
}

TEST_CASE("rollouts are deterministic given the seed") {
  const auto env = make_environment("dfs");
  const auto inst = env->make_instance(generate_er(10, 0.3, 4), 5);
  RolloutOptions ro;
  ro.mode = ActionMode::sample(1.0);
  ro.seed = 11;
  const auto a = rollout(*env, inst, uniform_policy(*env), ro);
  const auto b = rollout(*env, inst, uniform_policy(*env), ro);
  CHECK(a.trajectory.actions == b.trajectory.actions);
  ro.seed = 12;
  const auto c = rollout(*env, inst, uniform_policy(*env), ro);
  CHECK(c.length() > 0);
}

TEST_CASE("rollout_batch equals per-episode rollouts") {
  const auto env = make_environment("mvc");
  std::vector<Instance> insts;
  for (int i = 0; i < 7; ++i) insts.push_back(env->make_instance(generate_ba(10, 2, i), 100 + i));
  RolloutOptions ro;
  ro.mode = ActionMode::sample(1.0);
  ro.seed = 5;
  const Policy single = uniform_policy(*env);
  const BatchPolicy batch = [&](const std::vector<const MdpState*>& ss) {
    std::vector<std::vector<double>> out;
    for (const auto* s : ss) out.push_back(single(*s));
    return out;
  };
  const auto eps = rollout_batch(*env, insts, batch, ro, 3);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    RolloutOptions one = ro;
    one.seed = derive_seed(ro.seed, i);
    const auto ep = rollout(*env, insts[i], single, one);
    CHECK(ep.trajectory.actions == eps[i].trajectory.actions);
  }
}

TEST_CASE("step rejects masked and out-of-range actions") {
  const auto env = make_environment("tsp");
  const auto inst = testutil::with_start(env->make_instance(generate_euclidean_complete(4, 1), 1), 2);
  const MdpState s = env->reset(inst);
  CHECK_THROWS_AS(step(*env, s, 0), InvalidAction);
  CHECK_THROWS_AS(step(*env, s, 9), InvalidAction);
  const MdpState s1 = step(*env, s, 2).next;
  CHECK_THROWS_AS(step(*env, s1, 2), InvalidAction);
}

TEST_CASE("reset rejects inputs that do not match the schema") {
  const auto env = make_environment("bfs");
  auto inst = env->make_instance(testutil::path_graph(3), 1);
  auto inputs = std::make_shared<FeatureStore>();
  inputs->add({"adj", Location::edge, FeatureKind::scalar, Stage::input, 0}, *inst.graph, 1.0);
  inst.inputs = inputs;
  try {
    env->reset(inst);
    FAIL("expected a schema error");
  } catch (const FeatureError& e) {
    CHECK(std::string(e.what()).find("v_s") != std::string::npos);
  }
}

TEST_CASE("horizon truncation") {
  // A DFS policy that never selects its phase-1 node again keeps picking in phase 1/2 until t = h.
  const auto env = make_environment("dfs");
  const Graph g(3, {}, false);  // all isolated: every phase-2 move must re-select psi_1
  const auto inst = env->make_instance(g, 1);
  MdpState s = env->reset(inst);
  CHECK(s.horizon == 4);
  StepResult r{s, 0.0, false, false};
  int steps = 0;
  while (!r.terminal && !r.truncated) {
    r = step(*env, r.next, env->mask(r.next)[0] ? 0 : 1);
    ++steps;
  }
  CHECK(steps <= 4);
}

TEST_CASE("trajectory files round trip") {
  Trajectory a;
  a.env = "mvc";
  a.graph_id = "g7";
  a.seed = 123456789012345ull;
  a.actions = {3, 1};
  a.rewards = {-0.25, -1.0 / 3.0};
  a.probs = {{0.0, 0.5, 0.0, 0.5}, {0.0, 1.0, 0.0, 0.0}};
  Trajectory b = a;
  b.probs.clear();
  b.graph_id = "g8";
  const auto text = serialize_trajectories({a, b});
  const auto back = parse_trajectories(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].env == a.env);
  CHECK(back[0].graph_id == a.graph_id);
  CHECK(back[0].seed == a.seed);
  CHECK(back[0].actions == a.actions);
  CHECK(back[0].rewards == a.rewards);
  CHECK(back[0].probs == a.probs);
  CHECK(back[1].probs.empty());
  const auto path = std::filesystem::temp_directory_path() / "gnarl_traj.gz";
  save_trajectories({a, b}, path);
  CHECK(load_trajectories(path)[0].rewards == a.rewards);
  CHECK_THROWS(parse_trajectories("gnarl-trajectories 1\ncount 1\n"));
}

TEST_CASE("replay reproduces the final state") {
  const auto env = make_environment("bellman_ford");
  const auto inst = env->make_instance(generate_er(8, 0.5, 2), 3);
  RolloutOptions ro;
  ro.mode = ActionMode::sample(1.0);
  ro.seed = 4;
  const auto ep = rollout(*env, inst, make_expert_policy(*env, inst), ro);
  const MdpState s = replay(*env, inst, ep.trajectory.actions);
  CHECK(s.state == ep.final_state.state);
}
