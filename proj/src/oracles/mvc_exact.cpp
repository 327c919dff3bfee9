#include <algorithm>
#include <cmath>
#include <functional>

#include "gnarl/oracles.hpp"

namespace gnarl {
namespace {

double node_w(const Graph& g, int v) { return g.node_weighted() ? g.node_weight(v) : 1.0; }

}  // namespace

std::vector<int> mvc_exact_cover(const Graph& g) {
  const int n = g.node_count();
  if (n > kMvcExactMaxNodes)
    throw std::invalid_argument("mvc_exact_cover: refusing n = " + std::to_string(n) + " (limit " +
                                std::to_string(kMvcExactMaxNodes) + ")");
  std::vector<char> in(static_cast<std::size_t>(n), 0), out(static_cast<std::size_t>(n), 0);
  std::vector<int> best;
  double best_w = std::numeric_limits<double>::infinity();

  auto uncovered = [&](const Edge& e) { return !in[static_cast<std::size_t>(e.u)] && !in[static_cast<std::size_t>(e.v)]; };

  // Lower bound: disjoint uncovered edges each need their cheaper endpoint.
  auto lower_bound = [&]() {
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    double lb = 0.0;
    for (const auto& e : g.edges()) {
      if (!uncovered(e) || used[static_cast<std::size_t>(e.u)] || used[static_cast<std::size_t>(e.v)]) continue;
      used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 1;
      lb += std::min(node_w(g, e.u), node_w(g, e.v));
    }
    return lb;
  };

  std::function<void(double)> search = [&](double weight) {
    if (weight + lower_bound() > best_w + 1e-9 * std::max(1.0, best_w)) return;
    int u = -1;
    for (const auto& e : g.edges()) {
      if (uncovered(e)) {
        u = in[static_cast<std::size_t>(e.u)] || out[static_cast<std::size_t>(e.u)] ? e.v : e.u;
        break;
      }
    }
    if (u < 0) {
      std::vector<int> cover;
      for (int v = 0; v < n; ++v)
        if (in[static_cast<std::size_t>(v)]) cover.push_back(v);
      const double tol = 1e-9 * std::max(1.0, weight);
      if (best.empty() || weight < best_w - tol || (std::abs(weight - best_w) <= tol && cover < best)) {
        best_w = std::min(best_w, weight);
        best = std::move(cover);
      }
      return;
    }
    // Either u is in the cover, or every neighbour of u is.
    in[static_cast<std::size_t>(u)] = 1;
    search(weight + node_w(g, u));
    in[static_cast<std::size_t>(u)] = 0;

    bool feasible = true;
    std::vector<int> added;
    for (int v : g.neighbors(u)) {
      if (in[static_cast<std::size_t>(v)]) continue;
      if (out[static_cast<std::size_t>(v)]) {
        feasible = false;
        break;
      }
      added.push_back(v);
    }
    if (feasible) {
      out[static_cast<std::size_t>(u)] = 1;
      double extra = 0.0;
      for (int v : added) {
        in[static_cast<std::size_t>(v)] = 1;
        extra += node_w(g, v);
      }
      search(weight + extra);
      for (int v : added) in[static_cast<std::size_t>(v)] = 0;
      out[static_cast<std::size_t>(u)] = 0;
    }
  };
  search(0.0);
  return best;
}

std::vector<int> mvc_approx(const Graph& g, double eps) {
  const int n = g.node_count();
  std::vector<double> residual(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) residual[static_cast<std::size_t>(v)] = node_w(g, v);
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  std::vector<Edge> live(g.edges().begin(), g.edges().end());
  while (!live.empty()) {
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (const auto& e : live) {
      ++degree[static_cast<std::size_t>(e.u)];
      ++degree[static_cast<std::size_t>(e.v)];
    }
    std::vector<double> spend(static_cast<std::size_t>(n), 0.0);
    for (const auto& e : live) {
      const double du = residual[static_cast<std::size_t>(e.u)] / degree[static_cast<std::size_t>(e.u)];
      const double dv = residual[static_cast<std::size_t>(e.v)] / degree[static_cast<std::size_t>(e.v)];
      const double delta = std::min(du, dv);
      spend[static_cast<std::size_t>(e.u)] += delta;
      spend[static_cast<std::size_t>(e.v)] += delta;
    }
    for (int v = 0; v < n; ++v) {
      if (degree[static_cast<std::size_t>(v)] == 0) continue;
      residual[static_cast<std::size_t>(v)] -= spend[static_cast<std::size_t>(v)];
      if (residual[static_cast<std::size_t>(v)] <= eps * node_w(g, v) * (1.0 + 1e-12)) in[static_cast<std::size_t>(v)] = 1;
    }
    std::erase_if(live, [&](const Edge& e) { return in[static_cast<std::size_t>(e.u)] || in[static_cast<std::size_t>(e.v)]; });
  }
  std::vector<int> cover;
  for (int v = 0; v < n; ++v)
    if (in[static_cast<std::size_t>(v)]) cover.push_back(v);
  return cover;
}

}  // namespace gnarl
