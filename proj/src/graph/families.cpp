#include "gnarl/families.hpp"

#include <stdexcept>

#include "gnarl/rng.hpp"

namespace gnarl {

void validate(const GraphFamily& f) {
  if (f.kind != "er" && f.kind != "ba" && f.kind != "euclidean")
    throw std::invalid_argument("unknown graph family '" + f.kind + "' (expected er, ba or euclidean)");
  if (f.sizes.empty()) throw std::invalid_argument("graph family needs at least one size");
  for (int n : f.sizes)
    if (n < 1) throw std::invalid_argument("graph sizes must be positive");
  if (f.kind == "er" && !(0.0 <= f.p_lo && f.p_lo <= f.p_hi && f.p_hi <= 1.0))
    throw std::invalid_argument("er family needs 0 <= p_lo <= p_hi <= 1");
  if (f.kind == "ba" && !(1 <= f.m_lo && f.m_lo <= f.m_hi))
    throw std::invalid_argument("ba family needs 1 <= m_lo <= m_hi");
  if (f.kind == "ba") {
    for (int n : f.sizes)
      if (n < 2) throw std::invalid_argument("ba family needs sizes >= 2");
  }
  if (f.directed && f.kind != "er") throw std::invalid_argument("only er families can be directed");
}

Graph sample_graph(const GraphFamily& f, int n, std::uint64_t seed) {
  Rng rng(seed);
  if (f.kind == "euclidean") return generate_euclidean_complete(n, rng.next_u64());
  if (f.kind == "ba") {
    const int hi = std::min(f.m_hi, n - 1);
    const int lo = std::min(f.m_lo, hi);
    const int m = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    return generate_ba(n, m, rng.next_u64());
  }
  const double p = rng.uniform(f.p_lo, f.p_hi);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Graph g = generate_er(n, p, rng.next_u64(), f.directed);
    if (!f.connected || g.connected()) return g;
  }
  throw std::runtime_error("sample_graph: could not draw a connected ER graph");
}

std::vector<Graph> sample_graphs(const GraphFamily& f, int count, std::uint64_t seed) {
  validate(f);
  std::vector<Graph> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i)
    out.push_back(sample_graph(f, f.sizes[static_cast<std::size_t>(i) % f.sizes.size()],
                               derive_seed(seed, static_cast<std::uint64_t>(i))));
  return out;
}

}  // namespace gnarl
