#include <stdexcept>

#include "gnarl/environments.hpp"

namespace gnarl {

std::shared_ptr<const Environment> make_environment(const std::string& name, const EnvOptions& opts) {
  if (name == "bfs") return std::make_shared<SearchEnvironment>(true);
  if (name == "dfs") return std::make_shared<SearchEnvironment>(false);
  if (name == "bellman_ford") return std::make_shared<BellmanFordEnvironment>();
  if (name == "mst_prim") return std::make_shared<MstPrimEnvironment>();
  if (name == "tsp") return std::make_shared<TspEnvironment>();
  if (name == "mvc") return std::make_shared<MvcEnvironment>();
  if (name == "rgc") return std::make_shared<RgcEnvironment>(opts.rgc);
  throw std::invalid_argument("unknown environment '" + name + "'");
}

std::vector<std::string> environment_names() { return {"bfs", "dfs", "bellman_ford", "mst_prim", "tsp", "mvc", "rgc"}; }

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::vector<int> pointer_values(const MdpState& s, const std::string& feature) {
  const auto& v = s.state.values(feature);
  return std::vector<int>(v.begin(), v.end());
}

}  // namespace gnarl
