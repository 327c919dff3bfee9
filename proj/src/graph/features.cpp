#include "gnarl/features.hpp"

#include <cmath>

namespace gnarl {

std::string_view to_string(Location l) {
  switch (l) {
    case Location::node: return "node";
    case Location::edge: return "edge";
    case Location::graph: return "graph";
  }
  return "?";
}

std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::scalar: return "scalar";
    case FeatureKind::mask: return "mask";
    case FeatureKind::mask_one: return "mask_one";
    case FeatureKind::categorical: return "categorical";
    case FeatureKind::pointer: return "pointer";
  }
  return "?";
}

std::string_view to_string(Stage s) { return s == Stage::input ? "input" : "state"; }

namespace {

std::size_t location_size(Location loc, const Graph& g) {
  switch (loc) {
    case Location::node: return static_cast<std::size_t>(g.node_count());
    case Location::edge: return static_cast<std::size_t>(g.edge_count());
    case Location::graph: return 1;
  }
  return 0;
}

}  // namespace

void FeatureStore::add(const FeatureSpec& spec, const Graph& g, double fill) {
  if (contains(spec.name)) throw FeatureError("duplicate feature '" + spec.name + "'");
  if (spec.kind == FeatureKind::categorical && spec.categories < 1)
    throw FeatureError("categorical feature '" + spec.name + "' needs at least one category");
  if (spec.kind == FeatureKind::pointer && spec.location != Location::node)
    throw FeatureError("pointer feature '" + spec.name + "' must be node-located");
  features_.push_back({spec, std::vector<double>(location_size(spec.location, g), fill)});
}

int FeatureStore::find(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].spec.name == name) return static_cast<int>(i);
  return -1;
}

const Feature& FeatureStore::feature(std::string_view name) const {
  const int i = find(name);
  if (i < 0) throw FeatureError("unknown feature '" + std::string(name) + "'");
  return features_[static_cast<std::size_t>(i)];
}

Feature& FeatureStore::feature(std::string_view name) {
  const int i = find(name);
  if (i < 0) throw FeatureError("unknown feature '" + std::string(name) + "'");
  return features_[static_cast<std::size_t>(i)];
}

std::vector<FeatureSpec> FeatureStore::schema() const {
  std::vector<FeatureSpec> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.spec);
  return out;
}

double FeatureStore::edge(std::string_view name, const Graph& g, int u, int v) const {
  const auto& f = feature(name);
  if (f.spec.location != Location::edge) throw FeatureError("feature '" + f.spec.name + "' is not edge-located");
  const int e = g.edge_index(u, v);
  if (e < 0)
    throw FeatureError("feature '" + f.spec.name + "' is undefined on non-edge (" + std::to_string(u) + ", " +
                       std::to_string(v) + ")");
  return f.values[static_cast<std::size_t>(e)];
}

void FeatureStore::set_edge(std::string_view name, const Graph& g, int u, int v, double x) {
  auto& f = feature(name);
  if (f.spec.location != Location::edge) throw FeatureError("feature '" + f.spec.name + "' is not edge-located");
  const int e = g.edge_index(u, v);
  if (e < 0)
    throw FeatureError("feature '" + f.spec.name + "' cannot be set on non-edge (" + std::to_string(u) + ", " +
                       std::to_string(v) + ")");
  f.values[static_cast<std::size_t>(e)] = x;
}

void FeatureStore::validate(const Graph& g) const {
  for (const auto& f : features_) {
    const auto& s = f.spec;
    auto fail = [&](const std::string& why) { throw FeatureError("feature '" + s.name + "': " + why); };
    if (f.values.size() != location_size(s.location, g)) fail("size does not match its location");
    int ones = 0;
    for (double x : f.values) {
      switch (s.kind) {
        case FeatureKind::scalar:
          if (std::isnan(x)) fail("NaN value");
          break;
        case FeatureKind::mask:
        case FeatureKind::mask_one:
          if (x != 0.0 && x != 1.0) fail("mask value outside {0, 1}");
          ones += x == 1.0;
          break;
        case FeatureKind::categorical:
          if (x < 0 || x >= s.categories || x != std::floor(x)) fail("category out of range");
          break;
        case FeatureKind::pointer:
          if (x < 0 || x >= g.node_count() || x != std::floor(x)) fail("pointer is not a node index");
          break;
      }
    }
    if (s.kind == FeatureKind::mask_one && ones != 1) fail("mask_one must contain exactly one 1");
  }
}

std::uint64_t schema_hash(const std::vector<FeatureSpec>& schema) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& f : schema) {
    mix(f.name);
    mix(to_string(f.location));
    mix(to_string(f.kind));
    mix(to_string(f.stage));
    mix(std::to_string(f.categories));
  }
  return h;
}

}  // namespace gnarl
