#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gnarl/graph.hpp"

namespace gnarl {

enum class Location { node, edge, graph };
enum class FeatureKind { scalar, mask, mask_one, categorical, pointer };
enum class Stage { input, state };

std::string_view to_string(Location l);
std::string_view to_string(FeatureKind k);
std::string_view to_string(Stage s);

struct FeatureSpec {
  std::string name;
  Location location = Location::node;
  FeatureKind kind = FeatureKind::scalar;
  Stage stage = Stage::state;
  int categories = 0;  // categorical only

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct Feature {
  FeatureSpec spec;
  // node: one per node; edge: one per graph edge, aligned with Graph::edges(); graph: one value.
  // Categorical values hold the category index, pointers hold the node index.
  std::vector<double> values;

  friend bool operator==(const Feature&, const Feature&) = default;
};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed named features over one graph.
class FeatureStore {
 public:
  FeatureStore() = default;

  /// Adds a feature with every value set to `fill`, sized for `g`.
  void add(const FeatureSpec& spec, const Graph& g, double fill = 0.0);

  bool contains(std::string_view name) const { return find(name) >= 0; }
  int find(std::string_view name) const;
  const Feature& feature(std::string_view name) const;
  Feature& feature(std::string_view name);
  const std::vector<Feature>& features() const { return features_; }
  std::vector<FeatureSpec> schema() const;

  std::vector<double>& values(std::string_view name) { return feature(name).values; }
  const std::vector<double>& values(std::string_view name) const { return feature(name).values; }

  double node(std::string_view name, int v) const { return values(name)[static_cast<std::size_t>(v)]; }
  void set_node(std::string_view name, int v, double x) { values(name)[static_cast<std::size_t>(v)] = x; }
  double graph_value(std::string_view name) const { return values(name).front(); }
  void set_graph_value(std::string_view name, double x) { values(name).front() = x; }

  /// Edge access by endpoints; rejects pairs that are not edges of `g`.
  double edge(std::string_view name, const Graph& g, int u, int v) const;
  void set_edge(std::string_view name, const Graph& g, int u, int v, double x);

  /// Throws FeatureError naming the first feature that violates its kind or size.
  void validate(const Graph& g) const;

  friend bool operator==(const FeatureStore&, const FeatureStore&) = default;

 private:
  std::vector<Feature> features_;
};

/// FNV-1a over the ordered feature specs; checkpoints record it to detect schema drift.
std::uint64_t schema_hash(const std::vector<FeatureSpec>& schema);

}  // namespace gnarl
