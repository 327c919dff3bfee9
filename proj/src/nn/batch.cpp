#include <stdexcept>

#include "gnarl/model.hpp"

namespace gnarl::nn {

namespace {

int raw_width(const FeatureSpec& f) { return f.kind == FeatureKind::categorical ? f.categories : 1; }

}  // namespace

std::vector<EncoderInput> encoder_layout(const std::vector<FeatureSpec>& schema) {
  std::vector<EncoderInput> out;
  for (const auto& f : schema) {
    if (f.kind == FeatureKind::pointer) {
      out.push_back({f.name + ".self", Location::node, 1});
      out.push_back({f.name + ".edge", Location::edge, 2});
    } else {
      out.push_back({f.name, f.location, raw_width(f)});
    }
  }
  out.push_back({"dir", Location::edge, 1});
  return out;
}

GraphBatch build_batch(const Environment& env, const std::vector<const MdpState*>& states,
                       bool with_triplets) {
  GraphBatch b;
  b.graphs = static_cast<int>(states.size());
  b.node_offsets.push_back(0);
  b.edge_offsets.push_back(0);
  for (int gi = 0; gi < b.graphs; ++gi) {
    const MdpState& s = *states[static_cast<std::size_t>(gi)];
    const int base = b.nodes;
    const int n = s.node_count();
    for (int v = 0; v < n; ++v) b.node_graph.push_back(gi);
    for (const auto& e : s.g().edges()) {
      b.src.push_back(base + e.u);
      b.dst.push_back(base + e.v);
      b.src.push_back(base + e.v);
      b.dst.push_back(base + e.u);
      b.edge_graph.push_back(gi);
      b.edge_graph.push_back(gi);
    }
    b.nodes += n;
    b.node_offsets.push_back(b.nodes);
    b.edge_offsets.push_back(static_cast<int>(b.src.size()));
    const auto m = env.mask(s);
    b.mask.insert(b.mask.end(), m.begin(), m.end());
  }
  const int edges = static_cast<int>(b.src.size());

  const auto schema = env.schema();
  const auto layout = encoder_layout(schema);
  b.inputs.reserve(layout.size());
  std::size_t li = 0;
  for (const auto& spec : schema) {
    const auto lookup = [&](const MdpState& s) -> const Feature& {
      if (spec.stage == Stage::input) return s.inputs->feature(spec.name);
      return s.state.feature(spec.name);
    };
    if (spec.kind == FeatureKind::pointer) {
      Matrix self(b.nodes, 1);
      Matrix edge(edges, 2);
      for (int gi = 0; gi < b.graphs; ++gi) {
        const MdpState& s = *states[static_cast<std::size_t>(gi)];
        const auto& pred = lookup(s).values;
        const int base = b.node_offsets[static_cast<std::size_t>(gi)];
        for (int v = 0; v < s.node_count(); ++v)
          self(base + v, 0) = static_cast<int>(pred[static_cast<std::size_t>(v)]) == v ? 1.0 : 0.0;
        for (int k = b.edge_offsets[static_cast<std::size_t>(gi)]; k < b.edge_offsets[static_cast<std::size_t>(gi) + 1]; ++k) {
          const int x = b.src[static_cast<std::size_t>(k)] - base;
          const int y = b.dst[static_cast<std::size_t>(k)] - base;
          edge(k, 0) = static_cast<int>(pred[static_cast<std::size_t>(y)]) == x ? 1.0 : 0.0;
          edge(k, 1) = static_cast<int>(pred[static_cast<std::size_t>(x)]) == y ? 1.0 : 0.0;
        }
      }
      b.inputs.push_back(std::move(self));
      b.inputs.push_back(std::move(edge));
      li += 2;
      continue;
    }
    const int width = layout[li].width;
    const bool onehot = spec.kind == FeatureKind::categorical;
    const auto put = [&](Matrix& m, int row, double x) {
      if (onehot) {
        const int c = static_cast<int>(x);
        if (c < 0 || c >= width) throw std::out_of_range("build_batch: category out of range");
        m(row, c) = 1.0;
      } else {
        m(row, 0) = x;
      }
    };
    Matrix m;
    switch (spec.location) {
      case Location::node: {
        m = Matrix(b.nodes, width);
        for (int gi = 0; gi < b.graphs; ++gi) {
          const auto& vals = lookup(*states[static_cast<std::size_t>(gi)]).values;
          const int base = b.node_offsets[static_cast<std::size_t>(gi)];
          for (std::size_t v = 0; v < vals.size(); ++v) put(m, base + static_cast<int>(v), vals[v]);
        }
        break;
      }
      case Location::edge: {
        m = Matrix(edges, width);
        for (int gi = 0; gi < b.graphs; ++gi) {
          const auto& vals = lookup(*states[static_cast<std::size_t>(gi)]).values;
          const int k0 = b.edge_offsets[static_cast<std::size_t>(gi)];
          for (std::size_t e = 0; e < vals.size(); ++e) {
            put(m, k0 + 2 * static_cast<int>(e), vals[e]);
            put(m, k0 + 2 * static_cast<int>(e) + 1, vals[e]);
          }
        }
        break;
      }
      case Location::graph: {
        m = Matrix(b.graphs, width);
        for (int gi = 0; gi < b.graphs; ++gi) put(m, gi, lookup(*states[static_cast<std::size_t>(gi)]).values.front());
        break;
      }
    }
    b.inputs.push_back(std::move(m));
    ++li;
  }
  Matrix dir(edges, 1);
  for (int gi = 0; gi < b.graphs; ++gi) {
    const bool directed = states[static_cast<std::size_t>(gi)]->g().directed();
    for (int k = b.edge_offsets[static_cast<std::size_t>(gi)]; k < b.edge_offsets[static_cast<std::size_t>(gi) + 1]; ++k)
      dir(k, 0) = (!directed || (k - b.edge_offsets[static_cast<std::size_t>(gi)]) % 2 == 0) ? 1.0 : 0.0;
  }
  b.inputs.push_back(std::move(dir));

  if (with_triplets) {
    auto& t = b.triplet;
    t.src = b.src;
    t.dst = b.dst;
    t.edge_segment = b.edge_graph;
    t.node_offsets = b.node_offsets;
    t.dense_offsets.push_back(0);
    for (int gi = 0; gi < b.graphs; ++gi) {
      const int base = b.node_offsets[static_cast<std::size_t>(gi)];
      const int n = b.node_offsets[static_cast<std::size_t>(gi) + 1] - base;
      const int off = t.dense_offsets.back();
      t.dense_ids.resize(static_cast<std::size_t>(off + n * n), -1);
      for (int k = b.edge_offsets[static_cast<std::size_t>(gi)]; k < b.edge_offsets[static_cast<std::size_t>(gi) + 1]; ++k) {
        const int x = b.src[static_cast<std::size_t>(k)] - base;
        const int y = b.dst[static_cast<std::size_t>(k)] - base;
        // A directed pair stored both ways keeps its forward message.
        int& slot = t.dense_ids[static_cast<std::size_t>(off + x * n + y)];
        if (slot < 0 || (k - b.edge_offsets[static_cast<std::size_t>(gi)]) % 2 == 0) slot = k;
      }
      t.dense_offsets.push_back(off + n * n);
    }
  }
  return b;
}

}  // namespace gnarl::nn
