#include <cstring>
#include <fstream>
#include "json.hpp"

#include "gnarl/model.hpp"

namespace gnarl::nn {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'G', 'N', 'A', 'R', 'L', 'C', 'K', '1'};

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<E> values) {
  for (E e : values)
    if (to_string(e) == s) return e;
  throw CheckpointError("checkpoint: unknown enum value '" + s + "'");
}

json spec_json(const FeatureSpec& f) {
  return {{"name", f.name},
          {"location", std::string(to_string(f.location))},
          {"kind", std::string(to_string(f.kind))},
          {"stage", std::string(to_string(f.stage))},
          {"categories", f.categories}};
}

FeatureSpec spec_from(const json& j) {
  FeatureSpec f;
  f.name = j.at("name").get<std::string>();
  f.location = parse_enum(j.at("location").get<std::string>(), {Location::node, Location::edge, Location::graph});
  f.kind = parse_enum(j.at("kind").get<std::string>(),
                      {FeatureKind::scalar, FeatureKind::mask, FeatureKind::mask_one, FeatureKind::categorical,
                       FeatureKind::pointer});
  f.stage = parse_enum(j.at("stage").get<std::string>(), {Stage::input, Stage::state});
  f.categories = j.at("categories").get<int>();
  return f;
}

}  // namespace

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::filesystem::path& path) {
  const auto& cfg = model.config();
  json h;
  h["env"] = meta.env;
  h["config"] = {{"processor", cfg.processor}, {"aggregation", cfg.aggregation}, {"pooling", cfg.pooling},
                 {"layers", cfg.layers},       {"hidden", cfg.hidden},           {"triplet_dim", cfg.triplet_dim}};
  h["schema"] = json::array();
  for (const auto& f : model.schema()) h["schema"].push_back(spec_json(f));
  h["schema_hash"] = std::to_string(model.schema_hash());
  h["params"] = json::array();
  for (const auto& p : model.parameters()) h["params"].push_back({{"name", p.name}, {"rows", p.value.rows}, {"cols", p.value.cols}});
  h["extra"] = json::parse(meta.extra_json);
  const std::string header = h.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CheckpointError("checkpoint: cannot write " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t len = header.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& p : model.parameters())
      out.write(reinterpret_cast<const char*>(p.value.data.data()),
                static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!out) throw CheckpointError("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Model load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta,
                      const std::vector<FeatureSpec>* expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw CheckpointError("checkpoint: bad magic in " + path.string());
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1u << 28)) throw CheckpointError("checkpoint: bad header length");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw CheckpointError("checkpoint: truncated header");

  json h;
  try {
    h = json::parse(header);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed header: ") + e.what());
  }
  std::vector<FeatureSpec> schema;
  ModelConfig cfg;
  try {
    for (const auto& j : h.at("schema")) schema.push_back(spec_from(j));
    const auto& c = h.at("config");
    cfg.processor = c.at("processor").get<std::string>();
    cfg.aggregation = c.at("aggregation").get<std::string>();
    cfg.pooling = c.at("pooling").get<std::string>();
    cfg.layers = c.at("layers").get<int>();
    cfg.hidden = c.at("hidden").get<int>();
    cfg.triplet_dim = c.at("triplet_dim").get<int>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed header: ") + e.what());
  }
  if (std::to_string(schema_hash(schema)) != h.value("schema_hash", std::string()))
    throw CheckpointError("checkpoint: schema hash does not match stored schema");
  if (expected_schema && schema_hash(*expected_schema) != schema_hash(schema))
    throw CheckpointError("checkpoint: feature schema mismatch (checkpoint was trained for a different environment)");

  Model model(cfg, schema, 0);
  const auto& shapes = h.at("params");
  if (shapes.size() != model.parameters().size())
    throw CheckpointError("checkpoint: parameter count mismatch");
  std::size_t i = 0;
  for (auto& p : model.parameters()) {
    const auto& s = shapes[i++];
    if (s.at("name").get<std::string>() != p.name || s.at("rows").get<int>() != p.value.rows ||
        s.at("cols").get<int>() != p.value.cols)
      throw CheckpointError("checkpoint: parameter shape mismatch at " + p.name);
    in.read(reinterpret_cast<char*>(p.value.data.data()), static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!in) throw CheckpointError("checkpoint: truncated parameters");
    p.zero_grad();
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("checkpoint: trailing bytes");
  if (meta) {
    meta->env = h.value("env", std::string());
    meta->extra_json = h.contains("extra") ? h["extra"].dump() : "{}";
  }
  return model;
}

}  // namespace gnarl::nn
