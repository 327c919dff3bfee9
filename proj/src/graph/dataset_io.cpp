#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gnarl/graph.hpp"

namespace gnarl {
namespace {

constexpr const char* kHeader = "gnarl-graphs 1";

bool has_gz_suffix(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

long parse_int(const std::string& tok, int line) {
  long value = 0;
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || p != end) throw DatasetError("expected integer, got '" + tok + "'", line);
  return value;
}

double parse_real(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double value = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw DatasetError("expected real number, got '" + tok + "'", line);
  }
}

bool parse_flag(const std::string& tok, int line) {
  const long v = parse_int(tok, line);
  if (v != 0 && v != 1) throw DatasetError("expected 0 or 1, got '" + tok + "'", line);
  return v == 1;
}

}  // namespace

std::string serialize_dataset(const std::vector<Graph>& graphs) {
  std::string out;
  out += kHeader;
  out += "\ncount " + std::to_string(graphs.size()) + "\n";
  for (const auto& g : graphs) {
    out += "graph " + std::to_string(g.node_count()) + " " + std::to_string(g.edge_count()) + " " +
           (g.directed() ? "1" : "0") + " " + (g.weighted() ? "1" : "0") + " " +
           (g.node_weighted() ? "1" : "0") + "\n";
    if (g.node_weighted()) {
      out += "nw";
      for (double w : *g.node_weights()) out += " " + format_double(w);
      out += "\n";
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      out += std::to_string(ed.u) + " " + std::to_string(ed.v);
      if (g.weighted()) out += " " + format_double(g.weight(e));
      out += "\n";
    }
  }
  return out;
}

std::vector<Graph> parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next = [&](const char* what) -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      auto toks = split_ws(line);
      if (!toks.empty()) return toks;
    }
    throw DatasetError(std::string("unexpected end of file, expected ") + what, lineno + 1);
  };

  auto header = next("header");
  if (header.size() != 2 || header[0] != "gnarl-graphs" || header[1] != "1")
    throw DatasetError("bad header, expected '" + std::string(kHeader) + "'", lineno);
  auto count_line = next("count");
  if (count_line.size() != 2 || count_line[0] != "count") throw DatasetError("expected 'count <k>'", lineno);
  const long count = parse_int(count_line[1], lineno);
  if (count < 0) throw DatasetError("negative graph count", lineno);

  std::vector<Graph> graphs;
  graphs.reserve(static_cast<std::size_t>(count));
  for (long gi = 0; gi < count; ++gi) {
    auto g = next("graph record");
    if (g.size() != 6 || g[0] != "graph") throw DatasetError("expected 'graph n m directed weighted node_weighted'", lineno);
    const long n = parse_int(g[1], lineno);
    const long m = parse_int(g[2], lineno);
    if (n < 1 || m < 0) throw DatasetError("invalid node or edge count", lineno);
    const bool directed = parse_flag(g[3], lineno);
    const bool weighted = parse_flag(g[4], lineno);
    const bool node_weighted = parse_flag(g[5], lineno);
    const int graph_line = lineno;

    std::optional<std::vector<double>> nw;
    if (node_weighted) {
      auto t = next("node weights");
      if (t[0] != "nw" || t.size() != static_cast<std::size_t>(n) + 1)
        throw DatasetError("expected 'nw' followed by " + std::to_string(n) + " weights", lineno);
      nw.emplace();
      for (std::size_t i = 1; i < t.size(); ++i) nw->push_back(parse_real(t[i], lineno));
    }
    std::vector<Edge> edges;
    std::optional<std::vector<double>> ws;
    if (weighted) ws.emplace();
    for (long e = 0; e < m; ++e) {
      auto t = next("edge");
      if (t.size() != (weighted ? 3u : 2u)) throw DatasetError("malformed edge line", lineno);
      const long u = parse_int(t[0], lineno);
      const long v = parse_int(t[1], lineno);
      if (u < 0 || v < 0 || u >= n || v >= n) throw DatasetError("edge endpoint out of range", lineno);
      edges.push_back({static_cast<int>(u), static_cast<int>(v)});
      if (weighted) ws->push_back(parse_real(t[2], lineno));
    }
    try {
      graphs.emplace_back(static_cast<int>(n), std::move(edges), directed, std::move(ws), std::move(nw));
    } catch (const std::invalid_argument& ex) {
      throw DatasetError(ex.what(), graph_line);
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_ws(line).empty()) throw DatasetError("trailing content after last graph", lineno);
  }
  return graphs;
}

void save_dataset(const std::vector<Graph>& graphs, const std::filesystem::path& path) {
  write_text_file(path, serialize_dataset(graphs));
}

std::string read_text_file(const std::filesystem::path& path) {
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::string out;
    char buf[1 << 15];
    int got = 0;
    while ((got = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
    const bool failed = got < 0;
    gzclose(f);
    if (failed) throw std::runtime_error("corrupt gzip stream in " + path.string());
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const int written = text.empty() ? 0 : gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    if (gzclose(f) != Z_OK || written != static_cast<int>(text.size()))
      throw std::runtime_error("failed writing " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<Graph> load_dataset(const std::filesystem::path& path) { return parse_dataset(read_text_file(path)); }

}  // namespace gnarl
