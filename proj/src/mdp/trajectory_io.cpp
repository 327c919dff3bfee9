#include <cstdio>
#include <sstream>

#include "gnarl/mdp.hpp"

namespace gnarl {
namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string serialize_trajectories(const std::vector<Trajectory>& ts) {
  std::string out = "gnarl-trajectories 1\ncount " + std::to_string(ts.size()) + "\n";
  for (const auto& t : ts) {
    if (t.graph_id.find_first_of(" \t\n") != std::string::npos || t.graph_id.empty())
      throw std::invalid_argument("trajectory graph id must be a non-empty token");
    const bool has_probs = !t.probs.empty();
    if (has_probs && t.probs.size() != t.actions.size())
      throw std::invalid_argument("trajectory has probabilities for only some steps");
    out += "trajectory " + t.env + " " + t.graph_id + " " + std::to_string(t.seed) + " " +
           std::to_string(t.actions.size()) + " " + (has_probs ? "1" : "0") + "\n";
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      out += std::to_string(i) + " " + std::to_string(t.actions[i]) + " " + fmt(t.rewards[i]);
      if (has_probs)
        for (double p : t.probs[i]) out += " " + fmt(p);
      out += "\n";
    }
  }
  return out;
}

std::vector<Trajectory> parse_trajectories(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::vector<std::string> toks;
      std::string tok;
      while (ls >> tok) toks.push_back(tok);
      if (!toks.empty()) return toks;
    }
    throw DatasetError("unexpected end of file", lineno + 1);
  };
  auto as_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DatasetError("expected integer, got '" + s + "'", lineno);
    }
  };
  auto as_real = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DatasetError("expected real number, got '" + s + "'", lineno);
    }
  };

  auto h = next();
  if (h.size() != 2 || h[0] != "gnarl-trajectories" || h[1] != "1") throw DatasetError("bad trajectory header", lineno);
  auto c = next();
  if (c.size() != 2 || c[0] != "count") throw DatasetError("expected 'count <k>'", lineno);
  const long long count = as_int(c[1]);
  std::vector<Trajectory> out;
  for (long long k = 0; k < count; ++k) {
    auto th = next();
    if (th.size() != 6 || th[0] != "trajectory")
      throw DatasetError("expected 'trajectory env graph_id seed steps has_probs'", lineno);
    Trajectory t;
    t.env = th[1];
    t.graph_id = th[2];
    try {
      t.seed = std::stoull(th[3]);
    } catch (const std::exception&) {
      throw DatasetError("bad seed", lineno);
    }
    const long long steps = as_int(th[4]);
    const bool has_probs = as_int(th[5]) == 1;
    for (long long i = 0; i < steps; ++i) {
      auto s = next();
      if (s.size() < 3 || as_int(s[0]) != i) throw DatasetError("malformed step line", lineno);
      t.actions.push_back(static_cast<int>(as_int(s[1])));
      t.rewards.push_back(as_real(s[2]));
      if (has_probs) {
        std::vector<double> p;
        for (std::size_t j = 3; j < s.size(); ++j) p.push_back(as_real(s[j]));
        if (p.empty()) throw DatasetError("missing expert probabilities", lineno);
        t.probs.push_back(std::move(p));
      } else if (s.size() != 3) {
        throw DatasetError("unexpected probabilities on step line", lineno);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

void save_trajectories(const std::vector<Trajectory>& ts, const std::filesystem::path& path) {
  write_text_file(path, serialize_trajectories(ts));
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  return parse_trajectories(read_text_file(path));
}

}  // namespace gnarl
