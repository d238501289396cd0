#include "sse/run_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "sse/error.hpp"

namespace sse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',') c = ' ';
  }
  std::vector<std::string> out;
  std::stringstream ss(t);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(where + ": cannot parse '" + text + "'");
  }
  return v;
}

template <class T>
T single(const std::string& value, const std::string& where) {
  const auto w = words(value);
  if (w.size() != 1) throw Error(where + ": expected one value");
  return parse_number<T>(w[0], where);
}

template <class T>
std::vector<T> list(const std::string& value, const std::string& where) {
  std::vector<T> out;
  for (const auto& w : words(value)) out.push_back(parse_number<T>(w, where));
  if (out.empty()) throw Error(where + ": empty list");
  return out;
}

} // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::vector<Marginal> marginals;
  std::vector<std::string> names;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "input" && section != "sse" && section != "benchmark" && section != "io") {
        throw Error(where + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(where + ": empty key");
    if (section.empty()) throw Error(where + ": key '" + key + "' outside a section");

    if (section == "input") {
      const auto w = words(value);
      if (w.size() != 3) throw Error(where + ": expected '<family> <p1> <p2>'");
      try {
        marginals.push_back(Marginal::make(family_from_string(w[0]), parse_number<double>(w[1], where),
                                           parse_number<double>(w[2], where)));
      } catch (const Error& e) {
        const std::string msg = e.what();
        throw Error(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
      }
      names.push_back(key);
    } else if (section == "sse") {
      if (key == "p_max_local") {
        cfg.sse.max_degree = single<int>(value, where);
      } else if (key == "q_grid") {
        cfg.sse.q_grid = list<double>(value, where);
      } else if (key == "rank") {
        cfg.sse.max_rank = single<int>(value, where);
      } else if (key == "n_min") {
        cfg.sse.n_min = single<std::size_t>(value, where);
      } else if (key == "max_level") {
        cfg.sse.max_level = single<int>(value, where);
      } else if (key == "seed") {
        cfg.sse.seed = single<std::uint64_t>(value, where);
        cfg.seed_set = true;
      } else {
        throw Error(where + ": unknown key '" + key + "' in [sse]");
      }
    } else if (section == "benchmark") {
      if (key == "case") {
        cfg.bench_case = value;
      } else if (key == "sizes") {
        cfg.sizes = list<std::size_t>(value, where);
      } else if (key == "replications") {
        cfg.replications = single<std::size_t>(value, where);
      } else if (key == "n_val") {
        cfg.n_val = single<std::size_t>(value, where);
      } else {
        throw Error(where + ": unknown key '" + key + "' in [benchmark]");
      }
    } else {
      if (key == "design") {
        cfg.design_path = value;
      } else if (key == "model") {
        cfg.model_path = value;
      } else if (key == "points") {
        cfg.points_path = value;
      } else if (key == "output") {
        cfg.output_path = value;
      } else {
        throw Error(where + ": unknown key '" + key + "' in [io]");
      }
    }
  }
  if (cfg.sse.max_degree < 0) throw Error("config: p_max_local must be non-negative");
  if (cfg.sse.max_rank < 1) throw Error("config: rank must be at least 1");
  for (double q : cfg.sse.q_grid) {
    if (!(q > 0.0 && q <= 1.0)) throw Error("config: q_grid values must lie in (0, 1]");
  }
  if (!marginals.empty()) cfg.input = InputModel(std::move(marginals), std::move(names));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_run_config(in);
}

} // namespace sse
