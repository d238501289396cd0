#include "sse/serialization.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sse/error.hpp"

namespace sse {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json input_model_to_json(const InputModel& input) {
  json vars = json::array();
  for (std::size_t i = 0; i < input.dim(); ++i) {
    const auto& m = input.marginal(i);
    const auto [a, b] = m.declared();
    vars.push_back({{"name", input.names()[i]}, {"family", to_string(m.family())}, {"params", {a, b}}});
  }
  return vars;
}

InputModel input_model_from_json(const json& j) {
  std::vector<Marginal> marginals;
  std::vector<std::string> names;
  for (const auto& v : j) {
    const auto& params = v.at("params");
    marginals.push_back(Marginal::make(family_from_string(v.at("family").get<std::string>()),
                                       params.at(0).get<double>(), params.at(1).get<double>()));
    names.push_back(v.at("name").get<std::string>());
  }
  return InputModel(std::move(marginals), std::move(names));
}

namespace {

json expansion_to_json(const Expansion& e) {
  json indices = json::array();
  for (const auto& alpha : e.indices) indices.push_back(alpha.degrees);
  std::vector<double> coeffs(e.coefficients.data(), e.coefficients.data() + e.coefficients.size());
  return {{"degree", e.degree}, {"q", e.q},         {"loo", e.loo}, {"unstable", e.unstable},
          {"indices", indices}, {"coefficients", coeffs}};
}

Expansion expansion_from_json(const json& j, Box box) {
  Expansion e = Expansion::null(std::move(box));
  e.degree = j.at("degree").get<int>();
  e.q = j.at("q").get<double>();
  e.loo = j.at("loo").get<double>();
  e.unstable = j.at("unstable").get<bool>();
  for (const auto& alpha : j.at("indices")) {
    e.indices.emplace_back(alpha.get<std::vector<int>>());
    if (e.indices.back().dim() != e.box.dim()) throw Error("malformed model: index dimension");
  }
  const auto coeffs = j.at("coefficients").get<std::vector<double>>();
  if (coeffs.size() != e.indices.size()) throw Error("malformed model: coefficient count");
  e.coefficients = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return e;
}

} // namespace

std::string serialize(const SseModel& model) {
  const auto& cfg = model.config();
  const auto& diag = model.diagnostics();
  json payload;
  payload["input_model"] = input_model_to_json(model.input_model());
  payload["config"] = {{"max_degree", cfg.max_degree}, {"q_grid", cfg.q_grid},
                       {"max_rank", cfg.max_rank},     {"n_min", cfg.n_min},
                       {"max_level", cfg.max_level},   {"seed", cfg.seed}};
  payload["diagnostics"] = {{"n_train", diag.n_train},
                            {"n_min", diag.n_min},
                            {"max_level", diag.max_level},
                            {"y_variance", diag.y_variance},
                            {"duplicate_rows", diag.duplicate_rows},
                            {"residual_ss", diag.residual_ss}};
  json subs = json::array();
  for (std::size_t id = 0; id < model.nodes().size(); ++id) {
    const auto& s = model.nodes()[id];
    json rec = {{"id", id},
                {"level", s.level},
                {"index", s.index},
                {"parent", s.parent},
                {"children", s.children},
                {"split_dim", s.split_dim},
                {"lower", s.box.lower},
                {"upper", s.box.upper},
                {"mass", s.mass},
                {"loo", s.loo},
                {"n_points", s.n_points}};
    rec["expansion"] = s.expansion ? expansion_to_json(*s.expansion) : json(nullptr);
    subs.push_back(std::move(rec));
  }
  payload["subdomains"] = std::move(subs);

  const std::string body = payload.dump();
  json doc;
  doc["format"] = "sse-model";
  doc["version"] = kModelFormatVersion;
  doc["checksum"] = fnv1a_hex(body);
  doc["payload"] = std::move(payload);
  return doc.dump(1);
}

SseModel deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != "sse-model") {
      throw Error("malformed model: not an sse-model document");
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw Error("model version mismatch");
    }
    const json& payload = doc.at("payload");
    if (fnv1a_hex(payload.dump()) != doc.at("checksum").get<std::string>()) {
      throw Error("model checksum failure");
    }

    InputModel input = input_model_from_json(payload.at("input_model"));

    const json& jc = payload.at("config");
    SseConfig cfg;
    cfg.max_degree = jc.at("max_degree").get<int>();
    cfg.q_grid = jc.at("q_grid").get<std::vector<double>>();
    cfg.max_rank = jc.at("max_rank").get<int>();
    cfg.n_min = jc.at("n_min").get<std::size_t>();
    cfg.max_level = jc.at("max_level").get<int>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();

    const json& jd = payload.at("diagnostics");
    TrainingDiagnostics diag;
    diag.n_train = jd.at("n_train").get<std::size_t>();
    diag.n_min = jd.at("n_min").get<std::size_t>();
    diag.max_level = jd.at("max_level").get<int>();
    diag.y_variance = jd.at("y_variance").get<double>();
    diag.duplicate_rows = jd.at("duplicate_rows").get<bool>();
    diag.residual_ss = jd.at("residual_ss").get<std::vector<double>>();

    std::vector<Subdomain> nodes;
    for (const auto& rec : payload.at("subdomains")) {
      Subdomain s;
      s.level = rec.at("level").get<int>();
      s.index = rec.at("index").get<int>();
      s.parent = rec.at("parent").get<int>();
      s.children = rec.at("children").get<std::array<int, kChildrenPerSplit>>();
      s.split_dim = rec.at("split_dim").get<int>();
      s.box.lower = rec.at("lower").get<std::vector<double>>();
      s.box.upper = rec.at("upper").get<std::vector<double>>();
      s.mass = rec.at("mass").get<double>();
      s.loo = rec.at("loo").get<double>();
      s.n_points = rec.at("n_points").get<std::size_t>();
      if (!rec.at("expansion").is_null()) {
        s.expansion = expansion_from_json(rec.at("expansion"), s.box);
      }
      nodes.push_back(std::move(s));
    }
    return SseModel(std::move(input), std::move(cfg), std::move(nodes), std::move(diag));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model: ") + e.what());
  }
}

void save_model(const SseModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << serialize(model) << '\n';
  if (!out) throw Error("failed writing '" + path + "'");
}

SseModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

} // namespace sse
