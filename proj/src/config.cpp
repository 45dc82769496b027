#include "tfac/config.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tfac {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, where);
  out = v;
}

void require_one_of(const std::string& v, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const char* a : allowed) {
    if (v == a) return;
  }
  throw std::invalid_argument(where + ": unsupported value '" + v + "'");
}

const char* name(SchemeType t) { return t == SchemeType::pc ? "pc" : "sfl1"; }
const char* name(SchemeMode m) { return m == SchemeMode::fast ? "fast" : "direct"; }
const char* name(DirectEvaluation d) {
  switch (d) {
    case DirectEvaluation::sum:
      return "sum";
    case DirectEvaluation::toeplitz:
      return "toeplitz";
    default:
      return "automatic";
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  reject_unknown(root, "config", {"model", "grid", "mesh", "scheme", "source", "init", "output"});

  if (root.contains("model")) {
    const auto& m = root["model"];
    reject_unknown(m, "model", {"alpha", "eps2", "kappa", "potential"});
    read(m, "alpha", c.model.alpha, "model");
    read(m, "eps2", c.model.eps2, "model");
    read(m, "kappa", c.model.kappa, "model");
    read(m, "potential", c.potential, "model");
    require_one_of(c.potential, {"double_well"}, "model.potential");
  }
  validate(c.model);

  if (root.contains("grid")) {
    const auto& g = root["grid"];
    reject_unknown(g, "grid", {"dim", "M", "L"});
    int dim = c.grid.dim;
    std::size_t M = c.grid.M;
    double L = c.grid.L;
    read(g, "dim", dim, "grid");
    read(g, "M", M, "grid");
    read(g, "L", L, "grid");
    c.grid = make_grid(dim, M, L);
  }

  if (root.contains("mesh")) {
    const auto& m = root["mesh"];
    reject_unknown(m, "mesh", {"type", "T", "N", "gamma", "t_switch", "tau", "tau_min", "tau_max", "adp_gain"});
    read(m, "type", c.mesh.type, "mesh");
    read(m, "T", c.mesh.T, "mesh");
    read(m, "N", c.mesh.N, "mesh");
    read(m, "gamma", c.mesh.gamma, "mesh");
    read(m, "t_switch", c.mesh.t_switch, "mesh");
    read(m, "tau", c.mesh.tau, "mesh");
    read(m, "tau_min", c.mesh.tau_min, "mesh");
    read(m, "tau_max", c.mesh.tau_max, "mesh");
    read(m, "adp_gain", c.mesh.adp_gain, "mesh");
  }
  require_one_of(c.mesh.type, {"uniform", "graded", "composite", "adaptive"}, "mesh.type");
  if (!(c.mesh.T > 0.0)) throw std::invalid_argument("mesh.T must be positive");

  if (root.contains("scheme")) {
    const auto& s = root["scheme"];
    reject_unknown(s, "scheme", {"type", "mode", "soe_tol", "soe_delta", "direct_engine"});
    std::string type = name(c.scheme.type), mode = name(c.scheme.mode), engine = name(c.scheme.direct);
    read(s, "type", type, "scheme");
    read(s, "mode", mode, "scheme");
    read(s, "direct_engine", engine, "scheme");
    require_one_of(type, {"sfl1", "pc"}, "scheme.type");
    require_one_of(mode, {"direct", "fast"}, "scheme.mode");
    require_one_of(engine, {"automatic", "sum", "toeplitz"}, "scheme.direct_engine");
    c.scheme.type = type == "pc" ? SchemeType::pc : SchemeType::sfl1;
    c.scheme.mode = mode == "fast" ? SchemeMode::fast : SchemeMode::direct;
    c.scheme.direct = engine == "sum" ? DirectEvaluation::sum
                      : engine == "toeplitz" ? DirectEvaluation::toeplitz
                                             : DirectEvaluation::automatic;
    read(s, "soe_tol", c.scheme.soe_tol, "scheme");
    read(s, "soe_delta", c.scheme.soe_delta, "scheme");
  }
  if (!(c.scheme.soe_tol > 0.0)) throw std::invalid_argument("scheme.soe_tol must be positive");

  read(root, "source", c.source, "config");
  require_one_of(c.source, {"none", "manufactured"}, "source");

  if (root.contains("init")) {
    const auto& i = root["init"];
    reject_unknown(i, "init", {"type", "amplitude", "seed", "mu", "value"});
    read(i, "type", c.init.type, "init");
    read(i, "amplitude", c.init.amplitude, "init");
    read(i, "seed", c.init.seed, "init");
    read(i, "mu", c.init.mu, "init");
    read(i, "value", c.init.value, "init");
  }
  require_one_of(c.init.type, {"random_uniform", "manufactured", "constant"}, "init.type");
  if (c.source == "manufactured" && c.init.type != "manufactured") {
    throw std::invalid_argument("source 'manufactured' needs init.type 'manufactured'");
  }

  if (root.contains("output")) {
    const auto& o = root["output"];
    reject_unknown(o, "output", {"dir", "csv_path", "log_every", "snapshot_every", "snapshot_times", "snapshot_format", "summary_path"});
    read(o, "dir", c.output.dir, "output");
    read(o, "csv_path", c.output.csv_path, "output");
    read(o, "log_every", c.output.log_every, "output");
    read(o, "snapshot_every", c.output.snapshot_every, "output");
    read(o, "snapshot_times", c.output.snapshot_times, "output");
    read(o, "snapshot_format", c.output.snapshot_format, "output");
    read(o, "summary_path", c.output.summary_path, "output");
  }
  require_one_of(c.output.snapshot_format, {"vtk", "raw", "both", "none"}, "output.snapshot_format");
  if (c.output.log_every == 0) throw std::invalid_argument("output.log_every must be positive");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json mesh = {{"type", c.mesh.type},         {"T", c.mesh.T},       {"N", c.mesh.N},
               {"t_switch", c.mesh.t_switch}, {"tau", c.mesh.tau},   {"tau_min", c.mesh.tau_min},
               {"tau_max", c.mesh.tau_max},   {"adp_gain", c.mesh.adp_gain}};
  mesh["gamma"] = c.mesh.gamma ? json(*c.mesh.gamma) : json(nullptr);
  json scheme = {{"type", name(c.scheme.type)},
                 {"mode", name(c.scheme.mode)},
                 {"soe_tol", c.scheme.soe_tol},
                 {"direct_engine", name(c.scheme.direct)}};
  scheme["soe_delta"] = c.scheme.soe_delta ? json(*c.scheme.soe_delta) : json(nullptr);
  json root = {
      {"model", {{"alpha", c.model.alpha}, {"eps2", c.model.eps2}, {"kappa", c.model.kappa}, {"potential", c.potential}}},
      {"grid", {{"dim", c.grid.dim}, {"M", c.grid.M}, {"L", c.grid.L}}},
      {"mesh", mesh},
      {"scheme", scheme},
      {"source", c.source},
      {"init",
       {{"type", c.init.type}, {"amplitude", c.init.amplitude}, {"seed", c.init.seed}, {"mu", c.init.mu}, {"value", c.init.value}}},
      {"output",
       {{"dir", c.output.dir},
        {"csv_path", c.output.csv_path},
        {"log_every", c.output.log_every},
        {"snapshot_every", c.output.snapshot_every},
        {"snapshot_times", c.output.snapshot_times},
        {"snapshot_format", c.output.snapshot_format},
        {"summary_path", c.output.summary_path}}}};
  return root.dump();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& config) {
  auto j = json::parse(to_json(config));
  j.erase("output");
  return fnv1a_hex(j.dump());
}

}  // namespace tfac
