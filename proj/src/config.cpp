#include "orbitlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace orbitlab::config {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (known.find(item.key()) == known.end())
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

double positive(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  const double d = v.get<double>();
  if (!(d > 0)) throw ConfigError(name + " must be positive");
  return d;
}

Eigen::Index grid_size(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
  const auto n = v.get<long long>();
  if (n < 33) throw ConfigError(name + " must be at least 33");
  return static_cast<Eigen::Index>(n);
}

void extract_into(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(
      doc, {"suite", "potential", "weight", "grids", "tolerances", "seed",
            "output"},
      "config root");

  if (doc.contains("suite")) {
    if (!doc["suite"].is_string()) throw ConfigError("suite must be a string");
    cfg.suite = doc["suite"].get<std::string>();
  }

  if (doc.contains("potential")) {
    const json& pot = doc["potential"];
    if (!pot.is_object()) throw ConfigError("potential must be an object");
    reject_unknown_keys(
        pot, {"family", "k", "m", "A", "radius_x", "radius_w", "mode"},
        "potential");
    if (pot.contains("family")) cfg.family = pot["family"].get<std::string>();
    if (pot.contains("k")) cfg.k = pot["k"].get<int>();
    if (pot.contains("m")) cfg.m = pot["m"].get<int>();
    if (pot.contains("radius_x"))
      cfg.radius_x = positive(pot["radius_x"], "radius_x");
    if (pot.contains("radius_w"))
      cfg.radius_w = positive(pot["radius_w"], "radius_w");
    if (pot.contains("mode")) cfg.mode = pot["mode"].get<std::string>();
    if (pot.contains("A")) {
      const json& rows = pot["A"];
      if (!rows.is_array() || rows.empty())
        throw ConfigError("A must be a nonempty array of rows");
      const size_t n = rows.size();
      Eigen::MatrixXd A(n, n);
      for (size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
          throw ConfigError("A must be square");
        for (size_t j = 0; j < n; ++j) A(i, j) = rows[i][j].get<double>();
      }
      cfg.A = A;
    }
  }

  if (doc.contains("weight")) {
    const json& wt = doc["weight"];
    if (!wt.is_object()) throw ConfigError("weight must be an object");
    reject_unknown_keys(wt, {"kind", "c", "a"}, "weight");
    if (wt.contains("kind")) cfg.weight_kind = wt["kind"].get<std::string>();
    if (wt.contains("c")) cfg.weight_constant = positive(wt["c"], "weight c");
    if (wt.contains("a")) {
      if (!wt["a"].is_array()) throw ConfigError("weight a must be an array");
      cfg.weight_a = wt["a"].get<std::vector<double>>();
    }
  }

  if (doc.contains("grids")) {
    const json& gr = doc["grids"];
    if (!gr.is_object()) throw ConfigError("grids must be an object");
    reject_unknown_keys(gr,
                        {"x_nodes", "w_nodes", "p_nodes", "t_nodes",
                         "x_extent", "w_extent"},
                        "grids");
    if (gr.contains("x_nodes")) cfg.x_nodes = grid_size(gr["x_nodes"], "x_nodes");
    if (gr.contains("w_nodes")) cfg.w_nodes = grid_size(gr["w_nodes"], "w_nodes");
    if (gr.contains("p_nodes")) cfg.p_nodes = grid_size(gr["p_nodes"], "p_nodes");
    if (gr.contains("t_nodes")) cfg.t_nodes = grid_size(gr["t_nodes"], "t_nodes");
    if (gr.contains("x_extent"))
      cfg.x_extent = positive(gr["x_extent"], "x_extent");
    if (gr.contains("w_extent"))
      cfg.w_extent = positive(gr["w_extent"], "w_extent");
  }

  if (doc.contains("tolerances")) {
    const json& tl = doc["tolerances"];
    if (!tl.is_object()) throw ConfigError("tolerances must be an object");
    reject_unknown_keys(tl,
                        {"identity", "roundtrip", "derivative", "factorization",
                         "normalization", "disintegration", "transport"},
                        "tolerances");
    if (tl.contains("identity"))
      cfg.identity_tol = positive(tl["identity"], "identity tolerance");
    if (tl.contains("roundtrip"))
      cfg.roundtrip_tol = positive(tl["roundtrip"], "roundtrip tolerance");
    if (tl.contains("derivative"))
      cfg.derivative_tol = positive(tl["derivative"], "derivative tolerance");
    if (tl.contains("factorization"))
      cfg.factorization_tol =
          positive(tl["factorization"], "factorization tolerance");
    if (tl.contains("normalization"))
      cfg.normalization_tol =
          positive(tl["normalization"], "normalization tolerance");
    if (tl.contains("disintegration"))
      cfg.disintegration_tol =
          positive(tl["disintegration"], "disintegration tolerance");
    if (tl.contains("transport"))
      cfg.transport_tol = positive(tl["transport"], "transport tolerance");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
      throw ConfigError("seed must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output must be a string");
    cfg.output_dir = doc["output"].get<std::string>();
  }
}

}  // namespace

bool known_suite(const std::string& suite) {
  static const std::set<std::string> suites = {
      "verify-minors",          "verify-legendre", "verify-factorization",
      "verify-disintegration",  "verify-transport", "all"};
  return suites.count(suite) > 0;
}

void validate(const RunConfig& cfg) {
  if (!known_suite(cfg.suite))
    throw ConfigError("unknown suite '" + cfg.suite + "'");
  static const std::set<std::string> families = {
      "quadratic_separable", "projective_model", "toric_fs"};
  if (families.count(cfg.family) == 0)
    throw ConfigError("unknown potential family '" + cfg.family + "'");
  if (cfg.mode != "analytic" && cfg.mode != "finite_difference")
    throw ConfigError("unknown derivative mode '" + cfg.mode + "'");
  if (cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.m < 0) throw ConfigError("m must be nonnegative");
  static const std::set<std::string> weights = {"constant",
                                                "affine_exponential", "table"};
  if (weights.count(cfg.weight_kind) == 0)
    throw ConfigError("unknown weight kind '" + cfg.weight_kind + "'");
  if (!(cfg.weight_constant > 0))
    throw ConfigError("weight constant must be positive");
  if (!(cfg.radius_x > 0) || !(cfg.radius_w > 0))
    throw ConfigError("domain radii must be positive");
  if (!(cfg.x_extent > 0) || !(cfg.w_extent > 0))
    throw ConfigError("grid extents must be positive");
  for (const Eigen::Index n :
       {cfg.x_nodes, cfg.w_nodes, cfg.p_nodes, cfg.t_nodes})
    if (n < 33) throw ConfigError("grid sizes must be at least 33");
  for (const double tol :
       {cfg.identity_tol, cfg.roundtrip_tol, cfg.derivative_tol,
        cfg.factorization_tol, cfg.normalization_tol, cfg.disintegration_tol,
        cfg.transport_tol})
    if (!(tol > 0)) throw ConfigError("tolerances must be positive");
  if (cfg.output_dir.empty()) throw ConfigError("output directory is empty");
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    extract_into(cfg, doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") +
                      e.what());
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace orbitlab::config
