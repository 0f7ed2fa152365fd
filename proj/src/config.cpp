#include "conormal/config.hpp"

#include <fstream>

#include <json.hpp>

namespace conormal {

using nlohmann::json;

RunConfig::RunConfig() {
  ToyParams tp = ToyParams::defaults();
  for (const auto& m : tp.a1_modes) toy_a1_modes.push_back({m.k, m.phase, m.m});
}

ToyBVP RunConfig::build_toy() const {
  ToyParams tp;
  tp.N = toy_N;
  tp.r = toy_r;
  tp.s = toy_s;
  tp.d = toy_d;
  tp.margin = toy_margin;
  tp.coefficient_seed = toy_coefficient_seed;
  tp.a1_c0 = toy_a1_c0;
  for (const auto& m : toy_a1_modes) tp.a1_modes.push_back({m.k, m.phase, m.m});
  return make_toy(grid, tp);
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

double need_number(const json& j, const std::string& key, double lo, double hi) {
  if (!j.contains(key)) bad("/" + key, "missing required field");
  if (!j[key].is_number()) bad("/" + key, "expected a number");
  const double v = j[key].get<double>();
  if (v < lo || v > hi)
    bad("/" + key, "value " + std::to_string(v) + " outside [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    bad(where, "expected an array of rows");
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t rr = 0; rr < j.size(); ++rr) {
    if (!j[rr].is_array() || j[rr].size() != cols)
      bad(where, "ragged matrix rows");
    for (size_t cc = 0; cc < cols; ++cc) {
      if (!j[rr][cc].is_number()) bad(where, "matrix entries must be numbers");
      m(rr, cc) = j[rr][cc].get<double>();
    }
  }
  return m;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  if (!j.is_object()) bad("/", "top level must be an object");

  static const std::vector<std::string> known = {
      "grid", "cutoff", "sweep", "seed", "samples_per_family",
      "families", "suite", "out_dir", "toy"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      bad("/" + it.key(), "unknown field");

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) bad("/grid", "expected an object");
    HalfSpaceGrid grid = c.grid;
    if (g.contains("n")) grid.n = static_cast<int>(need_number(g, "n", 2, 3));
    if (g.contains("sizes")) {
      if (!g["sizes"].is_array() ||
          g["sizes"].size() != static_cast<size_t>(grid.n))
        bad("/grid/sizes", "expected an array of n integers");
      grid.sizes.clear();
      for (const auto& v : g["sizes"]) {
        if (!v.is_number_integer()) bad("/grid/sizes", "entries must be integers");
        grid.sizes.push_back(v.get<int>());
      }
    }
    if (g.contains("left_log")) grid.left_log = need_number(g, "left_log", 8.0, 256.0);
    if (g.contains("right_log")) grid.right_log = need_number(g, "right_log", 0.0, 64.0);
    if (g.contains("half_width")) grid.half_width = need_number(g, "half_width", 1.0, 64.0);
    if (g.contains("delta0")) grid.delta0 = need_number(g, "delta0", 0.05, 0.95);
    if (g.contains("trunc_tol")) grid.trunc_tol = need_number(g, "trunc_tol", 0.0, 1.0);
    try {
      grid.validate();
    } catch (const std::exception& e) {
      bad("/grid", e.what());
    }
    c.grid = grid;
  }
  if (j.contains("cutoff")) {
    const json& g = j["cutoff"];
    if (!g.is_object()) bad("/cutoff", "expected an object");
    if (g.contains("safety")) c.cutoff_safety = need_number(g, "safety", 0.05, 1.0);
  }
  if (j.contains("sweep")) {
    if (!j["sweep"].is_array() || j["sweep"].empty())
      bad("/sweep", "expected a nonempty array");
    c.sweep.clear();
    double prev = 0.0;
    for (const auto& v : j["sweep"]) {
      if (!v.is_number()) bad("/sweep", "entries must be numbers");
      const double g = v.get<double>();
      if (g < 1.0) bad("/sweep", "gamma values must be >= 1");
      if (g <= prev) bad("/sweep", "values must increase strictly");
      prev = g;
      c.sweep.push_back(g);
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      bad("/seed", "expected an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("samples_per_family"))
    c.samples_per_family =
        static_cast<int>(need_number(j, "samples_per_family", 1, 64));
  if (j.contains("families")) {
    if (!j["families"].is_array() || j["families"].empty())
      bad("/families", "expected a nonempty array");
    c.families.clear();
    for (const auto& v : j["families"]) {
      if (!v.is_string()) bad("/families", "entries must be strings");
      const std::string f = v.get<std::string>();
      if (f != "gauss" && f != "bump" && f != "osc" && f != "zero")
        bad("/families", "unknown family '" + f + "'");
      c.families.push_back(f);
    }
  }
  if (j.contains("suite")) {
    if (!j["suite"].is_string()) bad("/suite", "expected a string");
    c.suite = j["suite"].get<std::string>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) bad("/out_dir", "expected a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("toy")) {
    const json& t = j["toy"];
    if (!t.is_object()) bad("/toy", "expected an object");
    if (t.contains("N")) c.toy_N = static_cast<int>(need_number(t, "N", 2, 8));
    if (t.contains("r")) c.toy_r = static_cast<int>(need_number(t, "r", 1, 7));
    if (t.contains("s")) c.toy_s = static_cast<int>(need_number(t, "s", 1, 7));
    if (t.contains("d")) c.toy_d = static_cast<int>(need_number(t, "d", 1, 8));
    if (t.contains("margin")) c.toy_margin = need_number(t, "margin", 0.0, 10.0);
    if (t.contains("coefficient_seed"))
      c.toy_coefficient_seed = t["coefficient_seed"].get<std::uint64_t>();
    if (t.contains("a1_c0")) c.toy_a1_c0 = parse_matrix(t["a1_c0"], "/toy/a1_c0");
    if (t.contains("a1_modes")) {
      if (!t["a1_modes"].is_array()) bad("/toy/a1_modes", "expected an array");
      c.toy_a1_modes.clear();
      for (const auto& m : t["a1_modes"]) {
        RunConfig::A1Mode mode;
        if (!m.contains("k") || !m["k"].is_array())
          bad("/toy/a1_modes/k", "expected frequency multiples");
        for (const auto& v : m["k"]) mode.k.push_back(v.get<int>());
        mode.phase = m.value("phase", 0.0);
        if (!m.contains("m")) bad("/toy/a1_modes/m", "missing matrix");
        mode.m = parse_matrix(m["m"], "/toy/a1_modes/m");
        c.toy_a1_modes.push_back(std::move(mode));
      }
    }
    if (!(c.toy_r >= 1 && c.toy_r < c.toy_N))
      bad("/toy/r", "need 1 <= r < N");
    if (!(c.toy_s >= 1 && c.toy_s <= c.toy_r))
      bad("/toy/s", "need 1 <= s <= r");
    // d <= r + 1 is a structural property checked by validate_structure, not
    // a schema constraint: configs violating it must load and then FAIL.
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"n", c.grid.n},
               {"sizes", c.grid.sizes},
               {"left_log", c.grid.left_log},
               {"right_log", c.grid.right_log},
               {"half_width", c.grid.half_width},
               {"delta0", c.grid.delta0},
               {"trunc_tol", c.grid.trunc_tol}};
  j["cutoff"] = {{"safety", c.cutoff_safety}};
  j["sweep"] = c.sweep;
  j["seed"] = c.seed;
  j["samples_per_family"] = c.samples_per_family;
  j["families"] = c.families;
  j["suite"] = c.suite;
  j["out_dir"] = c.out_dir;
  json modes = json::array();
  for (const auto& m : c.toy_a1_modes) {
    json rows = json::array();
    for (int rr = 0; rr < m.m.rows(); ++rr) {
      json row = json::array();
      for (int cc = 0; cc < m.m.cols(); ++cc) row.push_back(m.m(rr, cc));
      rows.push_back(row);
    }
    modes.push_back({{"k", m.k}, {"phase", m.phase}, {"m", rows}});
  }
  json c0rows = json::array();
  for (int rr = 0; rr < c.toy_a1_c0.rows(); ++rr) {
    json row = json::array();
    for (int cc = 0; cc < c.toy_a1_c0.cols(); ++cc)
      row.push_back(c.toy_a1_c0(rr, cc));
    c0rows.push_back(row);
  }
  j["toy"] = {{"N", c.toy_N},
              {"r", c.toy_r},
              {"s", c.toy_s},
              {"d", c.toy_d},
              {"margin", c.toy_margin},
              {"coefficient_seed", c.toy_coefficient_seed},
              {"a1_c0", c0rows},
              {"a1_modes", modes}};
  return j;
}

std::string config_schema_text() {
  return R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "verify run configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "grid": {
      "type": "object",
      "properties": {
        "n": {"type": "integer", "minimum": 2, "maximum": 3},
        "sizes": {"type": "array", "items": {"type": "integer"}},
        "left_log": {"type": "number", "minimum": 8},
        "right_log": {"type": "number", "minimum": 0},
        "half_width": {"type": "number", "exclusiveMinimum": 1},
        "delta0": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "trunc_tol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "cutoff": {
      "type": "object",
      "properties": {"safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}}
    },
    "sweep": {"type": "array", "items": {"type": "number", "minimum": 1}},
    "seed": {"type": "integer", "minimum": 0},
    "samples_per_family": {"type": "integer", "minimum": 1},
    "families": {"type": "array", "items": {"enum": ["gauss", "bump", "osc", "zero"]}},
    "suite": {"type": "string"},
    "out_dir": {"type": "string"},
    "toy": {
      "type": "object",
      "properties": {
        "N": {"type": "integer", "minimum": 2},
        "r": {"type": "integer", "minimum": 1},
        "s": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1},
        "margin": {"type": "number", "minimum": 0},
        "coefficient_seed": {"type": "integer", "minimum": 0},
        "a1_c0": {"type": "array"},
        "a1_modes": {"type": "array"}
      }
    }
  }
}
)";
}

}  // namespace conormal
