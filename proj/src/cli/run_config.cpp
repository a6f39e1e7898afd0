#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rsdesign/cli.hpp"
#include "rsdesign/errors.hpp"

namespace rsdesign {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError(where + "." + key + " must be an object");
  return v;
}

// Kappa slots by name; "df" is the run-count weight.
int kappa_slot(const std::string& name) {
  if (name == "df" || name == "kappa4") return 4;
  if (auto c = parse_criterion(name)) return kappa_index(*c);
  return -1;
}

void read_criterion(const json& j, RunConfig& cfg, const std::string& where) {
  reject_unknown(j, {"kappa", "alpha", "alphas", "quadratic_weight", "weights", "sphere_measure"},
                 where);
  auto& cc = cfg.criterion;
  if (j.contains("kappa")) {
    const json& k = j.at("kappa");
    cc.kappa.fill(0.0);
    if (k.is_array()) {
      if (k.size() != cc.kappa.size()) throw ConfigError(where + ".kappa needs 9 entries");
      for (std::size_t i = 0; i < cc.kappa.size(); ++i) cc.kappa[i] = k[i].get<double>();
    } else if (k.is_object()) {
      for (const auto& [name, value] : k.items()) {
        const int slot = kappa_slot(name);
        if (slot < 0) throw ConfigError(where + ".kappa: unknown criterion '" + name + "'");
        cc.kappa[static_cast<std::size_t>(slot)] = value.get<double>();
      }
    } else {
      throw ConfigError(where + ".kappa must be an array or an object");
    }
  }
  if (j.contains("alpha")) {
    const double a = j.at("alpha").get<double>();
    cc.alpha_dp = cc.alpha_ap = cc.alpha_ip = cc.alpha_idp = a;
  }
  if (j.contains("alphas")) {
    const json& a = object_at(j, "alphas", where);
    reject_unknown(a, {"DP", "AP", "IP", "IDP"}, where + ".alphas");
    if (a.contains("DP")) cc.alpha_dp = a.at("DP").get<double>();
    if (a.contains("AP")) cc.alpha_ap = a.at("AP").get<double>();
    if (a.contains("IP")) cc.alpha_ip = a.at("IP").get<double>();
    if (a.contains("IDP")) cc.alpha_idp = a.at("IDP").get<double>();
  }
  if (j.contains("quadratic_weight")) cfg.quadratic_weight = j.at("quadratic_weight").get<double>();
  if (j.contains("weights")) {
    const auto w = j.at("weights").get<std::vector<double>>();
    cc.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  }
  if (j.contains("sphere_measure")) {
    const auto m = j.at("sphere_measure").get<std::string>();
    if (m == "surface") cc.sphere_measure = SphereMeasure::Surface;
    else if (m == "volume") cc.sphere_measure = SphereMeasure::Volume;
    else throw ConfigError(where + ".sphere_measure must be \"surface\" or \"volume\"");
  }
}

void read_graph(const json& j, GraphConfig& g, const std::string& where) {
  reject_unknown(j, {"variant", "scale", "interval_alpha", "axis", "radii", "samples",
                     "shell_samples", "seed", "threads"},
                 where);
  if (j.contains("variant")) {
    const auto name = j.at("variant").get<std::string>();
    auto v = parse_graph_variant(name);
    if (!v) throw ConfigError(where + ".variant: unknown graph '" + name + "'");
    g.variant = *v;
    if (name == "SEDG" || name == "DSEDG") g.scale = GraphScale::StandardError;
  }
  if (j.contains("scale")) {
    const auto s = j.at("scale").get<std::string>();
    if (s == "variance") g.scale = GraphScale::Variance;
    else if (s == "se") g.scale = GraphScale::StandardError;
    else throw ConfigError(where + ".scale must be \"variance\" or \"se\"");
  }
  if (j.contains("interval_alpha") && !j.at("interval_alpha").is_null()) {
    g.interval_alpha = j.at("interval_alpha").get<double>();
  }
  if (j.contains("axis")) {
    const auto a = j.at("axis").get<std::string>();
    if (a == "distance") g.axis = GraphAxis::Distance;
    else if (a == "volume" || a == "volume-fraction") g.axis = GraphAxis::VolumeFraction;
    else throw ConfigError(where + ".axis must be \"distance\" or \"volume\"");
  }
  if (j.contains("radii")) g.radii = j.at("radii").get<int>();
  if (j.contains("samples")) g.samples = j.at("samples").get<int>();
  if (j.contains("shell_samples")) g.shell_samples = j.at("shell_samples").get<int>();
  if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) g.threads = j.at("threads").get<int>();
}

}  // namespace

Region RunConfig::region() const {
  if (region_kind == RegionKind::Cube) return Region::cube(q);
  return Region::sphere(q, rho.value_or(std::sqrt(static_cast<double>(q))));
}

ModelSpec RunConfig::model() const {
  return intercept_only ? ModelSpec::intercept_only(q) : ModelSpec::full_quadratic(q);
}

CriterionContext RunConfig::context() const {
  const ModelSpec m = model();
  CriterionConfig cc = criterion;
  if (cc.weights.size() == 0 && quadratic_weight) cc.weights = default_weights(m, *quadratic_weight);
  return CriterionContext(m, region(), cc);
}

void RunConfig::validate() const {
  if (q < 1) throw ConfigError("q (number of factors) must be at least 1");
  if (runs < 0) throw ConfigError("runs must be nonnegative");
  if (rho && !(*rho > 0.0)) throw ConfigError("sphere radius rho must be positive");
  if (starts < 1) throw ConfigError("search.starts must be at least 1");
  if (max_passes < 0) throw ConfigError("search.max_passes must be nonnegative");
  if (threads < 0) throw ConfigError("search.threads must be nonnegative");
  if (quadratic_weight && !(*quadratic_weight >= 0.0)) {
    throw ConfigError("criterion.quadratic_weight must be nonnegative");
  }
  try {
    criterion.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const int p = model().size();
  if (criterion.weights.size() != 0 && criterion.weights.size() != p) {
    throw ConfigError("criterion.weights needs " + std::to_string(p) + " entries for q=" +
                      std::to_string(q));
  }
  if (graph.radii < 2) throw ConfigError("graph.radii must be at least 2");
  if (graph.samples < 1) throw ConfigError("graph.samples must be at least 1");
  if (graph.shell_samples < 1) throw ConfigError("graph.shell_samples must be at least 1");
  if (graph.interval_alpha && !(*graph.interval_alpha > 0.0 && *graph.interval_alpha < 1.0)) {
    throw ConfigError("graph.interval_alpha must lie in (0,1)");
  }
}

RunConfig parse_run_config(const std::string& json_text, const std::string& source) {
  RunConfig cfg;
  try {
    const json j = json::parse(json_text, nullptr, true, true);  // comments allowed
    if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
    reject_unknown(j, {"q", "runs", "region", "model", "criterion", "search", "graph", "snap",
                       "output"},
                   source);
    if (j.contains("q")) cfg.q = j.at("q").get<int>();
    if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
    if (j.contains("region")) {
      const json& r = object_at(j, "region", source);
      reject_unknown(r, {"kind", "rho"}, source + ".region");
      const auto kind = r.value("kind", std::string("cube"));
      if (kind == "cube") cfg.region_kind = RegionKind::Cube;
      else if (kind == "sphere") cfg.region_kind = RegionKind::Sphere;
      else throw ConfigError(source + ".region.kind must be \"cube\" or \"sphere\"");
      if (r.contains("rho")) cfg.rho = r.at("rho").get<double>();
    }
    if (j.contains("model")) {
      const auto m = j.at("model").get<std::string>();
      if (m == "quadratic") cfg.intercept_only = false;
      else if (m == "intercept") cfg.intercept_only = true;
      else throw ConfigError(source + ".model must be \"quadratic\" or \"intercept\"");
    }
    if (j.contains("criterion")) {
      read_criterion(object_at(j, "criterion", source), cfg, source + ".criterion");
    }
    if (j.contains("search")) {
      const json& s = object_at(j, "search", source);
      reject_unknown(s, {"starts", "max_passes", "seed", "threads"}, source + ".search");
      if (s.contains("starts")) cfg.starts = s.at("starts").get<int>();
      if (s.contains("max_passes")) cfg.max_passes = s.at("max_passes").get<int>();
      if (s.contains("seed")) cfg.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("threads")) cfg.threads = s.at("threads").get<int>();
    }
    if (j.contains("graph")) read_graph(object_at(j, "graph", source), cfg.graph, source + ".graph");
    if (j.contains("snap")) cfg.snap = j.at("snap").get<bool>();
    if (j.contains("output")) {
      const json& o = object_at(j, "output", source);
      reject_unknown(o, {"design", "report"}, source + ".output");
      cfg.design_output = o.value("design", std::string());
      cfg.report_output = o.value("report", std::string());
    }
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path);
}

}  // namespace rsdesign
