#include "obstacle/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid scenario:";
  for (const auto& l : lines) out += "\n  - " + l;
  return out;
}

// Collects violations instead of stopping at the first one.
struct Reader {
  std::vector<std::string> errors;

  void fail(std::string msg) { errors.push_back(std::move(msg)); }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& where,
                               std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
      if (!fallback) fail(where + "." + key + " is required");
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(where + "." + key + " must be a finite number");
      return fallback;
    }
    return v.get<double>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& key,
                                             const std::string& where) {
    if (!obj.contains(key)) {
      fail(where + "." + key + " is required");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_array()) {
      fail(where + "." + key + " must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        fail(where + "." + key + " must be an array of numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void only(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(where + ": unknown key \"" + k + "\"");
    }
  }

  std::optional<PiecewiseLinear> pl(const json& j, const std::string& where) {
    if (!j.is_object()) {
      fail(where + " must be an object");
      return std::nullopt;
    }
    if (j.contains("constant")) {
      only(j, {"constant"}, where);
      const auto c = number(j, "constant", where);
      if (!c) return std::nullopt;
      return PiecewiseLinear::constant(*c);
    }
    only(j, {"points", "left_slope", "right_slope", "periodic"}, where);
    if (!j.contains("points") || !j.at("points").is_array()) {
      fail(where + ".points must be an array of [x, y] pairs");
      return std::nullopt;
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        fail(where + ".points must be an array of [x, y] pairs");
        return std::nullopt;
      }
      xs.push_back(p[0].get<double>());
      ys.push_back(p[1].get<double>());
    }
    const bool periodic = j.value("periodic", false);
    try {
      if (periodic) {
        if (j.contains("left_slope") || j.contains("right_slope")) {
          fail(where + ": a periodic function takes no extension slopes");
        }
        return PiecewiseLinear::periodic(xs, ys);
      }
      const auto ls = number(j, "left_slope", where, 0.0);
      const auto rs = number(j, "right_slope", where, 0.0);
      return PiecewiseLinear(xs, ys, *ls, *rs);
    } catch (const InputError& e) {
      fail(where + ": " + e.what());
      return std::nullopt;
    }
  }

  std::optional<PiecewiseConstant> pc(const json& j, const std::string& where) {
    if (!j.is_object()) {
      fail(where + " must be an object");
      return std::nullopt;
    }
    if (j.contains("constant")) {
      only(j, {"constant"}, where);
      const auto c = number(j, "constant", where);
      if (!c) return std::nullopt;
      return PiecewiseConstant::constant(*c);
    }
    only(j, {"breakpoints", "values", "left", "right", "periodic"}, where);
    const auto xs = numbers(j, "breakpoints", where);
    const auto vs = numbers(j, "values", where);
    if (!xs || !vs) return std::nullopt;
    const bool periodic = j.value("periodic", false);
    try {
      if (periodic) {
        if (j.contains("left") || j.contains("right")) {
          fail(where + ": a periodic function takes no left/right values");
        }
        return PiecewiseConstant::periodic(*xs, *vs);
      }
      const auto l = number(j, "left", where, 0.0);
      const auto r = number(j, "right", where, 0.0);
      return PiecewiseConstant(*xs, *vs, *l, *r);
    } catch (const InputError& e) {
      fail(where + ": " + e.what());
      return std::nullopt;
    }
  }

  std::optional<InitialData> data(const json& j, int N) {
    if (!j.is_object()) {
      fail("data must be an object");
      return std::nullopt;
    }
    const std::string preset = j.value("preset", std::string("custom-pl"));
    const std::string w = "data";
    try {
      if (preset == "constant") {
        only(j, {"preset", "displacement", "velocity"}, w);
        const auto u = number(j, "displacement", w);
        const auto v = number(j, "velocity", w, 0.0);
        if (u && v) return presets::constant(*u, *v);
      } else if (preset == "linear-ramp") {
        only(j, {"preset", "x0", "x1", "low", "high", "velocity"}, w);
        const auto x0 = number(j, "x0", w);
        const auto x1 = number(j, "x1", w);
        const auto lo = number(j, "low", w);
        const auto hi = number(j, "high", w);
        const auto v = number(j, "velocity", w, 0.0);
        if (x0 && x1 && !(*x1 > *x0)) fail("data: linear-ramp needs x1 > x0");
        else if (x0 && x1 && lo && hi && v) return presets::linear_ramp(*x0, *x1, *lo, *hi, *v);
      } else if (preset == "hat") {
        only(j, {"preset", "center"}, w);
        const auto c = number(j, "center", w, 0.0);
        if (c) return presets::hat(*c);
      } else if (preset == "sine-velocity") {
        only(j, {"preset", "offset", "amplitude", "cells"}, w);
        const auto off = number(j, "offset", w, 0.5);
        const auto amp = number(j, "amplitude", w, 1.0);
        const auto cells = number(j, "cells", w, static_cast<double>(N));
        if (cells && (*cells < 4 || *cells != std::floor(*cells))) {
          fail("data.cells must be an integer >= 4");
        } else if (off && amp && cells) {
          return presets::sine_velocity(*off, *amp, static_cast<int>(*cells));
        }
      } else if (preset == "custom-pl") {
        only(j, {"preset", "expanded_from", "u0", "u1"}, w);
        if (!j.contains("u0")) {
          fail("data.u0 is required");
          return std::nullopt;
        }
        auto u0 = pl(j.at("u0"), "data.u0");
        auto u1 = j.contains("u1") ? pc(j.at("u1"), "data.u1")
                                   : std::optional(PiecewiseConstant::constant(0.0));
        const std::string label =
            j.contains("expanded_from") && j.at("expanded_from").is_string()
                ? j.at("expanded_from").get<std::string>()
                : std::string("custom-pl");
        if (u0 && u1) return InitialData{*u0, *u1, ObstacleMode::single, label};
      } else {
        fail("data.preset \"" + preset +
             "\" is not one of constant, linear-ramp, hat, sine-velocity, custom-pl");
      }
    } catch (const InputError& e) {
      fail(std::string("data: ") + e.what());
    }
    return std::nullopt;
  }

  template <class E>
  E choice(const json& doc, const std::string& key, std::initializer_list<std::pair<const char*, E>> opts,
           E fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (v.is_string()) {
      for (const auto& [name, e] : opts) {
        if (v.get<std::string>() == name) return e;
      }
    }
    std::string names;
    for (const auto& [name, e] : opts) names += std::string(names.empty() ? "" : ", ") + name;
    fail(key + " must be one of " + names);
    return fallback;
  }
};

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& violations)
    : InputError(join(violations)), violations_(violations) {}

const char* to_string(Engine engine) {
  switch (engine) {
    case Engine::exact: return "exact";
    case Engine::lattice: return "lattice";
    case Engine::both: return "both";
  }
  return "?";
}

ScenarioConfig parse_config(const json& doc) {
  Reader r;
  ScenarioConfig cfg;
  if (!doc.is_object()) throw ConfigError({"scenario must be a JSON object"});
  cfg.source = doc;
  r.only(doc, {"name", "description", "data", "obstacle", "restitution", "domain", "engine", "dx",
               "T", "N", "snapshots", "record_every", "cross_tolerance", "output", "format"},
         "scenario");

  if (doc.contains("name")) {
    if (doc.at("name").is_string()) cfg.name = doc.at("name").get<std::string>();
    else r.fail("name must be a string");
  }
  const auto dx = r.number(doc, "dx", "scenario");
  const auto T = r.number(doc, "T", "scenario");
  const auto N = r.number(doc, "N", "scenario", 1024.0);
  if (dx) {
    cfg.dx = *dx;
    if (!(cfg.dx > 0.0)) r.fail("dx must be positive");
  }
  if (T) {
    cfg.T = *T;
    if (!(cfg.T > 0.0)) r.fail("T must be positive");
  }
  if (N) {
    if (!(*N >= 1.0) || *N != std::floor(*N) || *N > 1e8) r.fail("N must be a positive integer");
    else cfg.N = static_cast<int>(*N);
  }
  if (const auto h = r.number(doc, "restitution", "scenario", 1.0)) {
    cfg.restitution = *h;
    if (!(cfg.restitution >= 0.0 && cfg.restitution <= 1.0)) r.fail("restitution must lie in [0, 1]");
  }
  if (const auto k = r.number(doc, "record_every", "scenario", 1.0)) {
    if (!(*k >= 1.0) || *k != std::floor(*k)) r.fail("record_every must be a positive integer");
    else cfg.record_every = static_cast<std::size_t>(*k);
  }
  if (doc.contains("cross_tolerance")) {
    cfg.cross_tolerance = r.number(doc, "cross_tolerance", "scenario");
    if (cfg.cross_tolerance && !(*cfg.cross_tolerance > 0.0)) r.fail("cross_tolerance must be positive");
  }
  if (doc.contains("snapshots")) {
    if (auto s = r.numbers(doc, "snapshots", "scenario")) {
      cfg.snapshots = *s;
      for (double t : cfg.snapshots) {
        if (!(t >= 0.0 && t <= cfg.T)) r.fail("snapshot time " + std::to_string(t) + " outside [0, T]");
      }
    }
  }
  if (doc.contains("output")) {
    if (doc.at("output").is_string()) cfg.output_dir = doc.at("output").get<std::string>();
    else r.fail("output must be a string");
  }
  cfg.format = r.choice(doc, "format", {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}},
                        OutputFormat::csv);
  cfg.engine = r.choice(doc, "engine",
                        {{"exact", Engine::exact}, {"lattice", Engine::lattice}, {"both", Engine::both}},
                        Engine::both);
  const ObstacleMode mode = r.choice(
      doc, "obstacle", {{"single", ObstacleMode::single}, {"double", ObstacleMode::twin}},
      ObstacleMode::single);

  bool have_domain = false;
  if (!doc.contains("domain") || !doc.at("domain").is_object()) {
    r.fail("domain must be {\"period\": P} or {\"window\": [a, b]}");
  } else {
    const json& d = doc.at("domain");
    if (d.contains("period")) {
      r.only(d, {"period", "origin"}, "domain");
      const auto P = r.number(d, "period", "domain");
      const auto o = r.number(d, "origin", "domain", 0.0);
      if (P && !(*P > 0.0)) r.fail("domain.period must be positive");
      else if (P && o) {
        cfg.domain = PeriodicDomain{*P, *o};
        have_domain = true;
      }
    } else if (d.contains("window")) {
      r.only(d, {"window"}, "domain");
      const auto w = r.numbers(d, "window", "domain");
      if (w && (w->size() != 2 || !((*w)[1] > (*w)[0]))) r.fail("domain.window must be [a, b] with a < b");
      else if (w) {
        cfg.domain = WindowDomain{(*w)[0], (*w)[1]};
        have_domain = true;
      }
    } else {
      r.fail("domain must be {\"period\": P} or {\"window\": [a, b]}");
    }
  }

  std::optional<InitialData> data;
  if (!doc.contains("data")) r.fail("data is required");
  else data = r.data(doc.at("data"), cfg.N);
  if (data) {
    data->mode = mode;
    try {
      validate(*data);
    } catch (const InputError& e) {
      r.fail(std::string("data violates the admissibility hypotheses: ") + e.what());
      data.reset();
    }
  }

  const bool exact = cfg.engine != Engine::lattice;
  const bool lattice = cfg.engine != Engine::exact;
  if (exact && mode == ObstacleMode::twin) {
    r.fail("the exact engine covers the single obstacle only; use engine \"lattice\"");
  }
  if (exact && cfg.restitution != 1.0) {
    r.fail("the exact engine covers h = 1 only; use engine \"lattice\"");
  }
  if (have_domain) {
    if (const auto* w = std::get_if<WindowDomain>(&cfg.domain); w && lattice && cfg.dx > 0.0) {
      if (!(w->b - w->a > 2.0 * cfg.T + 2.0 * cfg.dx)) {
        r.fail("window too narrow: the lattice needs b - a > 2 T + 2 dx to keep valid nodes");
      }
    }
    if (data && std::holds_alternative<PeriodicDomain>(cfg.domain) && cfg.dx > 0.0 && lattice &&
        r.errors.empty()) {
      try {
        (void)init(*data, cfg.dx, cfg.domain, {cfg.restitution});
      } catch (const InputError& e) {
        r.fail(e.what());
      }
    }
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  cfg.data = *data;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const PiecewiseLinear& f) {
  json pts = json::array();
  for (std::size_t i = 0; i < f.xs().size(); ++i) pts.push_back({f.xs()[i], f.ys()[i]});
  if (f.is_periodic()) return {{"points", pts}, {"periodic", true}};
  return {{"points", pts}, {"left_slope", f.left_slope()}, {"right_slope", f.right_slope()}};
}

json to_json(const PiecewiseConstant& h) {
  json xs(std::vector<double>(h.xs().begin(), h.xs().end()));
  json vs(std::vector<double>(h.values().begin(), h.values().end()));
  if (h.is_periodic()) return {{"breakpoints", xs}, {"values", vs}, {"periodic", true}};
  return {{"breakpoints", xs}, {"values", vs}, {"left", h.left_value()}, {"right", h.right_value()}};
}

json to_json(const InitialData& data) {
  return {{"preset", "custom-pl"},
          {"expanded_from", data.label},
          {"u0", to_json(data.u0)},
          {"u1", to_json(data.u1)}};
}

json to_json(const ScenarioConfig& cfg) {
  json domain;
  if (const auto* p = std::get_if<PeriodicDomain>(&cfg.domain)) {
    domain = {{"period", p->period}, {"origin", p->origin}};
  } else {
    const auto& w = std::get<WindowDomain>(cfg.domain);
    domain = {{"window", {w.a, w.b}}};
  }
  json out = {{"name", cfg.name},
              {"data", to_json(cfg.data)},
              {"obstacle", cfg.data.mode == ObstacleMode::twin ? "double" : "single"},
              {"restitution", cfg.restitution},
              {"domain", domain},
              {"engine", to_string(cfg.engine)},
              {"dx", cfg.dx},
              {"T", cfg.T},
              {"N", cfg.N},
              {"snapshots", cfg.snapshots},
              {"record_every", cfg.record_every},
              {"format", cfg.format == OutputFormat::csv ? "csv" : "json"}};
  if (cfg.cross_tolerance) out["cross_tolerance"] = *cfg.cross_tolerance;
  return out;
}

std::string config_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hex16(h);
}

}  // namespace obstacle
