#pragma once

// Scene configuration: a single JSON document. Numbers may be JSON numbers
// or strings in scientific notation (tiny CGS magnitudes are error-prone to
// hand-edit as bare literals). Every length carries a unit tag (cm|nm|um)
// and every conductivity exactly one unit tag (si_S_per_m|cgs_per_s).
// Unknown keys are rejected. All errors carry the JSON path.

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewjn/scene.hpp"

namespace ewjn {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalysisDefaults {
  int L = 8;
  int resolution = 40;
};

struct ParsedScene {
  Scene scene;
  AnalysisDefaults defaults;
};

namespace cfg_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config error at " + path + ": " + msg);
}

inline const json& member(const json& j, const std::string& key,
                          const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

inline double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(path, "malformed number '" + s + "'");
    }
    if (used != s.size()) fail(path, "malformed number '" + s + "'");
    return v;
  }
  fail(path, "expected a number (or a numeric string)");
}

inline double length_scale(const json& obj, const std::string& path) {
  auto it = obj.find("length_unit");
  if (it == obj.end())
    fail(path + ".length_unit", "missing length unit tag (cm|nm|um)");
  const std::string u = it->is_string() ? it->get<std::string>() : "";
  if (u == "cm") return 1.0;
  if (u == "um") return 1e-4;
  if (u == "nm") return 1e-7;
  fail(path + ".length_unit", "unknown length unit '" + u + "'");
}

inline Vec3 vec3(const json& j, double scale, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  return Vec3(number(j[0], path + "[0]"), number(j[1], path + "[1]"),
              number(j[2], path + "[2]")) *
         scale;
}

inline Material conductivity(const json& obj, const std::string& path) {
  const json& c = member(obj, "conductivity", path);
  const std::string cpath = path + ".conductivity";
  if (!c.is_object()) fail(cpath, "expected { value, unit }");
  reject_unknown(c, {"value", "unit"}, cpath);
  const double v = number(member(c, "value", cpath), cpath + ".value");
  auto it = c.find("unit");
  if (it == c.end())
    fail(cpath + ".unit", "missing conductivity unit tag "
                          "(si_S_per_m|cgs_per_s)");
  const std::string u = it->is_string() ? it->get<std::string>() : "";
  Material m;
  if (u == "si_S_per_m") {
    if (!(v > 0.0)) fail(cpath + ".value", "conductivity must be > 0");
    m.sigma_cgs = si_to_cgs_conductivity(v);
  } else if (u == "cgs_per_s") {
    if (!(v > 0.0)) fail(cpath + ".value", "conductivity must be > 0");
    m.sigma_cgs = v;
  } else {
    fail(cpath + ".unit", "unknown conductivity unit '" + u + "'");
  }
  return m;
}

inline Environment environment(const json& root) {
  const json& e = member(root, "environment", "$");
  const std::string path = "$.environment";
  reject_unknown(e, {"omega", "frequency", "temperature"}, path);
  const bool has_omega = e.contains("omega");
  const bool has_freq = e.contains("frequency");
  if (has_omega == has_freq)
    fail(path, "exactly one of 'omega' (s^-1) or 'frequency' (Hz) is required");
  Environment env;
  env.omega = has_omega
                  ? number(e["omega"], path + ".omega")
                  : 2.0 * M_PI * number(e["frequency"], path + ".frequency");
  env.temperature =
      number(member(e, "temperature", path), path + ".temperature");
  if (!(env.omega > 0.0)) fail(path, "omega must be > 0");
  if (env.temperature < 0.0) fail(path + ".temperature", "must be >= 0");
  return env;
}

inline SceneObject object(const json& o, const std::string& path,
                          int default_resolution) {
  const json& t = member(o, "type", path);
  const std::string type = t.is_string() ? t.get<std::string>() : "";
  if (type == "sphere") {
    reject_unknown(o, {"type", "center", "radius", "length_unit", "conductivity"},
                   path);
    const double scale = length_scale(o, path);
    SpherePrimitive s;
    s.center = vec3(member(o, "center", path), scale, path + ".center");
    s.radius = number(member(o, "radius", path), path + ".radius") * scale;
    if (!(s.radius > 0.0)) fail(path + ".radius", "must be > 0");
    s.material = conductivity(o, path);
    return s;
  }
  if (type == "box") {
    reject_unknown(o, {"type", "center", "size", "length_unit", "conductivity",
                       "resolution"},
                   path);
    const double scale = length_scale(o, path);
    BoxPrimitive b;
    b.center = vec3(member(o, "center", path), scale, path + ".center");
    b.size = vec3(member(o, "size", path), scale, path + ".size");
    if (!(b.size.minCoeff() > 0.0)) fail(path + ".size", "must be > 0");
    b.material = conductivity(o, path);
    int res = default_resolution;
    if (o.contains("resolution")) {
      const double r = number(o["resolution"], path + ".resolution");
      res = int(r);
      if (res < 1 || res != r) fail(path + ".resolution", "must be a positive integer");
    }
    return voxelize(b, res);
  }
  if (type == "voxels") {
    reject_unknown(o, {"type", "voxels", "length_unit", "conductivity"}, path);
    const double scale = length_scale(o, path);
    const json& list = member(o, "voxels", path);
    if (!list.is_array() || list.empty())
      fail(path + ".voxels", "expected a non-empty array");
    std::vector<Voxel> voxels;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string vpath = path + ".voxels[" + std::to_string(i) + "]";
      reject_unknown(list[i], {"center", "volume"}, vpath);
      Voxel v;
      v.center = vec3(member(list[i], "center", vpath), scale, vpath + ".center");
      v.volume = number(member(list[i], "volume", vpath), vpath + ".volume") *
                 scale * scale * scale;
      if (!(v.volume > 0.0)) fail(vpath + ".volume", "must be > 0");
      voxels.push_back(v);
    }
    return make_voxel_object(std::move(voxels), conductivity(o, path));
  }
  fail(path + ".type", "unknown object type '" + type +
                       "' (expected sphere|box|voxels)");
}

}  // namespace cfg_detail

inline ParsedScene parse_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  cfg_detail::reject_unknown(root, {"environment", "objects", "defaults"}, "$");

  ParsedScene out;
  if (root.contains("defaults")) {
    const auto& d = root["defaults"];
    cfg_detail::reject_unknown(d, {"L", "resolution"}, "$.defaults");
    if (d.contains("L")) {
      const double L = cfg_detail::number(d["L"], "$.defaults.L");
      out.defaults.L = int(L);
      if (out.defaults.L < 1 || out.defaults.L != L)
        cfg_detail::fail("$.defaults.L", "must be a positive integer");
    }
    if (d.contains("resolution")) {
      const double r = cfg_detail::number(d["resolution"], "$.defaults.resolution");
      out.defaults.resolution = int(r);
      if (out.defaults.resolution < 1 || out.defaults.resolution != r)
        cfg_detail::fail("$.defaults.resolution", "must be a positive integer");
    }
  }

  out.scene.environment = cfg_detail::environment(root);
  const auto& objs = cfg_detail::member(root, "objects", "$");
  if (!objs.is_array() || objs.empty())
    cfg_detail::fail("$.objects", "expected a non-empty array");
  for (std::size_t i = 0; i < objs.size(); ++i)
    out.scene.objects.push_back(cfg_detail::object(
        objs[i], "$.objects[" + std::to_string(i) + "]",
        out.defaults.resolution));

  const auto overlaps = check_overlaps(out.scene);
  if (!overlaps.empty()) cfg_detail::fail("$.objects", overlaps.front());
  return out;
}

inline ParsedScene parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ewjn
