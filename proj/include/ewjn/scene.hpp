#pragma once

// Physical environment and geometry: units, conductivity conversion, skin
// depth, quasistatic regime validation, object primitives and voxelization.
// Everything is stored in CGS.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "ewjn/constants.hpp"
#include "ewjn/geometry.hpp"

namespace ewjn {

struct Environment {
  double omega = 0.0;        // angular frequency, s^-1
  double temperature = 0.0;  // kelvin

  void validate() const {
    if (!(omega > 0.0)) throw std::domain_error("environment: omega must be > 0");
    if (temperature < 0.0)
      throw std::domain_error("environment: temperature must be >= 0");
  }
};

struct Material {
  double sigma_cgs = 0.0;  // conductivity, s^-1

  void validate() const {
    if (!(sigma_cgs > 0.0))
      throw std::domain_error("material: conductivity must be > 0");
  }
};

struct SpherePrimitive {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;  // cm
  Material material;
};

struct BoxPrimitive {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Zero();  // full edge lengths, cm
  Material material;
};

struct Voxel {
  Vec3 center = Vec3::Zero();
  double volume = 0.0;  // cm^3
};

// Axis-aligned voxel decomposition of a metal body. When produced by
// voxelize() the source primitive is remembered so that surface distances
// (shell mode) and boundary conditions can use the exact geometry.
struct VoxelObject {
  std::vector<Voxel> voxels;
  Material material;
  Vec3 center = Vec3::Zero();
  double bounding_radius = 0.0;  // a_m
  double min_radius = 0.0;       // a_min
  double edge = 0.0;             // uniform grid edge; 0 for irregular sets

  enum class Shape { generic, sphere, box };
  Shape shape = Shape::generic;
  double shape_radius = 0.0;  // sphere
  Vec3 shape_size = Vec3::Zero();  // box

  double total_volume() const {
    double v = 0.0;
    for (const auto& vox : voxels) v += vox.volume;
    return v;
  }
};

using SceneObject = std::variant<SpherePrimitive, VoxelObject>;

struct Scene {
  Environment environment;
  std::vector<SceneObject> objects;
};

inline Vec3 object_center(const SceneObject& obj) {
  if (const auto* s = std::get_if<SpherePrimitive>(&obj)) return s->center;
  return std::get<VoxelObject>(obj).center;
}

inline double object_bounding_radius(const SceneObject& obj) {
  if (const auto* s = std::get_if<SpherePrimitive>(&obj)) return s->radius;
  return std::get<VoxelObject>(obj).bounding_radius;
}

inline double object_min_radius(const SceneObject& obj) {
  if (const auto* s = std::get_if<SpherePrimitive>(&obj)) return s->radius;
  return std::get<VoxelObject>(obj).min_radius;
}

inline const Material& object_material(const SceneObject& obj) {
  if (const auto* s = std::get_if<SpherePrimitive>(&obj)) return s->material;
  return std::get<VoxelObject>(obj).material;
}

// --- conversions and scales ---

inline double si_to_cgs_conductivity(double sigma_si) {
  if (!(sigma_si > 0.0))
    throw std::domain_error("si_to_cgs_conductivity: value must be > 0");
  return sigma_si * constants::si_conductivity_to_cgs;
}

// delta = c / sqrt(2 pi sigma omega), cm.
inline double skin_depth(const Material& material, const Environment& env) {
  material.validate();
  env.validate();
  return constants::c_light /
         std::sqrt(2.0 * M_PI * material.sigma_cgs * env.omega);
}

inline double vacuum_wavelength(const Environment& env) {
  env.validate();
  return 2.0 * M_PI * constants::c_light / env.omega;
}

// --- regime validation ---

enum class RegimeStatus { pass, warn, fail };

struct ObjectRegime {
  std::size_t index = 0;
  double bounding_radius = 0.0;
  double min_radius = 0.0;
  double skin_depth = 0.0;
  bool small_object_ok = false;       // a_m < delta
  bool skin_below_wavelength = false; // delta < lambda
  bool shell_recommended = false;     // delta < a_min / 3
};

struct RegimeReport {
  double wavelength = 0.0;
  double max_query_ratio = 0.0;  // max |x - center| / lambda over all pairs
  bool quasistatic_distance_ok = true;  // ratio <= 0.05
  std::vector<ObjectRegime> objects;
  std::vector<std::string> overlap_warnings;
  std::vector<std::string> not_checked;
  RegimeStatus status = RegimeStatus::pass;

  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    std::ostringstream head;
    head << "regime: " << (status == RegimeStatus::pass   ? "pass"
                           : status == RegimeStatus::warn ? "warn"
                                                          : "fail")
         << "  (lambda = " << wavelength << " cm)";
    out.push_back(head.str());
    for (const auto& o : objects) {
      std::ostringstream ln;
      ln << "object " << o.index << ": a_m = " << o.bounding_radius
         << " cm, delta = " << o.skin_depth << " cm; a_m < delta "
         << (o.small_object_ok ? "ok" : "VIOLATED") << "; delta < lambda "
         << (o.skin_below_wavelength ? "ok" : "VIOLATED");
      if (o.shell_recommended) ln << "; shell integration recommended";
      out.push_back(ln.str());
    }
    {
      std::ostringstream ln;
      ln << "query distance: max |x|/lambda = " << max_query_ratio << " ("
         << (quasistatic_distance_ok ? "ok, <= 0.05" : "WARN, > 0.05") << ")";
      out.push_back(ln.str());
    }
    for (const auto& w : overlap_warnings) out.push_back("warning: " + w);
    for (const auto& n : not_checked) out.push_back("not checked: " + n);
    return out;
  }
};

inline std::vector<std::string> check_overlaps(const Scene& scene) {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
      const double d =
          (object_center(scene.objects[i]) - object_center(scene.objects[j]))
              .norm();
      if (d < object_bounding_radius(scene.objects[i]) +
                  object_bounding_radius(scene.objects[j])) {
        warnings.push_back("objects " + std::to_string(i) + " and " +
                           std::to_string(j) +
                           " overlap on bounding spheres");
      }
    }
  }
  return warnings;
}

inline RegimeReport validate_regime(const Scene& scene,
                                    std::span<const Vec3> query_points = {}) {
  RegimeReport rep;
  rep.wavelength = vacuum_wavelength(scene.environment);
  bool any_fail = false;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& obj = scene.objects[i];
    ObjectRegime o;
    o.index = i;
    o.bounding_radius = object_bounding_radius(obj);
    o.min_radius = object_min_radius(obj);
    o.skin_depth = skin_depth(object_material(obj), scene.environment);
    o.small_object_ok = o.bounding_radius < o.skin_depth;
    o.skin_below_wavelength = o.skin_depth < rep.wavelength;
    o.shell_recommended = o.skin_depth < o.min_radius / 3.0;
    any_fail = any_fail || !o.small_object_ok || !o.skin_below_wavelength;
    for (const Vec3& q : query_points) {
      rep.max_query_ratio = std::max(
          rep.max_query_ratio, (q - object_center(obj)).norm() / rep.wavelength);
    }
    rep.objects.push_back(o);
  }
  rep.quasistatic_distance_ok = rep.max_query_ratio <= 0.05;
  rep.overlap_warnings = check_overlaps(scene);
  rep.not_checked = {
      "omega * tau << 1 (frequency-independent conductivity)",
      "electron mean free path << object size (local conduction)"};
  if (any_fail)
    rep.status = RegimeStatus::fail;
  else if (!rep.quasistatic_distance_ok || !rep.overlap_warnings.empty())
    rep.status = RegimeStatus::warn;
  else
    rep.status = RegimeStatus::pass;
  return rep;
}

// --- voxelization ---

namespace detail {

inline void finish_voxel_object(VoxelObject& obj) {
  if (obj.voxels.empty())
    throw std::domain_error("voxelize: produced an empty voxel set");
  double rmax = 0.0;
  const double half_diag = obj.edge * std::sqrt(3.0) / 2.0;
  for (const auto& v : obj.voxels)
    rmax = std::max(rmax, (v.center - obj.center).norm() + half_diag);
  obj.bounding_radius = rmax;
}

// Integer lattice coordinates of voxel centers relative to the first voxel.
inline std::vector<Eigen::Vector3i> lattice_coords(const VoxelObject& obj) {
  std::vector<Eigen::Vector3i> coords;
  coords.reserve(obj.voxels.size());
  const Vec3 ref = obj.voxels.front().center;
  for (const auto& v : obj.voxels) {
    const Vec3 d = (v.center - ref) / obj.edge;
    coords.emplace_back(int(std::llround(d.x())), int(std::llround(d.y())),
                        int(std::llround(d.z())));
  }
  return coords;
}

inline std::int64_t lattice_key(const Eigen::Vector3i& c) {
  const std::int64_t b = 1 << 20;
  return (std::int64_t(c.x()) + b) + ((std::int64_t(c.y()) + b) << 21) +
         ((std::int64_t(c.z()) + b) << 42);
}

// Voxels with fewer than six face neighbors.
inline std::vector<std::size_t> surface_voxels(const VoxelObject& obj) {
  const auto coords = lattice_coords(obj);
  std::unordered_set<std::int64_t> occupied;
  occupied.reserve(coords.size() * 2);
  for (const auto& c : coords) occupied.insert(lattice_key(c));
  std::vector<std::size_t> surface;
  const Eigen::Vector3i steps[6] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (const auto& s : steps) {
      if (!occupied.count(lattice_key(coords[i] + s))) {
        surface.push_back(i);
        break;
      }
    }
  }
  return surface;
}

}  // namespace detail

// Midpoint-sampled axis-aligned voxels whose centers lie inside the
// primitive; resolution counts voxels across the diameter (largest extent).
inline VoxelObject voxelize(const SpherePrimitive& sphere, int resolution) {
  if (resolution < 1) throw std::domain_error("voxelize: resolution must be >= 1");
  if (!(sphere.radius > 0.0))
    throw std::domain_error("voxelize: sphere radius must be > 0");
  VoxelObject obj;
  obj.material = sphere.material;
  obj.center = sphere.center;
  obj.shape = VoxelObject::Shape::sphere;
  obj.shape_radius = sphere.radius;
  obj.edge = 2.0 * sphere.radius / resolution;
  const double vol = obj.edge * obj.edge * obj.edge;
  const Vec3 corner = sphere.center - Vec3::Constant(sphere.radius);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < resolution; ++k) {
        const Vec3 c = corner + obj.edge * Vec3(i + 0.5, j + 0.5, k + 0.5);
        if ((c - sphere.center).norm() < sphere.radius)
          obj.voxels.push_back({c, vol});
      }
  detail::finish_voxel_object(obj);
  obj.bounding_radius = std::min(obj.bounding_radius, sphere.radius);
  obj.min_radius = sphere.radius;
  return obj;
}

inline VoxelObject voxelize(const BoxPrimitive& box, int resolution) {
  if (resolution < 1) throw std::domain_error("voxelize: resolution must be >= 1");
  if (!(box.size.minCoeff() > 0.0))
    throw std::domain_error("voxelize: box size must be > 0");
  VoxelObject obj;
  obj.material = box.material;
  obj.center = box.center;
  obj.shape = VoxelObject::Shape::box;
  obj.shape_size = box.size;
  obj.edge = box.size.maxCoeff() / resolution;
  const double vol = obj.edge * obj.edge * obj.edge;
  Eigen::Vector3i n;
  for (int d = 0; d < 3; ++d)
    n[d] = std::max(1, int(std::ceil(box.size[d] / obj.edge - 1e-9)));
  const Vec3 corner = box.center - box.size / 2.0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        const Vec3 c = corner + obj.edge * Vec3(i + 0.5, j + 0.5, k + 0.5);
        const Vec3 d = (c - box.center).cwiseAbs() - box.size / 2.0;
        if (d.maxCoeff() < 0.0) obj.voxels.push_back({c, vol});
      }
  detail::finish_voxel_object(obj);
  obj.min_radius = box.size.minCoeff() / 2.0;
  return obj;
}

// Wraps a hand-assembled voxel list (no analytic source shape).
inline VoxelObject make_voxel_object(std::vector<Voxel> voxels,
                                     const Material& material,
                                     double edge = 0.0) {
  if (voxels.empty())
    throw std::domain_error("make_voxel_object: voxel list is empty");
  for (const auto& v : voxels)
    if (!(v.volume > 0.0))
      throw std::domain_error("make_voxel_object: voxel volumes must be > 0");
  VoxelObject obj;
  obj.voxels = std::move(voxels);
  obj.material = material;
  obj.edge = edge > 0.0 ? edge : std::cbrt(obj.voxels.front().volume);
  Vec3 centroid = Vec3::Zero();
  double vtot = 0.0;
  for (const auto& v : obj.voxels) {
    centroid += v.volume * v.center;
    vtot += v.volume;
  }
  obj.center = centroid / vtot;
  detail::finish_voxel_object(obj);
  double rmin = obj.bounding_radius;
  for (std::size_t i : detail::surface_voxels(obj))
    rmin = std::min(rmin,
                    (obj.voxels[i].center - obj.center).norm() + obj.edge / 2.0);
  obj.min_radius = rmin;
  return obj;
}

}  // namespace ewjn
