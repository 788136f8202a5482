#pragma once

// Field-map grids, cross-engine comparison tables and decoherence reports,
// with CSV and 8-bit binary PGM emission. Grid cells are evaluated
// concurrently; assembly is ordered, so output is deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewjn/config.hpp"
#include "ewjn/integral_engine.hpp"
#include "ewjn/noise_tensor.hpp"
#include "ewjn/parallel.hpp"
#include "ewjn/qubit_analysis.hpp"
#include "ewjn/scene.hpp"
#include "ewjn/sphere_multipole.hpp"

namespace ewjn {

// Sampling plane. Extent, offset and mask radius are in units of the
// reference radius a (the first object's bounding radius); the plane is
// centered on the reference object.
struct GridSpec {
  int normal_axis = 1;      // 0=x, 1=y, 2=z; default: the x-z plane
  double offset = 0.0;      // along the normal, units of a
  double extent = 5.5;      // half-width, units of a
  int samples = 220;        // per axis
  double mask_radius = 1.05;  // units of a

  void validate() const {
    if (samples < 2) throw std::domain_error("grid: samples must be >= 2");
    if (!(mask_radius >= 1.0))
      throw std::domain_error("grid: mask radius must be >= 1.0");
    if (!(extent > 0.0)) throw std::domain_error("grid: extent must be > 0");
    if (normal_axis < 0 || normal_axis > 2)
      throw std::domain_error("grid: normal axis must be 0, 1 or 2");
  }
};

struct MapJob {
  enum class Quantity { f, f_r6, ncf };
  enum class Mode { local, nonlocal };
  enum class Engine { multipole, integral };

  Quantity quantity = Quantity::f;
  int i = 2, j = 2;  // tensor component indices
  Mode mode = Mode::local;
  Vec3 src = Vec3::Zero();  // fixed x' for nonlocal mode, cm
  Engine engine = Engine::multipole;
  int L = 8;
  int resolution = 40;
};

struct MapResult {
  GridSpec grid;
  std::string axis_u, axis_v;          // in-plane axis names
  std::vector<double> values;          // row-major, v descending then u
  std::vector<std::uint8_t> masked;    // 1 = masked
  std::vector<std::string> header;     // '#' comment lines for the CSV
  double reference_radius = 0.0;       // cm

  double u_at(int iu) const {
    return -grid.extent + 2.0 * grid.extent * iu / (grid.samples - 1);
  }
  double v_at(int iv) const {
    return grid.extent - 2.0 * grid.extent * iv / (grid.samples - 1);
  }
};

namespace map_detail {

inline const char* axis_name(int k) { return k == 0 ? "x" : k == 1 ? "y" : "z"; }

inline std::pair<int, int> plane_axes(int normal) {
  if (normal == 0) return {1, 2};  // y-z
  if (normal == 1) return {0, 2};  // x-z
  return {0, 1};                   // x-y
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string quantity_name(const MapJob& job) {
  const char* base = job.quantity == MapJob::Quantity::f      ? "F"
                     : job.quantity == MapJob::Quantity::f_r6 ? "Fr6"
                                                              : "NCF";
  return std::string(base) + "_" + axis_name(job.i) + axis_name(job.j);
}

}  // namespace map_detail

inline MapResult run_map(const Scene& scene, const MapJob& job,
                         const GridSpec& grid) {
  grid.validate();
  if (scene.objects.empty()) throw std::domain_error("run_map: empty scene");
  if (job.quantity != MapJob::Quantity::ncf && scene.objects.size() != 1)
    throw std::domain_error(
        "run_map: dimensionless quantities need a single-object scene");

  const Vec3 center_ref = object_center(scene.objects.front());
  const double a_ref = object_bounding_radius(scene.objects.front());
  const auto [ua, va] = map_detail::plane_axes(grid.normal_axis);

  // engine-specific object views
  std::vector<SpherePrimitive> spheres;
  std::vector<VoxelObject> voxelized;
  if (job.engine == MapJob::Engine::multipole) {
    for (const auto& obj : scene.objects) {
      if (!std::holds_alternative<SpherePrimitive>(obj))
        throw std::domain_error(
            "run_map: the multipole engine handles sphere objects only");
      spheres.push_back(std::get<SpherePrimitive>(obj));
    }
  } else {
    if (job.resolution < 4)
      throw std::domain_error(
          "run_map: the integral engine needs resolution >= 4");
    for (const auto& obj : scene.objects) {
      if (const auto* s = std::get_if<SpherePrimitive>(&obj))
        voxelized.push_back(voxelize(*s, job.resolution));
      else
        voxelized.push_back(std::get<VoxelObject>(obj));
    }
  }

  if (job.mode == MapJob::Mode::nonlocal) {
    for (const auto& obj : scene.objects)
      if ((job.src - object_center(obj)).norm() <=
          object_bounding_radius(obj))
        throw std::domain_error("run_map: nonlocal source lies inside an object");
  }

  MapResult res;
  res.grid = grid;
  res.axis_u = map_detail::axis_name(ua);
  res.axis_v = map_detail::axis_name(va);
  res.reference_radius = a_ref;
  const int n = grid.samples;
  res.values.assign(std::size_t(n) * n, 0.0);
  res.masked.assign(std::size_t(n) * n, 0);

  res.header.push_back("quantity: " + map_detail::quantity_name(job) +
                       (job.mode == MapJob::Mode::nonlocal
                            ? "  (nonlocal, x' = [" + map_detail::fmt(job.src.x()) +
                                  ", " + map_detail::fmt(job.src.y()) + ", " +
                                  map_detail::fmt(job.src.z()) + "] cm)"
                            : "  (local)"));
  res.header.push_back(
      std::string("engine: ") +
      (job.engine == MapJob::Engine::multipole
           ? "multipole, L = " + std::to_string(job.L)
           : "integral, resolution = " + std::to_string(job.resolution)));
  res.header.push_back("plane: " +
                       std::string(map_detail::axis_name(grid.normal_axis)) +
                       " = " + map_detail::fmt(grid.offset) +
                       " a;  coordinates in units of a = " +
                       map_detail::fmt(a_ref) + " cm");
  if (job.quantity == MapJob::Quantity::ncf) {
    res.header.push_back("units: erg s / cm^3");
    std::vector<Vec3> probes;  // grid corners as representative query points
    for (double su : {-1.0, 1.0})
      for (double sv : {-1.0, 1.0}) {
        Vec3 p = center_ref;
        p[grid.normal_axis] += grid.offset * a_ref;
        p[ua] += su * grid.extent * a_ref;
        p[va] += sv * grid.extent * a_ref;
        probes.push_back(p);
      }
    for (const auto& line : validate_regime(scene, probes).lines())
      res.header.push_back(line);
  }

  // nonlocal integral evaluators are shared across cells
  std::vector<IntegralEvaluator> shared_evals;
  if (job.engine == MapJob::Engine::integral &&
      job.mode == MapJob::Mode::nonlocal) {
    for (const auto& obj : voxelized)
      shared_evals.emplace_back(obj, job.src,
                                skin_depth(obj.material, scene.environment),
                                QuadratureConfig{});
  }

  const Environment& env = scene.environment;
  auto cell_point = [&](int iu, int iv) {
    Vec3 p = center_ref;
    p[grid.normal_axis] += grid.offset * a_ref;
    p[ua] += res.u_at(iu) * a_ref;
    p[va] += res.v_at(iv) * a_ref;
    return p;
  };

  parallel_for(std::size_t(n) * n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t cell = begin; cell < end; ++cell) {
      const int iv = int(cell / n);
      const int iu = int(cell % n);
      const Vec3 x = cell_point(iu, iv);
      bool masked = false;
      for (const auto& obj : scene.objects)
        if ((x - object_center(obj)).norm() <=
            grid.mask_radius * object_bounding_radius(obj))
          masked = true;
      if (masked) {
        res.masked[cell] = 1;
        continue;
      }
      const Vec3 xsrc = job.mode == MapJob::Mode::local ? x : job.src;
      double value = 0.0;
      if (job.engine == MapJob::Engine::multipole) {
        for (const auto& s : spheres) {
          if (job.quantity == MapJob::Quantity::ncf)
            value += ncf(x, xsrc, s, env, job.L).m(job.i, job.j);
          else
            value += f_tensor(x, xsrc, s, job.L).m(job.i, job.j);
        }
      } else {
        for (std::size_t k = 0; k < voxelized.size(); ++k) {
          const auto& obj = voxelized[k];
          const double delta = skin_depth(obj.material, env);
          Mat3 cols;
          if (!shared_evals.empty()) {
            cols = shared_evals[k].im_b_columns(x);
          } else {
            const IntegralEvaluator eval(obj, xsrc, delta, QuadratureConfig{});
            cols = eval.im_b_columns(x);
          }
          if (job.quantity == MapJob::Quantity::ncf)
            value += constants::hbar * coth_factor(env) * cols(job.i, job.j);
          else
            value += delta * delta * a_ref / (8.0 * M_PI) * cols(job.i, job.j);
        }
      }
      if (job.quantity == MapJob::Quantity::f_r6) {
        const double r = (x - center_ref).norm() / a_ref;
        value *= std::pow(r, 6);
      }
      res.values[cell] = value;
    }
  });

  // flag unmasked cells where the evaluation accuracy is degraded
  int near_cells = 0;
  for (int iv = 0; iv < n; ++iv)
    for (int iu = 0; iu < n; ++iu) {
      const std::size_t cell = std::size_t(iv) * n + iu;
      if (res.masked[cell]) continue;
      const Vec3 x = cell_point(iu, iv);
      bool near = false;
      if (job.engine == MapJob::Engine::integral) {
        for (const auto& obj : voxelized) near = near || clearance_warning(x, obj);
      } else {
        for (const auto& s : spheres) near = near || convergence_warning(x, s);
      }
      near_cells += near;
    }
  if (near_cells > 0)
    res.header.push_back(
        "warning: " + std::to_string(near_cells) +
        (job.engine == MapJob::Engine::integral
             ? " cells within one voxel edge of an object; quadrature "
               "accuracy degraded there"
             : " cells in the slow-convergence annulus (r <= 1.05 a); "
               "consider a larger L or mask radius"));
  return res;
}

namespace map_detail {

inline void ensure_parent_directory(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace map_detail

inline void write_map_csv(const MapResult& res, const std::string& path) {
  map_detail::ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& line : res.header) out << "# " << line << "\n";
  out << "# columns: " << res.axis_u << ", " << res.axis_v
      << ", value (coordinates in units of a; masked cells empty)\n";
  const int n = res.grid.samples;
  for (int iv = 0; iv < n; ++iv)
    for (int iu = 0; iu < n; ++iu) {
      const std::size_t cell = std::size_t(iv) * n + iu;
      out << map_detail::fmt(res.u_at(iu)) << "," << map_detail::fmt(res.v_at(iv))
          << ",";
      if (!res.masked[cell]) out << map_detail::fmt(res.values[cell]);
      out << "\n";
    }
}

// 8-bit binary PGM. Signed maps are normalized symmetrically about zero
// (mid-gray = 0); non-negative maps min-max. Masked pixels are black.
inline void write_map_pgm(const MapResult& res, const std::string& path) {
  map_detail::ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int n = res.grid.samples;
  double vmin = 0.0, vmax = 0.0;
  bool first = true;
  for (std::size_t c = 0; c < res.values.size(); ++c) {
    if (res.masked[c]) continue;
    const double v = res.values[c];
    if (first || v < vmin) vmin = v;
    if (first || v > vmax) vmax = v;
    first = false;
  }
  out << "P5\n" << n << " " << n << "\n255\n";
  std::vector<std::uint8_t> row(n);
  for (int iv = 0; iv < n; ++iv) {
    for (int iu = 0; iu < n; ++iu) {
      const std::size_t cell = std::size_t(iv) * n + iu;
      double g = 0.0;
      if (!res.masked[cell]) {
        const double v = res.values[cell];
        if (vmin < 0.0) {
          const double m = std::max(std::abs(vmin), std::abs(vmax));
          g = m > 0.0 ? 127.5 + 127.5 * v / m : 127.5;
        } else {
          g = vmax > vmin ? 255.0 * (v - vmin) / (vmax - vmin) : 0.0;
        }
      }
      row[iu] = std::uint8_t(std::clamp(std::lround(g), 0l, 255l));
    }
    out.write(reinterpret_cast<const char*>(row.data()), n);
  }
}

// --- cross-engine comparison ---

struct ComparePoint {
  Vec3 x, x_src;
  Mat3 rel_diff = Mat3::Zero();     // entrywise, where significant
  Mat3 significant = Mat3::Zero();  // 1 where |F| > 1e-3 max|F|
  double max_rel = 0.0;
  bool accuracy_warning = false;  // too close to a surface for either engine
};

struct CompareResult {
  std::vector<ComparePoint> points;
  double max_rel = 0.0;
  double median_rel = 0.0;
};

inline CompareResult run_compare(const Scene& scene,
                                 const std::vector<std::pair<Vec3, Vec3>>& pairs,
                                 int L, int resolution) {
  if (scene.objects.empty()) throw std::domain_error("run_compare: empty scene");
  if (resolution < 4)
    throw std::domain_error("run_compare: resolution must be >= 4");
  std::vector<SpherePrimitive> spheres;
  for (const auto& obj : scene.objects) {
    if (!std::holds_alternative<SpherePrimitive>(obj))
      throw std::domain_error("run_compare: scene must hold spheres only");
    spheres.push_back(std::get<SpherePrimitive>(obj));
  }
  const double a_ref = spheres.front().radius;
  std::vector<VoxelObject> voxelized;
  for (const auto& s : spheres) voxelized.push_back(voxelize(s, resolution));

  CompareResult out;
  std::vector<double> maxima;
  for (const auto& [x, xsrc] : pairs) {
    ComparePoint cp;
    cp.x = x;
    cp.x_src = xsrc;
    for (const auto& obj : voxelized)
      cp.accuracy_warning = cp.accuracy_warning || clearance_warning(x, obj) ||
                            clearance_warning(xsrc, obj);
    for (const auto& s : spheres)
      cp.accuracy_warning = cp.accuracy_warning || convergence_warning(x, s) ||
                            convergence_warning(xsrc, s);
    Mat3 fm = Mat3::Zero();
    for (const auto& s : spheres) fm += f_tensor(x, xsrc, s, L).m;
    Mat3 fn = Mat3::Zero();
    for (const auto& obj : voxelized) {
      const double delta = skin_depth(obj.material, scene.environment);
      fn += f_tensor_numeric(x, xsrc, obj, delta, {}, a_ref).m;
    }
    const double scale = fm.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (std::abs(fm(i, j)) > 1e-3 * scale) {
          cp.significant(i, j) = 1.0;
          cp.rel_diff(i, j) = std::abs(fn(i, j) - fm(i, j)) / std::abs(fm(i, j));
          cp.max_rel = std::max(cp.max_rel, cp.rel_diff(i, j));
        }
      }
    maxima.push_back(cp.max_rel);
    out.max_rel = std::max(out.max_rel, cp.max_rel);
    out.points.push_back(cp);
  }
  if (!maxima.empty()) {
    std::sort(maxima.begin(), maxima.end());
    out.median_rel = maxima[maxima.size() / 2];
  }
  return out;
}

inline void write_compare_csv(const CompareResult& res, std::ostream& out) {
  out << "# columns: x1,y1,z1,x2,y2,z2 (cm), rel diff per entry "
         "(xx,xy,xz,yx,yy,yz,zx,zy,zz; empty = below significance), max\n";
  for (const auto& p : res.points) {
    out << map_detail::fmt(p.x.x()) << "," << map_detail::fmt(p.x.y()) << ","
        << map_detail::fmt(p.x.z()) << "," << map_detail::fmt(p.x_src.x()) << ","
        << map_detail::fmt(p.x_src.y()) << "," << map_detail::fmt(p.x_src.z());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        out << ",";
        if (p.significant(i, j) > 0.0) out << map_detail::fmt(p.rel_diff(i, j));
      }
    out << "," << map_detail::fmt(p.max_rel);
    if (p.accuracy_warning) out << ",near-surface";
    out << "\n";
  }
  out << "# max: " << map_detail::fmt(res.max_rel)
      << "  median: " << map_detail::fmt(res.median_rel) << "\n";
}

// --- decoherence report ---

struct FieldPolicy {
  bool optimal = true;   // choose the quietest direction per qubit
  Vec3 fixed = Vec3::UnitZ();
};

struct QubitReport {
  Vec3 position;
  Vec3 field_direction;       // the direction the weights are taken along
  Vec3 recommended_direction; // minimizer of the dephasing weight
  double dephasing_weight = 0.0;   // erg s / cm^3
  double relaxation_weight = 0.0;
  double dephasing_rate = 0.0;     // s^-1
  double relaxation_rate = 0.0;
};

struct PairReport {
  std::size_t a = 0, b = 0;
  Vec3 axis;
  double w_cross = 0.0;
  double branch_plus = 0.0;
  double branch_minus = 0.0;
  bool quieter_is_plus = false;
  bool cross_consistent = true;
};

struct DecoherenceReport {
  std::vector<QubitReport> qubits;
  std::vector<PairReport> pairs;
};

namespace map_detail {

// Physical local/nonlocal tensor of the whole scene: multipole for spheres,
// voxel quadrature for everything else.
inline NoiseTensor scene_ncf(const Scene& scene, const Vec3& x, const Vec3& xsrc,
                             int L, int resolution) {
  NoiseTensor out{Mat3::Zero(), NoiseTensor::Kind::physical};
  for (const auto& obj : scene.objects) {
    if (const auto* s = std::get_if<SpherePrimitive>(&obj)) {
      out.m += ncf(x, xsrc, *s, scene.environment, L).m;
    } else {
      out.m += ncf_numeric(x, xsrc, std::get<VoxelObject>(obj),
                           scene.environment, {})
                   .m;
    }
  }
  (void)resolution;
  return out;
}

}  // namespace map_detail

inline DecoherenceReport run_report(const Scene& scene,
                                    const std::vector<Vec3>& qubit_positions,
                                    const FieldPolicy& policy, int L = 8,
                                    int resolution = 40) {
  DecoherenceReport rep;
  std::vector<NoiseTensor> local;
  for (const auto& q : qubit_positions)
    local.push_back(map_detail::scene_ncf(scene, q, q, L, resolution));

  for (std::size_t k = 0; k < qubit_positions.size(); ++k) {
    QubitReport qr;
    qr.position = qubit_positions[k];
    const auto opt = optimal_field_direction(local[k]);
    qr.recommended_direction = opt.direction.n_hat;
    const FieldDirection dir = policy.optimal
                                   ? opt.direction
                                   : FieldDirection::along(policy.fixed);
    qr.field_direction = dir.n_hat;
    qr.dephasing_weight = dephasing_weight(local[k], dir);
    qr.relaxation_weight = relaxation_weight(local[k], dir);
    qr.dephasing_rate = rate_estimate(std::max(0.0, qr.dephasing_weight));
    qr.relaxation_rate = rate_estimate(std::max(0.0, qr.relaxation_weight));
    rep.qubits.push_back(qr);
  }

  for (std::size_t a = 0; a < qubit_positions.size(); ++a)
    for (std::size_t b = a + 1; b < qubit_positions.size(); ++b) {
      PairReport pr;
      pr.a = a;
      pr.b = b;
      if (policy.optimal) {
        // shared axis: minimizer of the pair's summed local tensors
        NoiseTensor sum{local[a].m + local[b].m, NoiseTensor::Kind::physical};
        pr.axis = optimal_field_direction(sum).direction.n_hat;
      } else {
        pr.axis = policy.fixed;
      }
      const NoiseTensor cross = map_detail::scene_ncf(
          scene, qubit_positions[a], qubit_positions[b], L, resolution);
      const auto bw = bell_branch_weights(local[a], local[b], cross, pr.axis);
      pr.w_cross = FieldDirection::along(pr.axis).n_hat.dot(
          cross.symmetrized() * pr.axis);
      pr.branch_plus = bw.plus;
      pr.branch_minus = bw.minus;
      pr.quieter_is_plus = bw.plus <= bw.minus;
      pr.cross_consistent = bw.cross_consistent;
      rep.pairs.push_back(pr);
    }
  return rep;
}

inline void write_report_csv(const DecoherenceReport& rep, std::ostream& out) {
  out << "# qubit rows: index, x, y, z (cm), field nx, ny, nz, dephasing "
         "weight, relaxation weight (erg s/cm^3), 1/T2-like rate, 1/T1-like "
         "rate (s^-1), recommended nx, ny, nz\n";
  for (std::size_t k = 0; k < rep.qubits.size(); ++k) {
    const auto& q = rep.qubits[k];
    out << "qubit," << k << "," << map_detail::fmt(q.position.x()) << ","
        << map_detail::fmt(q.position.y()) << "," << map_detail::fmt(q.position.z())
        << "," << map_detail::fmt(q.field_direction.x()) << ","
        << map_detail::fmt(q.field_direction.y()) << ","
        << map_detail::fmt(q.field_direction.z()) << ","
        << map_detail::fmt(q.dephasing_weight) << ","
        << map_detail::fmt(q.relaxation_weight) << ","
        << map_detail::fmt(q.dephasing_rate) << ","
        << map_detail::fmt(q.relaxation_rate) << ","
        << map_detail::fmt(q.recommended_direction.x()) << ","
        << map_detail::fmt(q.recommended_direction.y()) << ","
        << map_detail::fmt(q.recommended_direction.z()) << "\n";
  }
  out << "# pair rows: index a, index b, axis nx, ny, nz, cross weight, "
         "branch |00>+|11>, branch |01>+|10>, quieter branch, cross "
         "consistency\n";
  for (const auto& p : rep.pairs) {
    out << "pair," << p.a << "," << p.b << "," << map_detail::fmt(p.axis.x())
        << "," << map_detail::fmt(p.axis.y()) << "," << map_detail::fmt(p.axis.z())
        << "," << map_detail::fmt(p.w_cross) << ","
        << map_detail::fmt(p.branch_plus) << "," << map_detail::fmt(p.branch_minus)
        << "," << (p.quieter_is_plus ? "plus" : "minus") << ","
        << (p.cross_consistent ? "ok" : "inconsistent") << "\n";
  }
}

// --- small parsing helpers shared by the CLI and tests ---

// "1.5,0,2a" -> Vec3; tokens ending in 'a' are multiplied by unit_a.
inline Vec3 parse_point(const std::string& text, double unit_a) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    double scale = 1.0;
    std::string t = tok;
    while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(0, 1);
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
    if (!t.empty() && (t.back() == 'a' || t.back() == 'A')) {
      scale = unit_a;
      t.pop_back();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw std::runtime_error("malformed coordinate '" + tok + "'");
    }
    if (used != t.size())
      throw std::runtime_error("malformed coordinate '" + tok + "'");
    vals.push_back(v * scale);
  }
  if (vals.size() != 3)
    throw std::runtime_error("expected 3 comma-separated coordinates, got '" +
                             text + "'");
  return Vec3(vals[0], vals[1], vals[2]);
}

// Lines of "x,y,z" (points) or "x1,y1,z1,x2,y2,z2" (pairs); '#' comments.
inline std::vector<std::vector<double>> read_numeric_lines(
    const std::string& path, double unit_a) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open points file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::string t = tok;
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front())))
        t.erase(0, 1);
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back())))
        t.pop_back();
      double scale = 1.0;
      if (!t.empty() && (t.back() == 'a' || t.back() == 'A')) {
        scale = unit_a;
        t.pop_back();
      }
      try {
        vals.push_back(std::stod(t) * scale);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed number '" + tok + "' in " + path);
      }
    }
    rows.push_back(vals);
  }
  return rows;
}

}  // namespace ewjn
