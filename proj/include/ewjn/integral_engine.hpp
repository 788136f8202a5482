#pragma once

// Arbitrary-shape noise tensors by Biot-Savart quadrature over a voxelized
// conductor, driven by the induced current of a fictitious oscillating
// dipole. Serves as the brute-force cross-check of the sphere multipole
// series.
//
// The current density inside the object is, up to the factor i w sigma / c,
//   W(x'') = mu x (x'' - x') / |x'' - x'|^3  +  grad f(x''),
// where f solves the interior Neumann problem
//   lap f = 0,   df/dn = -n . [mu x (x'' - x') / |x'' - x'|^3]  on the surface
// that enforces J . n = 0. The gradient term is the charge-accumulation
// (longitudinal) correction; dropping it gives a grossly wrong transverse
// response (the bare kernel current pierces the surface), so it is kept by
// default and can only be disabled explicitly. For spheres the
// Neumann problem is solved spectrally on the exact surface; for other voxel
// sets a finite-volume Laplacian on the voxel lattice is solved by conjugate
// gradients.
//
// The induced field is the midpoint-rule sum
//   B_ind(x) = (i / 2 pi delta^2) sum_v dV_v  W(x_v) x (x - x_v)/|x - x_v|^3,
// purely imaginary since W is real. In shell mode the sum runs only over
// voxels within delta of the surface.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ewjn/constants.hpp"
#include "ewjn/harmonics.hpp"
#include "ewjn/noise_tensor.hpp"
#include "ewjn/scene.hpp"
#include "ewjn/sphere_multipole.hpp"

namespace ewjn {

struct DipoleSource {
  Vec3 position = Vec3::Zero();  // cm
  Vec3 moment = Vec3::UnitZ();   // fictitious; unit magnitude by convention

  void validate() const {
    if (!(moment.norm() > 0.0))
      throw std::domain_error("dipole source: moment must be non-zero");
  }
};

struct QuadratureConfig {
  enum class Mode { volume, shell };
  int resolution = 40;  // voxels per diameter (used when voxelizing)
  Mode mode = Mode::volume;
  double shell_thickness = 0.0;  // cm; defaults to delta when mode == shell
  bool longitudinal_correction = true;
  int correction_lmax = 12;  // spectral order of the sphere Neumann solve
};

// Free dipole field B_d = [3 u (u.mu) - mu |u|^2] / |u|^5.
inline Vec3 dipole_field(const Vec3& x, const DipoleSource& source) {
  source.validate();
  const Vec3 u = x - source.position;
  const double r = u.norm();
  if (r == 0.0)
    throw std::domain_error("dipole_field: evaluation at the source point");
  const double r2 = r * r;
  return (3.0 * u.dot(source.moment) * u - source.moment * r2) / (r2 * r2 * r);
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

inline Vec3 dipole_kernel(const Vec3& p, const Vec3& src_pos, const Vec3& mu) {
  const Vec3 u = p - src_pos;
  const double r = u.norm();
  return mu.cross(u) / (r * r * r);
}

// Spectral solve of the sphere Neumann problem: expansion coefficients of
// f = sum c_lm r^l Y_lm from surface quadrature of -rhat . K.
class SphereNeumannSolution {
 public:
  SphereNeumannSolution(const Vec3& center, double radius, const Vec3& src_pos,
                        const Vec3& mu, int lmax)
      : center_(center), radius_(radius), lmax_(lmax) {
    const int ntheta = lmax + 16;
    const int nphi = 2 * lmax + 32;
    std::vector<double> gx, gw;
    gauss_legendre(ntheta, gx, gw);
    c_.assign((lmax + 1) * (lmax + 2) / 2, Complex(0.0, 0.0));
    for (int it = 0; it < ntheta; ++it) {
      const double theta = std::acos(gx[it]);
      for (int ip = 0; ip < nphi; ++ip) {
        const double phi = 2.0 * M_PI * ip / nphi;
        const SphericalDirection dir{theta, phi};
        const SphericalFrame frame(dir);
        const Vec3 surf = center_ + radius_ * frame.rhat;
        const double h = -frame.rhat.dot(dipole_kernel(surf, src_pos, mu));
        const double wq = gw[it] * (2.0 * M_PI / nphi) * h;
        const SlmBasis basis(lmax, dir);
        for (int l = 1; l <= lmax; ++l)
          for (int m = 0; m <= l; ++m)
            c_[tri(l, m)] += wq * std::conj(basis.ylm(l, m));
      }
    }
    // The quadrature already integrated h = -rhat.K, so c_lm = <Y,h>/(l a^{l-1}).
    for (int l = 1; l <= lmax_; ++l)
      for (int m = 0; m <= l; ++m)
        c_[tri(l, m)] *= 1.0 / (l * std::pow(radius_, l - 1));
  }

  // grad f at a point inside the sphere; real by the c_{l,-m} symmetry.
  Vec3 gradient(const Vec3& x) const {
    const Vec3 p = x - center_;
    const double r = p.norm();
    const SphericalDirection dir = direction_of(p);
    const SlmBasis basis(lmax_, dir);
    const CVec3 rhat = basis.frame().rhat.cast<Complex>();
    Vec3 out = Vec3::Zero();
    for (int l = 1; l <= lmax_; ++l) {
      const double rl = std::pow(r, l - 1);
      if (rl == 0.0 && l > 1) continue;
      for (int m = 0; m <= l; ++m) {
        // grad(r^l Y_lm) = r^{l-1} (l Y_lm rhat + Psi_lm)
        const CVec3 g = double(l) * basis.ylm(l, m) * rhat + basis.psi(l, m);
        const double factor = (m == 0) ? 1.0 : 2.0;
        out += factor * rl * (c_[tri(l, m)] * g).real();
      }
    }
    return out;
  }

 private:
  static int tri(int l, int m) { return l * (l + 1) / 2 + m; }
  Vec3 center_;
  double radius_;
  int lmax_;
  std::vector<Complex> c_;
};

inline const std::array<Eigen::Vector3i, 6>& neighbor_steps() {
  static const std::array<Eigen::Vector3i, 6> steps = {
      Eigen::Vector3i(1, 0, 0),  Eigen::Vector3i(-1, 0, 0),
      Eigen::Vector3i(0, 1, 0),  Eigen::Vector3i(0, -1, 0),
      Eigen::Vector3i(0, 0, 1),  Eigen::Vector3i(0, 0, -1)};
  return steps;
}

// Finite-volume Neumann solve on the voxel lattice (matrix-free CG). Used
// for voxel objects without an analytic sphere surface.
class LatticeNeumannSolution {
 public:
  LatticeNeumannSolution(const VoxelObject& obj, const Vec3& src_pos,
                         const Vec3& mu)
      : h_(obj.edge) {
    const std::size_t n = obj.voxels.size();
    const auto coords = lattice_coords(obj);
    std::unordered_map<std::int64_t, std::size_t> index;
    index.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) index[lattice_key(coords[i])] = i;

    neighbor_.assign(6 * n, -1);
    flux_.assign(6 * n, 0.0);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int f = 0; f < 6; ++f) {
        const auto it = index.find(lattice_key(coords[i] + neighbor_steps()[f]));
        if (it != index.end()) {
          neighbor_[6 * i + f] = static_cast<std::ptrdiff_t>(it->second);
        } else {
          const Vec3 nrm = neighbor_steps()[f].cast<double>();
          const Vec3 face = obj.voxels[i].center + 0.5 * h_ * nrm;
          const double g = -nrm.dot(dipole_kernel(face, src_pos, mu));
          flux_[6 * i + f] = g;
          b[i] += h_ * g;
        }
      }
    }
    // Pure Neumann problem: project the right-hand side onto mean zero.
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= double(n);
    for (double& v : b) v -= mean;
    f_ = solve(b);
  }

  Vec3 gradient(std::size_t i) const {
    Vec3 g;
    for (int d = 0; d < 3; ++d) {
      const int fp = 2 * d, fm = 2 * d + 1;
      const auto np = neighbor_[6 * i + fp];
      const auto nm = neighbor_[6 * i + fm];
      const double dp =
          np >= 0 ? (f_[np] - f_[i]) / h_ : flux_[6 * i + fp];
      const double dm =
          nm >= 0 ? (f_[i] - f_[nm]) / h_ : -flux_[6 * i + fm];
      g[d] = 0.5 * (dp + dm);
    }
    return g;
  }

 private:
  std::vector<double> apply(const std::vector<double>& f) const {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < 6; ++k) {
        const auto nb = neighbor_[6 * i + k];
        if (nb >= 0) acc += f[i] - f[nb];
      }
      out[i] = acc;
    }
    return out;
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    const std::size_t n = b.size();
    std::vector<double> f(n, 0.0), r = b, p = b;
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double tol2 = 1e-24 * rr;
    const std::size_t max_iter = 40 * n + 200;
    for (std::size_t it = 0; it < max_iter && rr > tol2 && rr > 0.0; ++it) {
      const auto Ap = apply(p);
      double pAp = 0.0;
      for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
      if (pAp <= 0.0) break;
      const double alpha = rr / pAp;
      double rr_new = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        f[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
        rr_new += r[i] * r[i];
      }
      const double beta = rr_new / rr;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
      rr = rr_new;
    }
    return f;
  }

  double h_;
  std::vector<std::ptrdiff_t> neighbor_;
  std::vector<double> flux_;
  std::vector<double> f_;
};

inline bool inside_object(const Vec3& x, const VoxelObject& obj) {
  if (obj.shape == VoxelObject::Shape::sphere &&
      (x - obj.center).norm() <= obj.shape_radius)
    return true;
  if (obj.shape == VoxelObject::Shape::box &&
      ((x - obj.center).cwiseAbs() - obj.shape_size / 2.0).maxCoeff() <= 0.0)
    return true;
  const double half = obj.edge / 2.0;
  for (const auto& v : obj.voxels)
    if ((x - v.center).cwiseAbs().maxCoeff() <= half) return true;
  return false;
}

inline void require_exterior_point(const Vec3& x, const VoxelObject& obj,
                                   const char* which) {
  if (inside_object(x, obj))
    throw std::domain_error(std::string(which) + " lies inside the object");
}

}  // namespace detail

// True when the point is closer than one voxel edge to some voxel center;
// the 1/|x - x''|^3 kernel is too sharp there for midpoint quadrature.
inline bool clearance_warning(const Vec3& x, const VoxelObject& obj) {
  for (const auto& v : obj.voxels)
    if ((x - v.center).norm() < obj.edge) return true;
  return false;
}

// Voxels within delta of the object surface (analytic surface when the
// object came from a primitive, nearest surface voxel otherwise).
inline VoxelObject shell_voxels(const VoxelObject& object, double delta) {
  if (!(delta > 0.0)) throw std::domain_error("shell_voxels: delta must be > 0");
  if (object.voxels.empty())
    throw std::domain_error("shell_voxels: empty voxel set");
  if (delta >= object.min_radius) return object;
  if (delta < object.edge)
    throw std::domain_error(
        "shell_voxels: delta is below the voxel edge; increase the "
        "voxelization resolution");
  VoxelObject out = object;
  out.voxels.clear();
  if (object.shape == VoxelObject::Shape::sphere) {
    for (const auto& v : object.voxels)
      if ((v.center - object.center).norm() >= object.shape_radius - delta)
        out.voxels.push_back(v);
  } else if (object.shape == VoxelObject::Shape::box) {
    for (const auto& v : object.voxels) {
      const Vec3 to_face =
          object.shape_size / 2.0 - (v.center - object.center).cwiseAbs();
      if (to_face.minCoeff() <= delta) out.voxels.push_back(v);
    }
  } else {
    const auto surface = detail::surface_voxels(object);
    for (const auto& v : object.voxels) {
      double d = std::numeric_limits<double>::max();
      for (std::size_t s : surface)
        d = std::min(d, (v.center - object.voxels[s].center).norm());
      if (d <= delta) out.voxels.push_back(v);
    }
  }
  if (out.voxels.empty())
    throw std::domain_error(
        "shell_voxels: no voxels inside the shell; increase the resolution");
  return out;
}

// Induced current direction field W = K + grad f at every voxel center of
// the object, for a fixed source. Linear in the source moment.
inline std::vector<Vec3> induced_current_density(const VoxelObject& object,
                                                 const DipoleSource& source,
                                                 const QuadratureConfig& config) {
  source.validate();
  std::vector<Vec3> w(object.voxels.size());
  for (std::size_t i = 0; i < object.voxels.size(); ++i)
    w[i] = detail::dipole_kernel(object.voxels[i].center, source.position,
                                 source.moment);
  if (config.longitudinal_correction && object.voxels.size() > 1) {
    if (object.shape == VoxelObject::Shape::sphere) {
      const detail::SphereNeumannSolution sol(object.center, object.shape_radius,
                                              source.position, source.moment,
                                              config.correction_lmax);
      for (std::size_t i = 0; i < object.voxels.size(); ++i)
        w[i] += sol.gradient(object.voxels[i].center);
    } else {
      const detail::LatticeNeumannSolution sol(object, source.position,
                                               source.moment);
      for (std::size_t i = 0; i < object.voxels.size(); ++i)
        w[i] += sol.gradient(i);
    }
  }
  return w;
}

namespace detail {

inline CVec3 biot_savart_sum(std::span<const Voxel> voxels,
                             std::span<const Vec3> w, const Vec3& x,
                             double delta) {
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    const Vec3 u = x - voxels[i].center;
    const double r = u.norm();
    acc += voxels[i].volume * w[i].cross(u) / (r * r * r);
  }
  const double scale = 1.0 / (2.0 * M_PI * delta * delta);
  return Complex(0.0, scale) * acc.cast<Complex>();
}

inline std::vector<std::size_t> integration_subset(const VoxelObject& object,
                                                   double delta,
                                                   const QuadratureConfig& cfg,
                                                   VoxelObject& shell_storage) {
  std::vector<std::size_t> idx;
  if (cfg.mode == QuadratureConfig::Mode::volume) {
    idx.resize(object.voxels.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }
  const double thickness =
      cfg.shell_thickness > 0.0 ? cfg.shell_thickness : delta;
  shell_storage = shell_voxels(object, thickness);
  // map shell voxels back to indices in the parent object (same ordering)
  std::size_t j = 0;
  for (std::size_t i = 0; i < object.voxels.size() && j < shell_storage.voxels.size();
       ++i) {
    if ((object.voxels[i].center - shell_storage.voxels[j].center).norm() == 0.0) {
      idx.push_back(i);
      ++j;
    }
  }
  return idx;
}

}  // namespace detail

// Induced field at x, gauss per unit moment; purely imaginary.
inline CVec3 b_ind_integral(const Vec3& x, const DipoleSource& source,
                            const VoxelObject& object, double delta,
                            const QuadratureConfig& config = {}) {
  if (!(delta > 0.0)) throw std::domain_error("b_ind_integral: delta must be > 0");
  if (object.voxels.empty())
    throw std::domain_error("b_ind_integral: empty voxel set");
  detail::require_exterior_point(x, object, "query point");
  detail::require_exterior_point(source.position, object, "source point");

  const auto w = induced_current_density(object, source, config);
  VoxelObject shell;
  const auto idx = detail::integration_subset(object, delta, config, shell);
  std::vector<Voxel> voxels;
  std::vector<Vec3> wsub;
  voxels.reserve(idx.size());
  wsub.reserve(idx.size());
  for (std::size_t i : idx) {
    voxels.push_back(object.voxels[i]);
    wsub.push_back(w[i]);
  }
  return detail::biot_savart_sum(voxels, wsub, x, delta);
}

// Precomputed unit-moment current fields for one (object, source position);
// evaluating many field points or moments then costs one Biot-Savart sum.
class IntegralEvaluator {
 public:
  IntegralEvaluator(const VoxelObject& object, const Vec3& src_pos,
                    double delta, const QuadratureConfig& config = {})
      : delta_(delta) {
    if (!(delta > 0.0))
      throw std::domain_error("IntegralEvaluator: delta must be > 0");
    if (object.voxels.empty())
      throw std::domain_error("IntegralEvaluator: empty voxel set");
    detail::require_exterior_point(src_pos, object, "source point");
    object_ = object;
    for (int k = 0; k < 3; ++k) {
      DipoleSource s{src_pos, Vec3::Unit(k)};
      w_[k] = induced_current_density(object, s, config);
    }
    VoxelObject shell;
    const auto idx = detail::integration_subset(object, delta, config, shell);
    if (idx.size() != object.voxels.size()) {
      std::vector<Voxel> voxels;
      std::array<std::vector<Vec3>, 3> wsub;
      for (std::size_t i : idx) {
        voxels.push_back(object_.voxels[i]);
        for (int k = 0; k < 3; ++k) wsub[k].push_back(w_[k][i]);
      }
      object_.voxels = std::move(voxels);
      for (int k = 0; k < 3; ++k) w_[k] = std::move(wsub[k]);
    }
  }

  CVec3 field_at(const Vec3& x, const Vec3& mu) const {
    detail::require_exterior_point(x, object_, "query point");
    CVec3 out = CVec3::Zero();
    for (int k = 0; k < 3; ++k) {
      if (mu[k] == 0.0) continue;
      out += mu[k] *
             detail::biot_savart_sum(object_.voxels, w_[k], x, delta_);
    }
    return out;
  }

  // Column j of the tensor comes from the unit moment along j.
  Mat3 im_b_columns(const Vec3& x) const {
    detail::require_exterior_point(x, object_, "query point");
    Mat3 out;
    for (int k = 0; k < 3; ++k) {
      const CVec3 b =
          detail::biot_savart_sum(object_.voxels, w_[k], x, delta_);
      out.col(k) = b.imag();
    }
    return out;
  }

  double delta() const { return delta_; }

 private:
  VoxelObject object_;
  double delta_;
  std::array<std::vector<Vec3>, 3> w_;
};

// Dimensionless tensor from three unit-moment evaluations, normalized to the
// multipole convention: F_ij = Im B_ind,i(mu = e_j) * delta^2 a / (8 pi).
inline NoiseTensor f_tensor_numeric(const Vec3& x, const Vec3& x_src,
                                    const VoxelObject& object, double delta,
                                    const QuadratureConfig& config = {},
                                    double norm_radius = 0.0) {
  const double a = norm_radius > 0.0
                       ? norm_radius
                       : (object.shape == VoxelObject::Shape::sphere
                              ? object.shape_radius
                              : object.bounding_radius);
  const IntegralEvaluator eval(object, x_src, delta, config);
  const double scale = delta * delta * a / (8.0 * M_PI);
  return {scale * eval.im_b_columns(x), NoiseTensor::Kind::dimensionless};
}

// Additive multi-object form; norm_radius must be supplied explicitly.
inline NoiseTensor f_tensor_numeric(const Vec3& x, const Vec3& x_src,
                                    std::span<const VoxelObject> objects,
                                    double delta, const QuadratureConfig& config,
                                    double norm_radius) {
  NoiseTensor out{Mat3::Zero(), NoiseTensor::Kind::dimensionless};
  for (const auto& obj : objects)
    out.m += f_tensor_numeric(x, x_src, obj, delta, config, norm_radius).m;
  return out;
}

// Physical correlator from the integral engine, erg s / cm^3. The skin depth
// comes from the object's own material.
inline NoiseTensor ncf_numeric(const Vec3& x, const Vec3& x_src,
                               const VoxelObject& object,
                               const Environment& env,
                               const QuadratureConfig& config = {}) {
  const double delta = skin_depth(object.material, env);
  const IntegralEvaluator eval(object, x_src, delta, config);
  const double scale = constants::hbar * coth_factor(env);
  return {scale * eval.im_b_columns(x), NoiseTensor::Kind::physical};
}

}  // namespace ewjn
