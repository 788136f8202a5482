#pragma once

// Closed-form noise correlation tensor of a metallic sphere.
//
// The induced field of a unit fictitious dipole is
//   B_ind(x, x') = (8 i pi / delta^2) sum_{l>=1, m} A_l a^{2l+3} / (r r')^{l+2}
//                  S_lm(theta, phi)  mu . S*_lm(theta', phi'),
// and the dimensionless tensor is
//   F_ij(x, x') = sum_{l>=1, m} A_l (a^2 / (r r'))^{l+2} S_lm,i S*_lm,j.
// The physical correlator is (8 pi hbar / delta^2 a) coth(hbar w / 2 kB T) F.
//
// The m-sum runs over m >= 0 with the m > 0 terms doubled through the
// conjugation symmetry S_{l,-m} = (-1)^m conj(S_lm); this halves the work and
// makes the tensor real by construction.
//
// In thin-shell mode (delta << a) the radial factor a^{2l+3} is replaced by
// a^{2l+3} - (a-delta)^{2l+3}, i.e. the current integration is restricted to
// a surface shell of thickness delta.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewjn/constants.hpp"
#include "ewjn/harmonics.hpp"
#include "ewjn/noise_tensor.hpp"
#include "ewjn/scene.hpp"

namespace ewjn {

// Evaluation point relative to a sphere center.
struct FieldPoint {
  Vec3 position = Vec3::Zero();  // cm, relative to sphere center
  double r = 0.0;
  SphericalDirection dir;

  static FieldPoint relative_to(const Vec3& x, const SpherePrimitive& sphere) {
    FieldPoint p;
    p.position = x - sphere.center;
    p.r = p.position.norm();
    p.dir = direction_of(p.position);
    return p;
  }
};

struct TruncationOrder {
  int L = 8;
};

inline void require_truncation(int L, int l_max = kDefaultLMax) {
  if (L < 1 || L > l_max)
    throw std::domain_error("truncation order L must satisfy 1 <= L <= " +
                            std::to_string(l_max));
}

// a^{2l+3} for the full sphere, a^{2l+3} - (a-delta)^{2l+3} for a shell of
// thickness delta < a. Clamps to the full-volume value for delta >= a.
inline double thin_shell_factor(int ell, double a, double delta) {
  if (ell < 0) throw std::domain_error("thin_shell_factor: ell must be >= 0");
  if (!(a > 0.0)) throw std::domain_error("thin_shell_factor: a must be > 0");
  if (!(delta > 0.0)) throw std::domain_error("thin_shell_factor: delta must be > 0");
  const double full = std::pow(a, 2 * ell + 3);
  if (delta >= a) return full;
  return full - std::pow(a - delta, 2 * ell + 3);
}

// Slow multipole convergence just outside the sphere: the series parameter
// a^2/(r r') is close to 1 for r in (a, 1.05a].
inline bool convergence_warning(const Vec3& x, const SpherePrimitive& sphere) {
  const double r = (x - sphere.center).norm();
  return r > sphere.radius && r <= 1.05 * sphere.radius;
}

// coth(hbar omega / 2 kB T); exactly 1 at T = 0 and for arguments > 30.
inline double coth_factor(const Environment& env) {
  env.validate();
  if (env.temperature == 0.0) return 1.0;
  const double x = constants::hbar * env.omega /
                   (2.0 * constants::k_boltzmann * env.temperature);
  if (x > 30.0) return 1.0;
  return 1.0 / std::tanh(x);
}

// 8 pi hbar / (delta^2 a), erg s / cm^3.
inline double ncf_prefactor(const SpherePrimitive& sphere,
                            const Environment& env) {
  const double delta = skin_depth(sphere.material, env);
  return 8.0 * M_PI * constants::hbar / (delta * delta * sphere.radius);
}

namespace detail {

inline void require_exterior(const FieldPoint& p, double a, const char* which) {
  if (p.r <= a)
    throw std::domain_error(std::string(which) +
                            " lies inside (or on) the sphere: r = " +
                            std::to_string(p.r) + ", a = " + std::to_string(a));
}

// Radial weights w_l = A_l * s_l / (r r')^{l+2}, where s_l is a^{2l+3} or its
// thin-shell replacement.
inline std::vector<double> radial_weights(double a, double r, double rp, int L,
                                          std::optional<double> shell_delta) {
  std::vector<double> w(L + 1, 0.0);
  for (int l = 1; l <= L; ++l) {
    const double s_l = shell_delta ? thin_shell_factor(l, a, *shell_delta)
                                   : std::pow(a, 2 * l + 3);
    w[l] = a_coeff(l) * s_l / std::pow(r * rp, l + 2);
  }
  return w;
}

}  // namespace detail

// Induced field at x of a fictitious dipole mu at x_src, from the multipole
// series above. Gauss per unit moment; purely imaginary by construction.
inline CVec3 b_ind_multipole(const Vec3& x, const Vec3& x_src, const Vec3& mu,
                             const SpherePrimitive& sphere, double delta, int L,
                             std::optional<double> shell_delta = std::nullopt) {
  require_truncation(L);
  if (!(delta > 0.0)) throw std::domain_error("b_ind_multipole: delta must be > 0");
  const FieldPoint p = FieldPoint::relative_to(x, sphere);
  const FieldPoint ps = FieldPoint::relative_to(x_src, sphere);
  detail::require_exterior(p, sphere.radius, "query point");
  detail::require_exterior(ps, sphere.radius, "source point");

  const SlmBasis basis(L, p.dir);
  const SlmBasis basis_src(L, ps.dir);
  const auto w = detail::radial_weights(sphere.radius, p.r, ps.r, L, shell_delta);
  const CVec3 cmu = mu.cast<Complex>();

  Vec3 sum = Vec3::Zero();
  for (int l = 1; l <= L; ++l) {
    Vec3 block = Vec3::Zero();
    for (int m = 0; m <= l; ++m) {
      const CVec3 s = basis.s(l, m);
      // Eigen's dot conjugates its first argument: mu . conj(S'_lm).
      const Complex proj = basis_src.s(l, m).dot(cmu);
      const double factor = (m == 0) ? 1.0 : 2.0;
      block += factor * (s * proj).real();
    }
    sum += w[l] * block;
  }
  const double scale = 8.0 * M_PI / (delta * delta);
  return Complex(0.0, scale) * sum.cast<Complex>();
}

// Dimensionless F_ij, all nine entries in one pass over (l, m).
inline NoiseTensor f_tensor(const Vec3& x, const Vec3& x_src,
                            const SpherePrimitive& sphere, int L,
                            std::optional<double> shell_delta = std::nullopt) {
  require_truncation(L);
  const FieldPoint p = FieldPoint::relative_to(x, sphere);
  const FieldPoint ps = FieldPoint::relative_to(x_src, sphere);
  detail::require_exterior(p, sphere.radius, "query point");
  detail::require_exterior(ps, sphere.radius, "source point");

  const SlmBasis basis(L, p.dir);
  const SlmBasis basis_src(L, ps.dir);
  // The dimensionless form carries one extra power of a: (a^2/(r r'))^{l+2}.
  auto w = detail::radial_weights(sphere.radius, p.r, ps.r, L, shell_delta);
  for (auto& wl : w) wl *= sphere.radius;

  NoiseTensor out{Mat3::Zero(), NoiseTensor::Kind::dimensionless};
  for (int l = 1; l <= L; ++l) {
    Mat3 block = Mat3::Zero();
    for (int m = 0; m <= l; ++m) {
      const CVec3 s = basis.s(l, m);
      const CVec3 sp = basis_src.s(l, m);
      const double factor = (m == 0) ? 1.0 : 2.0;
      // S_lm,i(x) conj(S_lm,j(x')) + (m -> -m) = 2 Re[...]
      block += factor * (s * sp.adjoint()).real();
    }
    out.m += w[l] * block;
  }
  return out;
}

// Physical correlator for a single sphere, erg s / cm^3.
inline NoiseTensor ncf(const Vec3& x, const Vec3& x_src,
                       const SpherePrimitive& sphere, const Environment& env,
                       int L,
                       std::optional<double> shell_delta = std::nullopt) {
  NoiseTensor f = f_tensor(x, x_src, sphere, L, shell_delta);
  const double scale = ncf_prefactor(sphere, env) * coth_factor(env);
  return {scale * f.m, NoiseTensor::Kind::physical};
}

inline NoiseTensor ncf(const Vec3& x, const Vec3& x_src, const Scene& scene,
                       int L,
                       std::optional<double> shell_delta = std::nullopt) {
  if (scene.objects.size() != 1 ||
      !std::holds_alternative<SpherePrimitive>(scene.objects.front()))
    throw std::domain_error("ncf: scene must hold exactly one sphere");
  return ncf(x, x_src, std::get<SpherePrimitive>(scene.objects.front()),
             scene.environment, L, shell_delta);
}

// Tensors at each truncation order in L_list (ascending), with the maximum
// relative change between consecutive orders. Changes are measured against
// the largest entry magnitude of the later tensor, so sign-crossing entries
// do not blow the ratio up.
struct TruncationReport {
  std::vector<int> orders;
  std::vector<NoiseTensor> tensors;
  std::vector<double> successive_rel_delta;  // size orders.size() - 1
};

inline TruncationReport truncation_report(const Vec3& x, const Vec3& x_src,
                                          const SpherePrimitive& sphere,
                                          const std::vector<int>& L_list) {
  if (L_list.empty())
    throw std::invalid_argument("truncation_report: L_list is empty");
  for (std::size_t i = 1; i < L_list.size(); ++i)
    if (L_list[i] < L_list[i - 1])
      throw std::invalid_argument("truncation_report: L_list must be ascending");
  TruncationReport rep;
  rep.orders = L_list;
  for (int L : L_list) rep.tensors.push_back(f_tensor(x, x_src, sphere, L));
  for (std::size_t i = 1; i < rep.tensors.size(); ++i) {
    const double scale = rep.tensors[i].max_abs();
    const double diff =
        (rep.tensors[i].m - rep.tensors[i - 1].m).cwiseAbs().maxCoeff();
    rep.successive_rel_delta.push_back(scale > 0.0 ? diff / scale : 0.0);
  }
  return rep;
}

}  // namespace ewjn
