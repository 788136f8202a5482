#pragma once

// Qubit-facing consequences of the noise tensor: dephasing/relaxation
// projection weights for an applied-field direction, relaxation-rate
// estimates, rotation transport (F(Rx, Rx') = R F Rt), the quietest applied
// field direction, and the two-qubit Bell-branch dephasing functionals.

#include <cmath>
#include <stdexcept>

#include "ewjn/constants.hpp"
#include "ewjn/geometry.hpp"
#include "ewjn/noise_tensor.hpp"

namespace ewjn {

// Applied-field direction with a completing orthonormal triad.
struct FieldDirection {
  Vec3 n_hat = Vec3::UnitZ();
  Vec3 m1_hat = Vec3::UnitX();
  Vec3 m2_hat = Vec3::UnitY();

  static FieldDirection along(const Vec3& n) {
    if (std::abs(n.norm() - 1.0) > 1e-10)
      throw std::domain_error("field direction must be a unit vector");
    FieldDirection d;
    d.n_hat = n;
    // complete the triad from the axis least aligned with n
    int least = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(n[k]) < std::abs(n[least])) least = k;
    d.m1_hat = (Vec3::Unit(least) - n[least] * n).normalized();
    d.m2_hat = n.cross(d.m1_hat);
    return d;
  }

  void validate() const {
    const double tol = 1e-10;
    if (std::abs(n_hat.norm() - 1.0) > tol ||
        std::abs(m1_hat.norm() - 1.0) > tol ||
        std::abs(m2_hat.norm() - 1.0) > tol ||
        std::abs(n_hat.dot(m1_hat)) > tol || std::abs(n_hat.dot(m2_hat)) > tol ||
        std::abs(m1_hat.dot(m2_hat)) > tol)
      throw std::domain_error("field direction triad is not orthonormal");
  }
};

struct DecoherenceWeights {
  double dephasing = 0.0;   // units follow the input tensor
  double relaxation = 0.0;
};

// n^T F n; the T2-determining projection for a local tensor.
inline double dephasing_weight(const NoiseTensor& F, const FieldDirection& dir) {
  dir.validate();
  const Mat3 s = F.symmetrized();
  return dir.n_hat.dot(s * dir.n_hat);
}

// m1^T F m1 + m2^T F m2; invariant under rotating (m1, m2) about n.
inline double relaxation_weight(const NoiseTensor& F, const FieldDirection& dir) {
  dir.validate();
  const Mat3 s = F.symmetrized();
  return dir.m1_hat.dot(s * dir.m1_hat) + dir.m2_hat.dot(s * dir.m2_hat);
}

inline DecoherenceWeights decoherence_weights(const NoiseTensor& F,
                                              const FieldDirection& dir) {
  return {dephasing_weight(F, dir), relaxation_weight(F, dir)};
}

// (mu_B / hbar)^2 * ncf_value, s^-1 for a physical tensor entry.
inline double rate_estimate(double ncf_value) {
  if (ncf_value < 0.0)
    throw std::domain_error("rate_estimate: value must be >= 0");
  const double g = constants::mu_bohr / constants::hbar;
  return g * g * ncf_value;
}

inline NoiseTensor rotate_tensor(const NoiseTensor& F, const Mat3& R) {
  if (!is_rotation(R))
    throw std::domain_error("rotate_tensor: matrix is not a proper rotation");
  return {R * F.m * R.transpose(), F.kind};
}

struct OptimalDirection {
  FieldDirection direction;
  double weight = 0.0;  // dephasing weight along it
};

// Unit eigenvector of the symmetrized local tensor with the smallest
// eigenvalue. Within a degenerate eigenspace the direction maximizing |z|,
// then |x|, is chosen, and the sign is fixed so the largest-magnitude
// component is positive.
inline OptimalDirection optimal_field_direction(const NoiseTensor& F_local) {
  const Mat3 s = F_local.symmetrized();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(s);
  const Vec3 evals = eig.eigenvalues();  // ascending
  const Mat3 evecs = eig.eigenvectors();

  const double scale = std::max(1e-300, evals.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  int dim = 1;
  while (dim < 3 && evals[dim] - evals[0] <= tol) ++dim;

  Vec3 n;
  if (dim == 1) {
    n = evecs.col(0);
  } else {
    // project zhat (or xhat) onto the degenerate eigenspace
    const auto basis = evecs.leftCols(dim);
    Vec3 cand = basis * (basis.transpose() * Vec3::UnitZ());
    if (cand.norm() < 1e-8) cand = basis * (basis.transpose() * Vec3::UnitX());
    n = cand.normalized();
  }
  int imax = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(n[k]) > std::abs(n[imax])) imax = k;
  if (n[imax] < 0.0) n = -n;

  OptimalDirection out;
  out.direction = FieldDirection::along(n);
  out.weight = n.dot(s * n);
  return out;
}

enum class BellBranch { plus, minus };

// Collective-dephasing quadratic form along n for the two Bell branches:
// w_aa + w_bb + 2 w_ab for (|00> + |11>)/sqrt2, w_aa + w_bb - 2 w_ab for
// (|01> + |10>)/sqrt2, with w = n^T F n. Proportional to the relative-phase
// decoherence rate of that branch.
inline double two_qubit_dephasing(const NoiseTensor& F_aa,
                                  const NoiseTensor& F_bb,
                                  const NoiseTensor& F_ab, const Vec3& n_hat,
                                  BellBranch branch) {
  const FieldDirection dir = FieldDirection::along(n_hat);
  const double w_aa = dephasing_weight(F_aa, dir);
  const double w_bb = dephasing_weight(F_bb, dir);
  const double w_ab = dephasing_weight(F_ab, dir);
  return branch == BellBranch::plus ? w_aa + w_bb + 2.0 * w_ab
                                    : w_aa + w_bb - 2.0 * w_ab;
}

struct BellBranchWeights {
  double plus = 0.0;
  double minus = 0.0;
  bool cross_consistent = true;  // |w_ab| <= sqrt(w_aa w_bb) within slack
};

inline BellBranchWeights bell_branch_weights(const NoiseTensor& F_aa,
                                             const NoiseTensor& F_bb,
                                             const NoiseTensor& F_ab,
                                             const Vec3& n_hat) {
  const FieldDirection dir = FieldDirection::along(n_hat);
  const double w_aa = dephasing_weight(F_aa, dir);
  const double w_bb = dephasing_weight(F_bb, dir);
  const double w_ab = dephasing_weight(F_ab, dir);
  BellBranchWeights out;
  out.plus = w_aa + w_bb + 2.0 * w_ab;
  out.minus = w_aa + w_bb - 2.0 * w_ab;
  const double bound = std::sqrt(std::max(0.0, w_aa * w_bb));
  out.cross_consistent = std::abs(w_ab) <= 1.05 * bound + 1e-12 * (w_aa + w_bb);
  return out;
}

}  // namespace ewjn
