#pragma once

#include "ewjn/geometry.hpp"

namespace ewjn {

// Real 3x3 magnetic noise correlation tensor. Either the dimensionless F_ij
// or the physical correlator in erg s / cm^3.
struct NoiseTensor {
  enum class Kind { dimensionless, physical };

  Mat3 m = Mat3::Zero();
  Kind kind = Kind::dimensionless;

  double operator()(int i, int j) const { return m(i, j); }
  double max_abs() const { return m.cwiseAbs().maxCoeff(); }
  Mat3 symmetrized() const { return 0.5 * (m + m.transpose()); }
};

inline NoiseTensor operator+(const NoiseTensor& a, const NoiseTensor& b) {
  return {a.m + b.m, a.kind};
}

inline NoiseTensor operator*(double s, const NoiseTensor& t) {
  return {s * t.m, t.kind};
}

}  // namespace ewjn
