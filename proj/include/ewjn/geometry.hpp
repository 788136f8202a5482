#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace ewjn {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;

// Polar/azimuthal angles of a direction. theta in [0,pi], phi in [0,2pi).
struct SphericalDirection {
  double theta = 0.0;
  double phi = 0.0;
};

inline SphericalDirection direction_of(const Vec3& v) {
  const double r = v.norm();
  if (r == 0.0) return {0.0, 0.0};
  double ct = v.z() / r;
  if (ct > 1.0) ct = 1.0;
  if (ct < -1.0) ct = -1.0;
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0.0) phi += 2.0 * M_PI;
  return {std::acos(ct), phi};
}

// Local orthonormal frame (rhat, thetahat, phihat) in Cartesian components.
struct SphericalFrame {
  Vec3 rhat, thetahat, phihat;
  explicit SphericalFrame(const SphericalDirection& d) {
    const double st = std::sin(d.theta), ct = std::cos(d.theta);
    const double sp = std::sin(d.phi), cp = std::cos(d.phi);
    rhat = Vec3(st * cp, st * sp, ct);
    thetahat = Vec3(ct * cp, ct * sp, -st);
    phihat = Vec3(-sp, cp, 0.0);
  }
};

inline bool is_rotation(const Mat3& R, double tol = 1e-10) {
  return (R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
         std::abs(R.determinant() - 1.0) < tol;
}

}  // namespace ewjn
