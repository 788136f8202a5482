#pragma once

// Complex orthonormal spherical harmonics with the Condon-Shortley phase,
// their theta-derivatives, the vector harmonics Y_lm / Psi_lm, the combined
// vector S_lm = (l+1) Y_lm - Psi_lm, and the multipole weights A_l.
//
// Scalar values come from normalized associated Legendre tables built by
// upward-l recurrence at fixed m. A parallel table of P_lm/sin(theta) is
// propagated through the same recurrence from its analytic diagonal seed, so
// the phihat component of Psi never divides by sin(theta) and stays finite
// at the poles. The theta-derivative uses the m-shift identity
//   dY_lm/dtheta = (1/2) [ sqrt((l-m)(l+m+1)) e^{-i phi} Y_{l,m+1}
//                        - sqrt((l+m)(l-m+1)) e^{+i phi} Y_{l,m-1} ].

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ewjn/geometry.hpp"

namespace ewjn {

struct MultipoleIndex {
  int ell = 0;
  int m = 0;
};

// Guard against index abuse; not a numerical limit of the recurrences.
inline constexpr int kDefaultLMax = 12;

inline bool valid_index(const MultipoleIndex& idx, int l_max = kDefaultLMax) {
  return idx.ell >= 0 && idx.ell <= l_max && std::abs(idx.m) <= idx.ell;
}

inline void require_valid_index(const MultipoleIndex& idx,
                                int l_max = kDefaultLMax) {
  if (!valid_index(idx, l_max)) {
    throw std::domain_error("invalid multipole index (ell=" +
                            std::to_string(idx.ell) +
                            ", m=" + std::to_string(idx.m) + ")");
  }
}

// A_l = l / [ (l+1) (2l+1)^2 (2l+3) ]; vanishes at l = 0 (no monopole).
inline double a_coeff(int ell) {
  if (ell < 0) throw std::domain_error("a_coeff: ell must be >= 0");
  const double l = ell;
  return l / ((l + 1.0) * (2.0 * l + 1.0) * (2.0 * l + 1.0) * (2.0 * l + 3.0));
}

// Per-direction evaluation workspace for all (l, m) with l <= L.
class SlmBasis {
 public:
  SlmBasis(int L, const SphericalDirection& dir)
      : L_(L), frame_(dir) {
    if (L < 0) throw std::domain_error("SlmBasis: L must be >= 0");
    const double x = std::cos(dir.theta);
    const double s = std::sin(dir.theta);
    const int n = (L + 1) * (L + 2) / 2;
    plm_.assign(n, 0.0);
    rlm_.assign(n, 0.0);

    // Diagonal seeds. rlm = plm / sin(theta) with the sin factored out
    // analytically, so it is exact at theta = 0 and pi.
    plm_[tri(0, 0)] = 0.28209479177387814;  // 1/sqrt(4 pi)
    if (L >= 1) rlm_[tri(1, 1)] = -0.34549414947133547;  // -sqrt(3/(8 pi))
    for (int m = 1; m <= L; ++m) {
      const double f = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      plm_[tri(m, m)] = f * plm_[tri(m - 1, m - 1)];
      if (m >= 2) rlm_[tri(m, m)] = f * rlm_[tri(m - 1, m - 1)];
    }
    // Upward recurrence in l at fixed m; rlm satisfies the same recurrence.
    for (int m = 0; m <= L; ++m) {
      if (m + 1 <= L) {
        const double f = x * std::sqrt(2.0 * m + 3.0);
        plm_[tri(m + 1, m)] = f * plm_[tri(m, m)];
        if (m >= 1) rlm_[tri(m + 1, m)] = f * rlm_[tri(m, m)];
      }
      for (int l = m + 2; l <= L; ++l) {
        const double a =
            std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        const double b = std::sqrt(
            ((l - 1.0) * (l - 1.0) - double(m) * m) /
            (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        plm_[tri(l, m)] =
            a * (x * plm_[tri(l - 1, m)] - b * plm_[tri(l - 2, m)]);
        if (m >= 1)
          rlm_[tri(l, m)] =
              a * (x * rlm_[tri(l - 1, m)] - b * rlm_[tri(l - 2, m)]);
      }
    }
    eimphi_.resize(L + 1);
    for (int m = 0; m <= L; ++m)
      eimphi_[m] = std::polar(1.0, m * dir.phi);
  }

  int order() const { return L_; }
  const SphericalFrame& frame() const { return frame_; }

  Complex ylm(int l, int m) const {
    check(l, m);
    if (m >= 0) return plm_[tri(l, m)] * eimphi_[m];
    const Complex y = plm_[tri(l, -m)] * eimphi_[-m];
    return parity(-m) * std::conj(y);
  }

  Complex dylm_dtheta(int l, int m) const {
    check(l, m);
    if (m >= 0) return dplm(l, m) * eimphi_[m];
    return parity(-m) * std::conj(dplm(l, -m) * eimphi_[-m]);
  }

  // Y_lm / sin(theta); finite everywhere, zero for m = 0 by convention
  // (used only multiplied by m).
  Complex ylm_over_sin(int l, int m) const {
    check(l, m);
    if (m == 0) return 0.0;
    if (m > 0) return rlm_[tri(l, m)] * eimphi_[m];
    return parity(-m) * std::conj(rlm_[tri(l, -m)] * eimphi_[-m]);
  }

  // Psi_lm = r grad Y_lm in Cartesian components.
  CVec3 psi(int l, int m) const {
    const Complex dth = dylm_dtheta(l, m);
    const Complex dph = Complex(0.0, double(m)) * ylm_over_sin(l, m);
    return dth * frame_.thetahat.cast<Complex>() +
           dph * frame_.phihat.cast<Complex>();
  }

  CVec3 yvec(int l, int m) const {
    return ylm(l, m) * frame_.rhat.cast<Complex>();
  }

  // S_lm = (l+1) Y_lm rhat - Psi_lm.
  CVec3 s(int l, int m) const {
    return double(l + 1) * yvec(l, m) - psi(l, m);
  }

 private:
  static int tri(int l, int m) { return l * (l + 1) / 2 + m; }
  static double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

  void check(int l, int m) const {
    if (l < 0 || l > L_ || std::abs(m) > l)
      throw std::domain_error("SlmBasis: index out of range");
  }

  // m-shift identity applied to the normalized Legendre table (phi = 0 slice).
  double dplm(int l, int m) const {
    const double up = (m + 1 <= l)
                          ? std::sqrt(double(l - m) * (l + m + 1.0)) *
                                plm_[tri(l, m + 1)]
                          : 0.0;
    const double pmm1 = (m == 0) ? -plm_[tri(l, 1)] : plm_[tri(l, m - 1)];
    const double down =
        (l >= 1) ? std::sqrt(double(l + m) * (l - m + 1.0)) * pmm1 : 0.0;
    return 0.5 * (up - down);
  }

  int L_;
  SphericalFrame frame_;
  std::vector<double> plm_;
  std::vector<double> rlm_;
  std::vector<Complex> eimphi_;
};

inline Complex ylm(const MultipoleIndex& idx, const SphericalDirection& dir,
                   int l_max = kDefaultLMax) {
  require_valid_index(idx, l_max);
  return SlmBasis(idx.ell, dir).ylm(idx.ell, idx.m);
}

inline Complex dylm_dtheta(const MultipoleIndex& idx,
                           const SphericalDirection& dir,
                           int l_max = kDefaultLMax) {
  require_valid_index(idx, l_max);
  return SlmBasis(idx.ell, dir).dylm_dtheta(idx.ell, idx.m);
}

// (Y_lm rhat, r grad Y_lm) in Cartesian components.
inline std::pair<CVec3, CVec3> vector_harmonics(const MultipoleIndex& idx,
                                                const SphericalDirection& dir,
                                                int l_max = kDefaultLMax) {
  require_valid_index(idx, l_max);
  SlmBasis basis(idx.ell, dir);
  return {basis.yvec(idx.ell, idx.m), basis.psi(idx.ell, idx.m)};
}

inline CVec3 s_lm(const MultipoleIndex& idx, const SphericalDirection& dir,
                  int l_max = kDefaultLMax) {
  require_valid_index(idx, l_max);
  return SlmBasis(idx.ell, dir).s(idx.ell, idx.m);
}

}  // namespace ewjn
