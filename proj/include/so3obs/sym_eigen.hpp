// Eigenvalues of small symmetric matrices without a general eigensolver:
// trigonometric closed form for 3x3 (with a Newton polish on the
// characteristic polynomial) and the quadratic formula for 2x2.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "so3obs/so3.hpp"

namespace so3obs {

namespace detail {

// Characteristic polynomial p(x) = det(A - x I) of a symmetric 3x3 and its
// derivative, for root polishing.
inline void char_poly(const Mat3& a, double x, double& p, double& dp) {
  const double c2 = a.trace();
  const double c1 = a(0, 0) * a(1, 1) + a(1, 1) * a(2, 2) + a(0, 0) * a(2, 2) -
                    a(0, 1) * a(0, 1) - a(1, 2) * a(1, 2) - a(0, 2) * a(0, 2);
  const double c0 = a.det();
  p = ((-x + c2) * x - c1) * x + c0;
  dp = (-3.0 * x + 2.0 * c2) * x - c1;
}

}  // namespace detail

// Eigenvalues of a (symmetrized) 3x3 matrix in ascending order.
inline std::array<double, 3> sym3_eigenvalues(const Mat3& a_in) {
  const Mat3 a = (a_in + a_in.transposed()) * 0.5;

  const double m = a.trace() / 3.0;
  Mat3 b = a;
  b(0, 0) -= m;
  b(1, 1) -= m;
  b(2, 2) -= m;
  const double p2 = b.squared_norm() / 6.0;
  const double p = std::sqrt(std::max(p2, 0.0));

  std::array<double, 3> eig;
  if (p < 1e-300) {
    eig = {m, m, m};
    return eig;
  }
  const double q = std::clamp(b.det() / (2.0 * p * p * p), -1.0, 1.0);
  const double phi = std::acos(q) / 3.0;
  const double largest = m + 2.0 * p * std::cos(phi);
  const double smallest = m + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  eig = {smallest, 3.0 * m - largest - smallest, largest};

  // One or two Newton steps on the characteristic polynomial tighten each
  // root; skipped near multiple roots where the closed form is already exact
  // to first order.
  const double scale = std::max(1.0, a.norm());
  for (double& lam : eig) {
    for (int it = 0; it < 2; ++it) {
      double pv, dpv;
      detail::char_poly(a, lam, pv, dpv);
      if (std::abs(dpv) < 1e-8 * scale * scale) break;
      const double delta = pv / dpv;
      if (!std::isfinite(delta) || std::abs(delta) > 1e-3 * scale) break;
      lam -= delta;
    }
  }
  std::sort(eig.begin(), eig.end());
  return eig;
}

// Spectral norm (largest absolute eigenvalue) of a symmetric 3x3.
inline double sym3_spectral_norm(const Mat3& a) {
  const auto eig = sym3_eigenvalues(a);
  return std::max(std::abs(eig[0]), std::abs(eig[2]));
}

// Symmetric 2x2 with closed-form extremal eigenvalues.
struct Sym2 {
  double m00 = 0.0, m01 = 0.0, m11 = 0.0;

  double eig_min() const {
    const double tr = m00 + m11;
    const double det = m00 * m11 - m01 * m01;
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    return 0.5 * (tr - disc);
  }
  double eig_max() const {
    const double tr = m00 + m11;
    const double det = m00 * m11 - m01 * m01;
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    return 0.5 * (tr + disc);
  }
  // z^T M z for z = (z0, z1).
  double quad(double z0, double z1) const { return m00 * z0 * z0 + 2.0 * m01 * z0 * z1 + m11 * z1 * z1; }
};

}  // namespace so3obs
