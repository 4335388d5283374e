// Rotation-group algebra: 3-vectors, 3x3 matrices, SO(3) elements, the
// exponential/logarithm pair, and the error quantities used by the attitude
// observer and its stability certificate.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "so3obs/errors.hpp"

namespace so3obs {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  Vec3 normalized() const {
    const double n = norm();
    if (n <= 0.0 || !std::isfinite(n)) throw NonUnitDirection("cannot normalize zero/non-finite vector");
    return *this / n;
  }

  static Vec3 zero() { return {0.0, 0.0, 0.0}; }
  static Vec3 unit_x() { return {1.0, 0.0, 0.0}; }
  static Vec3 unit_y() { return {0.0, 1.0, 0.0}; }
  static Vec3 unit_z() { return {0.0, 0.0, 1.0}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }
  double operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] * s;
    return r;
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) + (*this)(i, 2) * o(2, j);
    return r;
  }
  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3& operator+=(const Mat3& o) {
    for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }

  Mat3 transposed() const {
    return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
  double trace() const { return m[0] + m[4] + m[8]; }
  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
  double squared_norm() const {
    double s = 0.0;
    for (double e : m) s += e * e;
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }
  bool finite() const {
    for (double e : m)
      if (!std::isfinite(e)) return false;
    return true;
  }

  static Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static Mat3 zero() { return Mat3{}; }
  static Mat3 outer(const Vec3& a, const Vec3& b) {
    return Mat3{{a.x * b.x, a.x * b.y, a.x * b.z, a.y * b.x, a.y * b.y, a.y * b.z, a.z * b.x,
                 a.z * b.y, a.z * b.z}};
  }
};

inline Mat3 operator*(double s, const Mat3& a) { return a * s; }

// Euclidean (Frobenius) inner product <A, B> = tr(A^T B).
inline double inner(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += a.m[i] * b.m[i];
  return s;
}

inline double asymmetry_norm(const Mat3& a) { return (a - a.transposed()).norm(); }

// || M^T M - I ||, the orthonormality defect used across the library.
inline double ortho_residual(const Mat3& a) {
  return (a.transposed() * a - Mat3::identity()).norm();
}

inline Mat3 hat(const Vec3& v) {
  return Mat3{{0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0}};
}

// Inverse of hat, taken on the antisymmetric part so that near-skew inputs
// (e.g. R^T G Rbar - Rbar^T G R with roundoff) map cleanly.
inline Vec3 vee(const Mat3& m) {
  const double skew_defect = (m + m.transposed()).norm();
  if (!(skew_defect <= 1e-6)) throw NonSkewInput("vee: input is not skew-symmetric");
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::identity()) {}

  // Validating constructor: orthonormality and determinant within 1e-9.
  explicit RotationMatrix(const Mat3& m) : m_(m) {
    if (!m.finite()) throw NotARotation("rotation matrix has non-finite entries");
    if (ortho_residual(m) > kOrthoTol) throw NotARotation("matrix is not orthonormal within 1e-9");
    if (std::abs(m.det() - 1.0) > kOrthoTol) throw NotARotation("determinant is not 1 within 1e-9");
  }

  // For results that are rotations by construction (exp map, products of
  // rotations). Skips the residual check.
  static RotationMatrix from_unchecked(const Mat3& m) {
    RotationMatrix r(Unchecked{}, m);
    return r;
  }

  static RotationMatrix identity() { return RotationMatrix(); }

  const Mat3& matrix() const { return m_; }
  RotationMatrix inverse() const { return from_unchecked(m_.transposed()); }

  RotationMatrix operator*(const RotationMatrix& o) const {
    return from_unchecked(m_ * o.m_);
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  static constexpr double kOrthoTol = 1e-9;

 private:
  struct Unchecked {};
  RotationMatrix(Unchecked, const Mat3& m) : m_(m) {}
  Mat3 m_;
};

struct AngleAxis {
  double theta = 0.0;   // rad, in [0, pi]
  Vec3 axis = Vec3::unit_z();
};

namespace detail {
// True Rodrigues coefficients with series fallback below theta = 1e-6,
// where sin(theta)/theta and (1-cos theta)/theta^2 cancel.
inline void rodrigues_coeffs(double theta, double& a, double& b) {
  if (theta < 1e-6) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
}
}  // namespace detail

// exp: so(3) -> SO(3). Angles beyond 2*pi are reduced first.
inline RotationMatrix exp_so3(const Vec3& v_in) {
  Vec3 v = v_in;
  double theta = v.norm();
  if (!std::isfinite(theta)) throw NotARotation("exp_so3: non-finite input");
  if (theta > kTwoPi) {
    const double reduced = std::fmod(theta, kTwoPi);
    v = v * (reduced / theta);
    theta = reduced;
  }
  double a, b;
  detail::rodrigues_coeffs(theta, a, b);
  const Mat3 k = hat(v);
  const Mat3 r = Mat3::identity() + a * k + b * (k * k);
  return RotationMatrix::from_unchecked(r);
}

// log: SO(3) -> angle-axis with theta in [0, pi].
//
// Near theta = pi the antisymmetric part vanishes and the axis is recovered
// from the symmetric part instead; at theta = pi exactly the axis sign is
// ambiguous and the representative with positive first nonzero component is
// returned.
inline AngleAxis log_so3(const RotationMatrix& rot) {
  const Mat3& r = rot.matrix();
  const Vec3 w{0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)), 0.5 * (r(1, 0) - r(0, 1))};
  const double s = w.norm();                                    // sin(theta)
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);  // cos(theta)
  const double theta = std::atan2(s, c);

  AngleAxis out;
  out.theta = theta;
  if (theta < 1e-6) {
    out.axis = (s > 0.0) ? w / s : Vec3::unit_z();
    return out;
  }
  if (theta < kPi - 1e-4) {
    out.axis = w / s;
    return out;
  }

  // theta close to pi: R + R^T - 2I = 2(1-cos)(vv^T - I), so
  // vv^T = I + (R + R^T - 2I)/(3 - tr R).
  const double denom = 3.0 - r.trace();
  const Mat3 vvt = Mat3::identity() + (r + r.transposed() - Mat3::identity() * 2.0) * (1.0 / denom);
  std::size_t imax = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (vvt(i, i) > vvt(imax, imax)) imax = i;
  Vec3 axis;
  axis[imax] = std::sqrt(std::max(vvt(imax, imax), 0.0));
  for (std::size_t j = 0; j < 3; ++j)
    if (j != imax) axis[j] = vvt(imax, j) / axis[imax];
  axis = axis / axis.norm();

  if (s > 1e-11) {
    if (w.dot(axis) < 0.0) axis = -axis;  // align with sin(theta) * axis
  } else {
    // theta = pi within roundoff: fix the sign convention.
    for (std::size_t j = 0; j < 3; ++j) {
      if (std::abs(axis[j]) > 1e-12) {
        if (axis[j] < 0.0) axis = -axis;
        break;
      }
    }
  }
  out.axis = axis;
  return out;
}

// Nearest rotation to a drifted matrix (polar factor), via the Newton
// iteration X <- (X + X^-T)/2. Requires det > 0.
inline RotationMatrix project_to_so3(const Mat3& a) {
  if (!a.finite() || a.det() <= 0.0)
    throw NotARotation("project_to_so3: input must be finite with positive determinant");
  Mat3 x = a;
  for (int it = 0; it < 40; ++it) {
    const double d = x.det();
    if (!(std::abs(d) > 1e-300)) throw NotARotation("project_to_so3: singular iterate");
    // inverse-transpose via adjugate: (X^-1)^T = adj(X)^T / det = cofactor(X)/det
    Mat3 cof;
    cof(0, 0) = x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1);
    cof(0, 1) = x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2);
    cof(0, 2) = x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0);
    cof(1, 0) = x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2);
    cof(1, 1) = x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0);
    cof(1, 2) = x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1);
    cof(2, 0) = x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1);
    cof(2, 1) = x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2);
    cof(2, 2) = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
    x = (x + cof * (1.0 / d)) * 0.5;
    if (ortho_residual(x) < 1e-14) break;
  }
  if (ortho_residual(x) > RotationMatrix::kOrthoTol)
    throw NotARotation("project_to_so3: iteration did not converge");
  return RotationMatrix::from_unchecked(x);
}

// ---------------------------------------------------------------------------
// Error quantities of the observer analysis.

struct Lemma1Sides {
  double lhs = 0.0;  // <G(I-Q), (I-Q)>
  double rhs = 0.0;  // 2 (tr G - v^T G v)(1 - cos theta)
};

// Both sides of the trace identity relating <G(I-Q),(I-Q)> to the rotation
// angle and axis of Q. They agree for any rotation Q and symmetric G.
inline Lemma1Sides lemma1_check(const Mat3& g, const RotationMatrix& q) {
  if (asymmetry_norm(g) > 1e-9) throw AsymmetricG("lemma1_check: G must be symmetric");
  const Mat3 d = Mat3::identity() - q.matrix();
  Lemma1Sides out;
  out.lhs = inner(g * d, d);
  const AngleAxis aa = log_so3(q);
  const Vec3 gv = g * aa.axis;
  out.rhs = 2.0 * (g.trace() - aa.axis.dot(gv)) * (1.0 - std::cos(aa.theta));
  return out;
}

// Attitude error function Psi = (1/2) <G (R - Rbar), (R - Rbar)>.
inline double psi(const Mat3& g, const RotationMatrix& r, const RotationMatrix& r_bar) {
  const Mat3 e = r.matrix() - r_bar.matrix();
  return 0.5 * inner(g * e, e);
}

// Attitude error vector e_R = (R^T G Rbar - Rbar^T G R)^vee.
inline Vec3 e_r_matrix(const Mat3& g, const RotationMatrix& r, const RotationMatrix& r_bar) {
  const Mat3 a = r.matrix().transposed() * (g * r_bar.matrix());
  const Mat3 m = a - a.transposed();
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

// Measurement form of the same vector: sum_i w_i (Rbar^T s_i) x b_i.
// Never forms G, so it is usable directly on sensor data.
inline Vec3 e_r_measurements(std::span<const double> weights, std::span<const Vec3> s,
                             std::span<const Vec3> b, const RotationMatrix& r_bar) {
  if (weights.size() != s.size() || s.size() != b.size() || s.empty())
    throw LengthMismatch("e_r_measurements: weights, s, b must have equal nonzero length");
  const Mat3 rt = r_bar.matrix().transposed();
  Vec3 total = Vec3::zero();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i].norm() - 1.0) > 1e-6 || std::abs(b[i].norm() - 1.0) > 1e-6)
      throw NonUnitDirection("e_r_measurements: directions must be unit vectors");
    total += weights[i] * (rt * s[i]).cross(b[i]);
  }
  return total;
}

// Residuals of the three quadratic-form inequalities for Q = R Rbar^T.
// Each is nonpositive whenever er_norm equals ||I - Q||.
struct QIneqResiduals {
  double r1 = 0.0;  // -x^T(trQ I - Q)x + 2(1 - ||E_R||^2/4)||x||^2
  double r2 = 0.0;  // y^T(trQ I - Q)x - 4 ||x|| ||y||
  double r3 = 0.0;  // (Q - Q^T)^vee . x - sqrt(2) ||E_R|| ||x||
};

inline QIneqResiduals q_inequality_terms(const RotationMatrix& q, const Vec3& x, const Vec3& y,
                                         double er_norm) {
  const Mat3& qm = q.matrix();
  const Mat3 f = Mat3::identity() * qm.trace() - qm;
  const Vec3 fx = f * x;
  const double er_sq = er_norm * er_norm;
  QIneqResiduals out;
  out.r1 = -x.dot(fx) + 2.0 * (1.0 - 0.25 * er_sq) * x.squared_norm();
  out.r2 = y.dot(fx) - 4.0 * x.norm() * y.norm();
  const Vec3 qv{qm(2, 1) - qm(1, 2), qm(0, 2) - qm(2, 0), qm(1, 0) - qm(0, 1)};
  out.r3 = qv.dot(x) - std::sqrt(2.0) * er_norm * x.norm();
  return out;
}

}  // namespace so3obs
