// Weighted time-varying reference directions, the matrix G(t) they induce,
// and grid estimates of the spectral constants the gain certificate needs.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "so3obs/so3.hpp"
#include "so3obs/sym_eigen.hpp"

namespace so3obs {

struct ReferenceDirection {
  double weight = 1.0;
  std::function<Vec3(double)> direction;  // t (s) -> unit vector, reentrant
};

struct ReferenceSet {
  std::vector<ReferenceDirection> directions;

  std::size_t size() const { return directions.size(); }
};

inline ReferenceSet make_reference_set(std::vector<ReferenceDirection> dirs) {
  for (const auto& d : dirs) {
    if (!(d.weight > 0.0)) throw ConfigError("reference direction weights must be positive");
    if (!d.direction) throw ConfigError("reference direction function must be set");
  }
  return ReferenceSet{std::move(dirs)};
}

// G(t) = sum_i w_i s_i(t) s_i(t)^T. Symmetric PSD with trace = sum w_i.
inline Mat3 g_matrix(const ReferenceSet& set, double t) {
  Mat3 g = Mat3::zero();
  for (const auto& d : set.directions) {
    const Vec3 s = d.direction(t);
    if (std::abs(s.norm() - 1.0) > 1e-6)
      throw NonUnitDirection("g_matrix: reference direction is not unit length at t=" +
                             std::to_string(t));
    g += d.weight * Mat3::outer(s, s);
  }
  return g;
}

// Same accumulation from explicit (weight, direction) pairs; shared with the
// replay path so both produce bit-identical G for identical inputs.
inline Mat3 g_from_pairs(std::span<const double> weights, std::span<const Vec3> s) {
  Mat3 g = Mat3::zero();
  for (std::size_t i = 0; i < s.size(); ++i) g += weights[i] * Mat3::outer(s[i], s[i]);
  return g;
}

// Grid estimates over [t0, t1]:
//   c1 = min_t (lambda_1 + lambda_2)      (eigenvalues ascending)
//   c2 = max_t (lambda_2 + lambda_3)
//   d  = max   spectral norm of dG/dt, central differences at grid midpoints
// These are sampled estimates, not rigorous interval bounds; grid_step records
// the resolution they were taken at.
struct SpectralBounds {
  double c1 = 0.0;
  double c2 = 0.0;
  double d = 0.0;
  std::vector<double> sample_times;
  double grid_step = 0.0;
};

inline SpectralBounds spectral_bounds(const ReferenceSet& set, double t0, double t1, double step) {
  if (!(t1 > t0) || !(step > 0.0))
    throw ConfigError("spectral_bounds: need t1 > t0 and step > 0");

  const std::size_t n = static_cast<std::size_t>(std::ceil((t1 - t0) / step - 1e-12));
  SpectralBounds out;
  out.grid_step = step;
  out.sample_times.reserve(n + 1);

  double c1 = std::numeric_limits<double>::infinity();
  double c2 = -std::numeric_limits<double>::infinity();
  double d = 0.0;
  double min_lambda2 = std::numeric_limits<double>::infinity();

  Mat3 prev = Mat3::zero();
  double prev_t = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = (k == n) ? t1 : t0 + static_cast<double>(k) * step;
    out.sample_times.push_back(t);
    const Mat3 g = g_matrix(set, t);
    const auto eig = sym3_eigenvalues(g);
    c1 = std::min(c1, eig[0] + eig[1]);
    c2 = std::max(c2, eig[1] + eig[2]);
    min_lambda2 = std::min(min_lambda2, eig[1]);
    if (k > 0) {
      const Mat3 gdot = (g - prev) * (1.0 / (t - prev_t));
      d = std::max(d, sym3_spectral_norm(gdot));
    }
    prev = g;
    prev_t = t;
  }
  if (min_lambda2 < 1e-9)
    throw RankDeficient("spectral_bounds: second-largest eigenvalue of G reaches " +
                        std::to_string(min_lambda2) + "; need at least two non-parallel directions");
  out.c1 = c1;
  out.c2 = c2;
  out.d = d;
  return out;
}

}  // namespace so3obs
