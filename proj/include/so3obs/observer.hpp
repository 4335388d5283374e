// The attitude-and-bias observer
//   dRbar/dt   = Rbar * hat(Omega_z - gamma_bar - k_R e_R)
//   dgamma/dt  = k_gamma e_R
// driven by gyro and direction measurements, plus a structure-preserving
// fourth-order integrator for it.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "so3obs/so3.hpp"

namespace so3obs {

struct ObserverGains {
  double k_r = 0.0;
  double k_gamma = 0.0;
};

struct MeasurementFrame {
  struct Pair {
    Vec3 s;          // reference direction, inertial frame, unit
    Vec3 b;          // measured direction, body frame, unit
    double weight = 1.0;
  };
  double t = 0.0;
  Vec3 omega_z;      // biased gyro reading, rad/s
  std::vector<Pair> pairs;
};

struct ObserverState {
  RotationMatrix r_bar;
  Vec3 gamma_bar;    // rad/s
};

struct ObserverRates {
  Vec3 body_rate;    // kappa with dRbar/dt = Rbar * hat(kappa)
  Vec3 bias_rate;    // dgamma_bar/dt
  Vec3 e_r;          // innovation sum_i w_i (Rbar^T s_i) x b_i
};

inline ObserverRates observer_rates(const ObserverState& state, const MeasurementFrame& frame,
                                    const ObserverGains& gains) {
  std::vector<double> w;
  std::vector<Vec3> s, b;
  w.reserve(frame.pairs.size());
  s.reserve(frame.pairs.size());
  b.reserve(frame.pairs.size());
  for (const auto& p : frame.pairs) {
    w.push_back(p.weight);
    s.push_back(p.s);
    b.push_back(p.b);
  }
  ObserverRates out;
  out.e_r = e_r_measurements(w, s, b, state.r_bar);
  out.body_rate = frame.omega_z - state.gamma_bar - gains.k_r * out.e_r;
  out.bias_rate = gains.k_gamma * out.e_r;
  return out;
}

using FrameFn = std::function<MeasurementFrame(double)>;

struct StepStats {
  double ortho_residual = 0.0;  // defect of the raw multiplicative update
  bool projected = false;       // repair applied (residual exceeded 1e-9)
};

namespace detail {
// Right-trivialized dexp inverse, truncated for a fourth-order method:
// for Rbar(t) = Rbar0 exp(sigma), sigma' = u + (1/2) sigma x u + (1/12) sigma x (sigma x u).
inline Vec3 dexpinv_rt(const Vec3& sigma, const Vec3& u) {
  const Vec3 c1 = sigma.cross(u);
  return u + 0.5 * c1 + (1.0 / 12.0) * sigma.cross(c1);
}
}  // namespace detail

// One Runge-Kutta-Munthe-Kaas step of size h starting at time t. The attitude
// update is a single exponential Rbar <- Rbar exp(sigma), so the result stays
// on SO(3) up to roundoff; if the raw product still drifts past 1e-9 it is
// repaired by polar projection and flagged in the stats.
inline ObserverState step(const ObserverState& state, const FrameFn& frame_fn,
                          const ObserverGains& gains, double t, double h,
                          StepStats* stats = nullptr) {
  if (!(h > 0.0)) throw StepTooLarge("step: h must be positive");

  const auto stage = [&](const Vec3& sigma, const Vec3& gamma_stage, double ts) {
    const ObserverState st{state.r_bar * exp_so3(sigma), gamma_stage};
    return observer_rates(st, frame_fn(ts), gains);
  };

  const ObserverRates r1 = stage(Vec3::zero(), state.gamma_bar, t);
  const Vec3 k1 = r1.body_rate;

  const Vec3 s2 = (0.5 * h) * k1;
  const ObserverRates r2 = stage(s2, state.gamma_bar + (0.5 * h) * r1.bias_rate, t + 0.5 * h);
  const Vec3 k2 = detail::dexpinv_rt(s2, r2.body_rate);

  const Vec3 s3 = (0.5 * h) * k2;
  const ObserverRates r3 = stage(s3, state.gamma_bar + (0.5 * h) * r2.bias_rate, t + 0.5 * h);
  const Vec3 k3 = detail::dexpinv_rt(s3, r3.body_rate);

  const Vec3 s4 = h * k3;
  const ObserverRates r4 = stage(s4, state.gamma_bar + h * r3.bias_rate, t + h);
  const Vec3 k4 = detail::dexpinv_rt(s4, r4.body_rate);

  const Vec3 sigma = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  Mat3 r_new = state.r_bar.matrix() * exp_so3(sigma).matrix();
  const Vec3 gamma_new =
      state.gamma_bar + (h / 6.0) * (r1.bias_rate + 2.0 * r2.bias_rate + 2.0 * r3.bias_rate +
                                     r4.bias_rate);

  double residual = ortho_residual(r_new);
  bool projected = false;
  if (!(residual <= 1e-9)) {
    try {
      r_new = project_to_so3(r_new).matrix();
    } catch (const Error&) {
      throw StepTooLarge("step: attitude left SO(3) and could not be repaired");
    }
    projected = true;
    const double repaired = ortho_residual(r_new);
    if (!(repaired <= 1e-6))
      throw StepTooLarge("step: orthonormality residual above 1e-6 after projection");
  }
  if (stats) {
    stats->ortho_residual = residual;
    stats->projected = projected;
  }
  return ObserverState{RotationMatrix::from_unchecked(r_new), gamma_new};
}

struct ErrorNorms {
  double er_norm = 0.0;      // ||R - Rbar||, Frobenius; in [0, 2 sqrt(2)]
  double egamma_norm = 0.0;  // ||gamma - gamma_bar||
};

inline ErrorNorms error_state(const ObserverState& state, const RotationMatrix& truth_r,
                              const Vec3& truth_gamma) {
  return ErrorNorms{(truth_r.matrix() - state.r_bar.matrix()).norm(),
                    (truth_gamma - state.gamma_bar).norm()};
}

}  // namespace so3obs
