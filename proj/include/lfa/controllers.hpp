#ifndef LFA_CONTROLLERS_HPP_
#define LFA_CONTROLLERS_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lfa/common.hpp"

namespace lfa {

enum class RefinerKind { PassThrough, Pid, Adrc };

inline int sgn(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

/**
 * Shared gains for the per-instance disturbance-rejection refiners.
 * The observer gains are usually set through the bandwidth helper below
 * rather than individually.
 */
struct AdrcGains {
  double h = 0.1;        // integration step, one tick per training visit
  double td_accel = 10;  // tracking differentiator acceleration
  double beta1 = 6;      // observer gains (bandwidth 2)
  double beta2 = 12;
  double beta3 = 8;
  double b = 0.5;        // observer input coefficient
  double b0 = 1;          // compensation divisor
  double b1 = 1;          // proportional gain
  double b2 = 0.01;       // differential gain

  // beta1 = 3w, beta2 = 3w^2, beta3 = w^3
  void set_bandwidth(double omega) {
    beta1 = 3 * omega;
    beta2 = 3 * omega * omega;
    beta3 = omega * omega * omega;
  }

  void validate() const {
    if (!(h > 0)) throw ConfigError("adrc.h must be positive");
    if (!(td_accel > 0)) throw ConfigError("adrc.r must be positive");
    if (b0 == 0) throw ConfigError("adrc.b0 must be nonzero");
    for (double v : {h, td_accel, beta1, beta2, beta3, b, b0, b1, b2})
      if (!std::isfinite(v)) throw ConfigError("adrc gains must be finite");
  }
};

// Per-instance controller state. u_prev is the previous tick's refined
// error, fed back into the observer (the causal resolution of the loop
// between observer input and compensator output).
struct AdrcState {
  double v1 = 0;      // tracked true value
  double v2 = 0;      // tracked differential of the true value
  double z1 = 0;      // observed prediction
  double z2 = 0;      // observed prediction differential
  double z3 = 0;      // observed disturbance
  double u_prev = 0;  // previous refined error
};

struct PidGains {
  double kp = 1;
  double ki = 0.005;
  double kd = 0.1;

  void validate() const {
    for (double v : {kp, ki, kd})
      if (!std::isfinite(v)) throw ConfigError("pid gains must be finite");
  }
};

struct PidState {
  double err_sum = 0;
  double err_prev = 0;
};

/// Tracking differentiator tick toward a constant target.
inline void td_step(AdrcState& s, double target, const AdrcGains& g) {
  double arg = s.v1 - target + s.v2 * std::abs(s.v2) / (2 * g.td_accel);
  double l = -g.td_accel * sgn(arg);
  double v1 = s.v1 + g.h * s.v2;
  double v2 = s.v2 + g.h * l;
  s.v1 = v1;
  s.v2 = v2;
}

/// Extended state observer tick over the prediction sequence; consumes the
/// previous refined error as the observer input.
inline void eso_step(AdrcState& s, double prediction, const AdrcGains& g) {
  double e1 = s.z1 - prediction;
  double z1 = s.z1 + g.h * (s.z2 - g.beta1 * e1);
  double z2 = s.z2 + g.h * (s.z3 - g.beta2 * e1 + g.b * s.u_prev);
  double z3 = s.z3 - g.h * g.beta3 * e1;
  s.z1 = z1;
  s.z2 = z2;
  s.z3 = z3;
}

/// Error compensator: proportional error plus differential error, minus the
/// disturbance estimate, scaled by the compensation divisor. Stores the
/// output for the next observer tick and returns it.
inline double ec_step(AdrcState& s, double target, double prediction, const AdrcGains& g) {
  double e1 = target - prediction;
  double e2 = s.v2 - s.z2;
  double u0 = g.b1 * e1 + g.b2 * e2;
  double u = (u0 - s.z3) / g.b0;
  s.u_prev = u;
  return u;
}

enum class AdrcInit {
  Zero,       // all state fields zero
  WarmStart,  // v1 starts at the rating, z1 at the initial prediction
};

/**
 * One refiner state per training instance behind a single refine() call.
 * Pass-through keeps no state; the stateful kinds own one record per
 * instance, indexed by the instance's position in the training set.
 */
class ControllerBank {
 public:
  static ControllerBank pass_through() { return ControllerBank(RefinerKind::PassThrough); }

  static ControllerBank pid(const PidGains& gains, std::size_t num_instances) {
    gains.validate();
    ControllerBank bank(RefinerKind::Pid);
    bank.pid_gains_ = gains;
    bank.pid_states_.resize(num_instances);
    return bank;
  }

  static ControllerBank adrc(const AdrcGains& gains, std::size_t num_instances,
                             AdrcInit init_policy = AdrcInit::Zero) {
    gains.validate();
    ControllerBank bank(RefinerKind::Adrc);
    bank.adrc_gains_ = gains;
    bank.adrc_states_.resize(num_instances);
    bank.warm_start_ = init_policy == AdrcInit::WarmStart;
    return bank;
  }

  RefinerKind kind() const { return kind_; }
  std::size_t size() const {
    return kind_ == RefinerKind::Pid ? pid_states_.size() : adrc_states_.size();
  }
  const AdrcGains& adrc_gains() const { return adrc_gains_; }
  const AdrcState& adrc_state(std::size_t i) const { return adrc_states_.at(i).state; }
  const PidState& pid_state(std::size_t i) const { return pid_states_.at(i); }

  double refine(std::size_t instance_index, double target, double prediction) {
    switch (kind_) {
      case RefinerKind::PassThrough:
        return target - prediction;
      case RefinerKind::Pid: {
        PidState& s = pid_states_.at(instance_index);
        double e = target - prediction;
        double out = pid_gains_.kp * e + pid_gains_.ki * s.err_sum +
                     pid_gains_.kd * (e - s.err_prev);
        s.err_sum += e;
        s.err_prev = e;
        check_finite(out, instance_index);
        return out;
      }
      case RefinerKind::Adrc: {
        TrackedAdrcState& s = adrc_states_.at(instance_index);
        if (warm_start_ && !s.started) {
          s.state.v1 = target;
          s.state.z1 = prediction;
          s.started = true;
        }
        td_step(s.state, target, adrc_gains_);
        eso_step(s.state, prediction, adrc_gains_);
        double u = ec_step(s.state, target, prediction, adrc_gains_);
        if (!std::isfinite(s.state.v1) || !std::isfinite(s.state.z1))
          throw DivergenceError("non-finite controller state", instance_index);
        check_finite(u, instance_index);
        return u;
      }
    }
    throw ConfigError("unknown refiner kind");
  }

 private:
  explicit ControllerBank(RefinerKind kind) : kind_(kind) {}

  static void check_finite(double u, std::size_t index) {
    if (!std::isfinite(u)) throw DivergenceError("non-finite refined error", index);
  }

  struct TrackedAdrcState {
    AdrcState state;
    bool started = false;
  };

  RefinerKind kind_;
  AdrcGains adrc_gains_;
  PidGains pid_gains_;
  std::vector<TrackedAdrcState> adrc_states_;
  std::vector<PidState> pid_states_;
  bool warm_start_ = false;
};

}  // namespace lfa

#endif  // LFA_CONTROLLERS_HPP_
