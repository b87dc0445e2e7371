#pragma once

#include <span>
#include <vector>

namespace fvg::inverse {

using Vector = std::vector<double>;

struct LossValue {
  double value = 0.0;
  Vector grad;  // with respect to the simulated values
};

/// (1/N) sum (sim - data)^2. Throws ShapeError on a length mismatch.
LossValue loss_mse(std::span<const double> sim, std::span<const double> data);

/// lambda1 L_P + lambda2 L_Q.
double loss_composite(double l_p, double l_q, double lambda1 = 1.0, double lambda2 = 1.0);

struct AdamState {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// lr_k = lr / (1 + decay k); zero keeps the rate fixed.
  double decay = 0.0;
  int step = 0;
  Vector m, v;
};

/// One bias-corrected Adam update in place. Throws GradientBlowup on a non-finite gradient
/// or parameter.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

/// theta = reference * exp(alpha), elementwise.
class LogReparam {
 public:
  /// Throws InvalidReference unless every reference value is finite and positive.
  explicit LogReparam(Vector reference);

  Vector to_physical(std::span<const double> alpha) const;
  /// Throws InvalidReference for non-positive theta.
  Vector to_alpha(std::span<const double> theta) const;
  /// dL/dalpha = theta dL/dtheta.
  Vector chain(std::span<const double> alpha, std::span<const double> dtheta) const;
  const Vector& reference() const { return ref_; }

 private:
  Vector ref_;
};

}  // namespace fvg::inverse
