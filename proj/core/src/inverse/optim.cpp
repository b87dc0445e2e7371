#include "fvgraph/inverse/optim.hpp"

#include <cmath>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::inverse {

LossValue loss_mse(std::span<const double> sim, std::span<const double> data) {
  if (sim.size() != data.size()) {
    fail(ErrorCode::ShapeError, "MSE of " + std::to_string(sim.size()) + " simulated against " +
                                    std::to_string(data.size()) + " observed values");
  }
  LossValue out;
  out.grad.resize(sim.size());
  if (sim.empty()) return out;
  const double inv = 1.0 / static_cast<double>(sim.size());
  for (std::size_t i = 0; i < sim.size(); ++i) {
    const double r = sim[i] - data[i];
    out.value += r * r * inv;
    out.grad[i] = 2.0 * r * inv;
  }
  return out;
}

double loss_composite(double l_p, double l_q, double lambda1, double lambda2) { return lambda1 * l_p + lambda2 * l_q; }

void adam_step(AdamState& s, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) fail(ErrorCode::ShapeError, "Adam: parameter and gradient sizes differ");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      fail(ErrorCode::GradientBlowup, "non-finite gradient for parameter " + std::to_string(i));
    }
  }
  if (s.m.size() != params.size()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  const double lr = s.lr / (1.0 + s.decay * s.step);
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, s.step);
  const double c2 = 1.0 - std::pow(s.beta2, s.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grads[i];
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grads[i] * grads[i];
    params[i] -= lr * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + s.eps);
    if (!std::isfinite(params[i])) fail(ErrorCode::GradientBlowup, "parameter " + std::to_string(i) + " became non-finite");
  }
}

LogReparam::LogReparam(Vector reference) : ref_(std::move(reference)) {
  for (std::size_t i = 0; i < ref_.size(); ++i) {
    if (!(ref_[i] > 0.0) || !std::isfinite(ref_[i])) {
      fail(ErrorCode::InvalidReference, "reference value " + std::to_string(i) + " must be positive");
    }
  }
}

Vector LogReparam::to_physical(std::span<const double> alpha) const {
  if (alpha.size() != ref_.size()) fail(ErrorCode::ShapeError, "log reparametrisation size mismatch");
  Vector theta(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) theta[i] = ref_[i] * std::exp(alpha[i]);
  return theta;
}

Vector LogReparam::to_alpha(std::span<const double> theta) const {
  if (theta.size() != ref_.size()) fail(ErrorCode::ShapeError, "log reparametrisation size mismatch");
  Vector alpha(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0)) fail(ErrorCode::InvalidReference, "physical value " + std::to_string(i) + " must be positive");
    alpha[i] = std::log(theta[i] / ref_[i]);
  }
  return alpha;
}

Vector LogReparam::chain(std::span<const double> alpha, std::span<const double> dtheta) const {
  const Vector theta = to_physical(alpha);
  if (dtheta.size() != theta.size()) fail(ErrorCode::ShapeError, "log reparametrisation size mismatch");
  Vector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] * dtheta[i];
  return out;
}

}  // namespace fvg::inverse
