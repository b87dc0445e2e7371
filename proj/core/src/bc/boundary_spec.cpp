#include "fvgraph/bc/boundary_spec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fvgraph/common/error.hpp"

namespace fvg::bc {

Vec3 TimeTable::eval(double time) const {
  if (t.empty()) fail(ErrorCode::ExtrapolationError, "empty time table");
  if (t.size() == 1) return v.front();
  double tt = time;
  const double t0 = t.front();
  const double t1 = t.back();
  if (periodic) {
    const double span = period > 0.0 ? period : t1 - t0;
    tt = t0 + std::fmod(time - t0, span);
    if (tt < t0) tt += span;
    if (tt > t1) {
      // wrap segment between the last sample and the first one of the next period
      const double a = (tt - t1) / (t0 + span - t1);
      return (1.0 - a) * v.back() + a * v.front();
    }
  } else if (time < t0 - 1e-12 || time > t1 + 1e-12) {
    fail(ErrorCode::ExtrapolationError,
         "time " + std::to_string(time) + " outside table range [" + std::to_string(t0) + ", " + std::to_string(t1) + "]");
  }
  tt = std::clamp(tt, t0, t1);
  auto it = std::upper_bound(t.begin(), t.end(), tt);
  if (it == t.end()) return v.back();
  const auto i = static_cast<std::size_t>(it - t.begin());
  if (i == 0) return v.front();
  const double a = (tt - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - a) * v[i - 1] + a * v[i];
}

double HalfSineWaveform::eval(double time) const {
  const double tau = std::fmod(time, period);
  const double ts = systolic_fraction * period;
  if (tau < 0.0 || tau >= ts) return 0.0;
  return std::sin(std::numbers::pi * tau / ts);
}

double ParabolicInflow::amplitude_at(double time) const {
  if (waveform) return waveform->eval(time);
  if (amplitude) return amplitude->eval(time).x;
  return 1.0;
}

Vec3 ParabolicInflow::eval(const Vec3& x, double time) const {
  Vec3 r = x - center;
  const double an = norm(axis);
  if (an > 0.0) {
    const Vec3 a = axis / an;
    r -= dot(r, a) * a;
  }
  const double shape = std::max(0.0, 1.0 - dot(r, r) / (radius * radius));
  return (u_max * amplitude_at(time) * shape) * direction;
}

}  // namespace fvg::bc
