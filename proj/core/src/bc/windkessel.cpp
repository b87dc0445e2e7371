#include "fvgraph/bc/windkessel.hpp"

#include <cmath>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::bc {

void validate(const WindkesselParams& p) {
  const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(p.Rp) || !ok(p.C) || !ok(p.Rd)) {
    fail(ErrorCode::InvalidWindkesselParams, "Rp, C and Rd must be positive (got Rp=" + std::to_string(p.Rp) +
                                                 ", C=" + std::to_string(p.C) + ", Rd=" + std::to_string(p.Rd) + ")");
  }
}

namespace {

void check_dt(double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidConfig, "Windkessel time step must be positive");
}

}  // namespace

WindkesselState windkessel_step(double pc, const WindkesselParams& p, double q, double dt, WindkesselScheme s) {
  validate(p);
  check_dt(dt);
  const double tau = p.Rd * p.C;
  double next = 0.0;
  switch (s) {
    case WindkesselScheme::Exact: {
      const double a = std::exp(-dt / tau);
      next = pc * a + p.Rd * q * (1.0 - a);
      break;
    }
    case WindkesselScheme::ForwardEuler: next = pc + dt * (q - pc / p.Rd) / p.C; break;
    case WindkesselScheme::BackwardEuler: next = (pc + dt * q / p.C) / (1.0 + dt / tau); break;
  }
  return {next, next + p.Rp * q};
}

WindkesselJacobian windkessel_jacobian(double pc, const WindkesselParams& p, double q, double dt, WindkesselScheme s) {
  validate(p);
  check_dt(dt);
  const double rd = p.Rd, c = p.C;
  double d_pc = 0.0, d_c = 0.0, d_rd = 0.0, d_q = 0.0;
  switch (s) {
    case WindkesselScheme::Exact: {
      const double a = std::exp(-dt / (rd * c));
      const double da_drd = a * dt / (rd * rd * c);
      const double da_dc = a * dt / (rd * c * c);
      d_pc = a;
      d_q = rd * (1.0 - a);
      d_rd = (pc - rd * q) * da_drd + q * (1.0 - a);
      d_c = (pc - rd * q) * da_dc;
      break;
    }
    case WindkesselScheme::ForwardEuler:
      d_pc = 1.0 - dt / (rd * c);
      d_q = dt / c;
      d_rd = dt * pc / (rd * rd * c);
      d_c = -dt * (q - pc / rd) / (c * c);
      break;
    case WindkesselScheme::BackwardEuler: {
      const double den = 1.0 + dt / (rd * c);
      const double num = pc + dt * q / c;
      d_pc = 1.0 / den;
      d_q = dt / (c * den);
      d_rd = num * dt / (den * den * rd * rd * c);
      d_c = (-dt * q / (c * c)) / den + num * dt / (rd * c * c * den * den);
      break;
    }
  }
  WindkesselJacobian j{{d_pc, 0.0, d_c, d_rd, d_q}, {d_pc, q, d_c, d_rd, d_q + p.Rp}};
  return j;
}

ad::Var windkessel_step(const ad::Var& pc, const ad::Var& rp, const ad::Var& c, const ad::Var& rd, const ad::Var& q,
                        double dt, WindkesselScheme s) {
  for (const ad::Var* v : {&pc, &rp, &c, &rd, &q}) {
    if (v->size() != 1) fail(ErrorCode::ShapeError, "windkessel_step: inputs must be scalars");
  }
  const WindkesselParams p{rp[0], c[0], rd[0]};
  const WindkesselState st = windkessel_step(pc[0], p, q[0], dt, s);
  return pc.tape().record("windkessel_step", {st.pc, st.po}, {pc, rp, c, rd, q},
                          [pc, rp, c, rd, q, dt, s](ad::Tape& t, const ad::Vector& adj) {
                            const WindkesselParams p{rp[0], c[0], rd[0]};
                            const WindkesselJacobian j = windkessel_jacobian(pc[0], p, q[0], dt, s);
                            const ad::Var* in[5] = {&pc, &rp, &c, &rd, &q};
                            for (int k = 0; k < 5; ++k) t.accumulate_at(*in[k], 0, adj[0] * j.pc[k] + adj[1] * j.po[k]);
                          });
}

double fit_decay_time(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 2) fail(ErrorCode::DecayFitError, "decay fit needs at least two samples");
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > 0.0)) fail(ErrorCode::DecayFitError, "diastolic pressure above venous level required for the fit");
    const double l = std::log(y[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
  }
  const double den = n * stt - st * st;
  if (den == 0.0) fail(ErrorCode::DecayFitError, "degenerate sample times");
  const double slope = (n * stl - st * sl) / den;
  if (!(slope < 0.0)) fail(ErrorCode::DecayFitError, "fitted decay time is not positive");
  return -1.0 / slope;
}

std::vector<WindkesselParams> estimate_rcr_initial(std::span<const double> t, std::span<const double> p_inlet,
                                                   std::span<const double> q_mean, double gamma, double p_venous,
                                                   double diastolic_fraction) {
  if (t.size() != p_inlet.size() || t.size() < 3) fail(ErrorCode::ShapeError, "pressure waveform and times differ");
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::InvalidConfig, "gamma must lie in (0, 1)");
  // time-weighted mean pressure (trapezoidal)
  double area = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) area += 0.5 * (p_inlet[i] + p_inlet[i - 1]) * (t[i] - t[i - 1]);
  const double p_mean = area / (t.back() - t.front());
  const double t_start = t.back() - diastolic_fraction * (t.back() - t.front());
  std::vector<double> td, yd;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_start) {
      td.push_back(t[i]);
      yd.push_back(p_inlet[i] - p_venous);
    }
  }
  const double tau = fit_decay_time(td, yd);
  std::vector<WindkesselParams> out;
  for (double q : q_mean) {
    if (!(q > 0.0)) fail(ErrorCode::DecayFitError, "outlet mean flow must be positive");
    const double rtot = (p_mean - p_venous) / q;
    WindkesselParams w{gamma * rtot, 0.0, (1.0 - gamma) * rtot};
    w.C = tau / w.Rd;
    out.push_back(w);
  }
  return out;
}

}  // namespace fvg::bc
