#pragma once

#include <span>
#include <vector>

#include "fvgraph/ad/tape.hpp"
#include "fvgraph/bc/boundary_spec.hpp"

namespace fvg::bc {

struct WindkesselState {
  double pc = 0.0;
  double po = 0.0;
};

/// Throws InvalidWindkesselParams unless Rp, C, Rd are all finite and positive.
void validate(const WindkesselParams& p);

/// Capacitor update over dt at constant flow q, then po = pc' + Rp q.
WindkesselState windkessel_step(double pc, const WindkesselParams& p, double q, double dt, WindkesselScheme s);

/// Partial derivatives of (pc', po) with respect to (pc, Rp, C, Rd, q).
struct WindkesselJacobian {
  double pc[5];
  double po[5];
};
WindkesselJacobian windkessel_jacobian(double pc, const WindkesselParams& p, double q, double dt, WindkesselScheme s);

/// Differentiable step; every input has size 1. Output is [pc', po].
ad::Var windkessel_step(const ad::Var& pc, const ad::Var& rp, const ad::Var& c, const ad::Var& rd, const ad::Var& q,
                        double dt, WindkesselScheme s);

/// Empirical RCR initialisation from an inlet pressure waveform sampled at `t`
/// (one or more periods) and the mean flow of every outlet.
/// R_tot = (mean P - P_v)/mean Q, Rp = gamma R_tot, Rd = (1 - gamma) R_tot, C = tau / Rd,
/// tau from a log-linear fit of P - P_v over the final `diastolic_fraction` of the samples.
/// Throws DecayFitError when the fitted decay is not positive.
std::vector<WindkesselParams> estimate_rcr_initial(std::span<const double> t, std::span<const double> p_inlet,
                                                   std::span<const double> q_mean, double gamma = 0.15,
                                                   double p_venous = 0.0, double diastolic_fraction = 0.4);

/// Least-squares decay constant of y = A exp(-t / tau) through log-linear regression.
double fit_decay_time(std::span<const double> t, std::span<const double> y);

}  // namespace fvg::bc
