#pragma once

#include "spinbath/errors.hpp"

namespace spinbath {

// Parameters of the closed-form memory function
//   W(t) = [1 - 4/(3 pi) (pt) + 1/8 (pt)^2 - 4/(45 pi) (pt)^3 + 1/48 (pt)^4]
//          * exp(-(qt)^2 / 8)
// with p = (<AA+> - <AA>)/sqrt(<AA+>), q = (<AA+> + <AA>)/sqrt(<AA+>).
struct KernelParams {
  double p = 0.0;  // eV, rate-like
  double q = 1.0;  // eV, width-like
};

// Throws ModelError if <AA+> <= 0 or <AA+> < |<AA>| (kernel undefined).
KernelParams kernel_params(double aa_dag, double aa);

// W evaluated at |t|: the even extension W(-u) = W(u) lives here, not at
// call sites.
double evaluate_W(const KernelParams& params, double t);

// tau = integral_0^inf W(t) dt, adaptive quadrature with relative error
// <= 1e-10 over [0, T] where the Gaussian factor is below 1e-14.
double kernel_time_constant(const KernelParams& params);

}  // namespace spinbath
