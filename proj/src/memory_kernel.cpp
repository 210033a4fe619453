#include "spinbath/memory_kernel.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace spinbath {

KernelParams kernel_params(double aa_dag, double aa) {
  if (!(aa_dag > 0.0))
    throw ModelError("kernel_params: <AA+> must be positive, got " + std::to_string(aa_dag));
  if (aa_dag < std::abs(aa))
    throw ModelError("kernel_params: kernel undefined, <AA+> = " + std::to_string(aa_dag) +
                     " < |<AA>| = " + std::to_string(std::abs(aa)));
  const double root = std::sqrt(aa_dag);
  return KernelParams{(aa_dag - aa) / root, (aa_dag + aa) / root};
}

double evaluate_W(const KernelParams& params, double t) {
  constexpr double pi = 3.14159265358979323846;
  const double u = std::abs(t);
  const double x = params.p * u;
  const double y = params.q * u;
  const double poly =
      1.0 + x * (-4.0 / (3.0 * pi) +
                 x * (1.0 / 8.0 + x * (-4.0 / (45.0 * pi) + x * (1.0 / 48.0))));
  return poly * std::exp(-y * y / 8.0);
}

double kernel_time_constant(const KernelParams& params) {
  if (!(params.q > 0.0))
    throw ModelError("kernel_time_constant: q must be positive");
  // exp(-(qT)^2/8) < 1e-14 for qT > sqrt(8 * 14 ln 10) ~ 16.06
  const double T = 16.5 / params.q;
  const auto f = [&](double t) { return evaluate_W(params, t); };
  double error = 0.0;
  const double tau = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, T, 15, 1e-12, &error);
  return tau;
}

}  // namespace spinbath
