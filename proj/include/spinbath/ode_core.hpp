#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinbath::ode {

using cplx = std::complex<double>;

// Contiguous complex state; the layout is owned by the client module.
using FlatState = std::vector<cplx>;

struct IntegrationError : std::runtime_error {
  double t;
  IntegrationError(const std::string& msg, double t_)
      : std::runtime_error(msg + " at t = " + std::to_string(t_)), t(t_) {}
};

// 12-stage 8th-order explicit Runge-Kutta core of the Dormand-Prince 8(5,3)
// pair (Hairer/Norsett/Wanner coefficients). The embedded error estimates are
// not used: the step is fixed. Kept verbatim so that any implementation using
// this table reproduces trajectories bit for bit.
namespace rk8 {

inline constexpr int stages = 12;

inline constexpr std::array<double, stages> c = {
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510e+00,
    0.281649658092772603273242802490e+00,
    0.333333333333333333333333333333e+00,
    0.25e+00,
    0.307692307692307692307692307692e+00,
    0.651282051282051282051282051282e+00,
    0.6e+00,
    0.857142857142857142857142857142e+00,
    1.0,
};

inline constexpr std::array<double, stages> b = {
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566e0,
    1.89151789931450038304281599044e0,
    -5.8012039600105847814672114227e0,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
};

// a[i][j], j < i; rows of zeros omitted from the literature are kept as 0.
inline constexpr std::array<std::array<double, stages>, stages> a = {{
    {},
    {5.26001519587677318785587544488e-2},
    {1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2},
    {2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2},
    {2.41365134159266685502369798665e-1, 0.0, -8.84549479328286085344864962717e-1,
     9.24834003261792003115737966543e-1},
    {3.7037037037037037037037037037e-2, 0.0, 0.0, 1.70828608729473871279604482173e-1,
     1.25467687566822425016691814123e-1},
    {3.7109375e-2, 0.0, 0.0, 1.70252211019544039314978060272e-1,
     6.02165389804559606850219397283e-2, -1.7578125e-2},
    {3.70920001185047927108779319836e-2, 0.0, 0.0, 1.70383925712239993810214054705e-1,
     1.07262030446373284651809199168e-1, -1.53194377486244017527936158236e-2,
     8.27378916381402288758473766002e-3},
    {6.24110958716075717114429577812e-1, 0.0, 0.0, -3.36089262944694129406857109825e0,
     -8.68219346841726006818189891453e-1, 2.75920996994467083049415600797e1,
     2.01540675504778934086186788979e1, -4.34898841810699588477366255144e1},
    {4.77662536438264365890433908527e-1, 0.0, 0.0, -2.48811461997166764192642586468e0,
     -5.90290826836842996371446475743e-1, 2.12300514481811942347288949897e1,
     1.52792336328824235832596922938e1, -3.32882109689848629194453265587e1,
     -2.03312017085086261358222928593e-2},
    {-9.3714243008598732571704021658e-1, 0.0, 0.0, 5.18637242884406370830023853209e0,
     1.09143734899672957818500254654e0, -8.14978701074692612513997267357e0,
     -1.85200656599969598641566180701e1, 2.27394870993505042818970056734e1,
     2.49360555267965238987089396762e0, -3.0467644718982195003823669022e0},
    {2.27331014751653820792359768449e0, 0.0, 0.0, -1.05344954667372501984066689879e1,
     -2.00087205822486249909675718444e0, -1.79589318631187989172765950534e1,
     2.79488845294199600508499808837e1, -2.85899827713502369474065508674e0,
     -8.87285693353062954433549289258e0, 1.23605671757943030647266201528e1,
     6.43392746015763530355970484046e-1},
}};

}  // namespace rk8

// Reusable stage buffers; resized once per trajectory.
class Rk8Workspace {
 public:
  void resize(std::size_t n) {
    for (auto& v : k_) v.assign(n, cplx{});
    stage_.assign(n, cplx{});
  }
  std::array<FlatState, rk8::stages> k_;
  FlatState stage_;
};

// One fixed step: out = y advanced from t by dt. `out` may alias `y`.
template <class Deriv>
void rk8_step(Deriv&& deriv, const FlatState& y, double t, double dt,
              Rk8Workspace& w, FlatState& out) {
  const std::size_t n = y.size();
  if (w.stage_.size() != n) w.resize(n);

  deriv(t, y, w.k_[0]);
  for (int i = 1; i < rk8::stages; ++i) {
    const auto& row = rk8::a[i];
    for (std::size_t e = 0; e < n; ++e) {
      cplx acc = y[e];
      for (int j = 0; j < i; ++j)
        if (row[j] != 0.0) acc += (dt * row[j]) * w.k_[j][e];
      w.stage_[e] = acc;
    }
    deriv(t + rk8::c[i] * dt, w.stage_, w.k_[i]);
  }

  out.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    cplx acc = y[e];
    for (int j = 0; j < rk8::stages; ++j)
      if (rk8::b[j] != 0.0) acc += (dt * rk8::b[j]) * w.k_[j][e];
    out[e] = acc;
  }
}

template <class Deriv>
FlatState rk8_step(Deriv&& deriv, const FlatState& y, double t, double dt) {
  Rk8Workspace w;
  FlatState out;
  rk8_step(deriv, y, t, dt, w, out);
  return out;
}

// Fixed-step propagation from t0 to t1. After every step the observer is
// invoked with (t, state); it runs exactly ceil((t1-t0)/dt) times. Step times
// are computed as t0 + k*dt (no accumulation drift); a short final step lands
// on t1 exactly when dt does not divide the interval.
template <class Deriv, class Observer>
FlatState integrate(Deriv&& deriv, FlatState y, double t0, double t1, double dt,
                    Observer&& observe) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (t1 <= t0) return y;
  const double span = t1 - t0;
  long n_steps = static_cast<long>(std::ceil(span / dt - 1e-12));
  if (n_steps < 1) n_steps = 1;

  Rk8Workspace w;
  for (long k = 0; k < n_steps; ++k) {
    const double tk = t0 + static_cast<double>(k) * dt;
    const bool last = (k == n_steps - 1);
    const double h = last ? t1 - tk : dt;
    rk8_step(deriv, y, tk, h, w, y);

    double norm_sq = 0.0;
    for (const cplx& v : y) norm_sq += std::norm(v);
    const double t_next = last ? t1 : t0 + static_cast<double>(k + 1) * dt;
    if (!std::isfinite(norm_sq))
      throw IntegrationError("integrate: state became non-finite", t_next);
    observe(t_next, static_cast<const FlatState&>(y));
  }
  return y;
}

}  // namespace spinbath::ode
