#include "spinbath/exact_propagator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spinbath/ode_core.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

void ModelConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(omega_eg, "omega_eg");
  positive(omega_p, "omega_p");
  positive(omega_c, "omega_c");
  positive(kT, "kT");
  positive(pulse_width, "pulse_width");
  positive(dt, "dt");
  positive(t_end, "t_end");
  if (lambda0 < 0.0) throw std::invalid_argument("lambda0 must be non-negative");
  if (n_s < 1 || n_s > 23) throw std::invalid_argument("n_s must be in [1, 23]");
  if (n_eig < 1) throw std::invalid_argument("n_eig must be >= 1");
}

BathSpec bath_spec_from(const ModelConfig& cfg) {
  BathSpec spec;
  spec.n_s = cfg.n_s;
  spec.frequencies = sample_debye_frequencies(cfg.n_s, cfg.omega_c, cfg.seed);
  spec.beta = cfg.beta;
  spec.lambda = cfg.lambda;
  spec.lambda0 = cfg.lambda0;
  spec.omega_c = cfg.omega_c;
  spec.seed = cfg.seed;
  return spec;
}

namespace {

// pulse k-th repetition: sites (0,1) at t1, t4 and (1,2) at t2, t3
void append_pulse_terms(HamiltonianSpec& h, const ModelConfig& cfg) {
  struct Slot {
    int s0, s1;
    double center;
  };
  for (int k = 0; k < 3; ++k) {
    const double off = k * cfg.tau_seq;
    const Slot slots[4] = {{0, 1, cfg.t1 + off},
                           {1, 2, cfg.t2 + off},
                           {1, 2, cfg.t3 + off},
                           {0, 1, cfg.t4 + off}};
    for (const Slot& s : slots) {
      const int env = static_cast<int>(h.envelopes.size());
      h.envelopes.push_back(GaussianPulse{cfg.pulse_amplitude, cfg.pulse_width,
                                          s.center, cfg.omega_laser});
      h.terms.push_back({1.0, {{s.s0, PauliAxis::x}, {s.s1, PauliAxis::x}}, env});
    }
  }
}

}  // namespace

HamiltonianSpec build_system_hamiltonian(const ModelConfig& cfg) {
  cfg.validate();
  HamiltonianSpec h;
  h.n_spins = 3;
  h.terms.push_back({cfg.omega_eg / 2.0, {{0, PauliAxis::z}}, -1});
  h.terms.push_back({cfg.omega_p / 2.0, {{1, PauliAxis::z}}, -1});
  h.terms.push_back({cfg.omega_eg / 2.0, {{2, PauliAxis::z}}, -1});
  append_pulse_terms(h, cfg);
  return h;
}

HamiltonianSpec build_total_hamiltonian(const ModelConfig& cfg, const BathSpec& bath) {
  cfg.validate();
  if (bath.n_s != cfg.n_s)
    throw std::invalid_argument("build_total_hamiltonian: bath size mismatch");
  HamiltonianSpec h;
  h.n_spins = 3 + cfg.n_s;
  // system sigma_z
  h.terms.push_back({cfg.omega_eg / 2.0, {{0, PauliAxis::z}}, -1});
  h.terms.push_back({cfg.omega_p / 2.0, {{1, PauliAxis::z}}, -1});
  h.terms.push_back({cfg.omega_eg / 2.0, {{2, PauliAxis::z}}, -1});
  // lambda0 (sx0 + sx1 + sx2) Sigma_x
  for (int mu = 0; mu < 3; ++mu)
    for (int j = 0; j < cfg.n_s; ++j)
      h.terms.push_back({cfg.lambda0, {{mu, PauliAxis::x}, {3 + j, PauliAxis::x}}, -1});
  // bath fields
  for (int j = 0; j < cfg.n_s; ++j) {
    h.terms.push_back({bath.frequencies[j] / 2.0, {{3 + j, PauliAxis::z}}, -1});
    h.terms.push_back({cfg.beta, {{3 + j, PauliAxis::x}}, -1});
  }
  // intra-bath pairs
  for (int i = 0; i < cfg.n_s - 1; ++i)
    for (int j = i + 1; j < cfg.n_s; ++j)
      h.terms.push_back({cfg.lambda, {{3 + i, PauliAxis::x}, {3 + j, PauliAxis::x}}, -1});
  append_pulse_terms(h, cfg);
  return h;
}

HamiltonianSpec build_total_hamiltonian(const ModelConfig& cfg) {
  return build_total_hamiltonian(cfg, bath_spec_from(cfg));
}

std::vector<StateVector> initial_states(const ModelConfig& cfg, const BathEnsemble& ensemble) {
  std::vector<StateVector> out;
  out.reserve(ensemble.eigvecs.size());
  for (const StateVector& m : ensemble.eigvecs) {
    if (m.n_spins != cfg.n_s)
      throw std::invalid_argument("initial_states: ensemble bath size mismatch");
    StateVector psi(3 + m.n_spins);
    // |100>: spin 0 excited -> system index 1
    for (std::size_t b = 0; b < m.dim(); ++b) psi.amp[1 + 8 * b] = m.amp[b];
    out.push_back(std::move(psi));
  }
  return out;
}

namespace {

// sample step indices: 0, sample_every, 2*sample_every, ..., and the final step
std::vector<long> sample_steps(long n_steps, int every) {
  std::vector<long> idx;
  for (long k = 0; k * every < n_steps; ++k) idx.push_back(k * every);
  idx.push_back(n_steps);
  return idx;
}

}  // namespace

TimeSeries run_exact(const ModelConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  if (cfg.n_s > 10 && !opt.allow_large)
    throw ModelError("run_exact: n_s > 10 requires allow_large");

  const BathSpec bath = bath_spec_from(cfg);
  const std::size_t bath_dim = std::size_t{1} << cfg.n_s;
  const int n_eig = static_cast<int>(
      std::min<std::size_t>(cfg.n_eig, bath_dim));

  LanczosOptions lopt;
  lopt.seed = mix_seed(cfg.seed, 0xba7);
  BathEnsemble ensemble = thermal_bath_ensemble(bath, n_eig, cfg.kT, lopt);

  TimeSeries series;
  if (n_eig < cfg.n_eig) {
    std::ostringstream s;
    s << "n_eig clamped to bath dimension " << n_eig;
    series.notes.push_back(s.str());
  }
  if (n_eig < static_cast<int>(bath_dim) &&
      ensemble.truncation_ratio() > opt.truncation_limit) {
    std::ostringstream s;
    s << "thermal truncation ratio p_last/p_first = " << ensemble.truncation_ratio()
      << " exceeds " << opt.truncation_limit << "; retained set may be too small";
    series.notes.push_back(s.str());
  }

  const long n_steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
  if (n_steps * n_eig > opt.step_budget && !opt.allow_large)
    throw ModelError("run_exact: step budget exceeded; pass allow_large");

  const HamiltonianAction H(build_total_hamiltonian(cfg, bath));
  const std::vector<StateVector> psi0 = initial_states(cfg, ensemble);
  const std::vector<long> samples = sample_steps(n_steps, opt.sample_every);

  std::vector<std::vector<Eigen::MatrixXcd>> rho_m(n_eig);
  const std::size_t dim = H.dim();

  parallel_for(n_eig, resolve_threads(opt.threads), [&](int m, int) {
    ode::FlatState hpsi(dim);
    auto deriv = [&](double t, const ode::FlatState& y, ode::FlatState& dydt) {
      H.apply(t, y.data(), hpsi.data());
      for (std::size_t e = 0; e < dim; ++e)
        dydt[e] = cplx(hpsi[e].imag(), -hpsi[e].real());  // -i H psi
    };

    std::vector<Eigen::MatrixXcd>& out = rho_m[m];
    out.reserve(samples.size());
    StateVector view(3 + cfg.n_s);

    auto record = [&](double t, const ode::FlatState& y) {
      view.amp.assign(y.begin(), y.end());
      const double drift = std::abs(view.norm() - 1.0);
      if (drift > opt.norm_tol) {
        std::ostringstream msg;
        msg << "run_exact: norm drift " << drift << " on trajectory m = " << m;
        throw ode::IntegrationError(msg.str(), t);
      }
      out.push_back(reduced_system_density(view, 3));
    };

    long step = 0;
    std::size_t next = 0;
    ode::FlatState y(psi0[m].amp.begin(), psi0[m].amp.end());
    if (samples[next] == 0) {
      record(0.0, y);
      ++next;
    }
    ode::integrate(deriv, std::move(y), 0.0, cfg.t_end, cfg.dt,
                   [&](double t, const ode::FlatState& state) {
                     ++step;
                     if (next < samples.size() && samples[next] == step) {
                       record(t, state);
                       ++next;
                     }
                   });
  });

  series.times.reserve(samples.size());
  for (long k : samples)
    series.times.push_back(k == n_steps ? cfg.t_end : k * cfg.dt);
  series.rho.assign(samples.size(), Eigen::MatrixXcd::Zero(8, 8));
  for (int m = 0; m < n_eig; ++m)
    for (std::size_t s = 0; s < samples.size(); ++s)
      series.rho[s] += ensemble.weights[m] * rho_m[m][s];
  return series;
}

}  // namespace spinbath
