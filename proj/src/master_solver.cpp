#include "spinbath/master_solver.hpp"

#include <cmath>
#include <sstream>

#include "spinbath/rng.hpp"
#include <stdexcept>

namespace spinbath {

UGrid build_u_grid(int n, double dt, int pad_bottom, int pad_top) {
  if (n < 16) throw std::invalid_argument("build_u_grid: n must be >= 16");
  if (!(dt > 0.0)) throw std::invalid_argument("build_u_grid: dt must be positive");
  if (pad_bottom < 0 || pad_top < 0)
    throw std::invalid_argument("build_u_grid: pads must be non-negative");
  UGrid g;
  g.n = n;
  g.l = static_cast<int>(0.338 * n);
  g.pad_bottom = pad_bottom;
  g.pad_top = pad_top;
  g.zero_index = pad_bottom + n - 1 - g.l;
  g.dt = dt;
  const double span = (n - g.l) * dt;
  g.g = 11.0 / (span * span);
  const int total = g.total();
  g.nodes.resize(total);
  for (int j = 0; j < total; ++j) g.nodes[j] = (j - g.zero_index) * dt;
  g.deriv = Eigen::MatrixXd::Zero(total, total);
  for (int j = 0; j < total; ++j)
    for (int k = 0; k < total; ++k) {
      if (j == k) continue;
      const int d = j - k;
      const double sign = (d & 1) ? -1.0 : 1.0;
      g.deriv(j, k) = sign / (d * dt);
    }
  return g;
}

MasterConfig assemble_master_config(const ModelConfig& model, const MomentOptions& mopt,
                                    CConvention convention,
                                    std::vector<std::string>* notes) {
  model.validate();
  MasterConfig cfg;
  cfg.model = model;
  if (model.lambda0 == 0.0) {
    if (notes) notes->push_back("lambda0 = 0: dissipator off, bath statistics skipped");
    return cfg;
  }

  const BathSpec bath = bath_spec_from(model);
  const std::size_t bath_dim = std::size_t{1} << model.n_s;
  const int n_eig = static_cast<int>(std::min<std::size_t>(model.n_eig, bath_dim));
  LanczosOptions lopt;
  lopt.seed = mix_seed(model.seed, 0xba7);
  const BathEnsemble ensemble = thermal_bath_ensemble(bath, n_eig, model.kT, lopt);
  if (notes && n_eig < static_cast<int>(bath_dim) && ensemble.truncation_ratio() > 1e-6) {
    std::ostringstream s;
    s << "thermal truncation ratio p_last/p_first = " << ensemble.truncation_ratio();
    notes->push_back(s.str());
  }

  const BathStatistics stats = bath_statistics(ensemble, bath, convention);
  cfg.sigma_x_mean = stats.sigma_x_mean;
  cfg.C = stats.C;

  const MomentEstimate moments =
      kernel_moments(build_total_hamiltonian(model, bath), 3, ensemble, mopt);
  cfg.kernel = kernel_params(moments.aa_dag, moments.aa);
  if (notes) {
    std::ostringstream s;
    s << "moments <AA+> = " << moments.aa_dag << " +- " << moments.aa_dag_stderr
      << ", <AA> = " << moments.aa << " +- " << moments.aa_stderr
      << " (probes " << moments.probes << ")";
    notes->push_back(s.str());
  }
  return cfg;
}

namespace {

constexpr int kSysDim = 8;

using Map88 = Eigen::Map<Eigen::Matrix<cplx, kSysDim, kSysDim, Eigen::RowMajor>>;
using CMap88 = Eigen::Map<const Eigen::Matrix<cplx, kSysDim, kSysDim, Eigen::RowMajor>>;
using MapChi = Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using CMapChi =
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

namespace {

// Analytic (signed-argument) continuation of the memory function; equals
// evaluate_W for t >= 0.
double kernel_signed(const KernelParams& kp, double t) {
  constexpr double pi = 3.14159265358979323846;
  const double x = kp.p * t;
  const double y = kp.q * t;
  const double poly =
      1.0 + x * (-4.0 / (3.0 * pi) +
                 x * (1.0 / 8.0 + x * (-4.0 / (45.0 * pi) + x * (1.0 / 48.0))));
  return poly * std::exp(-y * y / 8.0);
}

// Outflow pad sized so the damped field is below ~1e-16 at the bottom end.
// No top pad: the +2gu term amplifies anything placed above the nominal
// positive span (the 0.338 split caps the inflow amplification at e^2.87),
// so a kernel that outlives l*dt needs a larger nominal n, not extra nodes.
UGrid engine_grid(const MasterConfig& cfg) {
  const int n = cfg.grid_n;
  const double dt = cfg.model.dt;
  const int l = static_cast<int>(0.338 * n);
  const double g = 11.0 / ((n - l) * dt * (n - l) * dt);
  const double span_bottom = std::sqrt(16.0 * std::log(10.0) / g);
  int pad_bottom = static_cast<int>(std::ceil(span_bottom / dt)) - (n - 1 - l);
  pad_bottom = std::max(pad_bottom, 0);
  const double kernel_support = 17.2 / cfg.kernel.q;  // gaussian factor < 1e-16
  if (cfg.C != 0.0 && kernel_support > l * dt)
    throw ModelError("master engine: memory kernel (q = " + std::to_string(cfg.kernel.q) +
                     ") outlives the positive u-span; increase grid_n to at least " +
                     std::to_string(static_cast<int>(kernel_support / (0.338 * dt)) + 2));
  return build_u_grid(n, dt, pad_bottom, 0);
}

}  // namespace

MasterEngine::MasterEngine(const MasterConfig& cfg)
    : cfg_(cfg), grid_(engine_grid(cfg)) {
  const HamiltonianSpec sys = build_system_hamiltonian(cfg_.model);

  // split static terms from the enveloped pulse terms
  HamiltonianSpec static_part{3, {}, {}};
  for (const auto& term : sys.terms) {
    if (term.envelope < 0) {
      static_part.terms.push_back(term);
    } else {
      HamiltonianSpec one{3, {PauliString{term.coefficient, term.factors, -1}}, {}};
      pulses_.emplace_back(sys.envelopes[term.envelope], HamiltonianAction(one).dense(0.0));
    }
  }
  h_static_ = HamiltonianAction(static_part).dense(0.0);

  HamiltonianSpec s_spec{3,
                         {PauliString{1.0, {{0, PauliAxis::x}}, -1},
                          PauliString{1.0, {{1, PauliAxis::x}}, -1},
                          PauliString{1.0, {{2, PauliAxis::x}}, -1}},
                         {}};
  S_ = HamiltonianAction(s_spec).dense(0.0);
  S2_ = S_ * S_;
  h_static_ += cfg_.model.lambda0 * cfg_.sigma_x_mean * S_;

  deriv_cplx_ = grid_.deriv.cast<cplx>();
  const int total = grid_.total();
  source_.resize(total);
  stretch_.resize(total);
  const bool literal = cfg_.negative_u_source == MasterConfig::NegativeUSource::literal;
  for (int j = 0; j < total; ++j) {
    const double u = grid_.nodes[j];
    const double w = (u >= 0.0 || literal) ? evaluate_W(cfg_.kernel, u)
                                           : kernel_signed(cfg_.kernel, u);
    source_[j] = grid_.damping(u) * w;
    stretch_[j] = 2.0 * grid_.g * u;
  }
}

std::size_t MasterEngine::state_size() const {
  return dissipative() ? kSysDim * kSysDim * (1 + grid_.total()) : kSysDim * kSysDim;
}

ode::FlatState MasterEngine::initial_state() const {
  ode::FlatState y(state_size(), cplx{});
  y[1 * kSysDim + 1] = 1.0;  // |100><100|, system index 1
  return y;
}

Eigen::MatrixXcd MasterEngine::hamiltonian_at(double t) const {
  Eigen::MatrixXcd h = h_static_;
  for (const auto& [env, mat] : pulses_) {
    const double e = env.value(t);
    if (e != 0.0) h += e * mat;
  }
  return h;
}

void MasterEngine::rhs(double t, const ode::FlatState& y, ode::FlatState& dydt) const {
  dydt.resize(y.size());
  CMap88 rho(y.data());
  Map88 drho(dydt.data());

  const Eigen::MatrixXcd h = hamiltonian_at(t);
  const cplx mi(0.0, -1.0);
  drho = mi * (h * rho - rho * h);

  if (!dissipative()) return;

  const int n = grid_.total();
  CMapChi chi(y.data() + kSysDim * kSysDim, n, kSysDim * kSysDim);
  MapChi dchi(dydt.data() + kSysDim * kSysDim, n, kSysDim * kSysDim);

  CMap88 chi0(y.data() + (1 + grid_.zero_index) * kSysDim * kSysDim);
  drho -= cfg_.C * (S2_ * chi0 + chi0 * S2_ - 2.0 * S_ * chi0 * S_);

  // d chi_j/dt = f(u_j) W(|u_j|) rho + (D chi)_j + 2 g u_j chi_j
  dchi.noalias() = deriv_cplx_ * chi;
  Eigen::Map<const Eigen::Matrix<cplx, 1, kSysDim * kSysDim>> rho_row(y.data());
  for (int j = 0; j < n; ++j)
    dchi.row(j) += source_[j] * rho_row + stretch_[j] * chi.row(j);
}

TimeSeries MasterEngine::run(const RunOptions& opt) const {
  const long n_steps = static_cast<long>(std::ceil(cfg_.model.t_end / cfg_.model.dt - 1e-12));
  std::vector<long> samples;
  for (long k = 0; k * opt.sample_every < n_steps; ++k) samples.push_back(k * opt.sample_every);
  samples.push_back(n_steps);

  TimeSeries series;
  series.times.reserve(samples.size());
  for (long k : samples)
    series.times.push_back(k == n_steps ? cfg_.model.t_end : k * cfg_.model.dt);

  auto certify = [&](double t, const ode::FlatState& y) {
    Eigen::MatrixXcd rho = CMap88(y.data());
    const double trace_err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    if (trace_err > opt.trace_tol) {
      std::ostringstream msg;
      msg << "run_master: trace drift " << trace_err << " at t = " << t;
      throw SolverError(msg.str());
    }
    const double min_eig = min_eigenvalue(rho);
    if (min_eig < -opt.positivity_tol) {
      std::ostringstream msg;
      msg << "run_master: negative eigenvalue " << min_eig << " at t = " << t
          << " (positivity should hold; suspect the u-grid discretization)";
      throw SolverError(msg.str());
    }
    series.rho.push_back(std::move(rho));
  };

  auto deriv = [this](double t, const ode::FlatState& y, ode::FlatState& dydt) {
    rhs(t, y, dydt);
  };

  ode::FlatState y = initial_state();
  long step = 0;
  std::size_t next = 0;
  if (samples[next] == 0) {
    certify(0.0, y);
    ++next;
  }
  ode::integrate(deriv, std::move(y), 0.0, cfg_.model.t_end, cfg_.model.dt,
                 [&](double t, const ode::FlatState& state) {
                   ++step;
                   if (next < samples.size() && samples[next] == step) {
                     certify(t, state);
                     ++next;
                   }
                 });
  return series;
}

TimeSeries run_master(const MasterConfig& cfg, const RunOptions& opt) {
  return MasterEngine(cfg).run(opt);
}

}  // namespace spinbath
