#include "spinbath/bath_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

using Vec = std::vector<cplx>;

cplx vdot(const Vec& a, const Vec& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void axpy(Vec& y, cplx alpha, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double vnorm(const Vec& a) {
  double s = 0.0;
  for (const cplx& v : a) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace

double debye_inverse_cdf(double u, double omega_c) {
  return omega_c * std::cbrt(u);
}

std::vector<double> sample_debye_frequencies(int n_s, double omega_c, std::uint64_t seed) {
  if (n_s < 1) throw std::invalid_argument("sample_debye_frequencies: n_s must be >= 1");
  if (!(omega_c > 0.0)) throw std::invalid_argument("sample_debye_frequencies: omega_c must be positive");
  SplitMix64 rng(seed);
  std::vector<double> out(n_s);
  for (double& w : out) w = debye_inverse_cdf(rng.uniform_open0(), omega_c);
  return out;
}

HamiltonianSpec build_bath_hamiltonian(const BathSpec& spec) {
  if (spec.n_s < 1) throw std::invalid_argument("build_bath_hamiltonian: n_s must be >= 1");
  if (static_cast<int>(spec.frequencies.size()) != spec.n_s)
    throw std::invalid_argument("build_bath_hamiltonian: need one frequency per bath spin");
  HamiltonianSpec h;
  h.n_spins = spec.n_s;
  for (int j = 0; j < spec.n_s; ++j) {
    h.terms.push_back({spec.frequencies[j] / 2.0, {{j, PauliAxis::z}}, -1});
    h.terms.push_back({spec.beta, {{j, PauliAxis::x}}, -1});
  }
  for (int i = 0; i < spec.n_s - 1; ++i)
    for (int j = i + 1; j < spec.n_s; ++j)
      h.terms.push_back({spec.lambda, {{i, PauliAxis::x}, {j, PauliAxis::x}}, -1});
  return h;
}

Eigen::MatrixXcd BathEnsemble::density() const {
  if (weights.empty() || weights.size() != eigvecs.size())
    throw std::logic_error("BathEnsemble::density: weights not assigned");
  const std::size_t d = eigvecs.front().dim();
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t m = 0; m < eigvecs.size(); ++m) {
    Eigen::Map<const Eigen::VectorXcd> v(eigvecs[m].amp.data(), d);
    b.noalias() += weights[m] * v * v.adjoint();
  }
  return b;
}

double BathEnsemble::truncation_ratio() const {
  if (weights.empty()) throw std::logic_error("BathEnsemble::truncation_ratio: weights not assigned");
  return weights.back() / weights.front();
}

BathEnsemble lowest_eigenpairs(const HamiltonianSpec& bath_h, int n_eig,
                               const LanczosOptions& opt) {
  const HamiltonianAction H(bath_h);
  const std::size_t dim = H.dim();
  if (n_eig < 1 || static_cast<std::size_t>(n_eig) > dim)
    throw std::invalid_argument("lowest_eigenpairs: need 1 <= n_eig <= 2^n_s");

  std::vector<Vec> locked;
  std::vector<double> locked_vals;
  SplitMix64 rng(opt.seed);
  double worst_pending = 0.0;

  auto project_out_locked = [&](Vec& w) {
    for (const Vec& u : locked) axpy(w, -vdot(u, w), u);
  };

  for (int restart = 0; restart < opt.max_restarts &&
                        locked.size() < static_cast<std::size_t>(n_eig);
       ++restart) {
    // random start in the complement of the locked space
    Vec v(dim);
    double vn = 0.0;
    do {
      for (cplx& x : v) x = cplx(rng.symmetric(), rng.symmetric());
      project_out_locked(v);
      project_out_locked(v);
      vn = vnorm(v);
    } while (vn < 1e-8);
    for (cplx& x : v) x /= vn;

    const int m_max = static_cast<int>(
        std::min<std::size_t>(dim - locked.size(), opt.max_subspace));
    std::vector<Vec> basis;
    basis.reserve(m_max);
    std::vector<double> alpha, beta;
    Vec w(dim);

    for (int m = 0; m < m_max; ++m) {
      basis.push_back(v);
      H.apply(0.0, basis[m].data(), w.data());
      if (m > 0) axpy(w, -beta[m - 1], basis[m - 1]);
      const double a = std::real(vdot(basis[m], w));
      alpha.push_back(a);
      axpy(w, -a, basis[m]);
      // full reorthogonalization, two sweeps
      for (int pass = 0; pass < 2; ++pass) {
        project_out_locked(w);
        for (const Vec& u : basis) axpy(w, -vdot(u, w), u);
      }
      const double b = vnorm(w);

      const int need = n_eig - static_cast<int>(locked.size());
      const bool exhausted = (m == m_max - 1) || b < 1e-13;
      if ((m + 1) % 5 == 0 || exhausted || m + 1 >= need) {
        const int mm = m + 1;
        Eigen::VectorXd d(mm), sub(std::max(mm - 1, 0));
        for (int i = 0; i < mm; ++i) d[i] = alpha[i];
        for (int i = 0; i + 1 < mm; ++i) sub[i] = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, sub);
        int approx_ok = 0;
        for (int i = 0; i < std::min(need, mm); ++i) {
          if (b * std::abs(es.eigenvectors()(mm - 1, i)) <= 0.5 * opt.tol)
            ++approx_ok;
          else
            break;
        }
        if (approx_ok >= std::min(need, mm) || exhausted) {
          // assemble Ritz vectors, lock the ones whose explicit residual passes
          const int n_try = std::min(need, mm);
          for (int i = 0; i < n_try; ++i) {
            Vec y(dim, cplx{});
            for (int k = 0; k < mm; ++k) axpy(y, es.eigenvectors()(k, i), basis[k]);
            project_out_locked(y);
            const double yn = vnorm(y);
            if (yn < 0.5) continue;  // collapsed onto locked space, skip
            for (cplx& x : y) x /= yn;
            Vec hy(dim);
            H.apply(0.0, y.data(), hy.data());
            const double theta = std::real(vdot(y, hy));
            axpy(hy, -theta, y);
            const double resid = vnorm(hy);
            if (resid <= opt.tol) {
              locked.push_back(std::move(y));
              locked_vals.push_back(theta);
            } else {
              worst_pending = std::max(worst_pending, resid);
            }
          }
          break;  // restart with a fresh Krylov space
        }
      }
      if (exhausted) break;
      beta.push_back(b);
      v = w;
      for (cplx& x : v) x /= b;
    }
  }

  if (locked.size() < static_cast<std::size_t>(n_eig)) {
    std::ostringstream msg;
    msg << "lowest_eigenpairs: converged " << locked.size() << " of " << n_eig
        << " pairs; worst residual " << worst_pending << " (tol " << opt.tol << ")";
    throw SolverError(msg.str());
  }

  std::vector<std::size_t> order(locked.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return locked_vals[a] < locked_vals[b]; });

  BathEnsemble out;
  for (int i = 0; i < n_eig; ++i) {
    out.energies.push_back(locked_vals[order[i]]);
    StateVector s(bath_h.n_spins);
    s.amp = std::move(locked[order[i]]);
    out.eigvecs.push_back(std::move(s));
  }
  return out;
}

std::vector<double> thermal_weights(const std::vector<double>& energies, double kT) {
  if (!(kT > 0.0)) throw std::invalid_argument("thermal_weights: kT must be positive");
  if (energies.empty()) throw std::invalid_argument("thermal_weights: no energies");
  const double e0 = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  double z = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    w[i] = std::exp(-(energies[i] - e0) / kT);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

BathEnsemble thermal_bath_ensemble(const BathSpec& spec, int n_eig, double kT,
                                   const LanczosOptions& opt) {
  BathEnsemble e = lowest_eigenpairs(build_bath_hamiltonian(spec), n_eig, opt);
  e.weights = thermal_weights(e.energies, kT);
  e.kT = kT;
  return e;
}

BathStatistics bath_statistics(const BathEnsemble& ensemble, const BathSpec& spec,
                               CConvention convention) {
  if (ensemble.weights.size() != ensemble.eigvecs.size())
    throw std::invalid_argument("bath_statistics: ensemble has no thermal weights");
  double mean = 0.0, mean_sq = 0.0;
  StateVector acc, tmp;
  for (std::size_t m = 0; m < ensemble.eigvecs.size(); ++m) {
    const StateVector& vm = ensemble.eigvecs[m];
    acc.n_spins = vm.n_spins;
    acc.amp.assign(vm.dim(), cplx{});
    for (int site = 0; site < vm.n_spins; ++site) {
      apply_pauli(vm, PauliAxis::x, site, tmp);
      for (std::size_t j = 0; j < vm.dim(); ++j) acc.amp[j] += tmp.amp[j];
    }
    cplx sx{};
    for (std::size_t j = 0; j < vm.dim(); ++j) sx += std::conj(vm.amp[j]) * acc.amp[j];
    mean += ensemble.weights[m] * sx.real();
    mean_sq += ensemble.weights[m] * acc.norm_sq();
  }
  BathStatistics out;
  out.sigma_x_mean = mean;
  const double raw = spec.lambda0 * spec.lambda0 * mean_sq;
  out.C = (convention == CConvention::raw)
              ? raw
              : spec.lambda0 * spec.lambda0 * (mean_sq - mean * mean);
  return out;
}

// ---------------------------------------------------------------------------
// Liouville-space moment estimator
// ---------------------------------------------------------------------------

namespace {

// A = Q L Q acting on row-major D x D matrices, with the Pauli-string
// structure of H exploited: the static z-part is a single diagonal pass and
// every other string is one row-gather plus one column-gather sweep.
class LiouvilleSpace {
 public:
  LiouvilleSpace(const HamiltonianSpec& total, int n_system_spins,
                 const Eigen::MatrixXcd& bath_density)
      : ds_(std::size_t{1} << n_system_spins),
        D_(std::size_t{1} << total.n_spins),
        db_(D_ >> n_system_spins),
        B_(bath_density) {
    if (n_system_spins < 1 || n_system_spins >= total.n_spins)
      throw std::invalid_argument("kernel_moments: bad system/bath split");
    if (static_cast<std::size_t>(B_.rows()) != db_)
      throw std::invalid_argument("kernel_moments: bath density has wrong dimension");
    total.validate();
    for (const auto& term : total.terms) {
      if (term.envelope >= 0) continue;  // L uses the field-free Hamiltonian
      bool all_z = true;
      std::uint64_t flip = 0, sign = 0;
      cplx base = term.coefficient;
      for (const auto& f : term.factors) {
        const std::uint64_t bit = std::uint64_t{1} << f.site;
        switch (f.axis) {
          case PauliAxis::x: flip |= bit; all_z = false; break;
          case PauliAxis::y: flip |= bit; sign |= bit; base *= cplx(0, 1); all_z = false; break;
          case PauliAxis::z: sign |= bit; base *= -1.0; break;
        }
      }
      if (all_z) {
        if (diag_.empty()) diag_.assign(D_, 0.0);
        for (std::size_t j = 0; j < D_; ++j)
          diag_[j] += (std::popcount(j & sign) & 1) ? -base.real() : base.real();
      } else {
        Term t;
        t.flip = flip;
        if (base.imag() == 0.0) {
          t.real_phase.resize(D_);
          for (std::size_t j = 0; j < D_; ++j)
            t.real_phase[j] = (std::popcount(j & sign) & 1) ? -base.real() : base.real();
        } else {
          t.phase.resize(D_);
          for (std::size_t j = 0; j < D_; ++j)
            t.phase[j] = (std::popcount(j & sign) & 1) ? -base : base;
        }
        terms_.push_back(std::move(t));
      }
    }
    if (diag_.empty()) diag_.assign(D_, 0.0);
  }

  std::size_t D() const { return D_; }
  std::size_t size() const { return D_ * D_; }

  // out = [H, X]. Row-fused: for each output row the left-multiplication
  // gathers one source row per string and the right-multiplication permutes
  // within the (cache-resident) row itself, so X streams through memory once
  // per string instead of four times. The xor permutation maps aligned
  // blocks of size 2^ctz(F) to aligned blocks, so it runs as contiguous
  // stretches; phases are real for every x/z string (no sigma_y here), which
  // keeps the inner loop in real-times-complex arithmetic.
  void commutator(const cplx* X, cplx* out) const {
    const std::size_t D = D_;
    for (std::size_t i = 0; i < D; ++i) {
      cplx* orow = out + i * D;
      const cplx* xrow = X + i * D;
      const double di = diag_[i];
      const double* dg = diag_.data();
      for (std::size_t k = 0; k < D; ++k) orow[k] = (di - dg[k]) * xrow[k];
      for (const Term& t : terms_) {
        const std::uint64_t F = t.flip;
        const cplx* lsrc = X + (i ^ F) * D;
        if (!t.real_phase.empty()) {
          const double* ph = t.real_phase.data();
          const double cl = ph[i ^ F];
          for (std::size_t k = 0; k < D; ++k) orow[k] += cl * lsrc[k];
          const std::size_t run = std::size_t{1} << std::min<int>(std::countr_zero(F), 30);
          for (std::size_t k0 = 0; k0 < D; k0 += run) {
            const cplx* src = xrow + (k0 ^ F);
            const double* p = ph + k0;
            cplx* o = orow + k0;
            for (std::size_t r = 0; r < run; ++r) o[r] -= p[r] * src[r];
          }
        } else {
          const cplx* ph = t.phase.data();
          const cplx cl = ph[i ^ F];
          for (std::size_t k = 0; k < D; ++k)
            orow[k] += cl * lsrc[k] - ph[k] * xrow[k ^ F];
        }
      }
    }
  }

  // X -= Tr_b(X) (x) B, in place
  void project_Q(cplx* X) const {
    Eigen::MatrixXcd xi = Eigen::MatrixXcd::Zero(ds_, ds_);
    for (std::size_t b = 0; b < db_; ++b)
      for (std::size_t s = 0; s < ds_; ++s) {
        const cplx* row = X + (s + ds_ * b) * D_ + ds_ * b;
        for (std::size_t sp = 0; sp < ds_; ++sp) xi(s, sp) += row[sp];
      }
    for (std::size_t b = 0; b < db_; ++b)
      for (std::size_t s = 0; s < ds_; ++s) {
        cplx* row = X + (s + ds_ * b) * D_;
        for (std::size_t bp = 0; bp < db_; ++bp) {
          const cplx w = B_(b, bp);
          for (std::size_t sp = 0; sp < ds_; ++sp) row[sp + ds_ * bp] -= xi(s, sp) * w;
        }
      }
  }

  // out = A X = Q [H, Q X]; clobbers `scratch`
  void apply_A(const cplx* X, cplx* out, cplx* scratch) const {
    std::memcpy(scratch, X, size() * sizeof(cplx));
    project_Q(scratch);
    commutator(scratch, out);
    project_Q(out);
  }

 private:
  struct Term {
    std::uint64_t flip = 0;
    std::vector<cplx> phase;         // base * (-1)^popcount(j & sign), j = 0..D-1
    std::vector<double> real_phase;  // used instead when the base is real
  };

  std::size_t ds_, D_, db_;
  std::vector<double> diag_;
  std::vector<Term> terms_;
  Eigen::MatrixXcd B_;
};

}  // namespace

MomentEstimate kernel_moments(const HamiltonianSpec& total, int n_system_spins,
                              const BathEnsemble& ensemble, const MomentOptions& opt) {
  const LiouvilleSpace A(total, n_system_spins, ensemble.density());
  const std::size_t D = A.D();
  const std::size_t sz = A.size();
  const double inv = 1.0 / (static_cast<double>(D) * static_cast<double>(D));

  MomentEstimate est;

  if (opt.method == MomentMethod::exact_basis) {
    std::vector<cplx> X(sz), Y(sz), Z(sz), scratch(sz);
    double aad = 0.0;
    cplx aa{};
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) {
        std::fill(X.begin(), X.end(), cplx{});
        X[i * D + j] = 1.0;
        A.apply_A(X.data(), Y.data(), scratch.data());
        for (const cplx& v : Y) aad += std::norm(v);
        A.apply_A(Y.data(), Z.data(), scratch.data());
        aa += Z[i * D + j];
      }
    est.aa_dag = aad * inv;
    est.aa = aa.real() * inv;
    est.aa_imag = aa.imag() * inv;
    est.probes = static_cast<int>(D * D);
    return est;
  }

  if (opt.probes < 2)
    throw std::invalid_argument("kernel_moments: stochastic method needs probes >= 2");
  const int R = opt.probes;
  // 4 row-major D x D buffers per worker; keep the footprint bounded
  int workers = std::min(resolve_threads(opt.threads), 8);
  workers = std::max(1, std::min<int>(workers, static_cast<int>(
                              (std::size_t{2} << 30) / (4 * sz * sizeof(cplx)) + 1)));

  std::vector<double> v_aad(R);
  std::vector<cplx> v_aa(R);
  struct Buffers {
    std::vector<cplx> X, Y, S, scratch;
  };
  std::vector<Buffers> buf(workers);

  parallel_for(R, workers, [&](int r, int w) {
    Buffers& b = buf[w];
    if (b.X.size() != sz) {
      b.X.resize(sz);
      b.Y.resize(sz);
      b.S.resize(sz);
      b.scratch.resize(sz);
    }
    SplitMix64 g(mix_seed(opt.seed, static_cast<std::uint64_t>(r)));
    std::uint64_t bits = 0;
    int left = 0;
    for (std::size_t e = 0; e < sz; ++e) {
      if (left == 0) {
        bits = g.next();
        left = 64;
      }
      b.X[e] = (bits & 1) ? cplx(1.0) : cplx(-1.0);
      bits >>= 1;
      --left;
    }
    A.apply_A(b.X.data(), b.S.data(), b.scratch.data());  // S = A X
    double n2 = 0.0;
    for (const cplx& v : b.S) n2 += std::norm(v);
    v_aad[r] = n2 * inv;
    A.apply_A(b.S.data(), b.Y.data(), b.scratch.data());  // Y = A A X
    cplx dot{};
    for (std::size_t e = 0; e < sz; ++e) dot += b.X[e] * b.Y[e];  // X is real
    v_aa[r] = dot * inv;
  });

  double mean_aad = 0.0;
  cplx mean_aa{};
  for (int r = 0; r < R; ++r) {
    mean_aad += v_aad[r];
    mean_aa += v_aa[r];
  }
  mean_aad /= R;
  mean_aa /= static_cast<double>(R);
  double var_aad = 0.0, var_aa = 0.0;
  for (int r = 0; r < R; ++r) {
    var_aad += (v_aad[r] - mean_aad) * (v_aad[r] - mean_aad);
    const double d = v_aa[r].real() - mean_aa.real();
    var_aa += d * d;
  }
  var_aad /= (R - 1);
  var_aa /= (R - 1);

  est.aa_dag = mean_aad;
  est.aa = mean_aa.real();
  est.aa_imag = mean_aa.imag();
  est.aa_dag_stderr = std::sqrt(var_aad / R);
  est.aa_stderr = std::sqrt(var_aa / R);
  est.probes = R;

  if (opt.max_stderr > 0.0 &&
      (est.aa_dag_stderr > opt.max_stderr || est.aa_stderr > opt.max_stderr)) {
    std::ostringstream msg;
    msg << "kernel_moments: standard error (" << est.aa_dag_stderr << ", "
        << est.aa_stderr << ") above tolerance " << opt.max_stderr
        << "; increase probes (R = " << R << ")";
    throw ModelError(msg.str());
  }
  return est;
}

}  // namespace spinbath
