#include "spinbath/spin_kit.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace spinbath {

namespace {

constexpr int kMaxSpins = 26;  // 2^26 complex amplitudes = 1 GiB

// Accumulates w * (masked Pauli string) |in> into out.
// String action: out[j ^ flip] += w * (-1)^popcount(j & sign) * in[j].
void accumulate_masked(std::uint64_t flip, std::uint64_t sign, cplx w,
                       const cplx* in, cplx* out, std::size_t dim) {
  if (flip == 0 && sign == 0) {
    for (std::size_t j = 0; j < dim; ++j) out[j] += w * in[j];
    return;
  }
  for (std::size_t j = 0; j < dim; ++j) {
    const cplx v = (std::popcount(j & sign) & 1) ? -in[j] : in[j];
    out[j ^ flip] += w * v;
  }
}

// flip/sign masks and phase for a single factor.
// sigma_x: flips the bit.
// sigma_y: flips the bit with phase i(-1)^bit  (|0> -> +i|1>, |1> -> -i|0>).
// sigma_z: multiplies by -(-1)^bit             (bit 1 = +1 eigenvalue).
struct Masks {
  std::uint64_t flip = 0, sign = 0;
  cplx base{1.0, 0.0};
};

Masks masks_for(const std::vector<PauliFactor>& factors) {
  Masks m;
  for (const auto& f : factors) {
    const std::uint64_t bit = std::uint64_t{1} << f.site;
    switch (f.axis) {
      case PauliAxis::x:
        m.flip |= bit;
        break;
      case PauliAxis::y:
        m.flip |= bit;
        m.sign |= bit;
        m.base *= cplx(0.0, 1.0);
        break;
      case PauliAxis::z:
        m.sign |= bit;
        m.base *= -1.0;
        break;
    }
  }
  return m;
}

}  // namespace

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const cplx& a : amp) s += std::norm(a);
  return s;
}

void HamiltonianSpec::validate() const {
  if (n_spins < 1 || n_spins > kMaxSpins)
    throw std::invalid_argument("HamiltonianSpec: n_spins out of range");
  for (const auto& term : terms) {
    std::uint64_t seen = 0;
    for (const auto& f : term.factors) {
      if (f.site < 0 || f.site >= n_spins)
        throw std::invalid_argument("PauliString: site " + std::to_string(f.site) +
                                    " out of range for " + std::to_string(n_spins) + " spins");
      const std::uint64_t bit = std::uint64_t{1} << f.site;
      if (seen & bit)
        throw std::invalid_argument("PauliString: duplicate site " + std::to_string(f.site));
      seen |= bit;
    }
    if (term.envelope >= 0 &&
        static_cast<std::size_t>(term.envelope) >= envelopes.size())
      throw std::invalid_argument("PauliString: envelope id " +
                                  std::to_string(term.envelope) + " does not exist");
  }
  for (const auto& env : envelopes) {
    if (!(env.width > 0.0))
      throw std::invalid_argument("GaussianPulse: width must be positive");
  }
}

void apply_pauli(const StateVector& in, PauliAxis axis, int site, StateVector& out) {
  if (site < 0 || site >= in.n_spins)
    throw std::invalid_argument("apply_pauli: site " + std::to_string(site) +
                                " out of range for " + std::to_string(in.n_spins) + " spins");
  out.n_spins = in.n_spins;
  out.amp.assign(in.dim(), cplx{});
  const Masks m = masks_for({PauliFactor{site, axis}});
  accumulate_masked(m.flip, m.sign, m.base, in.amp.data(), out.amp.data(), in.dim());
}

StateVector apply_pauli(const StateVector& in, PauliAxis axis, int site) {
  StateVector out;
  apply_pauli(in, axis, site, out);
  return out;
}

HamiltonianAction::HamiltonianAction(HamiltonianSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t n = dim();
  bool have_diag = false;
  for (const auto& term : spec_.terms) {
    bool all_z = true;
    for (const auto& f : term.factors)
      if (f.axis != PauliAxis::z) all_z = false;
    if (all_z && term.envelope < 0) {
      // static diagonal: fold into one pass
      if (!have_diag) {
        static_diag_.assign(n, 0.0);
        have_diag = true;
      }
      const Masks m = masks_for(term.factors);
      const double base = term.coefficient * m.base.real();
      for (std::size_t j = 0; j < n; ++j)
        static_diag_[j] += (std::popcount(j & m.sign) & 1) ? -base : base;
    } else {
      const Masks m = masks_for(term.factors);
      terms_.push_back(MaskedTerm{m.flip, m.sign, m.base * term.coefficient, term.envelope});
    }
  }
}

void HamiltonianAction::apply(double t, const cplx* in, cplx* out) const {
  const std::size_t n = dim();
  if (!static_diag_.empty()) {
    const double* d = static_diag_.data();
    for (std::size_t j = 0; j < n; ++j) out[j] = d[j] * in[j];
  } else {
    for (std::size_t j = 0; j < n; ++j) out[j] = cplx{};
  }
  for (const auto& term : terms_) {
    cplx w = term.base;
    if (term.envelope >= 0) {
      const double e = spec_.envelopes[term.envelope].value(t);
      if (e == 0.0) continue;  // Gaussian underflowed far from the pulse
      w *= e;
    }
    accumulate_masked(term.flip, term.sign, w, in, out, n);
  }
}

void HamiltonianAction::apply(double t, const StateVector& in, StateVector& out) const {
  if (in.n_spins != spec_.n_spins)
    throw std::invalid_argument("HamiltonianAction: state has wrong spin count");
  out.n_spins = in.n_spins;
  out.amp.resize(in.dim());
  apply(t, in.amp.data(), out.amp.data());
}

Eigen::MatrixXcd HamiltonianAction::dense(double t) const {
  const std::size_t n = dim();
  Eigen::MatrixXcd h(n, n);
  StateVector basis(spec_.n_spins), column(spec_.n_spins);
  for (std::size_t j = 0; j < n; ++j) {
    basis.amp.assign(n, cplx{});
    basis.amp[j] = 1.0;
    apply(t, basis, column);
    for (std::size_t i = 0; i < n; ++i) h(i, j) = column.amp[i];
  }
  return h;
}

void apply_hamiltonian(const HamiltonianSpec& spec, double t,
                       const StateVector& in, StateVector& out) {
  HamiltonianAction(spec).apply(t, in, out);
}

Eigen::MatrixXcd reduced_system_density(const StateVector& psi, int n_system_spins) {
  if (n_system_spins < 1 || n_system_spins > psi.n_spins)
    throw std::invalid_argument("reduced_system_density: bad system size");
  const std::size_t ds = std::size_t{1} << n_system_spins;
  const std::size_t db = psi.dim() >> n_system_spins;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ds, ds);
  for (std::size_t b = 0; b < db; ++b) {
    const cplx* block = psi.amp.data() + b * ds;
    for (std::size_t s = 0; s < ds; ++s) {
      const cplx as = block[s];
      if (as == cplx{}) continue;
      for (std::size_t sp = 0; sp < ds; ++sp)
        rho(s, sp) += as * std::conj(block[sp]);
    }
  }
  return rho;
}

std::array<Eigen::Matrix2cd, 3> qubit_marginals(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != 8 || rho.cols() != 8)
    throw std::invalid_argument("qubit_marginals: density must be 8x8");
  std::array<Eigen::Matrix2cd, 3> out;
  for (int spin = 0; spin < 3; ++spin) {
    const int keep = 1 << spin;
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < 2; ++ap)
        for (int r = 0; r < 4; ++r) {
          // scatter the two traced bits around the kept one
          int low = r & (keep - 1);
          int high = (r ^ low) << 1;
          int rest = high | low;
          m(a, ap) += rho(rest | (a * keep), rest | (ap * keep));
        }
    out[spin] = m;
  }
  return out;
}

double hermiticity_defect(const Eigen::MatrixXcd& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace spinbath
