#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace spinbath {

using cplx = std::complex<double>;

// Basis convention used everywhere: spin i occupies bit i of the basis
// index (j = sum_i j_i 2^i), and bit value 1 is the sigma_z eigenvalue +1
// (excited) state. Energies are in eV, times in hbar/eV, hbar = 1.
struct StateVector {
  int n_spins = 0;
  std::vector<cplx> amp;

  StateVector() = default;
  explicit StateVector(int n) : n_spins(n), amp(std::size_t{1} << n) {}

  std::size_t dim() const { return amp.size(); }
  double norm_sq() const;
  double norm() const { return std::sqrt(norm_sq()); }
};

enum class PauliAxis : std::uint8_t { x, y, z };

// a * exp(-b (t - t_c)^2) * cos(omega_laser * t); note the carrier phase is
// referenced to t = 0, not to the pulse center.
struct GaussianPulse {
  double amplitude = 0.0;  // a, eV
  double width = 1.0;      // b, eV^2
  double center = 0.0;     // t_c, hbar/eV
  double carrier = 0.0;    // omega_laser, eV

  double value(double t) const {
    const double d = t - center;
    return amplitude * std::exp(-width * d * d) * std::cos(carrier * t);
  }
};

struct PauliFactor {
  int site = 0;
  PauliAxis axis = PauliAxis::z;
};

// coefficient * envelope(t) * prod of single-site Pauli factors.
// envelope = -1 means a static term.
struct PauliString {
  double coefficient = 0.0;
  std::vector<PauliFactor> factors;
  int envelope = -1;
};

struct HamiltonianSpec {
  int n_spins = 0;
  std::vector<PauliString> terms;
  std::vector<GaussianPulse> envelopes;

  // throws std::invalid_argument on duplicate/out-of-range sites,
  // dangling envelope ids, or non-positive pulse widths
  void validate() const;
};

// out = sigma_axis^(site) |in>. Out-of-place; `out` is resized as needed and
// may be a caller-reused scratch buffer (must not alias `in`).
void apply_pauli(const StateVector& in, PauliAxis axis, int site, StateVector& out);
StateVector apply_pauli(const StateVector& in, PauliAxis axis, int site);

// Bit-mask compiled form of H(t) for tight inner loops. All static all-z
// terms are folded into one diagonal pass; every other string becomes a
// single flip-mask/sign-mask sweep over the amplitudes.
class HamiltonianAction {
 public:
  explicit HamiltonianAction(HamiltonianSpec spec);

  int n_spins() const { return spec_.n_spins; }
  std::size_t dim() const { return std::size_t{1} << spec_.n_spins; }
  const HamiltonianSpec& spec() const { return spec_; }

  // out = H(t) in; `out` must not alias `in`
  void apply(double t, const cplx* in, cplx* out) const;
  void apply(double t, const StateVector& in, StateVector& out) const;

  // Dense matrix of H(t), built by applying to basis vectors.
  Eigen::MatrixXcd dense(double t) const;

 private:
  struct MaskedTerm {
    std::uint64_t flip = 0;  // x and y sites
    std::uint64_t sign = 0;  // y and z sites
    cplx base;               // i^{n_y} (-1)^{n_z} * coefficient
    int envelope = -1;
  };

  HamiltonianSpec spec_;
  std::vector<double> static_diag_;  // empty if no static all-z terms
  std::vector<MaskedTerm> terms_;
};

// Convenience form of the above (compiles the spec on every call).
void apply_hamiltonian(const HamiltonianSpec& spec, double t,
                       const StateVector& in, StateVector& out);

// Tr_bath |psi><psi| over all spins above the lowest n_system_spins,
// contracted directly from the amplitudes (the full density is never formed).
Eigen::MatrixXcd reduced_system_density(const StateVector& psi, int n_system_spins);

// Single-qubit reduced densities of an 8x8 three-qubit density:
// result[i] traces out the other two qubits.
std::array<Eigen::Matrix2cd, 3> qubit_marginals(const Eigen::MatrixXcd& rho);

// max_ij |rho - rho^dag|
double hermiticity_defect(const Eigen::MatrixXcd& rho);
// smallest eigenvalue of the hermitian part (rho + rho^dag)/2
double min_eigenvalue(const Eigen::MatrixXcd& rho);

}  // namespace spinbath
