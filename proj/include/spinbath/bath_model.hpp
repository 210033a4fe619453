#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "spinbath/errors.hpp"
#include "spinbath/spin_kit.hpp"

namespace spinbath {

// Isolated environment: n_s coupled spin-1/2 modes.
struct BathSpec {
  int n_s = 0;
  std::vector<double> frequencies;  // eV, one per bath spin, all in (0, omega_c]
  double beta = 0.0;                // anharmonic sigma_x term, eV
  double lambda = 0.0;              // intra-bath sigma_x sigma_x coupling, eV
  double lambda0 = 0.0;             // system-bath coupling, eV
  double omega_c = 0.0;             // Debye cutoff, eV
  std::uint64_t seed = 1;
};

// Inverse CDF of the 3-D Debye density g(w) ~ w^2 on (0, omega_c].
double debye_inverse_cdf(double u, double omega_c);

// n_s iid draws; deterministic for a fixed seed.
std::vector<double> sample_debye_frequencies(int n_s, double omega_c, std::uint64_t seed);

// H_b = sum_j [w_j/2 sigma_z^(j) + beta sigma_x^(j)]
//     + lambda sum_{i<j} sigma_x^(i) sigma_x^(j)   (bath-local site indices)
HamiltonianSpec build_bath_hamiltonian(const BathSpec& spec);

// Lowest eigenpairs plus (optionally) thermal weights over them.
struct BathEnsemble {
  std::vector<double> energies;      // ascending
  std::vector<StateVector> eigvecs;  // orthonormal
  std::vector<double> weights;       // Boltzmann, sum 1; empty until assigned
  double kT = 0.0;

  // sum_m p_m |m><m| as a dense bath-space matrix
  Eigen::MatrixXcd density() const;
  // p_last / p_first; < 1e-6 means the retained set carries the canonical
  // density to the working accuracy
  double truncation_ratio() const;
};

struct LanczosOptions {
  double tol = 1e-8;      // residual ||Hv - ev|| per accepted pair
  int max_subspace = 300;  // Krylov dimension per restart
  int max_restarts = 60;
  std::uint64_t seed = 0x5eed;
};

// Lanczos with full reorthogonalization and deflation restarts, using
// HamiltonianAction as the matrix-vector product. Throws SolverError with the
// worst residual if the requested count cannot be converged.
BathEnsemble lowest_eigenpairs(const HamiltonianSpec& bath_h, int n_eig,
                               const LanczosOptions& opt = {});

// Normalized Boltzmann weights exp(-e_m/kT)/Z over the retained states.
std::vector<double> thermal_weights(const std::vector<double>& energies, double kT);

// lowest_eigenpairs + thermal_weights in one call.
BathEnsemble thermal_bath_ensemble(const BathSpec& spec, int n_eig, double kT,
                                   const LanczosOptions& opt = {});

// C = lambda0^2 (Tr_b{Sx^2 B} - Tr_b{Sx B}^2) by default (mean-subtracted
// variance); `raw` drops the subtraction for literal reproduction of the
// uncentered form.
enum class CConvention { centered, raw };

struct BathStatistics {
  double sigma_x_mean = 0.0;  // Tr_b{Sigma_x B}, dimensionless
  double C = 0.0;             // eV^2
};

BathStatistics bath_statistics(const BathEnsemble& ensemble, const BathSpec& spec,
                               CConvention convention = CConvention::centered);

// ---------------------------------------------------------------------------
// Liouville-space moments of A = Q L Q, where L X = [H, X] (static part of H
// only), P X = Tr_b(X) (x) B and Q = 1 - P:
//   <AA+> = (1/D^2) sum_ij ||A e_ij||_HS^2
//   <AA>  = (1/D^2) sum_ij <e_ij, A A e_ij>_HS
// over the matrix-unit basis e_ij of the truncated total space (D = ds*db).
// ---------------------------------------------------------------------------

enum class MomentMethod { exact_basis, stochastic };

struct MomentOptions {
  MomentMethod method = MomentMethod::stochastic;
  int probes = 2000;       // Rademacher probes (stochastic only)
  std::uint64_t seed = 1;
  double max_stderr = 0.0;  // > 0: error out if either stderr exceeds this
  int threads = 0;          // 0 = hardware
};

struct MomentEstimate {
  double aa_dag = 0.0;
  double aa = 0.0;
  double aa_dag_stderr = 0.0;  // zero for exact_basis
  double aa_stderr = 0.0;
  double aa_imag = 0.0;  // residual imaginary part of <AA>, diagnostic
  int probes = 0;
};

// `total` is the full system+bath Hamiltonian; terms carrying an envelope
// (the laser pulses) are excluded from L. Throws ModelError if the stochastic
// standard error exceeds opt.max_stderr.
MomentEstimate kernel_moments(const HamiltonianSpec& total, int n_system_spins,
                              const BathEnsemble& ensemble, const MomentOptions& opt = {});

}  // namespace spinbath
