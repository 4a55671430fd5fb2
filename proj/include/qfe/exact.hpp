#pragma once

#include <Eigen/Dense>

#include "qfe/model.hpp"
#include "qfe/pauli.hpp"

namespace qfe {

// Full Hermitian eigendecomposition, eigenvalues ascending.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns
  int n = 0;
};

struct ThermalSummary {
  double beta = 0.0;
  double z = 0.0;       // partition function
  double f = 0.0;       // free energy (-ln Z / beta)
  double e_mean = 0.0;  // thermal energy
  int ground_degeneracy = 1;
};

Spectrum diagonalize(const PauliOperator& h);

// Partition sums use a max-shift (log-sum-exp) so large beta cannot overflow.
// Z is reported unshifted and may itself overflow for extreme beta * |E|;
// F and E_mean are always finite.
ThermalSummary thermal_summary(const Spectrum& spectrum, double beta);

// F(H(1), beta) - F(H(0), beta).
double exact_delta_f(const DrivenHamiltonian& model, double beta);

// Independent route to the same quantity: ln tr e^{-beta H} via the dense
// matrix exponential (scaling and squaring), with a spectral shift from the
// Gershgorin bound so the exponential stays in range.  Exists so tests can
// cross-check exact_delta_f against an algorithm that shares no code with
// diagonalize().
double log_partition_via_expm(const PauliOperator& h, double beta);

// Two-measurement-protocol average of e^{-beta W} by full enumeration of
// eigenstate pairs:
//   sum_{a,b} (e^{-beta e_a} / Z_0) |<eps_b^t|U|eps_a>|^2 e^{-beta (e_b^t - e_a)}.
// For any unitary U this collapses to Z_t / Z_0.  Rejects non-unitary U.
double exact_tmp_average(const DrivenHamiltonian& model, double beta, const Eigen::MatrixXcd& u);

}  // namespace qfe
