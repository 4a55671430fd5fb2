#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qfe/model.hpp"
#include "qfe/pauli.hpp"
#include "qfe/rng.hpp"
#include "qfe/statevector.hpp"

namespace qfe {

// Gate-level IR for the noisy pipeline.  Deliberately tiny: just enough to
// express Trotterized TFIM circuits and measurement-basis rotations.
enum class GateKind { Rx, Ry, Rz, H, Cnot };

struct Gate {
  GateKind kind;
  int q0 = 0;          // the qubit, or the CNOT control
  int q1 = -1;         // CNOT target
  double angle = 0.0;  // rotations only
};

struct Circuit {
  int n = 0;
  std::vector<Gate> gates;

  int cnot_count() const;
  void validate() const;  // indices in range, control != target
};

inline constexpr int kMaxNoisyQubits = 4;

// Depolarizing strength after every CNOT plus per-qubit readout confusion.
// confusion[q](read, true) is the probability of reading `read` given the
// qubit was in z-basis state `true`; columns sum to 1.
struct NoiseModel {
  double p2 = 0.0;
  std::vector<Eigen::Matrix2d> confusion;

  // p2 plus a symmetric read-flip probability on every qubit.
  static NoiseModel symmetric(int n, double p2, double readout_flip);
  static NoiseModel ideal(int n) { return symmetric(n, 0.0, 0.0); }
};

struct DensityMatrix {
  Eigen::MatrixXcd rho;
  int n = 0;

  static DensityMatrix from_state(const StateVector& state);
  double expectation(const PauliOperator& op) const;  // tr(rho op), exact
  double purity() const;
  // Hermitian, unit trace, PSD within tolerances.
  bool is_physical(double trace_tol = 1e-10, double psd_tol = 1e-9) const;
};

// One first-order Trotter slice of e^{-i H(lambda) dt} for TFIM-shaped
// Hamiltonians (ZZ and single-site X terms only): each ZZ term becomes
// CNOT - Rz(2 c dt) - CNOT, each X term an Rx(2 c dt).  Terms are applied in
// the operator's canonical order.  dt = 0 yields the empty circuit.
Circuit compile_trotter_step(const DrivenHamiltonian& model, double lambda, double dt);

// All num_steps slices of the lambda protocol, concatenated (earliest first).
Circuit compile_protocol(const DrivenHamiltonian& model);

// Unitary of the circuit with no noise (for semantics checks).
Eigen::MatrixXcd circuit_unitary(const Circuit& circ);

// Ideal gates as unitary conjugation; after each CNOT, a two-qubit
// depolarizing channel of strength p2 on the gate's qubit pair.
DensityMatrix run_noisy(const Circuit& circ, const DensityMatrix& rho0, const NoiseModel& noise);

// Every CNOT replaced by `fold` consecutive CNOTs (fold odd keeps semantics).
Circuit fold_cnots(const Circuit& circ, int fold);

// --- measurement ----------------------------------------------------------

// Terms grouped by qubit-wise-compatible measurement bases.  `signature`
// holds, per qubit, the Pauli basis the group is read in (I where unused).
struct MeasuredGroup {
  PauliString signature;
  std::vector<std::size_t> term_indices;  // into op.terms()
  Eigen::VectorXd distribution;           // empirical readout distribution, length 2^n
};

// Rotate, sample `shots` bitstrings per group, push each through the per-qubit
// confusion matrices.  One group per measurement basis, so compatible terms
// share shots.
std::vector<MeasuredGroup> measure_groups(const DensityMatrix& rho, const PauliOperator& op,
                                          const NoiseModel& noise, int shots, Rng& rng);

// Reassemble <op> from group distributions; when `calibration` is given each
// distribution is readout-corrected first.
double expectation_from_groups(const PauliOperator& op, const std::vector<MeasuredGroup>& groups,
                               const Eigen::MatrixXd* calibration = nullptr);

// Shot-sampled estimate of tr(rho op) through readout noise (no correction).
double measure_with_readout(const DensityMatrix& rho, const PauliOperator& op,
                            const NoiseModel& noise, int shots, Rng& rng);

// Column j = empirical readout distribution after preparing basis state j.
Eigen::MatrixXd calibration_matrix(int n, const NoiseModel& noise, int shots, Rng& rng);

// True when `shots` falls below the 100 * 2^n rule of thumb (flagged in run
// metadata by the orchestrator).
bool calibration_shots_low(int n, int shots);

// Least-squares solve calibration * x = raw, negatives clipped, renormalized.
Eigen::VectorXd ro_correct(const Eigen::VectorXd& raw, const Eigen::MatrixXd& calibration);

enum class ZneFit { Linear, Quadratic };

// Evaluate <observable> at CNOT fold factors {1, 3, 5}, fit a polynomial in
// the fold factor, return its value at zero ("zero noise").  Circuits without
// CNOTs are returned as plain measurements.
double zne_extrapolate(const Circuit& circ, const PauliOperator& observable,
                       const NoiseModel& noise, const DensityMatrix& rho0, ZneFit fit, int shots,
                       Rng& rng);

// Polynomial fit of (x, y) pairs evaluated at 0; linear = least squares over
// the three points, quadratic = exact interpolation.
double extrapolate_to_zero(const std::vector<double>& xs, const std::vector<double>& ys,
                           ZneFit fit);

}  // namespace qfe
