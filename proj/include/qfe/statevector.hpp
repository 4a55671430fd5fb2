#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "qfe/model.hpp"
#include "qfe/pauli.hpp"
#include "qfe/rng.hpp"

namespace qfe {

class Rng;

// Normalized dense pure state on n qubits.  Site 1 = most-significant bit of
// the amplitude index, matching to_dense().
struct StateVector {
  Eigen::VectorXcd amp;
  int n = 0;

  static StateVector basis_state(int n, std::uint64_t index);

  Eigen::Index dim() const { return amp.size(); }
  double norm() const { return amp.norm(); }
  void normalize() { amp /= amp.norm(); }
  // |<this|other>|^2
  double fidelity(const StateVector& other) const;
};

enum class SiteBasis : std::uint8_t { ZPlus, ZMinus, XPlus, XMinus };
enum class CollapseBasis { Z, X };

// Unentangled product of single-site z/x eigenstates (the CPS of the METTS
// chain).  Site 0 of `sites` is site 1 of the chain.
struct ProductState {
  std::vector<SiteBasis> sites;

  int n() const { return static_cast<int>(sites.size()); }
  StateVector to_state() const;
  std::string label() const;  // e.g. "z+ x- z+"
};

// P|psi> for a single Pauli word, via bit arithmetic (no dense matrix).
Eigen::VectorXcd apply_string(const PauliString& s, const Eigen::VectorXcd& amp);

// <psi|op|psi>.  Asserts the imaginary residue is < 1e-10 and discards it.
double expectation(const StateVector& state, const PauliOperator& op);

// --- imaginary time -------------------------------------------------------

// exact: dense e^{-beta_half H} through the eigendecomposition.
// trotter: first-order factorization of e^{-dbeta H / 2} per Pauli term,
// stepping the full interval in slices of (at most) dbeta along the beta axis;
// the state is renormalized after every slice.  Models the step-size error of
// approximate imaginary-time hardware schemes.
enum class ImagBackend { Exact, Trotter };

struct ImagOptions {
  ImagBackend backend = ImagBackend::Exact;
  double dbeta = 0.01;  // trotter backend only
};

// Applies e^{-beta_half H} and renormalizes.  Reusable across states; the
// exact backend diagonalizes H once at construction.
class ImagPropagator {
 public:
  ImagPropagator(const PauliOperator& h, double beta_half, ImagOptions options = {});

  // Returns (normalized state, weight).  weight is the squared pre-
  // normalization norm; for a basis-state input |i> it equals
  // <i|e^{-2 beta_half H}|i>.
  std::pair<StateVector, double> apply(const StateVector& state) const;

  int n() const { return h_.n(); }

 private:
  PauliOperator h_;
  double beta_half_;
  ImagOptions options_;
  Eigen::MatrixXcd dense_;  // exact backend
};

std::pair<StateVector, double> propagate_imag(const StateVector& state, const PauliOperator& h,
                                              double beta_half, ImagOptions options = {});

// --- real time ------------------------------------------------------------

// Trotterized propagator for the full lambda protocol:
//   U = exp(-i H(lambda(K dt)) dt) ... exp(-i H(lambda(dt)) dt),
// earliest step applied first, each step exponential computed exactly from
// the dense eigendecomposition.  Built once, applied to many states.
class RealPropagator {
 public:
  explicit RealPropagator(const DrivenHamiltonian& model);

  StateVector apply(const StateVector& state) const;
  const Eigen::MatrixXcd& matrix() const { return u_; }
  int n() const { return n_; }

 private:
  Eigen::MatrixXcd u_;
  int n_;
};

StateVector propagate_real_trotter(const StateVector& state, const DrivenHamiltonian& model);

// --- measurement ----------------------------------------------------------

// Projective collapse of every site in the z or x basis; Born-rule sampling of
// the full product outcome.  The input state is unchanged.
ProductState collapse(const StateVector& state, CollapseBasis basis, Rng& rng);

// In-place Hadamard on every qubit (z <-> x basis rotation); self-inverse.
void hadamard_all(Eigen::VectorXcd& amp);

}  // namespace qfe
