#pragma once

#include <array>

#include "qfe/pauli.hpp"

namespace qfe {

// Schedule for the control parameter lambda(t): 0 -> 1 over total_time, with
// num_steps first-order Trotter slices (dt = total_time / num_steps).
struct LambdaProtocol {
  enum class Shape { Linear };

  double total_time = 10.0;
  int num_steps = 1000;
  Shape shape = Shape::Linear;

  double dt() const { return total_time / num_steps; }
};

// lambda(t); rejects t outside [0, total_time].
double lambda_at(const LambdaProtocol& protocol, double t);

// H(lambda) = base + lambda * drive, driven through `schedule`.
struct DrivenHamiltonian {
  PauliOperator base;
  PauliOperator drive;
  LambdaProtocol schedule;

  int n() const { return base.n(); }
  PauliOperator at(double lambda) const { return base + drive * lambda; }
};

// Open-boundary transverse-field Ising chain:
//   H(lambda) = J_z sum_{i<n} Z_i Z_{i+1} + (1 + lambda/2) h_x sum_i X_i
// i.e. base = J_z sum ZZ + h_x sum X and drive = (h_x/2) sum X.
DrivenHamiltonian build_tfim(int n, double j_z, double h_x,
                             LambdaProtocol schedule = {});

// Open-boundary Heisenberg chain with per-axis couplings and fields:
//   base = sum_i (J_x XX + J_y YY + J_z ZZ) + sum_i (h_x X + h_y Y + h_z Z)
// The drive term is caller-supplied.
DrivenHamiltonian build_heisenberg(int n, std::array<double, 3> j,
                                   std::array<double, 3> h,
                                   const PauliOperator& drive,
                                   LambdaProtocol schedule = {});

}  // namespace qfe
