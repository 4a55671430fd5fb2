#include "qfe/model.hpp"

#include <stdexcept>

namespace qfe {

double lambda_at(const LambdaProtocol& protocol, double t) {
  if (protocol.total_time <= 0.0) throw std::invalid_argument("lambda_at: total_time must be > 0");
  if (t < 0.0 || t > protocol.total_time)
    throw std::out_of_range("lambda_at: t outside [0, total_time]");
  switch (protocol.shape) {
    case LambdaProtocol::Shape::Linear: return t / protocol.total_time;
  }
  throw std::logic_error("lambda_at: bad shape");
}

DrivenHamiltonian build_tfim(int n, double j_z, double h_x, LambdaProtocol schedule) {
  if (n < 1) throw std::invalid_argument("build_tfim: n must be >= 1");
  PauliOperator base(n);
  PauliOperator drive(n);
  for (int i = 0; i + 1 < n; ++i) {
    PauliString zz(n);
    zz.ops[static_cast<std::size_t>(i)] = Pauli::Z;
    zz.ops[static_cast<std::size_t>(i) + 1] = Pauli::Z;
    base.add(j_z, zz);
  }
  for (int i = 0; i < n; ++i) {
    PauliString x(n);
    x.ops[static_cast<std::size_t>(i)] = Pauli::X;
    base.add(h_x, x);
    drive.add(h_x / 2.0, x);
  }
  return {std::move(base), std::move(drive), schedule};
}

DrivenHamiltonian build_heisenberg(int n, std::array<double, 3> j, std::array<double, 3> h,
                                   const PauliOperator& drive, LambdaProtocol schedule) {
  if (n < 2) throw std::invalid_argument("build_heisenberg: n must be >= 2");
  if (drive.n() != n) throw std::invalid_argument("build_heisenberg: drive size mismatch");
  constexpr std::array<Pauli, 3> axes = {Pauli::X, Pauli::Y, Pauli::Z};
  PauliOperator base(n);
  for (int i = 0; i + 1 < n; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (j[a] == 0.0) continue;
      PauliString s(n);
      s.ops[static_cast<std::size_t>(i)] = axes[a];
      s.ops[static_cast<std::size_t>(i) + 1] = axes[a];
      base.add(j[a], s);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (h[a] == 0.0) continue;
      PauliString s(n);
      s.ops[static_cast<std::size_t>(i)] = axes[a];
      base.add(h[a], s);
    }
  }
  return {std::move(base), drive, schedule};
}

}  // namespace qfe
