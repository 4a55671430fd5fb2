#include "qfe/noise.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qfe {

namespace {

using cd = std::complex<double>;

Eigen::Matrix2cd rotation_matrix(GateKind kind, double angle) {
  using namespace std::complex_literals;
  const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  Eigen::Matrix2cd m;
  switch (kind) {
    case GateKind::Rx: m << c, -1i * s, -1i * s, c; break;
    case GateKind::Ry: m << c, -s, s, c; break;
    case GateKind::Rz: m << std::exp(-0.5i * angle), 0, 0, std::exp(0.5i * angle); break;
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      m << r, r, r, -r;
      break;
    }
    default: throw std::logic_error("rotation_matrix: not a single-qubit gate");
  }
  return m;
}

// Single-qubit gate lifted to the full register (site q at bit n-1-q).
Eigen::MatrixXcd lift_single(int n, int q, const Eigen::Matrix2cd& g) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  const int shift = n - 1 - q;
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int bit = static_cast<int>((col >> shift) & 1);
    for (int out = 0; out < 2; ++out) {
      const cd v = g(out, bit);
      if (v == cd{0.0, 0.0}) continue;
      const Eigen::Index row = (col & ~(Eigen::Index{1} << shift)) |
                               (static_cast<Eigen::Index>(out) << shift);
      full(row, col) += v;
    }
  }
  return full;
}

Eigen::MatrixXcd cnot_unitary(int n, int control, int target) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  const int cshift = n - 1 - control, tshift = n - 1 - target;
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::Index row = col;
    if ((col >> cshift) & 1) row = col ^ (Eigen::Index{1} << tshift);
    full(row, col) = 1.0;
  }
  return full;
}

Eigen::MatrixXcd gate_unitary(int n, const Gate& g) {
  if (g.kind == GateKind::Cnot) return cnot_unitary(n, g.q0, g.q1);
  return lift_single(n, g.q0, rotation_matrix(g.kind, g.angle));
}

// Two-qubit depolarizing channel on (qa, qb):
//   rho -> (1 - p) rho + (p / 16) sum_{P in two-site Paulis} P rho P.
void depolarize_pair(Eigen::MatrixXcd& rho, int n, int qa, int qb, double p) {
  if (p == 0.0) return;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (int pa = 0; pa < 4; ++pa) {
    for (int pb = 0; pb < 4; ++pb) {
      PauliString s(n);
      s.ops[static_cast<std::size_t>(qa)] = static_cast<Pauli>(pa);
      s.ops[static_cast<std::size_t>(qb)] = static_cast<Pauli>(pb);
      const Eigen::MatrixXcd pm = to_dense(s);
      acc += pm * rho * pm;
    }
  }
  rho = (1.0 - p) * rho + (p / 16.0) * acc;
}

}  // namespace

int Circuit::cnot_count() const {
  int k = 0;
  for (const auto& g : gates) k += (g.kind == GateKind::Cnot);
  return k;
}

void Circuit::validate() const {
  if (n < 1 || n > kMaxNoisyQubits)
    throw std::invalid_argument("Circuit: qubit count must be in [1, " +
                                std::to_string(kMaxNoisyQubits) + "]");
  for (const auto& g : gates) {
    if (g.q0 < 0 || g.q0 >= n) throw std::invalid_argument("Circuit: gate qubit out of range");
    if (g.kind == GateKind::Cnot) {
      if (g.q1 < 0 || g.q1 >= n) throw std::invalid_argument("Circuit: CNOT target out of range");
      if (g.q0 == g.q1) throw std::invalid_argument("Circuit: CNOT control equals target");
    }
  }
}

NoiseModel NoiseModel::symmetric(int n, double p2, double readout_flip) {
  if (p2 < 0.0 || p2 >= 1.0) throw std::invalid_argument("NoiseModel: p2 must be in [0, 1)");
  if (readout_flip < 0.0 || readout_flip > 1.0)
    throw std::invalid_argument("NoiseModel: readout_flip must be in [0, 1]");
  NoiseModel m;
  m.p2 = p2;
  Eigen::Matrix2d c;
  c << 1.0 - readout_flip, readout_flip, readout_flip, 1.0 - readout_flip;
  m.confusion.assign(static_cast<std::size_t>(n), c);
  return m;
}

DensityMatrix DensityMatrix::from_state(const StateVector& state) {
  DensityMatrix d;
  d.n = state.n;
  d.rho = state.amp * state.amp.adjoint();
  return d;
}

double DensityMatrix::expectation(const PauliOperator& op) const {
  if (op.n() != n) throw std::invalid_argument("DensityMatrix::expectation: size mismatch");
  const cd tr = (rho * to_dense(op)).trace();
  return tr.real();
}

double DensityMatrix::purity() const { return (rho * rho).trace().real(); }

bool DensityMatrix::is_physical(double trace_tol, double psd_tol) const {
  if (std::abs(rho.trace().real() - 1.0) > trace_tol) return false;
  if (std::abs(rho.trace().imag()) > trace_tol) return false;
  if ((rho - rho.adjoint()).norm() > trace_tol * rho.rows()) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -psd_tol;
}

Circuit compile_trotter_step(const DrivenHamiltonian& model, double lambda, double dt) {
  const int n = model.n();
  if (n > kMaxNoisyQubits)
    throw std::invalid_argument("compile_trotter_step: capped at " +
                                std::to_string(kMaxNoisyQubits) + " qubits");
  Circuit circ;
  circ.n = n;
  if (dt == 0.0) return circ;
  const PauliOperator h = model.at(lambda);
  for (const auto& term : h.terms()) {
    std::vector<int> x_sites, z_sites;
    for (int i = 0; i < n; ++i) {
      switch (term.string.ops[static_cast<std::size_t>(i)]) {
        case Pauli::I: break;
        case Pauli::X: x_sites.push_back(i); break;
        case Pauli::Z: z_sites.push_back(i); break;
        case Pauli::Y:
          throw std::invalid_argument("compile_trotter_step: Y terms unsupported");
      }
    }
    if (x_sites.size() == 1 && z_sites.empty()) {
      circ.gates.push_back({GateKind::Rx, x_sites[0], -1, 2.0 * term.coeff * dt});
    } else if (z_sites.size() == 2 && x_sites.empty()) {
      // e^{-i c dt ZZ} = CNOT . Rz(2 c dt on target) . CNOT
      circ.gates.push_back({GateKind::Cnot, z_sites[0], z_sites[1], 0.0});
      circ.gates.push_back({GateKind::Rz, z_sites[1], -1, 2.0 * term.coeff * dt});
      circ.gates.push_back({GateKind::Cnot, z_sites[0], z_sites[1], 0.0});
    } else {
      throw std::invalid_argument("compile_trotter_step: only single-site X and two-site ZZ terms");
    }
  }
  circ.validate();
  return circ;
}

Circuit compile_protocol(const DrivenHamiltonian& model) {
  const LambdaProtocol& p = model.schedule;
  Circuit full;
  full.n = model.n();
  const double dt = p.dt();
  for (int k = 1; k <= p.num_steps; ++k) {
    const Circuit step = compile_trotter_step(model, lambda_at(p, k * dt), dt);
    full.gates.insert(full.gates.end(), step.gates.begin(), step.gates.end());
  }
  return full;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& circ) {
  circ.validate();
  const Eigen::Index dim = Eigen::Index{1} << circ.n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : circ.gates) u = (gate_unitary(circ.n, g) * u).eval();
  return u;
}

DensityMatrix run_noisy(const Circuit& circ, const DensityMatrix& rho0, const NoiseModel& noise) {
  circ.validate();
  if (rho0.n != circ.n) throw std::invalid_argument("run_noisy: size mismatch");
  DensityMatrix out = rho0;
  for (const auto& g : circ.gates) {
    const Eigen::MatrixXcd u = gate_unitary(circ.n, g);
    out.rho = (u * out.rho * u.adjoint()).eval();
    if (g.kind == GateKind::Cnot) depolarize_pair(out.rho, circ.n, g.q0, g.q1, noise.p2);
  }
  return out;
}

Circuit fold_cnots(const Circuit& circ, int fold) {
  if (fold < 1 || fold % 2 == 0) throw std::invalid_argument("fold_cnots: fold must be odd and >= 1");
  Circuit out;
  out.n = circ.n;
  for (const auto& g : circ.gates) {
    if (g.kind == GateKind::Cnot) {
      for (int i = 0; i < fold; ++i) out.gates.push_back(g);
    } else {
      out.gates.push_back(g);
    }
  }
  return out;
}

std::vector<MeasuredGroup> measure_groups(const DensityMatrix& rho, const PauliOperator& op,
                                          const NoiseModel& noise, int shots, Rng& rng) {
  if (op.n() != rho.n) throw std::invalid_argument("measure_groups: size mismatch");
  if (shots < 1) throw std::invalid_argument("measure_groups: shots must be >= 1");
  if (static_cast<int>(noise.confusion.size()) != rho.n)
    throw std::invalid_argument("measure_groups: confusion size mismatch");
  const int n = rho.n;

  // Greedy qubit-wise-compatible grouping in canonical term order.
  std::vector<MeasuredGroup> groups;
  for (std::size_t ti = 0; ti < op.terms().size(); ++ti) {
    const PauliString& s = op.terms()[ti].string;
    if (s.is_identity()) continue;  // constant offset, no measurement
    bool placed = false;
    for (auto& g : groups) {
      bool ok = true;
      for (int q = 0; q < n && ok; ++q) {
        const Pauli a = g.signature.ops[static_cast<std::size_t>(q)];
        const Pauli b = s.ops[static_cast<std::size_t>(q)];
        ok = (a == Pauli::I || b == Pauli::I || a == b);
      }
      if (ok) {
        for (int q = 0; q < n; ++q)
          if (g.signature.ops[static_cast<std::size_t>(q)] == Pauli::I)
            g.signature.ops[static_cast<std::size_t>(q)] = s.ops[static_cast<std::size_t>(q)];
        g.term_indices.push_back(ti);
        placed = true;
        break;
      }
    }
    if (!placed) {
      MeasuredGroup g;
      g.signature = s;
      g.term_indices = {ti};
      groups.push_back(std::move(g));
    }
  }

  const Eigen::Index dim = Eigen::Index{1} << n;
  for (auto& g : groups) {
    // Rotate the group's basis to z: H for X, Rz(-pi/2) then H for Y.
    Circuit rot;
    rot.n = n;
    for (int q = 0; q < n; ++q) {
      switch (g.signature.ops[static_cast<std::size_t>(q)]) {
        case Pauli::I:
        case Pauli::Z: break;
        case Pauli::X: rot.gates.push_back({GateKind::H, q, -1, 0.0}); break;
        case Pauli::Y:
          rot.gates.push_back({GateKind::Rz, q, -1, -std::numbers::pi / 2.0});
          rot.gates.push_back({GateKind::H, q, -1, 0.0});
          break;
      }
    }
    // Basis rotations are single-qubit gates: noiseless under this model.
    const DensityMatrix rotated = run_noisy(rot, rho, noise);
    std::vector<double> probs(static_cast<std::size_t>(dim));
    double total = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) {
      probs[static_cast<std::size_t>(b)] = std::max(0.0, rotated.rho(b, b).real());
      total += probs[static_cast<std::size_t>(b)];
    }
    for (auto& p : probs) p /= total;

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
    for (int shot = 0; shot < shots; ++shot) {
      std::uint64_t outcome = rng.categorical(probs);
      // push each qubit through its confusion matrix
      std::uint64_t read = 0;
      for (int q = 0; q < n; ++q) {
        const int bit = static_cast<int>((outcome >> (n - 1 - q)) & 1);
        const double p_read1 = noise.confusion[static_cast<std::size_t>(q)](1, bit);
        const int read_bit = rng.uniform01() < p_read1 ? 1 : 0;
        read |= static_cast<std::uint64_t>(read_bit) << (n - 1 - q);
      }
      counts[static_cast<Eigen::Index>(read)] += 1.0;
    }
    g.distribution = counts / static_cast<double>(shots);
  }
  return groups;
}

double expectation_from_groups(const PauliOperator& op, const std::vector<MeasuredGroup>& groups,
                               const Eigen::MatrixXd* calibration) {
  const int n = op.n();
  double value = 0.0;
  for (const auto& term : op.terms())
    if (term.string.is_identity()) value += term.coeff;
  for (const auto& g : groups) {
    Eigen::VectorXd dist = g.distribution;
    if (calibration) dist = ro_correct(dist, *calibration);
    for (std::size_t ti : g.term_indices) {
      const auto& term = op.terms()[ti];
      std::uint64_t mask = 0;
      for (int q = 0; q < n; ++q)
        if (term.string.ops[static_cast<std::size_t>(q)] != Pauli::I)
          mask |= std::uint64_t{1} << (n - 1 - q);
      double est = 0.0;
      for (Eigen::Index b = 0; b < dist.size(); ++b) {
        const int parity = std::popcount(static_cast<std::uint64_t>(b) & mask) & 1;
        est += (parity ? -1.0 : 1.0) * dist[b];
      }
      value += term.coeff * est;
    }
  }
  return value;
}

double measure_with_readout(const DensityMatrix& rho, const PauliOperator& op,
                            const NoiseModel& noise, int shots, Rng& rng) {
  return expectation_from_groups(op, measure_groups(rho, op, noise, shots, rng));
}

Eigen::MatrixXd calibration_matrix(int n, const NoiseModel& noise, int shots, Rng& rng) {
  if (n < 1 || n > kMaxNoisyQubits) throw std::invalid_argument("calibration_matrix: bad n");
  if (shots < 1) throw std::invalid_argument("calibration_matrix: shots must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd cal = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (int shot = 0; shot < shots; ++shot) {
      std::uint64_t read = 0;
      for (int q = 0; q < n; ++q) {
        const int bit = static_cast<int>((static_cast<std::uint64_t>(j) >> (n - 1 - q)) & 1);
        const double p_read1 = noise.confusion[static_cast<std::size_t>(q)](1, bit);
        const int read_bit = rng.uniform01() < p_read1 ? 1 : 0;
        read |= static_cast<std::uint64_t>(read_bit) << (n - 1 - q);
      }
      cal(static_cast<Eigen::Index>(read), j) += 1.0;
    }
    cal.col(j) /= static_cast<double>(shots);
  }
  return cal;
}

bool calibration_shots_low(int n, int shots) { return shots < 100 * (1 << n); }

Eigen::VectorXd ro_correct(const Eigen::VectorXd& raw, const Eigen::MatrixXd& calibration) {
  if (calibration.rows() != raw.size() || calibration.cols() != raw.size())
    throw std::invalid_argument("ro_correct: size mismatch");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(calibration);
  if (qr.rank() < calibration.cols()) throw std::invalid_argument("ro_correct: singular calibration");
  Eigen::VectorXd x = qr.solve(raw);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = std::max(0.0, x[i]);
    total += x[i];
  }
  if (total <= 0.0) throw std::runtime_error("ro_correct: corrected distribution vanished");
  return x / total;
}

double extrapolate_to_zero(const std::vector<double>& xs, const std::vector<double>& ys,
                           ZneFit fit) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("extrapolate_to_zero: need matching xs/ys, >= 2 points");
  const auto m = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index degree = (fit == ZneFit::Linear) ? 1 : 2;
  Eigen::MatrixXd a(m, degree + 1);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double xp = 1.0;
    for (Eigen::Index d2 = 0; d2 <= degree; ++d2) {
      a(i, d2) = xp;
      xp *= xs[static_cast<std::size_t>(i)];
    }
    b[i] = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coeffs = a.colPivHouseholderQr().solve(b);
  return coeffs[0];  // value at x = 0
}

double zne_extrapolate(const Circuit& circ, const PauliOperator& observable,
                       const NoiseModel& noise, const DensityMatrix& rho0, ZneFit fit, int shots,
                       Rng& rng) {
  if (circ.cnot_count() == 0)
    return measure_with_readout(run_noisy(circ, rho0, noise), observable, noise, shots, rng);
  std::vector<double> xs, ys;
  for (int fold : {1, 3, 5}) {
    const DensityMatrix rho = run_noisy(fold_cnots(circ, fold), rho0, noise);
    xs.push_back(static_cast<double>(fold));
    ys.push_back(measure_with_readout(rho, observable, noise, shots, rng));
  }
  if (ys[0] == ys[1] && ys[1] == ys[2]) return ys[0];
  return extrapolate_to_zero(xs, ys, fit);
}

}  // namespace qfe
