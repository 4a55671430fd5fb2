#include "qfe/statevector.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace qfe {

namespace {

using cd = std::complex<double>;

struct StringMasks {
  std::uint64_t x = 0;  // sites carrying X or Y (bit flips)
  std::uint64_t y = 0;
  std::uint64_t z = 0;
  int y_count = 0;
};

// Site i (0-based) occupies bit (n-1-i): site 1 is the most-significant bit.
StringMasks masks_of(const PauliString& s) {
  StringMasks m;
  const int n = s.n();
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - i);
    switch (s.ops[static_cast<std::size_t>(i)]) {
      case Pauli::I: break;
      case Pauli::X: m.x |= bit; break;
      case Pauli::Y: m.x |= bit; m.y |= bit; ++m.y_count; break;
      case Pauli::Z: m.z |= bit; break;
    }
  }
  return m;
}

cd i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

StateVector StateVector::basis_state(int n, std::uint64_t index) {
  if (n < 1 || n > kMaxDenseQubits) throw std::invalid_argument("basis_state: bad n");
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (index >= static_cast<std::uint64_t>(dim)) throw std::out_of_range("basis_state: index");
  StateVector s;
  s.n = n;
  s.amp = Eigen::VectorXcd::Zero(dim);
  s.amp[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

double StateVector::fidelity(const StateVector& other) const {
  if (n != other.n) throw std::invalid_argument("fidelity: size mismatch");
  return std::norm(amp.dot(other.amp));
}

StateVector ProductState::to_state() const {
  const int nq = n();
  if (nq < 1 || nq > kMaxDenseQubits) throw std::invalid_argument("ProductState: bad size");
  StateVector s;
  s.n = nq;
  const Eigen::Index dim = Eigen::Index{1} << nq;
  s.amp = Eigen::VectorXcd::Zero(dim);
  s.amp[0] = 1.0;
  Eigen::Index filled = 1;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < nq; ++i) {
    // append site i: amplitudes (a0, a1) on the next bit
    cd a0, a1;
    switch (sites[static_cast<std::size_t>(i)]) {
      case SiteBasis::ZPlus: a0 = 1; a1 = 0; break;
      case SiteBasis::ZMinus: a0 = 0; a1 = 1; break;
      case SiteBasis::XPlus: a0 = r; a1 = r; break;
      case SiteBasis::XMinus: a0 = r; a1 = -r; break;
    }
    for (Eigen::Index b = filled - 1; b >= 0; --b) {
      const cd v = s.amp[b];
      s.amp[2 * b] = v * a0;
      s.amp[2 * b + 1] = v * a1;
    }
    filled *= 2;
  }
  return s;
}

std::string ProductState::label() const {
  std::string out;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i) out.push_back(' ');
    switch (sites[i]) {
      case SiteBasis::ZPlus: out += "z+"; break;
      case SiteBasis::ZMinus: out += "z-"; break;
      case SiteBasis::XPlus: out += "x+"; break;
      case SiteBasis::XMinus: out += "x-"; break;
    }
  }
  return out;
}

Eigen::VectorXcd apply_string(const PauliString& s, const Eigen::VectorXcd& amp) {
  const StringMasks m = masks_of(s);
  const cd y_phase = i_power(m.y_count);
  const auto dim = static_cast<std::uint64_t>(amp.size());
  Eigen::VectorXcd out(amp.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const int sign_bits = std::popcount(b & (m.y | m.z));
    const cd phase = (sign_bits & 1) ? -y_phase : y_phase;
    out[static_cast<Eigen::Index>(b ^ m.x)] = phase * amp[static_cast<Eigen::Index>(b)];
  }
  return out;
}

double expectation(const StateVector& state, const PauliOperator& op) {
  if (state.n != op.n()) throw std::invalid_argument("expectation: size mismatch");
  const auto dim = static_cast<std::uint64_t>(state.amp.size());
  cd acc = 0.0;
  for (const auto& term : op.terms()) {
    const StringMasks m = masks_of(term.string);
    const cd y_phase = i_power(m.y_count);
    cd val = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b) {
      const int sign_bits = std::popcount(b & (m.y | m.z));
      const cd phase = (sign_bits & 1) ? -y_phase : y_phase;
      val += std::conj(state.amp[static_cast<Eigen::Index>(b ^ m.x)]) * phase *
             state.amp[static_cast<Eigen::Index>(b)];
    }
    acc += term.coeff * val;
  }
  if (std::abs(acc.imag()) >= 1e-10)
    throw std::runtime_error("expectation: non-real value for Hermitian operator");
  return acc.real();
}

ImagPropagator::ImagPropagator(const PauliOperator& h, double beta_half, ImagOptions options)
    : h_(h), beta_half_(beta_half), options_(options) {
  if (beta_half < 0.0) throw std::invalid_argument("ImagPropagator: beta_half must be >= 0");
  if (options_.backend == ImagBackend::Trotter && options_.dbeta <= 0.0)
    throw std::invalid_argument("ImagPropagator: dbeta must be > 0");
  if (options_.backend == ImagBackend::Exact) {
    const Eigen::MatrixXcd hm = to_dense(h_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
    if (es.info() != Eigen::Success) throw std::runtime_error("ImagPropagator: eigensolver failed");
    const Eigen::VectorXd scale = (-beta_half_ * es.eigenvalues().array()).exp();
    dense_ = es.eigenvectors() * scale.asDiagonal() * es.eigenvectors().adjoint();
  }
}

std::pair<StateVector, double> ImagPropagator::apply(const StateVector& state) const {
  if (state.n != h_.n()) throw std::invalid_argument("ImagPropagator: size mismatch");
  StateVector out;
  out.n = state.n;
  double log_weight = 0.0;
  if (options_.backend == ImagBackend::Exact) {
    out.amp = dense_ * state.amp;
    const double nrm = out.amp.norm();
    if (nrm <= 0.0) throw std::runtime_error("ImagPropagator: vanished norm");
    log_weight = 2.0 * std::log(nrm);
    out.amp /= nrm;
  } else {
    // Slice the full beta interval (2 * beta_half) into steps of <= dbeta.
    const double beta_total = 2.0 * beta_half_;
    const int slices = std::max(1, static_cast<int>(std::ceil(beta_total / options_.dbeta - 1e-12)));
    const double delta = beta_total / slices;
    out.amp = state.amp;
    for (int s = 0; s < slices; ++s) {
      for (const auto& term : h_.terms()) {
        // e^{theta P} = cosh(theta) I + sinh(theta) P  (P^2 = I)
        const double theta = -0.5 * delta * term.coeff;
        out.amp = std::cosh(theta) * out.amp + std::sinh(theta) * apply_string(term.string, out.amp);
      }
      const double nrm = out.amp.norm();
      if (nrm <= 0.0) throw std::runtime_error("ImagPropagator: vanished norm");
      log_weight += 2.0 * std::log(nrm);
      out.amp /= nrm;
    }
  }
  return {std::move(out), std::exp(log_weight)};
}

std::pair<StateVector, double> propagate_imag(const StateVector& state, const PauliOperator& h,
                                              double beta_half, ImagOptions options) {
  return ImagPropagator(h, beta_half, options).apply(state);
}

RealPropagator::RealPropagator(const DrivenHamiltonian& model) : n_(model.n()) {
  const LambdaProtocol& p = model.schedule;
  if (p.num_steps < 1) throw std::invalid_argument("RealPropagator: num_steps must be >= 1");
  if (p.total_time <= 0.0) throw std::invalid_argument("RealPropagator: total_time must be > 0");
  const double dt = p.dt();
  const Eigen::Index dim = Eigen::Index{1} << n_;
  u_ = Eigen::MatrixXcd::Identity(dim, dim);
  const cd minus_i(0.0, -1.0);
  for (int k = 1; k <= p.num_steps; ++k) {
    const double lambda = lambda_at(p, k * dt);
    const Eigen::MatrixXcd hm = to_dense(model.at(lambda));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
    if (es.info() != Eigen::Success) throw std::runtime_error("RealPropagator: eigensolver failed");
    const Eigen::VectorXcd phases = (minus_i * dt * es.eigenvalues().array()).exp();
    u_ = (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u_).eval();
  }
}

StateVector RealPropagator::apply(const StateVector& state) const {
  if (state.n != n_) throw std::invalid_argument("RealPropagator: size mismatch");
  StateVector out;
  out.n = state.n;
  out.amp = u_ * state.amp;
  return out;
}

StateVector propagate_real_trotter(const StateVector& state, const DrivenHamiltonian& model) {
  return RealPropagator(model).apply(state);
}

void hadamard_all(Eigen::VectorXcd& amp) {
  const auto dim = static_cast<std::uint64_t>(amp.size());
  const double r = 1.0 / std::sqrt(2.0);
  for (std::uint64_t stride = 1; stride < dim; stride <<= 1) {
    for (std::uint64_t base = 0; base < dim; base += stride << 1) {
      for (std::uint64_t i = base; i < base + stride; ++i) {
        const cd a = amp[static_cast<Eigen::Index>(i)];
        const cd b = amp[static_cast<Eigen::Index>(i + stride)];
        amp[static_cast<Eigen::Index>(i)] = r * (a + b);
        amp[static_cast<Eigen::Index>(i + stride)] = r * (a - b);
      }
    }
  }
}

ProductState collapse(const StateVector& state, CollapseBasis basis, Rng& rng) {
  Eigen::VectorXcd amp = state.amp;
  if (basis == CollapseBasis::X) hadamard_all(amp);
  std::vector<double> probs(static_cast<std::size_t>(amp.size()));
  for (Eigen::Index b = 0; b < amp.size(); ++b)
    probs[static_cast<std::size_t>(b)] = std::norm(amp[b]);
  const std::uint64_t outcome = rng.categorical(probs);
  ProductState cps;
  cps.sites.resize(static_cast<std::size_t>(state.n));
  for (int i = 0; i < state.n; ++i) {
    const bool bit = (outcome >> (state.n - 1 - i)) & 1;
    if (basis == CollapseBasis::Z)
      cps.sites[static_cast<std::size_t>(i)] = bit ? SiteBasis::ZMinus : SiteBasis::ZPlus;
    else
      cps.sites[static_cast<std::size_t>(i)] = bit ? SiteBasis::XMinus : SiteBasis::XPlus;
  }
  return cps;
}

}  // namespace qfe
