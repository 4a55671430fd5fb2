#include "qfe/exact.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace qfe {

Spectrum diagonalize(const PauliOperator& h) {
  if (h.n() > kMaxDenseQubits)
    throw std::invalid_argument("diagonalize: dense limit is " + std::to_string(kMaxDenseQubits) + " qubits");
  const Eigen::MatrixXcd hm = to_dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
  if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors(), h.n()};
}

ThermalSummary thermal_summary(const Spectrum& spectrum, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("thermal_summary: beta must be > 0");
  if (spectrum.eigenvalues.size() == 0) throw std::invalid_argument("thermal_summary: empty spectrum");
  const Eigen::VectorXd& e = spectrum.eigenvalues;
  const double e_min = e.minCoeff();
  // log-sum-exp with shift at the ground energy
  const Eigen::ArrayXd shifted = (-beta * (e.array() - e_min)).exp();
  const double zs = shifted.sum();
  ThermalSummary out;
  out.beta = beta;
  out.z = std::exp(-beta * e_min) * zs;
  out.f = e_min - std::log(zs) / beta;
  out.e_mean = (e.array() * shifted).sum() / zs;
  const double tol = 1e-9 * std::max(1.0, std::abs(e_min));
  out.ground_degeneracy = static_cast<int>((e.array() - e_min <= tol).count());
  return out;
}

double exact_delta_f(const DrivenHamiltonian& model, double beta) {
  const ThermalSummary s0 = thermal_summary(diagonalize(model.at(0.0)), beta);
  const ThermalSummary s1 = thermal_summary(diagonalize(model.at(1.0)), beta);
  return s1.f - s0.f;
}

double log_partition_via_expm(const PauliOperator& h, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("log_partition_via_expm: beta must be > 0");
  const Eigen::MatrixXcd hm = to_dense(h);
  // Gershgorin lower bound on the spectrum keeps exp(-beta (H - shift)) tame.
  double shift = 0.0;
  for (Eigen::Index r = 0; r < hm.rows(); ++r) {
    double radius = 0.0;
    for (Eigen::Index c = 0; c < hm.cols(); ++c)
      if (c != r) radius += std::abs(hm(r, c));
    shift = std::min(shift, hm(r, r).real() - radius);
  }
  const Eigen::MatrixXcd em = (-beta * (hm - shift * Eigen::MatrixXcd::Identity(hm.rows(), hm.cols()))).exp();
  const double tr = em.trace().real();
  if (tr <= 0.0) throw std::runtime_error("log_partition_via_expm: non-positive trace");
  return std::log(tr) - beta * shift;
}

double exact_tmp_average(const DrivenHamiltonian& model, double beta, const Eigen::MatrixXcd& u) {
  if (beta <= 0.0) throw std::invalid_argument("exact_tmp_average: beta must be > 0");
  if (model.n() > 8) throw std::invalid_argument("exact_tmp_average: enumeration capped at 8 qubits");
  const Eigen::Index dim = Eigen::Index{1} << model.n();
  if (u.rows() != dim || u.cols() != dim) throw std::invalid_argument("exact_tmp_average: U size mismatch");
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).norm() > 1e-8)
    throw std::invalid_argument("exact_tmp_average: U is not unitary");

  const Spectrum s0 = diagonalize(model.at(0.0));
  const Spectrum s1 = diagonalize(model.at(1.0));
  const double e0_min = s0.eigenvalues.minCoeff();
  const double e1_min = s1.eigenvalues.minCoeff();
  const double shift = e1_min - e0_min;
  // overlap probabilities |<eps_b^t | U | eps_a>|^2
  const Eigen::MatrixXcd o = s1.eigenvectors.adjoint() * u * s0.eigenvectors;
  const double z0_shifted = (-beta * (s0.eigenvalues.array() - e0_min)).exp().sum();
  // Enumerate every (initial, final) eigenstate pair.  Gibbs weight and work
  // exponent are combined in log space before exponentiating; the combined
  // exponent is <= 0 for every pair, so no term can overflow.
  double acc = 0.0;
  for (Eigen::Index a = 0; a < dim; ++a) {
    const double log_gibbs = -beta * (s0.eigenvalues[a] - e0_min);
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double work = s1.eigenvalues[b] - s0.eigenvalues[a];
      acc += std::norm(o(b, a)) * std::exp(log_gibbs - beta * (work - shift));
    }
  }
  // undo the shift applied to the work exponent
  return acc / z0_shifted * std::exp(-beta * shift);
}

}  // namespace qfe
