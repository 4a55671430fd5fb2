#include "qfe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfe {

Trajectory run_trajectory(const MettsSample& sample, const DrivenHamiltonian& model,
                          const RealPropagator* propagator) {
  if (sample.state.n != model.n()) throw std::invalid_argument("run_trajectory: size mismatch");
  Trajectory t;
  t.chain_step = sample.chain_step;
  t.kind = TrajectoryKind::MettsPseudo;
  t.e_initial = expectation(sample.state, model.at(0.0));
  const StateVector evolved =
      propagator ? propagator->apply(sample.state) : propagate_real_trotter(sample.state, model);
  t.e_final = expectation(evolved, model.at(1.0));
  t.work = t.e_final - t.e_initial;
  return t;
}

TmpSampler::TmpSampler(const DrivenHamiltonian& model, double beta)
    : TmpSampler(model, beta, RealPropagator(model).matrix()) {}

TmpSampler::TmpSampler(const DrivenHamiltonian& model, double beta, const Eigen::MatrixXcd& u) {
  build(model, beta, u);
}

void TmpSampler::build(const DrivenHamiltonian& model, double beta, const Eigen::MatrixXcd& u) {
  if (beta <= 0.0) throw std::invalid_argument("TmpSampler: beta must be > 0");
  if (model.n() > 8) throw std::invalid_argument("TmpSampler: spectra enumeration capped at 8 qubits");
  const Spectrum s0 = diagonalize(model.at(0.0));
  const Spectrum s1 = diagonalize(model.at(1.0));
  e0_ = s0.eigenvalues;
  e1_ = s1.eigenvalues;
  const double e0_min = e0_.minCoeff();
  const auto dim = static_cast<std::size_t>(e0_.size());
  gibbs_.resize(dim);
  for (std::size_t a = 0; a < dim; ++a)
    gibbs_[a] = std::exp(-beta * (e0_[static_cast<Eigen::Index>(a)] - e0_min));
  const Eigen::MatrixXcd o = s1.eigenvectors.adjoint() * u * s0.eigenvectors;
  born_.assign(dim, std::vector<double>(dim));
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      born_[a][b] = std::norm(o(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)));
}

Trajectory TmpSampler::sample(Rng& rng) const {
  const std::size_t a = rng.categorical(gibbs_);
  const std::size_t b = rng.categorical(born_[a]);
  Trajectory t;
  t.kind = TrajectoryKind::TmpExact;
  t.e_initial = e0_[static_cast<Eigen::Index>(a)];
  t.e_final = e1_[static_cast<Eigen::Index>(b)];
  t.work = t.e_final - t.e_initial;
  return t;
}

Trajectory sample_tmp_trajectory(const DrivenHamiltonian& model, double beta, Rng& rng) {
  return TmpSampler(model, beta).sample(rng);
}

WorkHistogram work_histogram(const std::vector<Trajectory>& trajectories, int bins) {
  if (trajectories.empty()) throw std::invalid_argument("work_histogram: no trajectories");
  if (bins < 1) throw std::invalid_argument("work_histogram: bins must be >= 1");
  double lo = trajectories.front().work, hi = lo;
  for (const auto& t : trajectories) {
    lo = std::min(lo, t.work);
    hi = std::max(hi, t.work);
  }
  if (lo == hi) {  // degenerate range: pad so the single value has a bin
    lo -= 0.5;
    hi += 0.5;
  }
  WorkHistogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& t : trajectories) {
    auto idx = static_cast<int>((t.work - lo) / width);
    idx = std::clamp(idx, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

}  // namespace qfe
