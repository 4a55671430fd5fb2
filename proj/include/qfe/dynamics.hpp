#pragma once

#include <vector>

#include "qfe/exact.hpp"
#include "qfe/metts.hpp"
#include "qfe/model.hpp"
#include "qfe/rng.hpp"
#include "qfe/statevector.hpp"

namespace qfe {

enum class TrajectoryKind { MettsPseudo, TmpExact };

struct Trajectory {
  double e_initial = 0.0;
  double e_final = 0.0;
  double work = 0.0;  // e_final - e_initial, always
  int chain_step = 0;
  TrajectoryKind kind = TrajectoryKind::MettsPseudo;
};

// Pseudo-work of one METTS sample: drive through the full lambda protocol,
// measure H(0) before and H(1) after.  Energies are exact expectation values;
// shot noise exists only in the noisy pipeline.  Pass a prebuilt propagator
// when running many samples.
Trajectory run_trajectory(const MettsSample& sample, const DrivenHamiltonian& model,
                          const RealPropagator* propagator = nullptr);

// Exact two-measurement-protocol sampler: Gibbs-sample an eigenstate of H(0),
// evolve, Born-sample an eigenstate of H(1).  An unbiased draw from the true
// quantum work distribution.  Reusable across draws (caches both spectra and
// the overlap table).
class TmpSampler {
 public:
  TmpSampler(const DrivenHamiltonian& model, double beta);
  TmpSampler(const DrivenHamiltonian& model, double beta, const Eigen::MatrixXcd& u);

  Trajectory sample(Rng& rng) const;

 private:
  void build(const DrivenHamiltonian& model, double beta, const Eigen::MatrixXcd& u);

  Eigen::VectorXd e0_, e1_;
  std::vector<double> gibbs_;              // Gibbs weights over H(0) eigenstates
  std::vector<std::vector<double>> born_;  // born_[a][b] = |<eps_b^t|U|eps_a>|^2
};

Trajectory sample_tmp_trajectory(const DrivenHamiltonian& model, double beta, Rng& rng);

struct WorkHistogram {
  std::vector<double> edges;   // bins + 1 ascending edges
  std::vector<int> counts;     // per bin; sums to the trajectory count
};

WorkHistogram work_histogram(const std::vector<Trajectory>& trajectories, int bins);

}  // namespace qfe
