#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qfe/pauli.hpp"
#include "qfe/rng.hpp"
#include "qfe/statevector.hpp"

namespace qfe {

// One pseudo-thermal state |phi_i> = e^{-beta H/2}|i> / sqrt(P(i)).
struct MettsSample {
  StateVector state;
  ProductState source_cps;
  double weight = 0.0;  // P(i) = <i|e^{-beta H}|i>
  int chain_step = 0;   // 1-based
};

// Markov chain of METTS: start from a random z-basis CPS, then repeat
// (imaginary-time evolve, record, collapse).  The collapse basis alternates
// with step parity: step 1 collapses in z, step 2 in x, and so on.  The chain
// is strictly sequential; parallelism comes from independent chains with
// distinct seeds.
class MettsChain {
 public:
  MettsChain(const PauliOperator& h_initial, double beta, std::uint64_t seed, int warmup,
             ImagOptions imag = {});
  // Shares a prebuilt propagator (one dense diagonalization) across chains.
  MettsChain(std::shared_ptr<const ImagPropagator> propagator, const PauliOperator& h_initial,
             double beta, std::uint64_t seed, int warmup);

  MettsSample next();

  int step_index() const { return step_index_; }
  int warmup() const { return warmup_; }
  double beta() const { return beta_; }
  const ProductState& current_cps() const { return current_; }

 private:
  void init_random_cps();

  PauliOperator h_;
  double beta_;
  Rng rng_;
  int warmup_;
  int step_index_ = 0;
  ProductState current_;
  std::shared_ptr<const ImagPropagator> prop_;
};

// Convenience: advance the chain warmup + m times, return the last m samples.
std::vector<MettsSample> collect_samples(MettsChain& chain, int m);

// Ensemble statistics of <phi|op|phi> (optionally <T phi|op|T phi> for a state
// transform T, e.g. the protocol propagator).  Returns the running-average
// sequence alongside mean and the autocorrelation-naive standard error
// sqrt(var / M).
struct EnsembleAverage {
  double mean = 0.0;
  double stderr_naive = 0.0;
  std::vector<double> running_mean;
};

using StateTransform = std::function<StateVector(const StateVector&)>;

EnsembleAverage ensemble_average(const std::vector<MettsSample>& samples, const PauliOperator& op,
                                 const std::optional<StateTransform>& transform = std::nullopt);

}  // namespace qfe
