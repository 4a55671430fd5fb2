#include "qfe/metts.hpp"

#include <cmath>
#include <stdexcept>

namespace qfe {

MettsChain::MettsChain(const PauliOperator& h_initial, double beta, std::uint64_t seed, int warmup,
                       ImagOptions imag)
    : MettsChain(std::make_shared<const ImagPropagator>(h_initial, beta / 2.0, imag), h_initial,
                 beta, seed, warmup) {}

MettsChain::MettsChain(std::shared_ptr<const ImagPropagator> propagator,
                       const PauliOperator& h_initial, double beta, std::uint64_t seed, int warmup)
    : h_(h_initial), beta_(beta), rng_(seed), warmup_(warmup), prop_(std::move(propagator)) {
  if (beta <= 0.0) throw std::invalid_argument("MettsChain: beta must be > 0");
  if (warmup < 0) throw std::invalid_argument("MettsChain: warmup must be >= 0");
  if (!prop_ || prop_->n() != h_.n()) throw std::invalid_argument("MettsChain: propagator mismatch");
  init_random_cps();
}

void MettsChain::init_random_cps() {
  current_.sites.resize(static_cast<std::size_t>(h_.n()));
  for (auto& site : current_.sites)
    site = rng_.integer(2) ? SiteBasis::ZMinus : SiteBasis::ZPlus;
}

MettsSample MettsChain::next() {
  ++step_index_;
  auto [state, weight] = prop_->apply(current_.to_state());
  MettsSample sample{state, current_, weight, step_index_};
  // odd steps collapse in z, even steps in x
  const CollapseBasis basis = (step_index_ % 2 == 1) ? CollapseBasis::Z : CollapseBasis::X;
  current_ = collapse(state, basis, rng_);
  return sample;
}

std::vector<MettsSample> collect_samples(MettsChain& chain, int m) {
  if (m < 1) throw std::invalid_argument("collect_samples: m must be >= 1");
  for (int i = 0; i < chain.warmup(); ++i) chain.next();
  std::vector<MettsSample> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(chain.next());
  return out;
}

EnsembleAverage ensemble_average(const std::vector<MettsSample>& samples, const PauliOperator& op,
                                 const std::optional<StateTransform>& transform) {
  if (samples.size() < 2) throw std::invalid_argument("ensemble_average: need >= 2 samples");
  EnsembleAverage out;
  out.running_mean.reserve(samples.size());
  std::vector<double> values;
  values.reserve(samples.size());
  double acc = 0.0;
  for (const auto& s : samples) {
    const StateVector measured = transform ? (*transform)(s.state) : s.state;
    const double v = expectation(measured, op);
    values.push_back(v);
    acc += v;
    out.running_mean.push_back(acc / static_cast<double>(values.size()));
  }
  const auto m = static_cast<double>(values.size());
  out.mean = acc / m;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stderr_naive = std::sqrt(ss / (m - 1.0) / m);
  return out;
}

}  // namespace qfe
