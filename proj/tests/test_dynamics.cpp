#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qfe/dynamics.hpp"
#include "qfe/estimator.hpp"
#include "qfe/exact.hpp"
#include "qfe/metts.hpp"
#include "qfe/model.hpp"

using namespace qfe;

namespace {

MettsSample sample_from_state(const StateVector& s) {
  MettsSample out;
  out.state = s;
  out.weight = 1.0;
  out.chain_step = 1;
  return out;
}

StateVector ground_state(const PauliOperator& h) {
  const Spectrum spec = diagonalize(h);
  StateVector g;
  g.n = h.n();
  g.amp = spec.eigenvectors.col(0);
  return g;
}

}  // namespace

TEST_CASE("zero drive means zero work for every sample") {
  DrivenHamiltonian frozen{build_tfim(2, 1.0, 1.0).base, PauliOperator(2), {10.0, 100}};
  MettsChain chain(frozen.base, 1.0, 5, 0);
  const RealPropagator prop(frozen);
  for (const auto& s : collect_samples(chain, 10)) {
    const Trajectory t = run_trajectory(s, frozen, &prop);
    CHECK(std::abs(t.work) < 1e-8);
    CHECK(t.kind == TrajectoryKind::MettsPseudo);
  }
}

TEST_CASE("work equals final minus initial energy exactly") {
  const DrivenHamiltonian m = build_tfim(2, 1.0, 1.0, {10.0, 100});
  MettsChain chain(m.base, 1.0, 9, 0);
  const RealPropagator prop(m);
  for (const auto& s : collect_samples(chain, 20)) {
    const Trajectory t = run_trajectory(s, m, &prop);
    CHECK(t.work == t.e_final - t.e_initial);
  }
}

TEST_CASE("adiabatic ground-state trajectory tracks the ground-gap") {
  for (int n : {2, 3}) {
    const DrivenHamiltonian m = build_tfim(n, 1.0, 1.0, {50.0, 5000});
    const StateVector g = ground_state(m.at(0.0));
    const Trajectory t = run_trajectory(sample_from_state(g), m);
    const double gap =
        diagonalize(m.at(1.0)).eigenvalues(0) - diagonalize(m.at(0.0)).eigenvalues(0);
    CHECK(std::abs(t.work - gap) < 1e-2);
  }
}

TEST_CASE("sudden quench barely evolves the state") {
  const DrivenHamiltonian m = build_tfim(2, 1.0, 1.0, {1e-3, 1});
  MettsChain chain(m.base, 1.0, 13, 0);
  for (const auto& s : collect_samples(chain, 5)) {
    const Trajectory t = run_trajectory(s, m);
    CHECK(std::abs(t.e_final - expectation(s.state, m.at(1.0))) < 1e-3);
  }
}

TEST_CASE("TMP with identical endpoints and identity propagator gives zero work") {
  DrivenHamiltonian frozen{build_tfim(2, 1.0, 1.0).base, PauliOperator(2), {}};
  const TmpSampler sampler(frozen, 1.0, Eigen::MatrixXcd::Identity(4, 4));
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const Trajectory t = sampler.sample(rng);
    CHECK(t.work == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t.kind == TrajectoryKind::TmpExact);
  }
}

TEST_CASE("TMP exponential-work average reproduces Z_t/Z_0 at scale") {
  const DrivenHamiltonian m = build_tfim(2, 1.0, 1.0);
  const double beta = 1.0;
  const TmpSampler sampler(m, beta);
  Rng rng(2024);
  std::vector<Trajectory> ts;
  ts.reserve(100000);
  for (int i = 0; i < 100000; ++i) ts.push_back(sampler.sample(rng));
  const FreeEnergyEstimate est = jarzynski_estimate(ts, beta);
  const double exact = exact_delta_f(m, beta);
  CHECK(std::abs(est.delta_f_tilde - exact) < 4.0 * est.stderr_delta_f);
}

TEST_CASE("commuting endpoints, sudden quench: works are diagonal differences") {
  PauliOperator base(2);
  base.add(1.0, "ZZ").add(0.7, "ZI").add(0.3, "IZ");
  PauliOperator drive(2);
  drive.add(0.4, "ZI");
  const DrivenHamiltonian m{base, drive, {1e-3, 1}};
  const RealPropagator prop(m);

  const Eigen::VectorXd d0 = to_dense(m.at(0.0)).diagonal().real();
  const Eigen::VectorXd d1 = to_dense(m.at(1.0)).diagonal().real();
  Rng rng(77);
  const TmpSampler sampler(m, 1.0, prop.matrix());
  for (int i = 0; i < 200; ++i) {
    const Trajectory t = sampler.sample(rng);
    bool matches = false;
    for (int j = 0; j < 4; ++j) matches = matches || std::abs(t.work - (d1(j) - d0(j))) < 1e-9;
    CHECK(matches);
  }
}

TEST_CASE("mean TMP work respects the reversible-work bound") {
  const DrivenHamiltonian m = build_tfim(2, 1.0, 1.0);
  const double beta = 1.0;
  const double exact = exact_delta_f(m, beta);
  const TmpSampler sampler(m, beta);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Rng rng(seed);
    double mean = 0.0, ss = 0.0;
    const int n = 1000;
    std::vector<double> works(n);
    for (auto& w : works) w = sampler.sample(rng).work;
    for (double w : works) mean += w;
    mean /= n;
    for (double w : works) ss += (w - mean) * (w - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    CHECK(mean >= exact - 4.0 * se);
  }
}

TEST_CASE("mean pseudo-work equals the difference of ensemble energy averages") {
  const DrivenHamiltonian m = build_tfim(2, 1.0, 1.0, {10.0, 200});
  const RealPropagator prop(m);
  MettsChain chain(m.base, 1.0, 21, 2);
  const auto samples = collect_samples(chain, 50);
  std::vector<Trajectory> ts;
  for (const auto& s : samples) ts.push_back(run_trajectory(s, m, &prop));
  double mean_work = 0.0;
  for (const auto& t : ts) mean_work += t.work;
  mean_work /= static_cast<double>(ts.size());

  const StateTransform evolve = [&](const StateVector& s) { return prop.apply(s); };
  const EnsembleAverage ef = ensemble_average(samples, m.at(1.0), evolve);
  const EnsembleAverage ei = ensemble_average(samples, m.at(0.0));
  CHECK(mean_work == doctest::Approx(ef.mean - ei.mean).epsilon(1e-12));
}

TEST_CASE("work histogram bookkeeping") {
  std::vector<Trajectory> zeros(25);
  const WorkHistogram flat = work_histogram(zeros, 10);
  REQUIRE(flat.edges.size() == 11);
  int occupied = 0, total = 0;
  for (int c : flat.counts) {
    if (c > 0) ++occupied;
    total += c;
  }
  CHECK(occupied == 1);
  CHECK(total == 25);

  std::vector<Trajectory> spread(4);
  spread[0].work = -1.0;
  spread[1].work = -0.5;
  spread[2].work = 0.25;
  spread[3].work = 1.0;
  const WorkHistogram h = work_histogram(spread, 4);
  CHECK(h.edges.front() == doctest::Approx(-1.0));
  CHECK(h.edges.back() == doctest::Approx(1.0));
  int sum = 0;
  for (int c : h.counts) sum += c;
  CHECK(sum == 4);

  CHECK_THROWS(work_histogram(spread, 0));
  CHECK_THROWS(work_histogram({}, 4));
}
