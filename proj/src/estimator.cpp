#include "qfe/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfe/exact.hpp"
#include "qfe/rng.hpp"

namespace qfe {

namespace {

// -ln( mean_i e^{-beta w_i} ) / beta, max-shifted.
double delta_f_from_works(const std::vector<double>& works, double beta) {
  double shift = -beta * works[0];
  for (double w : works) shift = std::max(shift, -beta * w);
  double acc = 0.0;
  for (double w : works) acc += std::exp(-beta * w - shift);
  return -(shift + std::log(acc / static_cast<double>(works.size()))) / beta;
}

}  // namespace

FreeEnergyEstimate jarzynski_estimate(const std::vector<Trajectory>& trajectories, double beta,
                                      int bootstrap_resamples, std::uint64_t bootstrap_seed) {
  if (beta <= 0.0) throw std::invalid_argument("jarzynski_estimate: beta must be > 0");
  if (trajectories.size() < 2) throw std::invalid_argument("jarzynski_estimate: need >= 2 trajectories");
  std::vector<double> works;
  works.reserve(trajectories.size());
  double mean_work = 0.0;
  for (const auto& t : trajectories) {
    works.push_back(t.work);
    mean_work += t.work;
  }
  mean_work /= static_cast<double>(works.size());

  FreeEnergyEstimate est;
  est.beta = beta;
  est.m_used = static_cast<int>(works.size());
  est.mean_work = mean_work;
  est.delta_f_tilde = delta_f_from_works(works, beta);
  est.exp_avg = std::exp(-beta * est.delta_f_tilde);

  if (bootstrap_resamples > 1) {
    Rng rng(bootstrap_seed);
    std::vector<double> replica(works.size());
    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(bootstrap_resamples));
    for (int r = 0; r < bootstrap_resamples; ++r) {
      for (auto& w : replica) w = works[rng.integer(works.size())];
      estimates.push_back(delta_f_from_works(replica, beta));
    }
    double mean = 0.0;
    for (double v : estimates) mean += v;
    mean /= static_cast<double>(estimates.size());
    double ss = 0.0;
    for (double v : estimates) ss += (v - mean) * (v - mean);
    est.stderr_delta_f = std::sqrt(ss / (static_cast<double>(estimates.size()) - 1.0));
  }
  return est;
}

double gram_sigma(const std::vector<MettsSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("gram_sigma: no samples");
  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXcd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const std::complex<double> o =
          samples[static_cast<std::size_t>(i)].state.amp.dot(samples[static_cast<std::size_t>(j)].state.amp);
      gram(i, j) = o;
      gram(j, i) = std::conj(o);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("gram_sigma: eigensolver failed");
  return es.eigenvalues().array().abs().maxCoeff();
}

double basis_gram_sigma(const PauliOperator& h, double beta) {
  const Spectrum spectrum = diagonalize(h);
  // G_ij = <i|e^{-beta(H - e_min)}|j> / sqrt(G_ii G_jj); the spectral shift
  // cancels in the ratio, so large beta stays finite.
  const Eigen::ArrayXd boltz = (-beta * (spectrum.eigenvalues.array() - spectrum.eigenvalues(0))).exp();
  Eigen::MatrixXcd gram = spectrum.eigenvectors * boltz.matrix().asDiagonal() *
                          spectrum.eigenvectors.adjoint();
  const Eigen::VectorXd scale =
      gram.diagonal().real().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  gram = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("basis_gram_sigma: eigensolver failed");
  return es.eigenvalues().array().abs().maxCoeff();
}

BoundReport bound_report(const FreeEnergyEstimate& estimate, double sigma, double exact_df, int n,
                         double beta) {
  BoundReport r;
  r.delta_f_exact = exact_df;
  r.delta_f_tilde = estimate.delta_f_tilde;
  r.mean_work = estimate.mean_work;
  r.sigma = sigma;
  r.bound_residual = estimate.delta_f_tilde - (exact_df - std::log(sigma) / beta);
  r.ln_sigma_over_nbeta = std::log(sigma) / (n * beta);
  r.ln2_over_beta = std::log(2.0) / beta;
  return r;
}

double percent_error(double delta_f_tilde, double delta_f_exact) {
  const double denom = std::max(std::abs(delta_f_exact), 1e-12);
  return 100.0 * std::abs(delta_f_tilde - delta_f_exact) / denom;
}

std::vector<LimitRow> limit_diagnostics(const DrivenHamiltonian& model,
                                        const std::vector<double>& beta_grid,
                                        const LimitDiagnosticsConfig& config) {
  if (beta_grid.empty()) throw std::invalid_argument("limit_diagnostics: empty beta grid");
  if (config.m < 2) throw std::invalid_argument("limit_diagnostics: m must be >= 2");
  if (config.large_beta_mode) {
    for (double lambda : {0.0, 1.0}) {
      const ThermalSummary s = thermal_summary(diagonalize(model.at(lambda)), 1.0);
      if (s.ground_degeneracy != 1)
        throw std::invalid_argument(
            "limit_diagnostics: beta->infinity analysis needs non-degenerate ground states; "
            "H(" + std::to_string(lambda) + ") has ground degeneracy " +
            std::to_string(s.ground_degeneracy));
    }
  }
  const RealPropagator propagator(model);
  std::vector<LimitRow> rows;
  rows.reserve(beta_grid.size());
  for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
    const double beta = beta_grid[bi];
    MettsChain chain(model.at(0.0), beta, derive_seed(config.seed, bi), config.warmup, config.imag);
    const std::vector<MettsSample> samples = collect_samples(chain, config.m);
    std::vector<Trajectory> trajectories;
    trajectories.reserve(samples.size());
    for (const auto& s : samples) trajectories.push_back(run_trajectory(s, model, &propagator));
    const FreeEnergyEstimate est = jarzynski_estimate(trajectories, beta);
    LimitRow row;
    row.beta = beta;
    row.delta_f_exact = exact_delta_f(model, beta);
    row.delta_f_tilde = est.delta_f_tilde;
    row.mean_work = est.mean_work;
    row.percent_error = percent_error(est.delta_f_tilde, row.delta_f_exact);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qfe
