#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qfe/dynamics.hpp"
#include "qfe/metts.hpp"
#include "qfe/model.hpp"

namespace qfe {

struct FreeEnergyEstimate {
  double beta = 0.0;
  double delta_f_tilde = 0.0;  // -ln(exp_avg) / beta
  double mean_work = 0.0;
  double exp_avg = 0.0;  // <e^{-beta W}>
  int m_used = 0;
  double stderr_delta_f = 0.0;  // bootstrap
  std::optional<double> sigma_bound;
};

// Jarzynski-style estimate over a work ensemble.  The exponential average is
// accumulated in log space (max-shift) and the error bar comes from a seeded
// bootstrap so repeated runs are bit-identical.
FreeEnergyEstimate jarzynski_estimate(const std::vector<Trajectory>& trajectories, double beta,
                                      int bootstrap_resamples = 1000,
                                      std::uint64_t bootstrap_seed = 0x626f6f74ULL);

// Largest absolute eigenvalue of the sampled METTS overlap matrix
// M_ij = <phi_i|phi_j> (real-time evolution drops out by unitarity).  Grows
// with duplication in the sample list, up to M for M identical samples; the
// sigma entering the rigorous bound is basis_gram_sigma below.
double gram_sigma(const std::vector<MettsSample>& samples);

// Sigma of the bound dF~ >= dF - ln(sigma)/beta: largest eigenvalue of the
// 2^n x 2^n overlap matrix of the complete z-basis METTS family
// e^{-beta H/2}|i> / sqrt(P(i)).  Unit diagonal forces sigma <= 2^n, with
// equality approached as beta -> infinity (all members collapse onto the
// ground state).
double basis_gram_sigma(const PauliOperator& h, double beta);

struct BoundReport {
  double delta_f_exact = 0.0;
  double delta_f_tilde = 0.0;
  double mean_work = 0.0;
  double sigma = 0.0;
  // delta_f_tilde - (delta_f_exact - ln(sigma)/beta); >= 0 up to float noise
  double bound_residual = 0.0;
  double ln_sigma_over_nbeta = 0.0;
  double ln2_over_beta = 0.0;
};

BoundReport bound_report(const FreeEnergyEstimate& estimate, double sigma, double exact_df, int n,
                         double beta);

// 100 |dF~ - dF| / |dF|, with the denominator floored at 1e-12.
double percent_error(double delta_f_tilde, double delta_f_exact);

struct LimitDiagnosticsConfig {
  int m = 300;
  int warmup = 5;
  std::uint64_t seed = 1;
  ImagOptions imag{};
  // The beta->infinity analysis assumes non-degenerate ground states at both
  // endpoints; when set, degenerate spectra are refused instead of silently
  // producing rows the limit argument does not cover.
  bool large_beta_mode = false;
};

struct LimitRow {
  double beta = 0.0;
  double delta_f_exact = 0.0;
  double delta_f_tilde = 0.0;
  double mean_work = 0.0;
  double percent_error = 0.0;
};

// Per-beta METTS estimate table for limit studies (percent-error curves).
std::vector<LimitRow> limit_diagnostics(const DrivenHamiltonian& model,
                                        const std::vector<double>& beta_grid,
                                        const LimitDiagnosticsConfig& config);

}  // namespace qfe
