#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qfe/config.hpp"
#include "qfe/dynamics.hpp"
#include "qfe/estimator.hpp"

namespace qfe {

// One estimates.csv row.
struct EstimateRow {
  double tau = 0.0;
  double beta = 0.0;
  double delta_f_exact = 0.0;
  double delta_f_tilde = 0.0;
  double mean_work = 0.0;
  double exp_avg = 0.0;
  double stderr_delta_f = 0.0;
  int m_used = 0;
  double sigma = 0.0;           // basis Gram bound; NaN in tmp mode (no METTS)
  double bound_residual = 0.0;  // NaN when sigma is NaN
  double ln_sigma_over_nbeta = 0.0;
  double ln2_over_beta = 0.0;
};

// One mitigation.csv row (noisy mode): Jarzynski estimates per variant.
struct MitigationRow {
  double beta = 0.0;
  double raw = 0.0;
  double ro_only = 0.0;
  double zne_only = 0.0;
  double ro_plus_zne = 0.0;
  double noiseless_reference = 0.0;
};

struct RunResult {
  std::vector<EstimateRow> estimates;
  std::vector<MitigationRow> mitigation;  // noisy mode only
  std::string trajectories_path;
  std::string estimates_path;
  std::string metadata_path;
};

// End-to-end seeded experiment: writes trajectories.csv, estimates.csv,
// metadata.json (plus work_histogram.csv / mitigation.csv / running_energy.csv
// when the config asks for them) under config.out_dir.
RunResult run_experiment(const ExperimentConfig& config);

// The noisy work pipeline for a single (tau, beta) cell, exposed for tests
// and the acceptance gate: same METTS ensemble measured through every
// mitigation variant, paired shot-for-shot.
struct NoisyCellResult {
  MitigationRow row;
  std::vector<Trajectory> raw_trajectories;
  std::vector<double> works_noiseless;
  bool calibration_shots_low = false;
};

NoisyCellResult run_noisy_cell(const ExperimentConfig& config, double tau, double beta,
                               std::uint64_t seed);

struct VerifyOptions {
  bool quick = false;
  bool inject_work_sign_error = false;  // mutation hook: must turn a check red
};

// Reduced-scale invariant suite; prints one line per check, returns the number
// of failed checks (0 = all green).
int verify(const VerifyOptions& options);

}  // namespace qfe
