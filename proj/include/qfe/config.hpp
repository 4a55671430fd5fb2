#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qfe/model.hpp"
#include "qfe/noise.hpp"
#include "qfe/statevector.hpp"

namespace qfe {

enum class RunMode { Noiseless, TmpExact, Noisy };

// Fully validated experiment description.  Parsed from flat key = value text
// (dotted keys, '#' comments); unknown keys are rejected so typos cannot
// silently fall back to defaults.
struct ExperimentConfig {
  std::string preset_name;  // empty when built from a bare file

  // model
  std::string model_name = "tfim";  // tfim | heisenberg
  int n = 2;
  double tfim_jz = 1.0;
  double tfim_hx = 1.0;
  std::array<double, 3> heis_j = {1.0, 1.0, 1.0};
  std::array<double, 3> heis_h = {1.0, 0.0, 0.0};
  double heis_drive_hx = 0.5;  // drive = heis_drive_hx * sum_i X_i

  // protocol; one run may sweep several tau values
  std::vector<double> taus = {10.0};
  double dt_target = 0.01;
  int steps_override = 0;  // > 0 forces a fixed step count for every tau

  std::vector<double> betas = {1.0};
  int m = 100;      // recorded trajectories per (tau, beta), summed over chains
  int warmup = 5;   // discarded per chain
  int chains = 1;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::Noiseless;
  ImagOptions imag{};

  int histogram_bins = 0;        // > 0: emit work_histogram.csv
  bool emit_running_energy = false;

  // noisy mode
  double noise_p2 = 0.01;
  double noise_readout_flip = 0.02;
  int shots = 10000;
  int calibration_shots = 4000;
  ZneFit zne_fit = ZneFit::Quadratic;

  std::string out_dir = "runs/out";

  DrivenHamiltonian build_model(double tau) const;
  int steps_for(double tau) const;
  std::map<std::string, std::string> echo() const;  // resolved key = value map
};

// Parse "key = value" lines.  `source` is used in error messages.
ExperimentConfig parse_config_text(const std::string& text, const std::string& source);
ExperimentConfig load_config_file(const std::string& path);

// Shipped presets (one per canned experiment).
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);
std::string preset_summary(const std::string& name);
ExperimentConfig load_preset(const std::string& name);

}  // namespace qfe
