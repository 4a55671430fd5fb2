#include "qfe/experiment.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "qfe/csv.hpp"
#include "qfe/dynamics.hpp"
#include "qfe/exact.hpp"
#include "qfe/metts.hpp"
#include "qfe/noise.hpp"
#include "qfe/rng.hpp"

namespace qfe {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* kind_str(TrajectoryKind k) {
  return k == TrajectoryKind::MettsPseudo ? "metts_pseudo" : "tmp_exact";
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct TrajectoryRow {
  double tau;
  double beta;
  int chain;
  Trajectory t;
};

EstimateRow make_estimate_row(double tau, double beta, const FreeEnergyEstimate& est,
                              double exact_df, double sigma, int n) {
  EstimateRow row;
  row.tau = tau;
  row.beta = beta;
  row.delta_f_exact = exact_df;
  row.delta_f_tilde = est.delta_f_tilde;
  row.mean_work = est.mean_work;
  row.exp_avg = est.exp_avg;
  row.stderr_delta_f = est.stderr_delta_f;
  row.m_used = est.m_used;
  row.sigma = sigma;
  if (std::isnan(sigma)) {
    row.bound_residual = kNan;
    row.ln_sigma_over_nbeta = kNan;
  } else {
    const BoundReport br = bound_report(est, sigma, exact_df, n, beta);
    row.bound_residual = br.bound_residual;
    row.ln_sigma_over_nbeta = br.ln_sigma_over_nbeta;
  }
  row.ln2_over_beta = std::log(2.0) / beta;
  return row;
}

}  // namespace

NoisyCellResult run_noisy_cell(const ExperimentConfig& config, double tau, double beta,
                               std::uint64_t seed) {
  const DrivenHamiltonian model = config.build_model(tau);
  const PauliOperator h0 = model.at(0.0);
  const PauliOperator h1 = model.at(1.0);
  const NoiseModel noise = NoiseModel::symmetric(config.n, config.noise_p2, config.noise_readout_flip);

  const Circuit protocol_circuit = compile_protocol(model);
  const Eigen::MatrixXcd ideal_unitary = circuit_unitary(protocol_circuit);

  Rng cal_rng(derive_seed(seed, 0xCA11ULL));
  const Eigen::MatrixXd calibration =
      calibration_matrix(config.n, noise, config.calibration_shots, cal_rng);

  NoisyCellResult result;
  result.calibration_shots_low = calibration_shots_low(config.n, config.calibration_shots);

  const auto imag_prop =
      std::make_shared<const ImagPropagator>(h0, beta / 2.0, config.imag);
  const int m_chain = config.m / config.chains;
  std::vector<double> works_raw, works_ro, works_zne, works_rozne, works_ref;
  for (int c = 0; c < config.chains; ++c) {
    MettsChain chain(imag_prop, h0, beta, derive_seed(seed, 0, 0, static_cast<std::uint64_t>(c)),
                     config.warmup);
    Rng meas_rng(derive_seed(seed, 0x3EA5ULL, 0, static_cast<std::uint64_t>(c)));
    const std::vector<MettsSample> samples = collect_samples(chain, m_chain);
    for (const auto& sample : samples) {
      const DensityMatrix rho0 = DensityMatrix::from_state(sample.state);

      // initial energy: no gates, so readout noise is the only corruption
      const auto groups_i = measure_groups(rho0, h0, noise, config.shots, meas_rng);
      const double ei_raw = expectation_from_groups(h0, groups_i);
      const double ei_ro = expectation_from_groups(h0, groups_i, &calibration);
      const double ei_ref = expectation(sample.state, h0);

      // final energy through the compiled protocol at CNOT folds 1/3/5
      std::vector<double> ef_raw_folds, ef_ro_folds, fold_xs;
      for (int fold : {1, 3, 5}) {
        const DensityMatrix rho_f = run_noisy(fold_cnots(protocol_circuit, fold), rho0, noise);
        const auto groups_f = measure_groups(rho_f, h1, noise, config.shots, meas_rng);
        ef_raw_folds.push_back(expectation_from_groups(h1, groups_f));
        ef_ro_folds.push_back(expectation_from_groups(h1, groups_f, &calibration));
        fold_xs.push_back(static_cast<double>(fold));
      }
      const double ef_raw = ef_raw_folds[0];
      const double ef_ro = ef_ro_folds[0];
      const double ef_zne = extrapolate_to_zero(fold_xs, ef_raw_folds, config.zne_fit);
      const double ef_rozne = extrapolate_to_zero(fold_xs, ef_ro_folds, config.zne_fit);

      StateVector evolved;
      evolved.n = sample.state.n;
      evolved.amp = ideal_unitary * sample.state.amp;
      const double ef_ref = expectation(evolved, h1);

      Trajectory raw;
      raw.e_initial = ei_raw;
      raw.e_final = ef_raw;
      raw.work = ef_raw - ei_raw;
      raw.chain_step = sample.chain_step;
      raw.kind = TrajectoryKind::MettsPseudo;
      result.raw_trajectories.push_back(raw);

      works_raw.push_back(ef_raw - ei_raw);
      works_ro.push_back(ef_ro - ei_ro);
      works_zne.push_back(ef_zne - ei_raw);      // ZNE has nothing to fold on the
      works_rozne.push_back(ef_rozne - ei_ro);   // gateless initial measurement
      works_ref.push_back(ef_ref - ei_ref);
    }
  }

  const auto estimate = [&](const std::vector<double>& works) {
    std::vector<Trajectory> ts(works.size());
    for (std::size_t i = 0; i < works.size(); ++i) {
      ts[i].work = works[i];
      ts[i].e_final = works[i];
      ts[i].kind = TrajectoryKind::MettsPseudo;
    }
    return jarzynski_estimate(ts, beta).delta_f_tilde;
  };
  result.row.beta = beta;
  result.row.raw = estimate(works_raw);
  result.row.ro_only = estimate(works_ro);
  result.row.zne_only = estimate(works_zne);
  result.row.ro_plus_zne = estimate(works_rozne);
  result.row.noiseless_reference = estimate(works_ref);
  result.works_noiseless = works_ref;
  return result;
}

RunResult run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  const auto t_start = std::chrono::steady_clock::now();
  const std::string start_stamp = iso_timestamp();
  fs::create_directories(config.out_dir);

  RunResult result;
  result.trajectories_path = config.out_dir + "/trajectories.csv";
  result.estimates_path = config.out_dir + "/estimates.csv";
  result.metadata_path = config.out_dir + "/metadata.json";

  std::vector<TrajectoryRow> trajectory_rows;
  std::vector<std::tuple<double, double, double, double, long long>> histogram_rows;
  std::vector<std::pair<int, double>> running_energy_rows;
  bool calibration_warning = false;

  for (std::size_t ti = 0; ti < config.taus.size(); ++ti) {
    const double tau = config.taus[ti];
    const DrivenHamiltonian model = config.build_model(tau);
    const PauliOperator h0 = model.at(0.0);

    std::optional<RealPropagator> propagator;
    if (config.mode != RunMode::Noisy) propagator.emplace(model);

    for (std::size_t bi = 0; bi < config.betas.size(); ++bi) {
      const double beta = config.betas[bi];
      std::vector<Trajectory> trajectories;
      double sigma = kNan;

      if (config.mode == RunMode::Noiseless) {
        const auto imag_prop =
            std::make_shared<const ImagPropagator>(h0, beta / 2.0, config.imag);
        const int m_chain = config.m / config.chains;
        for (int c = 0; c < config.chains; ++c) {
          MettsChain chain(imag_prop, h0, beta,
                           derive_seed(config.seed, ti, bi, static_cast<std::uint64_t>(c)),
                           config.warmup);
          std::vector<MettsSample> samples = collect_samples(chain, m_chain);
          for (const auto& s : samples) {
            Trajectory t = run_trajectory(s, model, &*propagator);
            trajectories.push_back(t);
            trajectory_rows.push_back({tau, beta, c, t});
          }
          if (config.emit_running_energy && ti == 0 && bi == 0 && c == 0) {
            const EnsembleAverage ea = ensemble_average(samples, h0);
            for (std::size_t k = 0; k < ea.running_mean.size(); ++k)
              running_energy_rows.emplace_back(static_cast<int>(k) + 1, ea.running_mean[k]);
          }
        }
        sigma = basis_gram_sigma(h0, beta);
      } else if (config.mode == RunMode::TmpExact) {
        const TmpSampler sampler(model, beta, propagator->matrix());
        Rng rng(derive_seed(config.seed, ti, bi, 0));
        for (int i = 0; i < config.m; ++i) {
          Trajectory t = sampler.sample(rng);
          t.chain_step = i + 1;
          trajectories.push_back(t);
          trajectory_rows.push_back({tau, beta, 0, t});
        }
      } else {
        NoisyCellResult cell = run_noisy_cell(config, tau, beta, config.seed);
        calibration_warning = calibration_warning || cell.calibration_shots_low;
        trajectories = cell.raw_trajectories;
        const int m_chain = config.m / config.chains;
        for (std::size_t k = 0; k < trajectories.size(); ++k)
          trajectory_rows.push_back({tau, beta, static_cast<int>(k) / m_chain, trajectories[k]});
        result.mitigation.push_back(cell.row);
        sigma = basis_gram_sigma(h0, beta);
      }

      const FreeEnergyEstimate est = jarzynski_estimate(trajectories, beta);
      const double exact_df = exact_delta_f(model, beta);
      result.estimates.push_back(make_estimate_row(tau, beta, est, exact_df, sigma, config.n));

      if (config.histogram_bins > 0) {
        const WorkHistogram h = work_histogram(trajectories, config.histogram_bins);
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
          histogram_rows.emplace_back(tau, beta, h.edges[b], h.edges[b + 1],
                                      static_cast<long long>(h.counts[b]));
      }
    }
  }

  {
    CsvWriter w(result.trajectories_path,
                {"tau", "beta", "chain", "chain_step", "kind", "e_initial", "e_final", "work"});
    for (const auto& r : trajectory_rows)
      w.row({r.tau, r.beta, static_cast<long long>(r.chain), static_cast<long long>(r.t.chain_step),
             std::string(kind_str(r.t.kind)), r.t.e_initial, r.t.e_final, r.t.work});
  }
  {
    CsvWriter w(result.estimates_path,
                {"tau", "beta", "delta_f_exact", "delta_f_tilde", "mean_work", "exp_avg",
                 "stderr_delta_f", "m_used", "sigma", "bound_residual", "ln_sigma_over_nbeta",
                 "ln2_over_beta"});
    for (const auto& r : result.estimates)
      w.row({r.tau, r.beta, r.delta_f_exact, r.delta_f_tilde, r.mean_work, r.exp_avg,
             r.stderr_delta_f, static_cast<long long>(r.m_used), r.sigma, r.bound_residual,
             r.ln_sigma_over_nbeta, r.ln2_over_beta});
  }
  if (!histogram_rows.empty()) {
    CsvWriter w(config.out_dir + "/work_histogram.csv",
                {"tau", "beta", "bin_lo", "bin_hi", "count"});
    for (const auto& [tau, beta, lo, hi, count] : histogram_rows)
      w.row({tau, beta, lo, hi, count});
  }
  if (!running_energy_rows.empty()) {
    CsvWriter w(config.out_dir + "/running_energy.csv", {"sample", "running_mean_e_initial"});
    for (const auto& [k, v] : running_energy_rows) w.row({static_cast<long long>(k), v});
  }
  if (!result.mitigation.empty()) {
    CsvWriter w(config.out_dir + "/mitigation.csv",
                {"beta", "raw", "ro_only", "zne_only", "ro_plus_zne", "noiseless_reference"});
    for (const auto& r : result.mitigation)
      w.row({r.beta, r.raw, r.ro_only, r.zne_only, r.ro_plus_zne, r.noiseless_reference});
  }

  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  nlohmann::json meta;
  meta["config"] = config.echo();
  if (!config.preset_name.empty()) meta["preset"] = config.preset_name;
  meta["seed_rule"] =
      "stream(tau_index, beta_index, chain) = splitmix64-derived from master seed; "
      "restarting any (tau, beta) cell reproduces its rows bit-identically";
  meta["versions"] = {{"artifact", "0.1.0"},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__}};
  meta["wall_time_ms"] = wall_ms;
  meta["started_at"] = start_stamp;
  meta["finished_at"] = iso_timestamp();
  nlohmann::json warnings = nlohmann::json::array();
  if (calibration_warning)
    warnings.push_back("calibration shots below 100 * 2^n; calibration matrix may be undersampled");
  meta["warnings"] = warnings;
  std::ofstream meta_out(result.metadata_path);
  meta_out << meta.dump(2) << "\n";

  return result;
}

// --- verify -----------------------------------------------------------------

namespace {

struct Check {
  std::string name;
  bool quick = true;
  std::function<std::pair<bool, std::string>()> run;
};

std::pair<bool, std::string> check_tmp_identity(bool quick) {
  double worst = 0.0;
  for (int n : {2, 3}) {
    if (quick && n == 3) continue;
    LambdaProtocol protocol{10.0, quick ? 200 : 1000, LambdaProtocol::Shape::Linear};
    const DrivenHamiltonian model = build_tfim(n, 1.0, 1.0, protocol);
    const RealPropagator prop(model);
    for (double beta : {0.5, 1.0, 2.0}) {
      const double tmp = exact_tmp_average(model, beta, prop.matrix());
      const double z_ratio = std::exp(-beta * exact_delta_f(model, beta));
      worst = std::max(worst, std::abs(tmp - z_ratio));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |<e^-bW>_TMP - Z_t/Z_0| = %.3e (tol 1e-9)", worst);
  return {worst < 1e-9, buf};
}

std::pair<bool, std::string> check_oracle_crosscheck() {
  double worst = 0.0;
  for (const auto& [n, beta] : std::vector<std::pair<int, double>>{{3, 0.5}, {2, 2.0}}) {
    const DrivenHamiltonian model = build_tfim(n, 1.0, 1.0);
    const double df_diag = exact_delta_f(model, beta);
    const double df_expm = -(log_partition_via_expm(model.at(1.0), beta) -
                             log_partition_via_expm(model.at(0.0), beta)) /
                           beta;
    worst = std::max(worst, std::abs(df_diag - df_expm));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |dF_diag - dF_expm| = %.3e (tol 1e-8)", worst);
  return {worst < 1e-8, buf};
}

std::pair<bool, std::string> check_tmp_consistency(bool quick, bool inject_sign_error) {
  const DrivenHamiltonian model = build_tfim(2, 1.0, 1.0, {10.0, quick ? 200 : 1000});
  const double beta = 1.0;
  const TmpSampler sampler(model, beta);
  Rng rng(42);
  std::vector<Trajectory> ts;
  const int m = quick ? 1000 : 4000;
  for (int i = 0; i < m; ++i) {
    Trajectory t = sampler.sample(rng);
    if (inject_sign_error) t.work = -t.work;
    ts.push_back(t);
  }
  const FreeEnergyEstimate est = jarzynski_estimate(ts, beta);
  const double exact = exact_delta_f(model, beta);
  const double dev = std::abs(est.delta_f_tilde - exact);
  const double tol = 4.0 * est.stderr_delta_f + 1e-3;
  char buf[112];
  std::snprintf(buf, sizeof(buf), "|dF~_TMP - dF| = %.3e vs 4*stderr+1e-3 = %.3e (M=%d)", dev, tol, m);
  return {dev < tol, buf};
}

std::pair<bool, std::string> check_metts_sandwich(bool quick) {
  const DrivenHamiltonian model = build_tfim(2, 1.0, 1.0, {10.0, quick ? 200 : 1000});
  const double beta = 1.0;
  const RealPropagator prop(model);
  MettsChain chain(model.at(0.0), beta, 42, 5);
  const std::vector<MettsSample> samples = collect_samples(chain, quick ? 100 : 200);
  std::vector<Trajectory> ts;
  for (const auto& s : samples) ts.push_back(run_trajectory(s, model, &prop));
  const FreeEnergyEstimate est = jarzynski_estimate(ts, beta);
  const double sigma = basis_gram_sigma(model.at(0.0), beta);
  const double exact = exact_delta_f(model, beta);
  double se_w = 0.0;
  for (const auto& t : ts) se_w += (t.work - est.mean_work) * (t.work - est.mean_work);
  se_w = std::sqrt(se_w / (ts.size() - 1.0) / static_cast<double>(ts.size()));
  const bool sigma_ok = sigma <= 4.0 + 1e-9;
  const bool lower_ok =
      est.delta_f_tilde >= exact - std::log(sigma) / beta - 4.0 * est.stderr_delta_f - 1e-8;
  const bool upper_ok = est.delta_f_tilde <= est.mean_work + 4.0 * se_w;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "dF - ln(sigma)/beta = %.4f <= dF~ = %.4f <= <W> + 4se = %.4f; sigma = %.3f <= 4",
                exact - std::log(sigma) / beta, est.delta_f_tilde, est.mean_work + 4.0 * se_w, sigma);
  return {sigma_ok && lower_ok && upper_ok, buf};
}

std::pair<bool, std::string> check_adiabatic_bound() {
  const DrivenHamiltonian model = build_tfim(2, 1.0, 1.0, {50.0, 5000});
  const RealPropagator prop(model);
  bool ok = true;
  double gap20 = 0.0;
  for (double beta : {5.0, 20.0}) {
    MettsChain chain(model.at(0.0), beta, 7, 5);
    std::vector<Trajectory> ts;
    for (const auto& s : collect_samples(chain, 100)) ts.push_back(run_trajectory(s, model, &prop));
    const FreeEnergyEstimate est = jarzynski_estimate(ts, beta);
    const double exact = exact_delta_f(model, beta);
    ok = ok && est.delta_f_tilde >= exact - 1e-8;
    if (beta == 20.0) {
      gap20 = est.delta_f_tilde - exact;
      ok = ok && gap20 < 1e-2;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "dF~ >= dF on both betas; gap at beta=20 = %.3e (tol 1e-2)", gap20);
  return {ok, buf};
}

std::pair<bool, std::string> check_beta0_absolute() {
  const DrivenHamiltonian model = build_tfim(2, 1.0, 1.0, {10.0, 1000});
  const double beta = 0.01;
  const RealPropagator prop(model);
  MettsChain chain(model.at(0.0), beta, 11, 5);
  std::vector<Trajectory> ts;
  for (const auto& s : collect_samples(chain, 1000)) ts.push_back(run_trajectory(s, model, &prop));
  const FreeEnergyEstimate est = jarzynski_estimate(ts, beta);
  const double exact = exact_delta_f(model, beta);
  const double dev = std::abs(est.delta_f_tilde - exact);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "|dF~ - dF| at beta=0.01 = %.4f (absolute tol 0.02)", dev);
  return {dev < 0.02, buf};
}

std::pair<bool, std::string> check_imag_convergence() {
  const DrivenHamiltonian model = build_tfim(3, 1.0, 1.0);
  const PauliOperator h0 = model.at(0.0);
  const double beta = 1.0;
  const ImagPropagator exact_prop(h0, beta / 2.0);
  std::vector<double> errors;
  for (double dbeta : {0.1, 0.01}) {
    const ImagPropagator trotter_prop(h0, beta / 2.0, {ImagBackend::Trotter, dbeta});
    double err = 0.0;
    for (std::uint64_t b = 0; b < 8; ++b) {
      const StateVector cps = StateVector::basis_state(3, b);
      const auto [sa, wa] = exact_prop.apply(cps);
      const auto [sb, wb] = trotter_prop.apply(cps);
      err += 1.0 - sa.fidelity(sb);
    }
    errors.push_back(err);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "summed infidelity: dbeta=0.1 -> %.3e, dbeta=0.01 -> %.3e", errors[0],
                errors[1]);
  return {errors[1] < errors[0], buf};
}

std::pair<bool, std::string> check_determinism() {
  const DrivenHamiltonian model = build_tfim(2, 1.0, 1.0, {10.0, 100});
  const RealPropagator prop(model);
  std::vector<double> works[2];
  for (int rep = 0; rep < 2; ++rep) {
    MettsChain chain(model.at(0.0), 1.0, 123, 2);
    for (const auto& s : collect_samples(chain, 30))
      works[rep].push_back(run_trajectory(s, model, &prop).work);
  }
  const bool same = works[0] == works[1];
  return {same, same ? "two seeded reruns produced bit-identical work sequences"
                     : "seeded reruns diverged"};
}

}  // namespace

int verify(const VerifyOptions& options) {
  std::vector<Check> checks;
  checks.push_back({"tmp-identity", true, [&] { return check_tmp_identity(options.quick); }});
  checks.push_back({"oracle-crosscheck", true, [&] { return check_oracle_crosscheck(); }});
  checks.push_back({"jarzynski-tmp-consistency", true, [&] {
                      return check_tmp_consistency(options.quick, options.inject_work_sign_error);
                    }});
  checks.push_back({"metts-sandwich", true, [&] { return check_metts_sandwich(options.quick); }});
  checks.push_back({"adiabatic-upper-bound", false, [&] { return check_adiabatic_bound(); }});
  checks.push_back({"beta0-absolute-closeness", false, [&] { return check_beta0_absolute(); }});
  checks.push_back({"imag-backend-convergence", false, [&] { return check_imag_convergence(); }});
  checks.push_back({"determinism", true, [&] { return check_determinism(); }});

  int failures = 0;
  for (const auto& check : checks) {
    if (options.quick && !check.quick) continue;
    const auto [ok, detail] = check.run();
    std::printf("[%s] %-28s %s\n", ok ? "PASS" : "FAIL", check.name.c_str(), detail.c_str());
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace qfe
