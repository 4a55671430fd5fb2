#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qfe/estimator.hpp"
#include "qfe/experiment.hpp"

namespace {

qfe::RunMode parse_mode(const std::string& name) {
  if (name == "noiseless") return qfe::RunMode::Noiseless;
  if (name == "tmp") return qfe::RunMode::TmpExact;
  return qfe::RunMode::Noisy;
}

int cmd_run(const qfe::ExperimentConfig& config) {
  const qfe::RunResult result = qfe::run_experiment(config);
  std::printf("%10s %8s %14s %14s %10s %10s\n", "tau", "beta", "dF_exact", "dF_tilde", "pct_err",
              "sigma");
  for (const auto& r : result.estimates)
    std::printf("%10.4g %8.4g %14.6f %14.6f %9.3f%% %10.4g\n", r.tau, r.beta, r.delta_f_exact,
                r.delta_f_tilde, qfe::percent_error(r.delta_f_tilde, r.delta_f_exact), r.sigma);
  if (!result.mitigation.empty()) {
    std::printf("\n%8s %12s %12s %12s %12s %12s\n", "beta", "raw", "ro", "zne", "ro+zne",
                "noiseless");
    for (const auto& m : result.mitigation)
      std::printf("%8.4g %12.6f %12.6f %12.6f %12.6f %12.6f\n", m.beta, m.raw, m.ro_only,
                  m.zne_only, m.ro_plus_zne, m.noiseless_reference);
  }
  std::printf("\nwrote %s\n      %s\n      %s\n", result.trajectories_path.c_str(),
              result.estimates_path.c_str(), result.metadata_path.c_str());
  return 0;
}

int cmd_describe(const qfe::ExperimentConfig& config) {
  for (const auto& [key, value] : config.echo()) std::printf("%s = %s\n", key.c_str(), value.c_str());
  return 0;
}

int cmd_presets() {
  for (const auto& name : qfe::preset_names())
    std::printf("%-18s %s\n", name.c_str(), qfe::preset_summary(name).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-energy differences of driven spin chains: Jarzynski-averaged METTS "
               "pseudo-work with exact oracles, bound checks, and noisy-readout mitigation"};
  app.require_subcommand(1);
  app.footer("Flags may also be set through environment variables with the QFE_ prefix,\n"
             "e.g. QFE_SEED=7 qfe run --preset tfim2_paper.");

  std::string config_path, preset, out_dir, mode_name;
  std::uint64_t seed = 0;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (flat key = value lines)")
        ->envname("QFE_CONFIG");
    sub->add_option("--preset", preset, "shipped preset name (see `qfe presets`)")
        ->envname("QFE_PRESET");
  };

  CLI::App* run = app.add_subcommand("run", "run a seeded experiment, emit CSV/JSON artifacts");
  add_source(run);
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the master seed")->envname("QFE_SEED");
  CLI::Option* out_opt =
      run->add_option("--out", out_dir, "override the output directory")->envname("QFE_OUT");
  CLI::Option* mode_opt = run->add_option("--mode", mode_name, "noiseless | tmp | noisy")
                              ->envname("QFE_MODE")
                              ->check(CLI::IsMember({"noiseless", "tmp", "noisy"}));

  CLI::App* describe = app.add_subcommand("describe", "echo the fully resolved configuration");
  add_source(describe);

  app.add_subcommand("presets", "list shipped presets");

  CLI::App* verify = app.add_subcommand("verify", "run the reduced-scale invariant suite");
  bool quick = false, inject = false;
  verify->add_flag("--quick", quick, "fast subset of the checks");
  verify->add_flag("--inject-work-sign-error", inject)->group("");  // mutation test hook

  CLI11_PARSE(app, argc, argv);

  try {
    const auto load = [&]() {
      if (config_path.empty() == preset.empty())
        throw std::invalid_argument("exactly one of --config or --preset is required");
      qfe::ExperimentConfig cfg =
          preset.empty() ? qfe::load_config_file(config_path) : qfe::load_preset(preset);
      if (*seed_opt) cfg.seed = seed;
      if (*out_opt)
        cfg.out_dir = out_dir;
      else if (!preset.empty())
        cfg.out_dir = "runs/" + preset;
      if (*mode_opt) cfg.mode = parse_mode(mode_name);
      return cfg;
    };
    if (run->parsed()) return cmd_run(load());
    if (describe->parsed()) return cmd_describe(load());
    if (verify->parsed()) return qfe::verify({quick, inject}) == 0 ? 0 : 1;
    return cmd_presets();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
