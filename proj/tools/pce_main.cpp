// Command-line front end: estimate effects from a CSV, simulate oracle
// datasets with known true effects, and run the stable-response
// feasibility diagnostic.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "pce/cli_config.hpp"
#include "pce/dataset.hpp"
#include "pce/errors.hpp"
#include "pce/estimation.hpp"
#include "pce/missingness.hpp"
#include "pce/nuisance.hpp"
#include "pce/simulation.hpp"

namespace {

// 0 ok, 2 config, 3 data validation, 4 estimation, 5 inference.
int exit_code_for(const pce::Error& e) {
  if (dynamic_cast<const pce::ConfigError*>(&e)) return 2;
  if (dynamic_cast<const pce::ParseError*>(&e)) return 3;
  if (dynamic_cast<const pce::ValidationError*>(&e)) return 3;
  if (dynamic_cast<const pce::InferenceError*>(&e)) return 5;
  return 4;  // estimation, numerical, domain
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw pce::ConfigError("cannot open output file: " + path);
  out << body;
}

int run_estimate(const std::string& config_path) {
  const pce::CliConfig cfg = pce::load_cli_config(config_path);
  const pce::Dataset data =
      pce::load_csv(cfg.input_csv, cfg.analysis.outcome_bounds);

  pce::EffectEstimates est;
  if (cfg.analysis.bootstrap_replicates >= 1) {
    pce::BootstrapSettings bs{cfg.analysis.bootstrap_replicates,
                              cfg.analysis.seed, cfg.analysis.level};
    est = pce::bootstrap_ci(data, cfg.analysis, bs);
  } else {
    est = pce::point_estimates(data, cfg.analysis);
  }

  if (!cfg.output_json.empty())
    write_file(cfg.output_json, pce::to_json(est, cfg.analysis).dump(2) + "\n");
  std::cout << pce::format_table(est);
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_csv,
                 const std::string& truth_json, std::uint64_t seed,
                 std::size_t n_pop) {
  std::ifstream in(config_path);
  if (!in) throw pce::ConfigError("cannot open config file: " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw pce::ConfigError(std::string("invalid JSON in ") + config_path +
                           ": " + e.what());
  }
  const pce::DgpConfig g = pce::dgp_from_json(j);
  const pce::Dataset data = pce::simulate_dataset(g, seed);
  pce::write_csv(data, out_csv);
  if (!truth_json.empty()) {
    const pce::TrueEffects t = pce::true_effects(g, n_pop, seed);
    write_file(truth_json, pce::to_json(t).dump(2) + "\n");
  }
  return 0;
}

int run_diagnose(const std::string& config_path) {
  const pce::CliConfig cfg = pce::load_cli_config(config_path);
  const pce::Dataset data =
      pce::load_csv(cfg.input_csv, cfg.analysis.outcome_bounds);
  const pce::NuisanceFit fit = pce::fit_nuisance(data);
  const pce::NuisancePredictions preds = pce::predict_nuisance(fit, data);
  const auto report =
      pce::diagnose_stable_response(preds, cfg.analysis.epsilon);
  const std::string body = pce::to_json(report).dump(2) + "\n";
  if (!cfg.output_json.empty()) write_file(cfg.output_json, body);
  std::cout << body;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complier/noncomplier/overall average causal effects under "
               "one-sided noncompliance with missing outcomes"};
  app.require_subcommand(1);

  std::string est_config;
  auto* est = app.add_subcommand("estimate",
                                 "Estimate CACE, NACE and ATE from a CSV");
  est->add_option("--config", est_config, "JSON config path")->required();

  std::string sim_config, sim_out, sim_truth;
  std::uint64_t sim_seed = 0;
  std::size_t sim_npop = 1000000;
  auto* sim = app.add_subcommand("simulate",
                                 "Generate an oracle dataset with known "
                                 "true effects");
  sim->add_option("--config", sim_config, "DGP JSON config path")->required();
  sim->add_option("--out", sim_out, "output CSV path")->required();
  sim->add_option("--truth", sim_truth, "output JSON path for true effects");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--npop", sim_npop,
                  "population size for the truth integral");

  std::string diag_config;
  auto* diag = app.add_subcommand(
      "diagnose", "Stable-response feasibility report (exact SNR and SCR)");
  diag->add_option("--config", diag_config, "JSON config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help exits cleanly; bad usage is a config error
  }

  try {
    if (est->parsed()) return run_estimate(est_config);
    if (sim->parsed())
      return run_simulate(sim_config, sim_out, sim_truth, sim_seed, sim_npop);
    if (diag->parsed()) return run_diagnose(diag_config);
  } catch (const pce::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
