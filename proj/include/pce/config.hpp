#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pce {

/// Principal identification assumption used to solve the outcome mixture
/// equation for the control-arm stratum means.
enum class Principal { er, pi, pisens_gor, pisens_mr, pisens_smde };

/// Specific missingness mechanism used to solve the response mixture
/// equation. `none` is legal only with Principal::pi, which bypasses that
/// equation entirely.
enum class Missingness { near_snr, near_scr, rpi, rpo, none };

bool is_pisens(Principal p);
std::string to_string(Principal p);
std::string to_string(Missingness m);
Principal principal_from_string(const std::string& s);
Missingness missingness_from_string(const std::string& s);

/// The full choice of (principal assumption, missingness mechanism,
/// sensitivity parameters, bootstrap settings) for one analysis.
struct AnalysisConfig {
  Principal principal = Principal::pi;
  /// One entry per sensitivity analysis to run (psi for GOR, rho for MR,
  /// eta for SMDe); must be empty for ER and PI.
  std::vector<double> sensitivity_params;
  Missingness missingness = Missingness::none;
  double epsilon = 0.01;
  long bootstrap_replicates = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
  std::pair<double, double> outcome_bounds{0.0, 1.0};

  /// Throws ConfigError on illegal pairings or parameter ranges.
  void validate() const;
};

}  // namespace pce
