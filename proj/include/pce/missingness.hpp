#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pce/config.hpp"
#include "pce/nuisance.hpp"

#include "json.hpp"

namespace pce {

/// Per-unit solution of the response mixture equation
///   pi1*w01 + pi0*w00 = lambda0,
/// plus the control-arm responder mixture weights
///   p01R = pi1*w01/lambda0, p00R = 1 - p01R.
struct ResponseWeights {
  std::vector<double> w01, w00;
  std::vector<double> p01R, p00R;
  /// True where a near-SNR/near-SCR range restriction activated.
  std::vector<char> clamp_flag;
  /// True where both strata had to be clamped, so the mixture equation
  /// cannot hold for that unit (counted in diagnostics).
  std::vector<char> mixture_violated;

  std::size_t clamped_count() const;
  std::size_t violation_count() const;
};

/// Near stable noncomplier response: w00 borrowed from the treated arm,
/// w01 = (lambda0 - pi0*w10)/pi1 restricted to [eps, 1] where needed.
ResponseWeights weights_near_snr(const NuisancePredictions& p, double eps);

/// Near stable complier response; mirror image of near-SNR.
ResponseWeights weights_near_scr(const NuisancePredictions& p, double eps);

/// Response principal ignorability: both strata respond at rate lambda0,
/// so the mixture weights are the compliance scores exactly.
ResponseWeights weights_rpi(const NuisancePredictions& p);

/// Proportional response odds: the control-arm odds ratio of response
/// equals the treated-arm one. Solves the resulting quadratic per unit,
/// keeping the root that lies in [0,1].
ResponseWeights weights_rpo(const NuisancePredictions& p);

/// Dispatch on mechanism. Throws ConfigError for Missingness::none.
ResponseWeights compute_weights(const NuisancePredictions& p, Missingness m,
                                double eps);

/// Feasibility summary for one exact stable-response assumption: the share
/// of units whose implied control-arm response probability leaves [eps,1],
/// and the range of implied values.
struct StableResponseReport {
  std::string mechanism;  // "SNR" or "SCR"
  double violation_fraction = 0.0;
  double min_implied = 0.0;
  double max_implied = 0.0;
  std::size_t n_units = 0;
};

struct StableResponseDiagnostic {
  StableResponseReport snr;
  StableResponseReport scr;
};

StableResponseDiagnostic diagnose_stable_response(const NuisancePredictions& p,
                                                  double eps);

nlohmann::json to_json(const StableResponseReport& r);
nlohmann::json to_json(const StableResponseDiagnostic& d);

}  // namespace pce
