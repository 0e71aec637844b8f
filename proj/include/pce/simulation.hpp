#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pce/config.hpp"
#include "pce/dataset.hpp"

#include "json.hpp"

namespace pce {

/// Generative model in which the configured (principal, missingness)
/// assumption pair holds by construction and every model the estimation
/// recipe fits is correctly specified.
///
/// The control arm is parameterized through its two observable aggregates:
/// lambda0 (response rate, logistic-linear) and kappa0R (responder outcome
/// mean, generalized-logit-linear). The stratum-level response
/// probabilities and outcome means are then derived from the assumption
/// tags, so the "near" stable-response mechanisms coincide with their
/// exact versions on the support (checked on a pilot draw).
///
/// Covariates are standard normal truncated to [-3, 3] per coordinate.
/// Compact support is what makes the stable-response feasibility invariant
/// satisfiable with non-constant response models.
struct DgpConfig {
  std::size_t n = 0;
  std::size_t p = 0;
  double assignment_probability = 0.5;
  std::pair<double, double> outcome_bounds{0.0, 1.0};
  /// Beta-family dispersion on the rescaled outcome, in (0,1):
  /// var(y_tilde) = dispersion * m*(1-m).
  double outcome_dispersion = 0.1;

  // Coefficient vectors of length p+1 (intercept first), x ~ N(0, I_p).
  std::vector<double> compliance_coef;  // logit P(C=1 | x) in the treated arm
  std::vector<double> w11_coef;         // logit P(R=1 | x, Z=1, C=1)
  std::vector<double> w10_coef;         // logit P(R=1 | x, Z=1, C=0)
  std::vector<double> lambda0_coef;     // logit P(R=1 | x, Z=0); unused when missingness=none
  std::vector<double> w01_coef;         // only when missingness=none: logit P(R=1|x,Z=0,C=1)
  std::vector<double> w00_coef;         // only when missingness=none: logit P(R=1|x,Z=0,C=0)
  std::vector<double> mu11_coef;        // genlogit E[Y | x, Z=1, C=1]
  std::vector<double> mu10_coef;        // genlogit E[Y | x, Z=1, C=0]
  std::vector<double> kappa0R_coef;     // genlogit E[Y | x, Z=0, R=1]

  Principal principal = Principal::pi;
  double sensitivity = 0.0;  // psi / rho / eta for the PIsens tags
  Missingness missingness = Missingness::none;
  double epsilon = 0.01;

  void validate() const;  // shape/range checks; throws ConfigError
};

/// Exact per-x evaluations of every quantity the DGP implies; shared by
/// the sampler, the population-truth integrator, and the analytic checks.
struct TrueFunctions {
  const DgpConfig& g;

  double pi1(std::span<const double> x) const;
  double w11(std::span<const double> x) const;
  double w10(std::span<const double> x) const;
  double lambda0(std::span<const double> x) const;
  /// Stratum response probabilities under control implied by the
  /// missingness tag.
  std::pair<double, double> w0(std::span<const double> x) const;  // (w01, w00)
  double mu11(std::span<const double> x) const;
  double mu10(std::span<const double> x) const;
  double kappa0R(std::span<const double> x) const;
  /// Stratum outcome means under control implied by the principal tag.
  std::pair<double, double> mu0(std::span<const double> x) const;  // (mu01, mu00)
  /// Common within-stratum control-arm SD (SMDe tag only).
  double control_sd(std::span<const double> x) const;
};

struct SimulatedData {
  Dataset data;
  std::vector<int> true_c;     // latent compliance type, both arms
  std::vector<double> true_y;  // outcome before response masking
};

/// Draws a dataset of size g.n. Compliance is masked when z=0 and the
/// outcome when r=0. Throws ConfigError if a pilot draw of 10,000 x's
/// violates a feasibility constraint (derived probability outside [eps,1],
/// derived mean outside bounds), naming the constraint.
SimulatedData simulate_with_latent(const DgpConfig& g, std::uint64_t seed);
Dataset simulate_dataset(const DgpConfig& g, std::uint64_t seed);

struct TrueEffects {
  double cace = 0.0, nace = 0.0, ate = 0.0;
  double se_cace = 0.0, se_nace = 0.0, se_ate = 0.0;  // Monte Carlo SEs
  double complier_share = 0.0;  // population mean of pi1(x)
};

/// Monte Carlo integration of the population effects over n_pop covariate
/// draws, using the exact derived functions (no outcome noise).
TrueEffects true_effects(const DgpConfig& g, std::size_t n_pop,
                         std::uint64_t seed);

DgpConfig dgp_from_json(const nlohmann::json& j);
nlohmann::json dgp_to_json(const DgpConfig& g);
nlohmann::json to_json(const TrueEffects& t);

}  // namespace pce
