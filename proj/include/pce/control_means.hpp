#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "pce/config.hpp"
#include "pce/missingness.hpp"
#include "pce/nuisance.hpp"

namespace pce {

/// Per-unit control-arm stratum outcome means solving the outcome mixture
/// equation p01R*mu01 + p00R*mu00 = kappa0R under one principal
/// identification assumption.
struct ControlMeans {
  std::vector<double> mu01, mu00;
  Principal assumption = Principal::pi;
  double sensitivity = std::numeric_limits<double>::quiet_NaN();
};

/// Exclusion restriction: mu00 = mu10, mu01 = mu10 + (kappa0R - mu10)/p01R.
/// Throws EstimationError when p01R falls below 1e-12 for any unit.
ControlMeans mu0_er(const NuisancePredictions& p, const ResponseWeights& w);

/// Principal ignorability: mu01 = mu00 = kappa0R. Needs no weights.
ControlMeans mu0_pi(const NuisancePredictions& p);

/// Generalized-odds-ratio sensitivity (parameter psi > 0); solves the
/// quadratic arising from the odds-ratio constraint on the [l,h] scale.
ControlMeans mu0_pisens_gor(const NuisancePredictions& p,
                            const ResponseWeights& w, double psi,
                            std::pair<double, double> bounds);

/// Mean-ratio sensitivity (parameter rho > 0); requires strictly positive
/// kappa0R (throws DomainError otherwise).
ControlMeans mu0_pisens_mr(const NuisancePredictions& p,
                           const ResponseWeights& w, double rho);

/// Standardized-mean-difference sensitivity (parameter eta, equal stratum
/// variances); uses the pooled responder SD sigma0R.
ControlMeans mu0_pisens_smde(const NuisancePredictions& p,
                             const ResponseWeights& w, double eta);

/// Dispatch on the assumption; `param` is ignored for ER and PI.
ControlMeans compute_control_means(const NuisancePredictions& p,
                                   const ResponseWeights& w,
                                   Principal assumption, double param,
                                   std::pair<double, double> bounds);

}  // namespace pce
