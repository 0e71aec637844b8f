#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pce/dataset.hpp"
#include "pce/glm.hpp"

namespace pce {

/// The seven conditional models of the estimation recipe, each fit on its
/// own subsample:
///   pi:      C ~ X   on Z=1           (logistic)
///   w11:     R ~ X   on Z=1, C=1      (logistic)
///   w10:     R ~ X   on Z=1, C=0      (logistic)
///   lambda0: R ~ X   on Z=0           (logistic)
///   mu11:    Y ~ X   on Z=1, C=1, R=1 (genlogit)
///   mu10:    Y ~ X   on Z=1, C=0, R=1 (genlogit)
///   kappa0R: Y ~ X   on Z=0, R=1      (genlogit, with dispersion)
struct NuisanceFit {
  FittedModel pi_model;
  FittedModel w11_model;
  FittedModel w10_model;
  FittedModel lambda0_model;
  FittedModel mu11_model;
  FittedModel mu10_model;
  FittedModel kappa0R_model;

  struct SubsampleSizes {
    std::size_t z1 = 0, z1c1 = 0, z1c0 = 0, z0 = 0;
    std::size_t z1c1r1 = 0, z1c0r1 = 0, z0r1 = 0;
  } sizes;
};

/// Fits all seven models. Perfect-response cells (all r equal within a
/// response subsample) get the constant probability 1-1e-12 (or 1e-12)
/// instead of a divergent logistic MLE. Throws EstimationError naming the
/// cell when a required subsample is empty or the compliance model is
/// degenerate.
NuisanceFit fit_nuisance(const Dataset& d);

/// Per-unit evaluations of every nuisance function at each unit's x
/// (both arms; all are functions of X only). pi0 = 1 - pi1 exactly.
struct NuisancePredictions {
  std::vector<double> pi1, pi0;
  std::vector<double> w11, w10, lambda0;
  std::vector<double> mu11, mu10, kappa0R, sigma0R;
  std::pair<double, double> bounds{0.0, 1.0};

  std::size_t size() const { return pi1.size(); }
};

NuisancePredictions predict_nuisance(const NuisanceFit& fit, const Dataset& d);

}  // namespace pce
