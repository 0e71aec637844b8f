#pragma once

// Generative configurations used across the test and acceptance suites.
// Slopes are gentle and share signs so the derived stable-response
// probabilities stay well inside [eps, 1] over the whole (truncated)
// covariate box; the pilot check in the simulator verifies this at run
// time.

#include "pce/config.hpp"
#include "pce/simulation.hpp"

namespace testutil {

inline pce::DgpConfig base_dgp(pce::Principal principal, double sensitivity,
                               pce::Missingness mechanism,
                               std::size_t n = 10000) {
  pce::DgpConfig g;
  g.n = n;
  g.p = 2;
  g.assignment_probability = 0.5;
  g.outcome_bounds = {0.0, 1.0};
  g.outcome_dispersion = 0.05;
  g.epsilon = 0.01;
  g.principal = principal;
  g.sensitivity = sensitivity;
  g.missingness = mechanism;

  g.compliance_coef = {0.3, 0.3, 0.2};
  g.w10_coef = {0.9, 0.2, 0.1};
  g.mu11_coef = {0.6, 0.3, -0.2};
  g.mu10_coef = {0.0, 0.2, 0.1};
  g.kappa0R_coef = {-0.1, 0.2, 0.1};

  switch (mechanism) {
    case pce::Missingness::near_scr:
      // high treated-complier response keeps the implied noncomplier
      // probability below one everywhere
      g.w11_coef = {1.6, 0.2, 0.1};
      g.lambda0_coef = {1.2, 0.25, 0.15};
      break;
    case pce::Missingness::rpo:
      // slopes differ across strata so the response odds ratio varies in x
      g.w11_coef = {1.6, 0.3, 0.05};
      g.lambda0_coef = {1.2, 0.25, 0.15};
      break;
    case pce::Missingness::none:
      g.w11_coef = {1.2, 0.2, 0.1};
      g.w01_coef = {0.7, 0.3, -0.2};
      g.w00_coef = {1.1, -0.2, 0.3};
      break;
    default:  // near_snr, rpi
      g.w11_coef = {1.2, 0.2, 0.1};
      g.lambda0_coef = {1.2, 0.25, 0.15};
      break;
  }
  return g;
}

}  // namespace testutil
