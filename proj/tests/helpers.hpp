#pragma once

// Shared test utilities: independent oracles and input generators. Nothing
// here calls the closed-form solvers under test.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pce/dataset.hpp"
#include "pce/nuisance.hpp"

namespace testutil {

// Independent bisection solver for the coupled system
//   odds(m1)/odds(m0) = ratio,   weight1*m1 + (1-weight1)*m0 = mix,
// with m1, m0 in (0,1). The left side is strictly increasing in m1, so the
// root is unique and bracketed by the feasibility interval.
inline double bisect_odds_mixture(double weight1, double mix, double ratio) {
  const double weight0 = 1.0 - weight1;
  double lo = std::max(0.0, (mix - weight0) / weight1);
  double hi = std::min(1.0, mix / weight1);
  auto f = [&](double m1) {
    double m0 = (mix - weight1 * m1) / weight0;
    m0 = std::clamp(m0, 1e-300, 1.0 - 1e-16);
    const double m1c = std::clamp(m1, 1e-300, 1.0 - 1e-16);
    return std::log(m1c / (1.0 - m1c)) - std::log(m0 / (1.0 - m0)) -
           std::log(ratio);
  };
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Single-unit NuisancePredictions builder for hand-worked cases.
struct PredSpec {
  double pi1 = 0.5, w11 = 0.8, w10 = 0.8, lambda0 = 0.8;
  double mu11 = 0.6, mu10 = 0.5, kappa0R = 0.5, sigma0R = 0.2;
  std::pair<double, double> bounds{0.0, 1.0};
};

inline pce::NuisancePredictions one_unit(const PredSpec& s) {
  pce::NuisancePredictions p;
  p.bounds = s.bounds;
  p.pi1 = {s.pi1};
  p.pi0 = {1.0 - s.pi1};
  p.w11 = {s.w11};
  p.w10 = {s.w10};
  p.lambda0 = {s.lambda0};
  p.mu11 = {s.mu11};
  p.mu10 = {s.mu10};
  p.kappa0R = {s.kappa0R};
  p.sigma0R = {s.sigma0R};
  return p;
}

// Randomized predictions with all probabilities comfortably interior.
// lambda0 is drawn as a feasible mixture of two latent control response
// probabilities, so every mechanism admits a solution for most units while
// the stable-response mechanisms still clamp on a subset.
inline pce::NuisancePredictions random_predictions(
    std::mt19937_64& rng, std::size_t n,
    std::pair<double, double> bounds = {0.0, 1.0}) {
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  std::uniform_real_distribution<double> unit(0.08, 0.92);
  pce::NuisancePredictions p;
  p.bounds = bounds;
  const auto [l, h] = bounds;
  p.pi1.resize(n);
  p.pi0.resize(n);
  p.w11.resize(n);
  p.w10.resize(n);
  p.lambda0.resize(n);
  p.mu11.resize(n);
  p.mu10.resize(n);
  p.kappa0R.resize(n);
  p.sigma0R.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.pi1[i] = prob(rng);
    p.pi0[i] = 1.0 - p.pi1[i];
    p.w11[i] = prob(rng);
    p.w10[i] = prob(rng);
    const double latent01 = prob(rng), latent00 = prob(rng);
    p.lambda0[i] = p.pi1[i] * latent01 + p.pi0[i] * latent00;
    p.mu11[i] = l + (h - l) * unit(rng);
    p.mu10[i] = l + (h - l) * unit(rng);
    p.kappa0R[i] = l + (h - l) * unit(rng);
    p.sigma0R[i] = (h - l) * std::uniform_real_distribution<double>(
                                 0.02, 0.25)(rng);
  }
  return p;
}

inline std::string write_temp(const std::string& name,
                              const std::string& body) {
  const std::string path = name;
  std::ofstream out(path);
  out << body;
  return path;
}

// Small deterministic dataset builder.
inline pce::UnitRecord unit(std::vector<double> x, int z, int c, int r,
                            double y) {
  pce::UnitRecord u;
  u.x = std::move(x);
  u.z = z;
  if (z == 1) u.c = c;
  u.r = r;
  if (r == 1) u.y = y;
  return u;
}

}  // namespace testutil
