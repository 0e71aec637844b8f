#include "pce/control_means.hpp"

#include <cmath>
#include <string>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kWeightFloor = 1e-12;
constexpr double kNeutralTol = 1e-10;
constexpr double kRadicandTol = 1e-10;

ControlMeans make_means(std::size_t n, Principal a, double sens) {
  ControlMeans m;
  m.mu01.resize(n);
  m.mu00.resize(n);
  m.assumption = a;
  m.sensitivity = sens;
  return m;
}

// Solves the odds-ratio + mixture system on the unit scale for one stratum:
// returns m with odds(m)/odds(other) = psi_c and weight*m + (1-weight)*other
// = mix. Algebraically (alpha - beta)/(2(psi_c-1)weight), evaluated through
// the difference-of-squares form, which cancels the weight and avoids
// cancellation when the weight or radicand is small.
double gor_component(double weight, double mix, double psi_c) {
  const double alpha = (weight + mix) * (psi_c - 1.0) + 1.0;
  double rad = alpha * alpha - 4.0 * weight * mix * psi_c * (psi_c - 1.0);
  if (rad < -kRadicandTol)
    throw NumericalError("negative radicand in GOR solve");
  rad = std::max(rad, 0.0);
  const double denom = alpha + std::sqrt(rad);
  if (denom < 1e-30) return 0.0;  // mix at the lower bound
  return 2.0 * mix * psi_c / denom;
}

}  // namespace

ControlMeans mu0_er(const NuisancePredictions& p, const ResponseWeights& w) {
  const std::size_t n = p.size();
  ControlMeans m = make_means(n, Principal::er,
                              std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    if (w.p01R[i] < kWeightFloor)
      throw EstimationError(
          "degenerate complier responder weight at unit " +
          std::to_string(i + 1));
    m.mu00[i] = p.mu10[i];
    m.mu01[i] = p.mu10[i] + (p.kappa0R[i] - p.mu10[i]) / w.p01R[i];
  }
  return m;
}

ControlMeans mu0_pi(const NuisancePredictions& p) {
  const std::size_t n = p.size();
  ControlMeans m = make_means(n, Principal::pi,
                              std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    m.mu01[i] = p.kappa0R[i];
    m.mu00[i] = p.kappa0R[i];
  }
  return m;
}

ControlMeans mu0_pisens_gor(const NuisancePredictions& p,
                            const ResponseWeights& w, double psi,
                            std::pair<double, double> bounds) {
  if (!(psi > 0.0)) throw ConfigError("GOR parameter psi must be > 0");
  const std::size_t n = p.size();
  ControlMeans m = make_means(n, Principal::pisens_gor, psi);
  if (std::abs(psi - 1.0) < kNeutralTol) {
    ControlMeans pi = mu0_pi(p);
    m.mu01 = std::move(pi.mu01);
    m.mu00 = std::move(pi.mu00);
    return m;
  }
  const auto [l, h] = bounds;
  for (std::size_t i = 0; i < n; ++i) {
    const double mix = (p.kappa0R[i] - l) / (h - l);
    m.mu01[i] = l + (h - l) * gor_component(w.p01R[i], mix, psi);
    m.mu00[i] = l + (h - l) * gor_component(w.p00R[i], mix, 1.0 / psi);
  }
  return m;
}

ControlMeans mu0_pisens_mr(const NuisancePredictions& p,
                           const ResponseWeights& w, double rho) {
  if (!(rho > 0.0)) throw ConfigError("MR parameter rho must be > 0");
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!(p.kappa0R[i] > 0.0))
      throw DomainError(
          "mean-ratio sensitivity requires positive outcome means (unit " +
          std::to_string(i + 1) + ")");
  ControlMeans m = make_means(n, Principal::pisens_mr, rho);
  if (std::abs(rho - 1.0) < kNeutralTol) {
    ControlMeans pi = mu0_pi(p);
    m.mu01 = std::move(pi.mu01);
    m.mu00 = std::move(pi.mu00);
    return m;
  }
  const double rho0 = 1.0 / rho;
  for (std::size_t i = 0; i < n; ++i) {
    m.mu01[i] = rho * p.kappa0R[i] / ((rho - 1.0) * w.p01R[i] + 1.0);
    m.mu00[i] = rho0 * p.kappa0R[i] / ((rho0 - 1.0) * w.p00R[i] + 1.0);
  }
  return m;
}

ControlMeans mu0_pisens_smde(const NuisancePredictions& p,
                             const ResponseWeights& w, double eta) {
  const std::size_t n = p.size();
  ControlMeans m = make_means(n, Principal::pisens_smde, eta);
  for (std::size_t i = 0; i < n; ++i) {
    const double shrink =
        std::sqrt(1.0 + eta * eta * w.p01R[i] * w.p00R[i]);
    const double shift = eta * p.sigma0R[i] / shrink;
    m.mu01[i] = p.kappa0R[i] + w.p00R[i] * shift;
    m.mu00[i] = p.kappa0R[i] - w.p01R[i] * shift;
  }
  return m;
}

ControlMeans compute_control_means(const NuisancePredictions& p,
                                   const ResponseWeights& w,
                                   Principal assumption, double param,
                                   std::pair<double, double> bounds) {
  switch (assumption) {
    case Principal::er: return mu0_er(p, w);
    case Principal::pi: return mu0_pi(p);
    case Principal::pisens_gor: return mu0_pisens_gor(p, w, param, bounds);
    case Principal::pisens_mr: return mu0_pisens_mr(p, w, param);
    case Principal::pisens_smde: return mu0_pisens_smde(p, w, param);
  }
  throw ConfigError("unknown principal identification assumption");
}

}  // namespace pce
