#include "pce/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kStratumFloor = 1e-12;
constexpr double kOddsRatioUnit = 1e-8;  // |rho-1| below this: rPI branch
constexpr double kDiscriminantTol = 1e-10;

ResponseWeights make_weights(std::size_t n) {
  ResponseWeights w;
  w.w01.resize(n);
  w.w00.resize(n);
  w.p01R.resize(n);
  w.p00R.resize(n);
  w.clamp_flag.assign(n, 0);
  w.mixture_violated.assign(n, 0);
  return w;
}

void check_strata(const NuisancePredictions& p, std::size_t i) {
  if (p.pi1[i] < kStratumFloor || p.pi0[i] < kStratumFloor)
    throw EstimationError("degenerate stratum probability at unit " +
                          std::to_string(i + 1));
}

double odds(double pr) { return pr / (1.0 - pr); }

}  // namespace

std::size_t ResponseWeights::clamped_count() const {
  return static_cast<std::size_t>(
      std::count(clamp_flag.begin(), clamp_flag.end(), 1));
}

std::size_t ResponseWeights::violation_count() const {
  return static_cast<std::size_t>(
      std::count(mixture_violated.begin(), mixture_violated.end(), 1));
}

ResponseWeights weights_near_snr(const NuisancePredictions& p, double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw ConfigError("epsilon must lie in (0, 0.5)");
  const std::size_t n = p.size();
  ResponseWeights w = make_weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_strata(p, i);
    const double pi1 = p.pi1[i], pi0 = p.pi0[i], lam = p.lambda0[i];
    const double raw = (lam - pi0 * p.w10[i]) / pi1;
    double w01 = raw;
    if (raw < eps || raw > 1.0) {
      w01 = std::clamp(raw, eps, 1.0);
      w.clamp_flag[i] = 1;
    }
    // Re-solve the mixture equation for the other stratum; if that in turn
    // leaves [eps,1], lambda0 is inconsistent with any feasible pair and we
    // clamp again, letting the mixture equation fail for this unit.
    double w00 = (lam - pi1 * w01) / pi0;
    if (w00 < eps || w00 > 1.0) {
      w00 = std::clamp(w00, eps, 1.0);
      w.clamp_flag[i] = 1;
      w.mixture_violated[i] = 1;
    }
    w.w01[i] = w01;
    w.w00[i] = w00;
    w.p01R[i] = pi1 * w01 / lam;
    w.p00R[i] = 1.0 - w.p01R[i];
  }
  return w;
}

ResponseWeights weights_near_scr(const NuisancePredictions& p, double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw ConfigError("epsilon must lie in (0, 0.5)");
  const std::size_t n = p.size();
  ResponseWeights w = make_weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_strata(p, i);
    const double pi1 = p.pi1[i], pi0 = p.pi0[i], lam = p.lambda0[i];
    const double raw = (lam - pi1 * p.w11[i]) / pi0;
    double w00 = raw;
    if (raw < eps || raw > 1.0) {
      w00 = std::clamp(raw, eps, 1.0);
      w.clamp_flag[i] = 1;
    }
    double w01 = (lam - pi0 * w00) / pi1;
    if (w01 < eps || w01 > 1.0) {
      w01 = std::clamp(w01, eps, 1.0);
      w.clamp_flag[i] = 1;
      w.mixture_violated[i] = 1;
    }
    w.w01[i] = w01;
    w.w00[i] = w00;
    w.p00R[i] = pi0 * w00 / lam;
    w.p01R[i] = 1.0 - w.p00R[i];
  }
  return w;
}

ResponseWeights weights_rpi(const NuisancePredictions& p) {
  const std::size_t n = p.size();
  ResponseWeights w = make_weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.w01[i] = p.lambda0[i];
    w.w00[i] = p.lambda0[i];
    w.p01R[i] = p.pi1[i];
    w.p00R[i] = p.pi0[i];
  }
  return w;
}

ResponseWeights weights_rpo(const NuisancePredictions& p) {
  const std::size_t n = p.size();
  ResponseWeights w = make_weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_strata(p, i);
    const double pi1 = p.pi1[i], pi0 = p.pi0[i], lam = p.lambda0[i];
    const double rho = odds(p.w11[i]) / odds(p.w10[i]);
    if (std::abs(rho - 1.0) < kOddsRatioUnit) {
      w.w01[i] = lam;
      w.w00[i] = lam;
      w.p01R[i] = pi1;
      w.p00R[i] = pi0;
      continue;
    }
    // pi1(rho-1)u^2 - gamma1*u + lam*rho = 0, keeping the in-range root
    // u = (gamma1 - omega1) / (2 pi1 (rho-1)).
    const double gamma1 = (pi1 + lam) * (rho - 1.0) + 1.0;
    double disc = gamma1 * gamma1 - 4.0 * pi1 * lam * rho * (rho - 1.0);
    if (disc < -kDiscriminantTol)
      throw NumericalError("negative discriminant in rPO solve at unit " +
                           std::to_string(i + 1));
    disc = std::max(disc, 0.0);
    const double omega1 = std::sqrt(disc);
    const double u = (gamma1 - omega1) / (2.0 * pi1 * (rho - 1.0));
    const double v = (lam - pi1 * u) / pi0;
    w.w01[i] = u;
    w.w00[i] = v;
    w.p01R[i] = pi1 * u / lam;
    w.p00R[i] = 1.0 - w.p01R[i];
  }
  return w;
}

ResponseWeights compute_weights(const NuisancePredictions& p, Missingness m,
                                double eps) {
  switch (m) {
    case Missingness::near_snr: return weights_near_snr(p, eps);
    case Missingness::near_scr: return weights_near_scr(p, eps);
    case Missingness::rpi: return weights_rpi(p);
    case Missingness::rpo: return weights_rpo(p);
    case Missingness::none:
      throw ConfigError(
          "missingness 'none' does not identify response weights");
  }
  throw ConfigError("unknown missingness mechanism");
}

StableResponseDiagnostic diagnose_stable_response(const NuisancePredictions& p,
                                                  double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw ConfigError("epsilon must lie in (0, 0.5)");
  const std::size_t n = p.size();
  StableResponseDiagnostic d;
  d.snr.mechanism = "SNR";
  d.scr.mechanism = "SCR";
  d.snr.n_units = d.scr.n_units = n;
  if (n == 0) return d;

  double snr_min = std::numeric_limits<double>::infinity();
  double snr_max = -snr_min, scr_min = snr_min, scr_max = -snr_min;
  std::size_t snr_bad = 0, scr_bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    check_strata(p, i);
    const double u = (p.lambda0[i] - p.pi0[i] * p.w10[i]) / p.pi1[i];
    const double v = (p.lambda0[i] - p.pi1[i] * p.w11[i]) / p.pi0[i];
    snr_min = std::min(snr_min, u);
    snr_max = std::max(snr_max, u);
    scr_min = std::min(scr_min, v);
    scr_max = std::max(scr_max, v);
    if (u < eps || u > 1.0) ++snr_bad;
    if (v < eps || v > 1.0) ++scr_bad;
  }
  d.snr.violation_fraction = static_cast<double>(snr_bad) / n;
  d.snr.min_implied = snr_min;
  d.snr.max_implied = snr_max;
  d.scr.violation_fraction = static_cast<double>(scr_bad) / n;
  d.scr.min_implied = scr_min;
  d.scr.max_implied = scr_max;
  return d;
}

nlohmann::json to_json(const StableResponseReport& r) {
  return {{"mechanism", r.mechanism},
          {"violation_fraction", r.violation_fraction},
          {"min_implied", r.min_implied},
          {"max_implied", r.max_implied},
          {"n_units", r.n_units}};
}

nlohmann::json to_json(const StableResponseDiagnostic& d) {
  return nlohmann::json::array({to_json(d.snr), to_json(d.scr)});
}

}  // namespace pce
