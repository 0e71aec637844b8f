#include "pce/nuisance.hpp"

#include <cmath>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kConstProbEdge = 1e-12;

struct Subsample {
  DesignMatrix design;
  Eigen::VectorXd response;
  std::size_t n = 0;
};

// Rows selected by `keep`, response selected by `resp`.
template <typename Keep, typename Resp>
Subsample extract(const Dataset& d, Keep keep, Resp resp) {
  const std::size_t p = d.covariate_names.size();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (keep(d.records[i])) idx.push_back(i);

  Subsample s;
  s.n = idx.size();
  s.design.rows.resize(static_cast<Eigen::Index>(idx.size()),
                       static_cast<Eigen::Index>(p) + 1);
  s.response.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const UnitRecord& u = d.records[idx[k]];
    s.design.rows(static_cast<Eigen::Index>(k), 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j)
      s.design.rows(static_cast<Eigen::Index>(k),
                    static_cast<Eigen::Index>(j) + 1) = u.x[j];
    s.response[static_cast<Eigen::Index>(k)] = resp(u);
  }
  return s;
}

// Intercept-only constant-probability model: the perfect-response rule for
// cells where every unit responded (or none did), where the logistic MLE
// would diverge.
FittedModel constant_logistic(double prob, std::size_t p) {
  FittedModel m;
  m.family = Family::logistic;
  m.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p) + 1);
  m.coefficients[0] = std::log(prob / (1.0 - prob));
  m.converged = true;
  m.iterations = 0;
  return m;
}

FittedModel fit_response_model(const Subsample& s, const std::string& cell,
                               std::size_t p) {
  if (s.n == 0) throw EstimationError("empty subsample: " + cell);
  const double sum = s.response.sum();
  if (sum == 0.0)
    return constant_logistic(kConstProbEdge, p);
  if (sum == static_cast<double>(s.n))
    return constant_logistic(1.0 - kConstProbEdge, p);
  return fit_logistic(s.design, s.response);
}

}  // namespace

NuisanceFit fit_nuisance(const Dataset& d) {
  const std::size_t p = d.covariate_names.size();
  const auto bounds = d.outcome_bounds;

  auto z1 = extract(
      d, [](const UnitRecord& u) { return u.z == 1; },
      [](const UnitRecord& u) { return static_cast<double>(*u.c); });
  auto z1c1 = extract(
      d, [](const UnitRecord& u) { return u.z == 1 && *u.c == 1; },
      [](const UnitRecord& u) { return static_cast<double>(u.r); });
  auto z1c0 = extract(
      d, [](const UnitRecord& u) { return u.z == 1 && *u.c == 0; },
      [](const UnitRecord& u) { return static_cast<double>(u.r); });
  auto z0 = extract(
      d, [](const UnitRecord& u) { return u.z == 0; },
      [](const UnitRecord& u) { return static_cast<double>(u.r); });
  auto z1c1r1 = extract(
      d, [](const UnitRecord& u) { return u.z == 1 && *u.c == 1 && u.r == 1; },
      [](const UnitRecord& u) { return *u.y; });
  auto z1c0r1 = extract(
      d, [](const UnitRecord& u) { return u.z == 1 && *u.c == 0 && u.r == 1; },
      [](const UnitRecord& u) { return *u.y; });
  auto z0r1 = extract(
      d, [](const UnitRecord& u) { return u.z == 0 && u.r == 1; },
      [](const UnitRecord& u) { return *u.y; });

  NuisanceFit fit;
  fit.sizes = {z1.n, z1c1.n, z1c0.n, z0.n, z1c1r1.n, z1c0r1.n, z0r1.n};

  if (z1.n == 0) throw EstimationError("empty subsample: no units with Z=1");
  if (z1c1.n == 0)
    throw EstimationError("empty subsample: no compliers among Z=1");
  if (z1c0.n == 0)
    throw EstimationError("empty subsample: no noncompliers among Z=1");
  if (z0.n == 0) throw EstimationError("empty subsample: no units with Z=0");
  if (z1c1r1.n == 0)
    throw EstimationError("empty subsample: no responders among Z=1,C=1");
  if (z1c0r1.n == 0)
    throw EstimationError("empty subsample: no responders among Z=1,C=0");
  if (z0r1.n == 0)
    throw EstimationError("empty subsample: no responders among Z=0");

  fit.pi_model = fit_logistic(z1.design, z1.response);
  fit.w11_model = fit_response_model(z1c1, "response among Z=1,C=1", p);
  fit.w10_model = fit_response_model(z1c0, "response among Z=1,C=0", p);
  fit.lambda0_model = fit_response_model(z0, "response among Z=0", p);
  fit.mu11_model = fit_genlogit(z1c1r1.design, z1c1r1.response, bounds);
  fit.mu10_model = fit_genlogit(z1c0r1.design, z1c0r1.response, bounds);
  fit.kappa0R_model = fit_genlogit(z0r1.design, z0r1.response, bounds);
  return fit;
}

NuisancePredictions predict_nuisance(const NuisanceFit& fit, const Dataset& d) {
  const std::size_t n = d.size();
  NuisancePredictions out;
  out.bounds = d.outcome_bounds;
  out.pi1.resize(n);
  out.pi0.resize(n);
  out.w11.resize(n);
  out.w10.resize(n);
  out.lambda0.resize(n);
  out.mu11.resize(n);
  out.mu10.resize(n);
  out.kappa0R.resize(n);
  out.sigma0R.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> x(d.records[i].x);
    out.pi1[i] = predict_mean(fit.pi_model, x);
    out.pi0[i] = 1.0 - out.pi1[i];
    out.w11[i] = predict_mean(fit.w11_model, x);
    out.w10[i] = predict_mean(fit.w10_model, x);
    out.lambda0[i] = predict_mean(fit.lambda0_model, x);
    out.mu11[i] = predict_mean(fit.mu11_model, x);
    out.mu10[i] = predict_mean(fit.mu10_model, x);
    out.kappa0R[i] = predict_mean(fit.kappa0R_model, x);
    out.sigma0R[i] = conditional_sd(fit.kappa0R_model, x);
  }
  return out;
}

}  // namespace pce
