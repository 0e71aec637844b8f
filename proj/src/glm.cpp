#include "pce/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kDevianceRelTol = 1e-8;
constexpr int kMaxIter = 100;
constexpr int kMaxHalvings = 20;
constexpr double kRidgeScale = 1e-6;
constexpr double kDispersionFloor = 1e-8;
constexpr double kRescaleClamp = 1e-6;   // rescaled outcome, link evaluation
constexpr double kPredictClamp = 1e-12;  // prediction, probability scale
constexpr double kEtaDivergence = 30.0;  // |eta| beyond this: separated fit

double inv_logit(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double xlogy(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(b); }

// Quasibinomial deviance; exact binomial deviance for 0/1 responses.
double quasibinom_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                           const Eigen::VectorXd& w) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    dev += 2.0 * w[i] *
           (xlogy(y[i], y[i] / mu[i]) +
            xlogy(1.0 - y[i], (1.0 - y[i]) / (1.0 - mu[i])));
  }
  return dev;
}

struct IrlsResult {
  Eigen::VectorXd beta;
  bool converged = false;
  bool singular = false;  // LDLT failed even before any ridge was applied
  int iterations = 0;
  double deviance = 0.0;
  std::vector<double> deviance_path;
  Eigen::VectorXd eta;
};

// One full IRLS run at a fixed ridge penalty (0 for the plain fit). The
// penalized objective deviance + ridge*||beta||^2 is kept non-increasing by
// step halving. Returns singular=true when the unpenalized solve breaks
// down, so the caller can restart with a ridge.
IrlsResult run_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double ridge) {
  const Eigen::Index n = X.rows(), k = X.cols();
  IrlsResult res;
  res.beta = Eigen::VectorXd::Zero(k);
  res.eta = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu[i] = 0.5;
  double dev = quasibinom_deviance(y, mu, w);
  double objective = dev;  // + ridge * ||beta||^2 (zero at start)
  res.deviance_path.push_back(dev);

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    res.iterations = iter;
    // Logit link: IRLS weight w*mu(1-mu), score X'(w(y-mu)).
    Eigen::VectorXd irls_w(n);
    for (Eigen::Index i = 0; i < n; ++i) irls_w[i] = w[i] * mu[i] * (1.0 - mu[i]);
    Eigen::MatrixXd info = X.transpose() * irls_w.asDiagonal() * X;
    Eigen::VectorXd score = X.transpose() * (w.array() * (y - mu).array()).matrix();
    if (ridge > 0.0) {
      info.diagonal().array() += ridge;
      score -= ridge * res.beta;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd delta;
    bool bad = ldlt.info() != Eigen::Success;
    if (!bad) {
      const auto dvec = ldlt.vectorD();
      const double dmax = dvec.maxCoeff();
      bad = dvec.minCoeff() <= 0.0 || !(dmax > 0.0) ||
            dvec.minCoeff() < 1e-14 * dmax;
    }
    if (!bad) {
      delta = ldlt.solve(score);
      bad = !delta.allFinite();
    }
    if (bad) {
      if (ridge == 0.0) {
        res.singular = true;
        return res;
      }
      throw NumericalError("non-finite IRLS iterate after ridge fallback");
    }

    // Step halving on the penalized objective.
    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd beta_try, eta_try, mu_try;
    double dev_try = 0.0, obj_try = 0.0;
    for (int half = 0; half <= kMaxHalvings; ++half) {
      beta_try = res.beta + scale * delta;
      eta_try = X * beta_try;
      mu_try.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) mu_try[i] = inv_logit(eta_try[i]);
      dev_try = quasibinom_deviance(y, mu_try, w);
      obj_try = dev_try + ridge * beta_try.squaredNorm();
      if (std::isfinite(obj_try) && obj_try <= objective + 1e-12) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // no descent direction left; report non-convergence

    res.beta = beta_try;
    res.eta = eta_try;
    mu = mu_try;
    const double prev = objective;
    objective = obj_try;
    dev = dev_try;
    res.deviance_path.push_back(dev);

    if (std::abs(prev - objective) / (std::abs(objective) + 0.1) <
        kDevianceRelTol) {
      res.converged = true;
      break;
    }
  }

  res.deviance = dev;
  return res;
}

// Plain fit first; restart with a fixed ridge if the information matrix is
// singular or the fit diverged (|eta| past the separation guard).
IrlsResult fit_with_fallback(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& w, bool* ridged) {
  *ridged = false;
  IrlsResult res = run_irls(X, y, w, 0.0);
  const bool diverged =
      !res.singular && res.eta.size() > 0 &&
      res.eta.array().abs().maxCoeff() > kEtaDivergence;
  if (res.singular || diverged || !res.beta.allFinite()) {
    // Ridge sized from the null-model information (weights w/4).
    Eigen::MatrixXd info0 =
        X.transpose() * (w / 4.0).asDiagonal() * X;
    const double ridge =
        std::max(kRidgeScale * info0.diagonal().mean(), 1e-300);
    *ridged = true;
    res = run_irls(X, y, w, ridge);
    if (res.singular || !res.beta.allFinite())
      throw NumericalError("non-finite IRLS iterate after ridge fallback");
  }
  return res;
}

Eigen::VectorXd effective_weights(const DesignMatrix& X) {
  if (X.weights.size() == 0) return Eigen::VectorXd::Ones(X.rows.rows());
  if (X.weights.size() != X.rows.rows())
    throw ValidationError("weight vector length does not match design rows");
  if ((X.weights.array() < 0.0).any())
    throw ValidationError("negative prior weight");
  return X.weights;
}

double linear_predictor(const FittedModel& m, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) + 1 != m.coefficients.size())
    throw ValidationError("covariate dimension mismatch in predict");
  double eta = m.coefficients[0];
  for (std::size_t j = 0; j < x.size(); ++j)
    eta += m.coefficients[static_cast<Eigen::Index>(j) + 1] * x[j];
  return eta;
}

}  // namespace

FittedModel fit_logistic(const DesignMatrix& X, const Eigen::VectorXd& t) {
  if (t.size() != X.rows.rows())
    throw ValidationError("response length does not match design rows");
  const Eigen::VectorXd w = effective_weights(X);
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (w[i] <= 0.0) continue;
    if (t[i] == 0.0) has0 = true;
    else if (t[i] == 1.0) has1 = true;
    else throw ValidationError("logistic response must be 0 or 1");
  }
  if (!has0 || !has1)
    throw EstimationError("degenerate response: single class in logistic fit");

  bool ridged = false;
  IrlsResult res = fit_with_fallback(X.rows, t, w, &ridged);

  FittedModel m;
  m.coefficients = res.beta;
  m.family = Family::logistic;
  m.converged = res.converged && !ridged;
  m.ridged = ridged;
  m.iterations = res.iterations;
  m.deviance = res.deviance;
  m.deviance_path = std::move(res.deviance_path);
  return m;
}

FittedModel fit_genlogit(const DesignMatrix& X, const Eigen::VectorXd& y,
                         std::pair<double, double> bounds) {
  const auto [l, h] = bounds;
  if (!(l < h)) throw DomainError("genlogit bounds require l < h");
  if (y.size() != X.rows.rows())
    throw ValidationError("response length does not match design rows");
  if (y.size() == 0) throw EstimationError("empty genlogit subsample");

  Eigen::VectorXd ytil(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(l <= y[i] && y[i] <= h))
      throw DomainError("genlogit outcome outside bounds");
    const double v = (y[i] - l) / (h - l);
    ytil[i] = std::clamp(v, kRescaleClamp, 1.0 - kRescaleClamp);
  }
  const Eigen::VectorXd w = effective_weights(X);

  bool ridged = false;
  IrlsResult res = fit_with_fallback(X.rows, ytil, w, &ridged);

  FittedModel m;
  m.coefficients = res.beta;
  m.family = Family::genlogit_quasibinomial;
  m.bounds = bounds;
  m.converged = res.converged && !ridged;
  m.ridged = ridged;
  m.iterations = res.iterations;
  m.deviance = res.deviance;
  m.deviance_path = std::move(res.deviance_path);

  // Pearson dispersion on the rescaled scale, floored; the floor also
  // covers the zero-residual-degrees-of-freedom case.
  double pearson = 0.0;
  for (Eigen::Index i = 0; i < ytil.size(); ++i) {
    const double mu = inv_logit(res.eta[i]);
    pearson += w[i] * (ytil[i] - mu) * (ytil[i] - mu) / (mu * (1.0 - mu));
  }
  const double df =
      static_cast<double>(ytil.size()) - static_cast<double>(X.rows.cols());
  m.dispersion =
      df > 0.0 ? std::max(pearson / df, kDispersionFloor) : kDispersionFloor;
  return m;
}

double predict_mean(const FittedModel& m, std::span<const double> x) {
  const double pr =
      std::clamp(inv_logit(linear_predictor(m, x)), kPredictClamp,
                 1.0 - kPredictClamp);
  if (m.family == Family::logistic) return pr;
  return m.bounds.first + (m.bounds.second - m.bounds.first) * pr;
}

double conditional_sd(const FittedModel& m, std::span<const double> x) {
  if (m.family != Family::genlogit_quasibinomial)
    throw EstimationError("conditional_sd requires a genlogit fit");
  const double mu = predict_mean(m, x);
  return std::sqrt(m.dispersion * (mu - m.bounds.first) *
                   (m.bounds.second - mu));
}

Eigen::VectorXd score_at_fit(const FittedModel& m, const DesignMatrix& X,
                             const Eigen::VectorXd& response) {
  const Eigen::VectorXd w = effective_weights(X);
  Eigen::VectorXd y = response;
  if (m.family == Family::genlogit_quasibinomial) {
    const auto [l, h] = m.bounds;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      y[i] = std::clamp((y[i] - l) / (h - l), kRescaleClamp,
                        1.0 - kRescaleClamp);
  }
  Eigen::VectorXd eta = X.rows * m.coefficients;
  Eigen::VectorXd resid(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    resid[i] = w[i] * (y[i] - inv_logit(eta[i]));
  return X.rows.transpose() * resid;
}

}  // namespace pce
