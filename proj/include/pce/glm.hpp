#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

namespace pce {

enum class Family { logistic, genlogit_quasibinomial };

/// Model matrix with a leading intercept column of ones. `weights` may be
/// empty (all ones) or hold one nonnegative prior weight per row.
struct DesignMatrix {
  Eigen::MatrixXd rows;
  Eigen::VectorXd weights;
};

/// Result of an IRLS fit. Immutable; safe to share across threads for
/// prediction.
struct FittedModel {
  Eigen::VectorXd coefficients;
  Family family = Family::logistic;
  std::pair<double, double> bounds{0.0, 1.0};  // genlogit only
  double dispersion = 1.0;                     // genlogit only
  bool converged = false;
  int iterations = 0;
  bool ridged = false;  // ridge fallback was needed (singular or separated)
  double deviance = 0.0;
  std::vector<double> deviance_path;  // accepted-iteration deviances
};

/// Maximum-likelihood logistic regression of a 0/1 response by IRLS with
/// step halving. Singular or separated fits fall back to a small ridge
/// penalty and return converged = false rather than aborting.
/// Throws EstimationError when t has a single class, NumericalError when
/// even the ridge fit produces non-finite iterates.
FittedModel fit_logistic(const DesignMatrix& X, const Eigen::VectorXd& t);

/// Quasibinomial fit of a bounded outcome through the generalized logit
/// link g(mu) = log((mu-l)/(h-mu)). The outcome is rescaled to [0,1],
/// clamped to [1e-6, 1-1e-6] for link evaluation only, and the dispersion
/// is the Pearson statistic over n-p-1, floored at 1e-8.
FittedModel fit_genlogit(const DesignMatrix& X, const Eigen::VectorXd& y,
                         std::pair<double, double> bounds);

/// Mean at covariate vector x (without intercept entry). Logistic gives a
/// probability, genlogit a mean in (l,h); both are clamped 1e-12 away from
/// the boundary on the probability scale.
double predict_mean(const FittedModel& m, std::span<const double> x);

/// Conditional SD sqrt(dispersion * (mu(x)-l) * (h-mu(x))) of a genlogit
/// fit. Throws EstimationError for other families.
double conditional_sd(const FittedModel& m, std::span<const double> x);

/// Weighted score vector X' (w .* (t - mu)) at the fitted coefficients;
/// used by tests to check stationarity.
Eigen::VectorXd score_at_fit(const FittedModel& m, const DesignMatrix& X,
                             const Eigen::VectorXd& response);

}  // namespace pce
