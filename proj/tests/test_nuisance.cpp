#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "pce/errors.hpp"
#include "pce/nuisance.hpp"

using namespace pce;
using testutil::unit;

namespace {

// Intercept-only dataset with known cell statistics:
//   Z=1,C=1: 3 units, responders y = {0.7, 0.9}   (w11 = 2/3, mu11 = 0.8)
//   Z=1,C=0: 2 units, all respond, y = {0.5, 0.7} (w10 = 1,   mu10 = 0.6)
//   Z=0:     4 units, 3 respond,   y = {0.3, 0.5, 0.7}
Dataset cell_dataset() {
  Dataset d;
  d.outcome_bounds = {0.0, 1.0};
  d.records = {
      unit({}, 1, 1, 1, 0.7), unit({}, 1, 1, 1, 0.9), unit({}, 1, 1, 0, 0),
      unit({}, 1, 0, 1, 0.5), unit({}, 1, 0, 1, 0.7),
      unit({}, 0, 0, 1, 0.3), unit({}, 0, 0, 1, 0.5), unit({}, 0, 0, 1, 0.7),
      unit({}, 0, 0, 0, 0),
  };
  return d;
}

}  // namespace

TEST_CASE("intercept-only nuisance fits reproduce cell statistics") {
  const Dataset d = cell_dataset();
  const NuisanceFit fit = fit_nuisance(d);
  const NuisancePredictions p = predict_nuisance(fit, d);

  CHECK(fit.sizes.z1 == 5);
  CHECK(fit.sizes.z1c1 == 3);
  CHECK(fit.sizes.z1c0 == 2);
  CHECK(fit.sizes.z0 == 4);
  CHECK(fit.sizes.z1c1r1 == 2);
  CHECK(fit.sizes.z1c0r1 == 2);
  CHECK(fit.sizes.z0r1 == 3);

  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p.pi1[i] == doctest::Approx(3.0 / 5.0).epsilon(1e-7));
    CHECK(p.pi0[i] == 1.0 - p.pi1[i]);  // exact complement
    CHECK(p.w11[i] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
    CHECK(p.w10[i] == doctest::Approx(1.0).epsilon(1e-9));  // perfect response
    CHECK(p.lambda0[i] == doctest::Approx(3.0 / 4.0).epsilon(1e-7));
    CHECK(p.mu11[i] == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(p.mu10[i] == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(p.kappa0R[i] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(p.sigma0R[i] > 0.0);
  }
}

TEST_CASE("perfect-response cells use the constant probability rule") {
  Dataset d = cell_dataset();
  // make every control unit respond as well
  d.records[8].r = 1;
  d.records[8].y = 0.4;
  const NuisanceFit fit = fit_nuisance(d);
  const NuisancePredictions p = predict_nuisance(fit, d);
  CHECK(p.lambda0[0] == doctest::Approx(1.0 - 1e-12));
  CHECK(p.w10[0] == doctest::Approx(1.0 - 1e-12));
  CHECK(fit.lambda0_model.converged);

  // with zero responders the outcome subsample is empty, which is fatal
  Dataset d2 = cell_dataset();
  d2.records[3].r = 0;
  d2.records[3].y.reset();
  d2.records[4].r = 0;
  d2.records[4].y.reset();
  CHECK_THROWS_WITH_AS(fit_nuisance(d2),
                       doctest::Contains("no responders among Z=1,C=0"),
                       EstimationError);
}

TEST_CASE("missing strata raise estimation errors naming the cell") {
  Dataset d = cell_dataset();
  // drop the treated noncompliers entirely
  d.records.erase(d.records.begin() + 3, d.records.begin() + 5);
  CHECK_THROWS_WITH_AS(fit_nuisance(d),
                       doctest::Contains("no noncompliers among Z=1"),
                       EstimationError);
}

TEST_CASE("predictions lie strictly inside their ranges") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Dataset d;
  d.covariate_names = {"x1", "x2"};
  d.outcome_bounds = {1.0, 6.0};
  for (int i = 0; i < 300; ++i) {
    const double x1 = nd(rng), x2 = nd(rng);
    const int z = ud(rng) < 0.5 ? 1 : 0;
    const int c = ud(rng) < 1.0 / (1.0 + std::exp(-x1)) ? 1 : 0;
    const int r = ud(rng) < 0.8 ? 1 : 0;
    d.records.push_back(unit({x1, x2}, z, c, r, 1.0 + 5.0 * ud(rng)));
  }
  d.validate();
  const NuisanceFit fit = fit_nuisance(d);
  const NuisancePredictions p = predict_nuisance(fit, d);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (double pr : {p.pi1[i], p.w11[i], p.w10[i], p.lambda0[i]}) {
      CHECK(pr > 0.0);
      CHECK(pr < 1.0);
    }
    for (double mu : {p.mu11[i], p.mu10[i], p.kappa0R[i]}) {
      CHECK(mu > 1.0);
      CHECK(mu < 6.0);
    }
    CHECK(p.sigma0R[i] > 0.0);
    CHECK(p.pi0[i] == 1.0 - p.pi1[i]);
  }
}

TEST_CASE("prediction rejects mismatched covariate dimension") {
  const Dataset d = cell_dataset();
  const NuisanceFit fit = fit_nuisance(d);
  Dataset wide = d;
  wide.covariate_names = {"a"};
  for (auto& u : wide.records) u.x = {1.0};
  CHECK_THROWS_AS(predict_nuisance(fit, wide), ValidationError);
}
