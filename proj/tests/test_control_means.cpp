#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "pce/control_means.hpp"
#include "pce/errors.hpp"

using namespace pce;
using testutil::one_unit;

namespace {

ResponseWeights fixed_weights(double p01R) {
  ResponseWeights w;
  w.w01 = {0.5};
  w.w00 = {0.5};
  w.p01R = {p01R};
  w.p00R = {1.0 - p01R};
  w.clamp_flag = {0};
  w.mixture_violated = {0};
  return w;
}

void check_mixture(const NuisancePredictions& p, const ResponseWeights& w,
                   const ControlMeans& m, double tol = 1e-8) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mix = w.p01R[i] * m.mu01[i] + w.p00R[i] * m.mu00[i];
    CHECK(mix == doctest::Approx(p.kappa0R[i]).epsilon(tol));
  }
}

double gor_of(double mu01, double mu00, double l, double h) {
  return ((mu01 - l) / (h - mu01)) / ((mu00 - l) / (h - mu00));
}

}  // namespace

TEST_CASE("ER control means") {
  SUBCASE("hand-solved point") {
    const auto p = one_unit({.mu10 = 0.2, .kappa0R = 0.5});
    const auto w = fixed_weights(0.5);
    const auto m = mu0_er(p, w);
    CHECK(m.mu01[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(m.mu00[0] == doctest::Approx(0.2).epsilon(1e-12));
    check_mixture(p, w, m);
  }
  SUBCASE("indistinguishable strata") {
    const auto p = one_unit({.mu10 = 0.5, .kappa0R = 0.5});
    const auto m = mu0_er(p, fixed_weights(0.4));
    CHECK(m.mu01[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("single-component mixture") {
    const auto p = one_unit({.mu10 = 0.2, .kappa0R = 0.45});
    const auto m = mu0_er(p, fixed_weights(1.0));
    CHECK(m.mu01[0] == doctest::Approx(0.45).epsilon(1e-12));
  }
  SUBCASE("degenerate complier responder weight aborts") {
    const auto p = one_unit({});
    CHECK_THROWS_WITH_AS(mu0_er(p, fixed_weights(1e-13)),
                         doctest::Contains("unit 1"), EstimationError);
  }
}

TEST_CASE("PI control means ignore the weights") {
  const auto p = one_unit({.kappa0R = 0.37});
  const auto m = mu0_pi(p);
  CHECK(m.mu01[0] == 0.37);
  CHECK(m.mu00[0] == 0.37);

  auto pl = one_unit({});
  pl.kappa0R[0] = 0.0;  // lower bound
  const auto ml = mu0_pi(pl);
  CHECK(ml.mu01[0] == 0.0);
  CHECK(ml.mu00[0] == 0.0);
}

TEST_CASE("GOR control means") {
  SUBCASE("neutral psi reproduces PI") {
    const auto p = one_unit({.kappa0R = 0.42});
    const auto m = mu0_pisens_gor(p, fixed_weights(0.3), 1.0, {0.0, 1.0});
    CHECK(m.mu01[0] == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(m.mu00[0] == doctest::Approx(0.42).epsilon(1e-12));
  }
  SUBCASE("psi=2 hand-checked point") {
    const auto p = one_unit({.kappa0R = 0.5});
    const auto w = fixed_weights(0.5);
    const auto m = mu0_pisens_gor(p, w, 2.0, {0.0, 1.0});
    CHECK(m.mu01[0] == doctest::Approx(0.58579).epsilon(1e-4));
    CHECK(m.mu00[0] == doctest::Approx(0.41421).epsilon(1e-4));
    CHECK(gor_of(m.mu01[0], m.mu00[0], 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-6));
    check_mixture(p, w, m);
  }
  SUBCASE("kappa at the lower bound collapses both means") {
    auto p = one_unit({});
    p.kappa0R[0] = 0.0;
    const auto m = mu0_pisens_gor(p, fixed_weights(0.5), 2.0, {0.0, 1.0});
    CHECK(m.mu01[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.mu00[0] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("agrees with the literal quadratic-root formula") {
    std::mt19937_64 rng(211);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    std::uniform_real_distribution<double> psis(0.2, 5.0);
    for (int rep = 0; rep < 300; ++rep) {
      const double p01R = u(rng), kap = u(rng), psi = psis(rng);
      auto p = one_unit({});
      p.kappa0R[0] = kap;
      const auto m = mu0_pisens_gor(p, fixed_weights(p01R), psi, {0.0, 1.0});
      for (int c : {1, 0}) {
        const double pc = c == 1 ? p01R : 1.0 - p01R;
        const double psi_c = c == 1 ? psi : 1.0 / psi;
        const double alpha = (pc + kap) * (psi_c - 1.0) + 1.0;
        const double beta = std::sqrt(
            alpha * alpha - 4.0 * pc * kap * psi_c * (psi_c - 1.0));
        const double lit = (alpha - beta) / (2.0 * (psi_c - 1.0) * pc);
        const double got = c == 1 ? m.mu01[0] : m.mu00[0];
        CHECK(got == doctest::Approx(lit).epsilon(1e-9));
      }
    }
  }
  SUBCASE("agrees with the bisection oracle") {
    std::mt19937_64 rng(223);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::uniform_real_distribution<double> psis(0.1, 8.0);
    for (int rep = 0; rep < 500; ++rep) {
      const double p01R = u(rng), kap = u(rng), psi = psis(rng);
      auto p = one_unit({});
      p.kappa0R[0] = kap;
      const auto w = fixed_weights(p01R);
      const auto m = mu0_pisens_gor(p, w, psi, {0.0, 1.0});
      const double oracle = testutil::bisect_odds_mixture(p01R, kap, psi);
      CHECK(std::abs(m.mu01[0] - oracle) < 1e-6);
      check_mixture(p, w, m, 1e-8);
    }
  }
}

TEST_CASE("MR control means") {
  SUBCASE("neutral rho reproduces PI") {
    const auto p = one_unit({.kappa0R = 0.3});
    const auto m = mu0_pisens_mr(p, fixed_weights(0.4), 1.0);
    CHECK(m.mu01[0] == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("rho=2 hand-solved point") {
    const auto p = one_unit({.kappa0R = 0.3});
    const auto w = fixed_weights(0.5);
    const auto m = mu0_pisens_mr(p, w, 2.0);
    CHECK(m.mu01[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(m.mu00[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(m.mu01[0] / m.mu00[0] == doctest::Approx(2.0).epsilon(1e-12));
    check_mixture(p, w, m);
  }
  SUBCASE("single-component mixture") {
    const auto p = one_unit({.kappa0R = 0.3});
    const auto m = mu0_pisens_mr(p, fixed_weights(1.0), 2.0);
    CHECK(m.mu01[0] == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("nonpositive kappa is a domain error") {
    auto p = one_unit({});
    p.kappa0R[0] = 0.0;
    CHECK_THROWS_AS(mu0_pisens_mr(p, fixed_weights(0.5), 2.0), DomainError);
  }
}

TEST_CASE("SMDe control means") {
  SUBCASE("eta zero reproduces PI exactly") {
    const auto p = one_unit({.kappa0R = 0.44, .sigma0R = 0.3});
    const auto m = mu0_pisens_smde(p, fixed_weights(0.37), 0.0);
    CHECK(m.mu01[0] == 0.44);
    CHECK(m.mu00[0] == 0.44);
  }
  SUBCASE("eta=1 symmetric point") {
    auto p = one_unit({.kappa0R = 0.5});
    p.sigma0R[0] = 1.0;
    const auto w = fixed_weights(0.5);
    const auto m = mu0_pisens_smde(p, w, 1.0);
    CHECK(m.mu01[0] == doctest::Approx(0.94721).epsilon(1e-4));
    CHECK(m.mu00[0] == doctest::Approx(0.05279).epsilon(1e-4));
    check_mixture(p, w, m, 1e-12);
  }
  SUBCASE("single-component mixture") {
    const auto p = one_unit({.kappa0R = 0.5, .sigma0R = 0.2});
    const auto m = mu0_pisens_smde(p, fixed_weights(1.0), 1.5);
    CHECK(m.mu01[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("identity (mu01-mu00)*sqrt(1+eta^2 p q) = eta*sigma") {
    std::mt19937_64 rng(227);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::uniform_real_distribution<double> etas(-2.0, 2.0);
    for (int rep = 0; rep < 300; ++rep) {
      const double p01R = u(rng), eta = etas(rng);
      auto p = one_unit({});
      p.kappa0R[0] = u(rng);
      p.sigma0R[0] = 0.5 * u(rng);
      const auto m = mu0_pisens_smde(p, fixed_weights(p01R), eta);
      const double lhs = (m.mu01[0] - m.mu00[0]) *
                         std::sqrt(1.0 + eta * eta * p01R * (1.0 - p01R));
      CHECK(lhs == doctest::Approx(eta * p.sigma0R[0]).epsilon(1e-10));
    }
  }
}

TEST_CASE("outcome mixture equation holds for every assumption") {
  std::mt19937_64 rng(229);
  const auto p = testutil::random_predictions(rng, 400);
  const auto w = weights_rpo(p);
  const auto bounds = p.bounds;

  check_mixture(p, w, mu0_er(p, w));
  check_mixture(p, w, mu0_pi(p));
  check_mixture(p, w, mu0_pisens_gor(p, w, 1.7, bounds));
  check_mixture(p, w, mu0_pisens_mr(p, w, 1.4));
  check_mixture(p, w, mu0_pisens_smde(p, w, 0.8));

  SUBCASE("GOR keeps means inside the bounds") {
    const auto m = mu0_pisens_gor(p, w, 3.0, bounds);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(m.mu01[i] >= bounds.first);
      CHECK(m.mu01[i] <= bounds.second);
      CHECK(m.mu00[i] >= bounds.first);
      CHECK(m.mu00[i] <= bounds.second);
      CHECK(gor_of(m.mu01[i], m.mu00[i], bounds.first, bounds.second) ==
            doctest::Approx(3.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("neutral sensitivity values reproduce PI to 1e-12") {
  std::mt19937_64 rng(233);
  const auto p = testutil::random_predictions(rng, 200);
  const auto w = weights_rpi(p);
  const auto pi = mu0_pi(p);
  const auto gor = mu0_pisens_gor(p, w, 1.0, p.bounds);
  const auto mr = mu0_pisens_mr(p, w, 1.0);
  const auto smde = mu0_pisens_smde(p, w, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(std::abs(gor.mu01[i] - pi.mu01[i]) <= 1e-12);
    CHECK(std::abs(mr.mu01[i] - pi.mu01[i]) <= 1e-12);
    CHECK(std::abs(smde.mu01[i] - pi.mu01[i]) <= 1e-12);
    CHECK(std::abs(gor.mu00[i] - pi.mu00[i]) <= 1e-12);
    CHECK(std::abs(mr.mu00[i] - pi.mu00[i]) <= 1e-12);
    CHECK(std::abs(smde.mu00[i] - pi.mu00[i]) <= 1e-12);
  }
}

TEST_CASE("compound-ER identity under exact SNR") {
  std::mt19937_64 rng(239);
  const auto p = testutil::random_predictions(rng, 600);
  const auto w = weights_near_snr(p, 0.01);
  const auto m = mu0_er(p, w);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (w.clamp_flag[i]) continue;  // identity requires the exact solution
    ++checked;
    const double denom = p.lambda0[i] - p.pi0[i] * p.w10[i];
    const double closed =
        (p.lambda0[i] * p.kappa0R[i] - p.pi0[i] * p.w10[i] * p.mu10[i]) /
        denom;
    CHECK(m.mu01[i] == doctest::Approx(closed).epsilon(1e-10));
  }
  CHECK(checked > 100);
}
