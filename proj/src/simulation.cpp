#include "pce/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pce/errors.hpp"
#include "pce/rng.hpp"

namespace pce {

namespace {

constexpr std::size_t kPilotSize = 10000;
constexpr double kCovariateTruncation = 3.0;

// Standard normal truncated to +/- kCovariateTruncation, by rejection.
double draw_covariate(Rng& rng, std::normal_distribution<double>& normal) {
  double v = normal(rng);
  while (std::abs(v) > kCovariateTruncation) v = normal(rng);
  return v;
}

double lin(const std::vector<double>& coef, std::span<const double> x) {
  double eta = coef[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += coef[j + 1] * x[j];
  return eta;
}

double inv_logit(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double odds(double pr) { return pr / (1.0 - pr); }

// In-range root of pi1(rho-1)u^2 - gamma*u + lam*rho = 0 (the response
// mixture + proportional-odds system).
double rpo_root(double pi1, double lam, double rho) {
  if (std::abs(rho - 1.0) < 1e-8) return lam;
  const double gamma = (pi1 + lam) * (rho - 1.0) + 1.0;
  const double disc =
      std::max(gamma * gamma - 4.0 * pi1 * lam * rho * (rho - 1.0), 0.0);
  return (gamma - std::sqrt(disc)) / (2.0 * pi1 * (rho - 1.0));
}

// Odds-ratio + mixture solve on the unit scale (see control_means.cpp).
double gor_component(double weight, double mix, double psi_c) {
  const double alpha = (weight + mix) * (psi_c - 1.0) + 1.0;
  const double rad =
      std::max(alpha * alpha - 4.0 * weight * mix * psi_c * (psi_c - 1.0),
               0.0);
  const double denom = alpha + std::sqrt(rad);
  if (denom < 1e-30) return 0.0;
  return 2.0 * mix * psi_c / denom;
}

void require_coef(const std::vector<double>& coef, std::size_t p,
                  const std::string& name) {
  if (coef.size() != p + 1)
    throw ConfigError("coefficient vector '" + name + "' must have length " +
                      std::to_string(p + 1));
  for (double v : coef)
    if (!std::isfinite(v))
      throw ConfigError("non-finite coefficient in '" + name + "'");
}

}  // namespace

void DgpConfig::validate() const {
  if (n == 0) throw ConfigError("sample size n must be positive");
  if (!(assignment_probability > 0.0 && assignment_probability < 1.0))
    throw ConfigError("assignment probability must lie in (0,1)");
  if (!(outcome_bounds.first < outcome_bounds.second))
    throw ConfigError("outcome bounds require l < h");
  if (!(outcome_dispersion > 0.0 && outcome_dispersion < 1.0))
    throw ConfigError("outcome dispersion must lie in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw ConfigError("epsilon must lie in (0, 0.5)");
  require_coef(compliance_coef, p, "compliance_coef");
  require_coef(w11_coef, p, "w11_coef");
  require_coef(w10_coef, p, "w10_coef");
  require_coef(mu11_coef, p, "mu11_coef");
  require_coef(mu10_coef, p, "mu10_coef");
  require_coef(kappa0R_coef, p, "kappa0R_coef");
  if (missingness == Missingness::none) {
    require_coef(w01_coef, p, "w01_coef");
    require_coef(w00_coef, p, "w00_coef");
  } else {
    require_coef(lambda0_coef, p, "lambda0_coef");
  }
  if (missingness == Missingness::none && principal != Principal::pi)
    throw ConfigError("missingness 'none' is legal only with principal 'PI'");
  if (principal == Principal::pisens_gor && !(sensitivity > 0.0))
    throw ConfigError("GOR sensitivity psi must be > 0");
  if (principal == Principal::pisens_mr && !(sensitivity > 0.0))
    throw ConfigError("MR sensitivity rho must be > 0");
  if (is_pisens(principal) && !std::isfinite(sensitivity))
    throw ConfigError("sensitivity parameter must be finite");
}

double TrueFunctions::pi1(std::span<const double> x) const {
  return inv_logit(lin(g.compliance_coef, x));
}
double TrueFunctions::w11(std::span<const double> x) const {
  return inv_logit(lin(g.w11_coef, x));
}
double TrueFunctions::w10(std::span<const double> x) const {
  return inv_logit(lin(g.w10_coef, x));
}

double TrueFunctions::lambda0(std::span<const double> x) const {
  if (g.missingness == Missingness::none) {
    const double p1 = pi1(x);
    return p1 * inv_logit(lin(g.w01_coef, x)) +
           (1.0 - p1) * inv_logit(lin(g.w00_coef, x));
  }
  return inv_logit(lin(g.lambda0_coef, x));
}

std::pair<double, double> TrueFunctions::w0(std::span<const double> x) const {
  const double p1 = pi1(x), p0 = 1.0 - p1;
  switch (g.missingness) {
    case Missingness::near_snr: {
      const double w00 = w10(x);
      const double lam = lambda0(x);
      return {(lam - p0 * w00) / p1, w00};
    }
    case Missingness::near_scr: {
      const double w01 = w11(x);
      const double lam = lambda0(x);
      return {w01, (lam - p1 * w01) / p0};
    }
    case Missingness::rpi: {
      const double lam = lambda0(x);
      return {lam, lam};
    }
    case Missingness::rpo: {
      const double lam = lambda0(x);
      const double rho = odds(w11(x)) / odds(w10(x));
      const double u = rpo_root(p1, lam, rho);
      return {u, (lam - p1 * u) / p0};
    }
    case Missingness::none:
      return {inv_logit(lin(g.w01_coef, x)), inv_logit(lin(g.w00_coef, x))};
  }
  throw ConfigError("unknown missingness mechanism");
}

double TrueFunctions::mu11(std::span<const double> x) const {
  const auto [l, h] = g.outcome_bounds;
  return l + (h - l) * inv_logit(lin(g.mu11_coef, x));
}
double TrueFunctions::mu10(std::span<const double> x) const {
  const auto [l, h] = g.outcome_bounds;
  return l + (h - l) * inv_logit(lin(g.mu10_coef, x));
}
double TrueFunctions::kappa0R(std::span<const double> x) const {
  const auto [l, h] = g.outcome_bounds;
  return l + (h - l) * inv_logit(lin(g.kappa0R_coef, x));
}

std::pair<double, double> TrueFunctions::mu0(std::span<const double> x) const {
  const double kap = kappa0R(x);
  if (g.principal == Principal::pi) return {kap, kap};

  const double p1 = pi1(x);
  const auto [w01, w00] = w0(x);
  const double lam = p1 * w01 + (1.0 - p1) * w00;
  const double p01R = p1 * w01 / lam;
  const double p00R = 1.0 - p01R;
  const auto [l, h] = g.outcome_bounds;

  switch (g.principal) {
    case Principal::er: {
      const double m10 = mu10(x);
      return {m10 + (kap - m10) / p01R, m10};
    }
    case Principal::pisens_gor: {
      const double mix = (kap - l) / (h - l);
      return {l + (h - l) * gor_component(p01R, mix, g.sensitivity),
              l + (h - l) * gor_component(p00R, mix, 1.0 / g.sensitivity)};
    }
    case Principal::pisens_mr: {
      const double rho = g.sensitivity, rho0 = 1.0 / rho;
      return {rho * kap / ((rho - 1.0) * p01R + 1.0),
              rho0 * kap / ((rho0 - 1.0) * p00R + 1.0)};
    }
    case Principal::pisens_smde: {
      const double eta = g.sensitivity;
      const double sd = control_sd(x);
      return {kap + p00R * eta * sd, kap - p01R * eta * sd};
    }
    case Principal::pi: break;
  }
  throw ConfigError("unknown principal identification assumption");
}

double TrueFunctions::control_sd(std::span<const double> x) const {
  // Common within-stratum SD making the responder mixture variance equal
  // the quasibinomial shape dispersion*(kappa-l)(h-kappa) exactly.
  const auto [l, h] = g.outcome_bounds;
  const double kap = kappa0R(x);
  const double var_mix = g.outcome_dispersion * (kap - l) * (h - kap);
  const double p1 = pi1(x);
  const auto [w01, w00] = w0(x);
  const double lam = p1 * w01 + (1.0 - p1) * w00;
  const double p01R = p1 * w01 / lam;
  const double eta = g.sensitivity;
  return std::sqrt(var_mix / (1.0 + eta * eta * p01R * (1.0 - p01R)));
}

namespace {

void pilot_check(const DgpConfig& g, std::uint64_t seed) {
  const TrueFunctions f{g};
  const auto [l, h] = g.outcome_bounds;
  Rng rng = make_rng(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(g.p);
  for (std::size_t t = 0; t < kPilotSize; ++t) {
    for (auto& v : x) v = draw_covariate(rng, normal);
    const auto [w01, w00] = f.w0(x);
    if (!(w01 >= g.epsilon && w01 <= 1.0))
      throw DomainError("DGP infeasible: derived control complier response " +
                        std::to_string(w01) + " outside [eps,1] under " +
                        to_string(g.missingness));
    if (!(w00 >= g.epsilon && w00 <= 1.0))
      throw DomainError(
          "DGP infeasible: derived control noncomplier response " +
          std::to_string(w00) + " outside [eps,1] under " +
          to_string(g.missingness));
    const auto [mu01, mu00] = f.mu0(x);
    if (g.principal == Principal::pisens_smde) {
      const double half = std::sqrt(3.0) * f.control_sd(x);
      if (mu01 - half < l || mu01 + half > h || mu00 - half < l ||
          mu00 + half > h)
        throw DomainError(
            "DGP infeasible: control outcome support leaves bounds under " +
            to_string(g.principal));
    } else if (!(mu01 > l && mu01 < h && mu00 > l && mu00 < h)) {
      throw DomainError("DGP infeasible: derived control mean outside (l,h) "
                        "under " +
                        to_string(g.principal));
    }
  }
}

double draw_scaled_beta(Rng& rng, double mean01, double dispersion, double l,
                        double h) {
  // Beta with mean m and var = dispersion*m(1-m) on the unit scale.
  const double s = 1.0 / dispersion - 1.0;
  std::gamma_distribution<double> ga(mean01 * s, 1.0);
  std::gamma_distribution<double> gb((1.0 - mean01) * s, 1.0);
  const double a = ga(rng), b = gb(rng);
  const double unit = (a + b > 0.0) ? a / (a + b) : mean01;
  return l + (h - l) * unit;
}

}  // namespace

SimulatedData simulate_with_latent(const DgpConfig& g, std::uint64_t seed) {
  g.validate();
  pilot_check(g, seed);

  const TrueFunctions f{g};
  const auto [l, h] = g.outcome_bounds;
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SimulatedData out;
  out.data.outcome_bounds = g.outcome_bounds;
  out.data.covariate_names.resize(g.p);
  for (std::size_t j = 0; j < g.p; ++j)
    out.data.covariate_names[j] = "x" + std::to_string(j + 1);
  out.data.records.resize(g.n);
  out.true_c.resize(g.n);
  out.true_y.resize(g.n);

  for (std::size_t i = 0; i < g.n; ++i) {
    UnitRecord& u = out.data.records[i];
    u.x.resize(g.p);
    for (auto& v : u.x) v = draw_covariate(rng, normal);
    const int c = unif(rng) < f.pi1(u.x) ? 1 : 0;
    out.true_c[i] = c;
    u.z = unif(rng) < g.assignment_probability ? 1 : 0;

    double y, resp_prob;
    if (u.z == 1) {
      const double m = c == 1 ? f.mu11(u.x) : f.mu10(u.x);
      y = draw_scaled_beta(rng, (m - l) / (h - l), g.outcome_dispersion, l, h);
      resp_prob = c == 1 ? f.w11(u.x) : f.w10(u.x);
    } else {
      const auto [mu01, mu00] = f.mu0(u.x);
      const double m = c == 1 ? mu01 : mu00;
      if (g.principal == Principal::pisens_smde) {
        // Uniform noise: equal within-stratum variance by construction.
        const double half = std::sqrt(3.0) * f.control_sd(u.x);
        y = m + (2.0 * unif(rng) - 1.0) * half;
      } else {
        y = draw_scaled_beta(rng, (m - l) / (h - l), g.outcome_dispersion, l,
                             h);
      }
      const auto [w01, w00] = f.w0(u.x);
      resp_prob = c == 1 ? w01 : w00;
    }
    u.r = unif(rng) < resp_prob ? 1 : 0;  // drawn independently of y: LMAR

    out.true_y[i] = std::clamp(y, l, h);
    if (u.z == 1) u.c = c;
    if (u.r == 1) u.y = out.true_y[i];
  }
  return out;
}

Dataset simulate_dataset(const DgpConfig& g, std::uint64_t seed) {
  return simulate_with_latent(g, seed).data;
}

TrueEffects true_effects(const DgpConfig& g, std::size_t n_pop,
                         std::uint64_t seed) {
  g.validate();
  const TrueFunctions f{g};
  Rng rng = make_rng(seed, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(g.p);

  // Accumulate the per-x integrands and their squares for Monte Carlo SEs.
  double sum_a1 = 0, sum_a0 = 0, sum_b1 = 0, sum_t = 0;
  std::vector<double> a1(n_pop), a0(n_pop), b1(n_pop), t(n_pop);
  for (std::size_t i = 0; i < n_pop; ++i) {
    for (auto& v : x) v = draw_covariate(rng, normal);
    const double p1 = f.pi1(x), p0 = 1.0 - p1;
    const auto [mu01, mu00] = f.mu0(x);
    const double d1 = f.mu11(x) - mu01;
    const double d0 = f.mu10(x) - mu00;
    a1[i] = p1 * d1;
    a0[i] = p0 * d0;
    b1[i] = p1;
    t[i] = a1[i] + a0[i];
    sum_a1 += a1[i];
    sum_a0 += a0[i];
    sum_b1 += p1;
    sum_t += t[i];
  }
  const double n = static_cast<double>(n_pop);
  TrueEffects te;
  te.cace = sum_a1 / sum_b1;
  te.nace = sum_a0 / (n - sum_b1);
  te.ate = sum_t / n;
  te.complier_share = sum_b1 / n;

  // Ratio-estimator SEs via the linearized influence values.
  double v_c = 0, v_n = 0, v_t = 0;
  const double mb1 = sum_b1 / n, mb0 = 1.0 - mb1, mt = te.ate;
  for (std::size_t i = 0; i < n_pop; ++i) {
    const double hc = a1[i] - te.cace * b1[i];
    const double hn = a0[i] - te.nace * (1.0 - b1[i]);
    v_c += hc * hc;
    v_n += hn * hn;
    v_t += (t[i] - mt) * (t[i] - mt);
  }
  te.se_cace = std::sqrt(v_c / n) / (mb1 * std::sqrt(n));
  te.se_nace = std::sqrt(v_n / n) / (mb0 * std::sqrt(n));
  te.se_ate = std::sqrt(v_t / n) / std::sqrt(n);
  return te;
}

namespace {

std::vector<double> coef_from_json(const nlohmann::json& j,
                                   const std::string& key, bool required) {
  if (!j.contains(key)) {
    if (required) throw ConfigError("missing DGP key: " + key);
    return {};
  }
  if (!j.at(key).is_array())
    throw ConfigError("DGP key '" + key + "' must be an array");
  return j.at(key).get<std::vector<double>>();
}

void reject_unknown(const nlohmann::json& j,
                    const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

}  // namespace

DgpConfig dgp_from_json(const nlohmann::json& j) {
  reject_unknown(
      j,
      {"n", "p", "assignment_probability", "outcome_bounds",
       "outcome_dispersion", "compliance_coef", "w11_coef", "w10_coef",
       "lambda0_coef", "w01_coef", "w00_coef", "mu11_coef", "mu10_coef",
       "kappa0R_coef", "principal", "missingness"},
      "DGP config");
  DgpConfig g;
  try {
    g.n = j.at("n").get<std::size_t>();
    g.p = j.at("p").get<std::size_t>();
    g.assignment_probability = j.at("assignment_probability").get<double>();
    const auto b = j.at("outcome_bounds");
    if (!b.is_array() || b.size() != 2)
      throw ConfigError("outcome_bounds must be [l, h]");
    g.outcome_bounds = {b[0].get<double>(), b[1].get<double>()};
    g.outcome_dispersion = j.at("outcome_dispersion").get<double>();
    g.compliance_coef = coef_from_json(j, "compliance_coef", true);
    g.w11_coef = coef_from_json(j, "w11_coef", true);
    g.w10_coef = coef_from_json(j, "w10_coef", true);
    g.lambda0_coef = coef_from_json(j, "lambda0_coef", false);
    g.w01_coef = coef_from_json(j, "w01_coef", false);
    g.w00_coef = coef_from_json(j, "w00_coef", false);
    g.mu11_coef = coef_from_json(j, "mu11_coef", true);
    g.mu10_coef = coef_from_json(j, "mu10_coef", true);
    g.kappa0R_coef = coef_from_json(j, "kappa0R_coef", true);

    const auto& pj = j.at("principal");
    reject_unknown(pj, {"type", "value"}, "principal");
    g.principal = principal_from_string(pj.at("type").get<std::string>());
    if (pj.contains("value")) g.sensitivity = pj.at("value").get<double>();

    const auto& mj = j.at("missingness");
    reject_unknown(mj, {"type", "epsilon"}, "missingness");
    g.missingness = missingness_from_string(mj.at("type").get<std::string>());
    if (mj.contains("epsilon")) g.epsilon = mj.at("epsilon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad DGP config: ") + e.what());
  }
  g.validate();
  return g;
}

nlohmann::json dgp_to_json(const DgpConfig& g) {
  nlohmann::json j = {
      {"n", g.n},
      {"p", g.p},
      {"assignment_probability", g.assignment_probability},
      {"outcome_bounds", {g.outcome_bounds.first, g.outcome_bounds.second}},
      {"outcome_dispersion", g.outcome_dispersion},
      {"compliance_coef", g.compliance_coef},
      {"w11_coef", g.w11_coef},
      {"w10_coef", g.w10_coef},
      {"mu11_coef", g.mu11_coef},
      {"mu10_coef", g.mu10_coef},
      {"kappa0R_coef", g.kappa0R_coef},
      {"principal",
       {{"type", to_string(g.principal)}, {"value", g.sensitivity}}},
      {"missingness",
       {{"type", to_string(g.missingness)}, {"epsilon", g.epsilon}}}};
  if (g.missingness == Missingness::none) {
    j["w01_coef"] = g.w01_coef;
    j["w00_coef"] = g.w00_coef;
  } else {
    j["lambda0_coef"] = g.lambda0_coef;
  }
  return j;
}

nlohmann::json to_json(const TrueEffects& t) {
  return {{"cace", t.cace},       {"nace", t.nace},
          {"ate", t.ate},         {"se_cace", t.se_cace},
          {"se_nace", t.se_nace}, {"se_ate", t.se_ate},
          {"complier_share", t.complier_share}};
}

}  // namespace pce
