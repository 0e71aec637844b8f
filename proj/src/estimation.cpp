#include "pce/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "pce/control_means.hpp"
#include "pce/errors.hpp"
#include "pce/missingness.hpp"
#include "pce/nuisance.hpp"
#include "pce/rng.hpp"

namespace pce {

namespace {

struct PipelineResult {
  std::vector<EffectRow> rows;
  double clamp_fraction = 0.0;
  std::size_t mixture_violation_count = 0;
};

EffectRow effects_from_deltas(const NuisancePredictions& p,
                              const std::vector<double>& delta1,
                              const std::vector<double>& delta0,
                              double param) {
  const std::size_t n = p.size();
  double s1 = 0.0, s0 = 0.0, a1 = 0.0, a0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1 += p.pi1[i];
    s0 += p.pi0[i];
    a1 += p.pi1[i] * delta1[i];
    a0 += p.pi0[i] * delta0[i];
  }
  EffectRow row;
  row.param = param;
  row.cace = a1 / s1;
  row.nace = a0 / s0;
  row.ate = (a1 + a0) / static_cast<double>(n);
  return row;
}

// Fits the nuisance models once and evaluates every requested
// identification result. Sensitivity values share the single fit; only the
// outcome-mixture solution depends on them.
PipelineResult run_pipeline(const Dataset& d, const AnalysisConfig& cfg) {
  const NuisanceFit fit = fit_nuisance(d);
  const NuisancePredictions preds = predict_nuisance(fit, d);
  const std::size_t n = preds.size();

  PipelineResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (cfg.principal == Principal::pi) {
    // PI bypasses the response mixture equation entirely.
    std::vector<double> delta1(n), delta0(n);
    for (std::size_t i = 0; i < n; ++i) {
      delta1[i] = preds.mu11[i] - preds.kappa0R[i];
      delta0[i] = preds.mu10[i] - preds.kappa0R[i];
    }
    out.rows.push_back(effects_from_deltas(preds, delta1, delta0, nan));
    return out;
  }

  const ResponseWeights weights =
      compute_weights(preds, cfg.missingness, cfg.epsilon);
  out.clamp_fraction =
      n == 0 ? 0.0 : static_cast<double>(weights.clamped_count()) / n;
  out.mixture_violation_count = weights.violation_count();

  std::vector<double> params = cfg.sensitivity_params;
  if (cfg.principal == Principal::er) params = {nan};

  for (double param : params) {
    const ControlMeans cm = compute_control_means(
        preds, weights, cfg.principal, param, cfg.outcome_bounds);
    std::vector<double> delta1(n), delta0(n);
    for (std::size_t i = 0; i < n; ++i) {
      delta1[i] = preds.mu11[i] - cm.mu01[i];
      delta0[i] = preds.mu10[i] - cm.mu00[i];
    }
    out.rows.push_back(effects_from_deltas(preds, delta1, delta0, param));
  }
  return out;
}

// Type-7 (linear interpolation) empirical quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& v, double prob) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = prob * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::string failure_key(const Error& e) {
  if (dynamic_cast<const EstimationError*>(&e)) return "estimation";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  return "other";
}

}  // namespace

EffectEstimates point_estimates(const Dataset& d, const AnalysisConfig& cfg) {
  cfg.validate();
  if (d.outcome_bounds != cfg.outcome_bounds)
    throw ConfigError("config outcome bounds do not match the dataset");
  PipelineResult r = run_pipeline(d, cfg);
  EffectEstimates est;
  est.rows = std::move(r.rows);
  est.diagnostics.clamp_fraction = r.clamp_fraction;
  est.diagnostics.mixture_violation_count = r.mixture_violation_count;
  return est;
}

EffectEstimates bootstrap_ci(const Dataset& d, const AnalysisConfig& cfg,
                             const BootstrapSettings& s) {
  if (s.replicates < 1)
    throw ConfigError("bootstrap requires at least one replicate");
  if (!(s.level > 0.0 && s.level < 1.0))
    throw ConfigError("confidence level must lie in (0,1)");

  EffectEstimates est = point_estimates(d, cfg);
  const std::size_t n = d.size();
  const std::size_t nrows = est.rows.size();

  // replicate_vals[row][stat] over successful replicates
  std::vector<std::array<std::vector<double>, 3>> vals(nrows);
  std::map<std::string, long> failures;
  long succeeded = 0;

  Dataset resample;
  resample.covariate_names = d.covariate_names;
  resample.outcome_bounds = d.outcome_bounds;
  resample.records.resize(n);

  for (long r = 0; r < s.replicates; ++r) {
    Rng rng = make_rng(s.master_seed, static_cast<std::uint64_t>(r));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i)
      resample.records[i] = d.records[pick(rng)];
    try {
      PipelineResult rep = run_pipeline(resample, cfg);
      for (std::size_t k = 0; k < nrows; ++k) {
        vals[k][0].push_back(rep.rows[k].cace);
        vals[k][1].push_back(rep.rows[k].nace);
        vals[k][2].push_back(rep.rows[k].ate);
      }
      ++succeeded;
    } catch (const Error& e) {
      ++failures[failure_key(e)];
    }
  }

  est.diagnostics.bootstrap_attempted = s.replicates;
  est.diagnostics.bootstrap_succeeded = succeeded;
  est.diagnostics.bootstrap_failures = failures;

  if (static_cast<double>(succeeded) <
      0.95 * static_cast<double>(s.replicates)) {
    std::string detail;
    for (const auto& [key, count] : failures)
      detail += " " + key + "=" + std::to_string(count);
    throw InferenceError("bootstrap failed: only " +
                         std::to_string(succeeded) + " of " +
                         std::to_string(s.replicates) +
                         " replicates succeeded; failures:" + detail);
  }

  const double alpha = (1.0 - s.level) / 2.0;
  for (std::size_t k = 0; k < nrows; ++k) {
    for (auto& stat : vals[k]) std::sort(stat.begin(), stat.end());
    est.rows[k].ci_cace = {quantile_sorted(vals[k][0], alpha),
                           quantile_sorted(vals[k][0], 1.0 - alpha)};
    est.rows[k].ci_nace = {quantile_sorted(vals[k][1], alpha),
                           quantile_sorted(vals[k][1], 1.0 - alpha)};
    est.rows[k].ci_ate = {quantile_sorted(vals[k][2], alpha),
                          quantile_sorted(vals[k][2], 1.0 - alpha)};
  }
  return est;
}

nlohmann::json to_json(const EffectEstimates& e, const AnalysisConfig& cfg) {
  nlohmann::json cfg_echo = {
      {"principal_id",
       {{"type", to_string(cfg.principal)},
        {"params", cfg.sensitivity_params}}},
      {"missingness",
       {{"type", to_string(cfg.missingness)}, {"epsilon", cfg.epsilon}}},
      {"outcome_bounds", {cfg.outcome_bounds.first, cfg.outcome_bounds.second}},
      {"bootstrap",
       {{"replicates", cfg.bootstrap_replicates},
        {"seed", cfg.seed},
        {"level", cfg.level}}}};

  nlohmann::json rows = nlohmann::json::array();
  auto ci_or_null = [](const std::optional<Interval>& ci) -> nlohmann::json {
    if (!ci) return nullptr;
    return nlohmann::json::array({ci->first, ci->second});
  };
  for (const EffectRow& r : e.rows) {
    nlohmann::json row = {{"cace", r.cace}, {"nace", r.nace}, {"ate", r.ate},
                          {"ci_cace", ci_or_null(r.ci_cace)},
                          {"ci_nace", ci_or_null(r.ci_nace)},
                          {"ci_ate", ci_or_null(r.ci_ate)}};
    row["param"] = std::isnan(r.param) ? nlohmann::json(nullptr)
                                       : nlohmann::json(r.param);
    rows.push_back(row);
  }

  nlohmann::json diag = {
      {"clamp_fraction", e.diagnostics.clamp_fraction},
      {"mixture_violation_count", e.diagnostics.mixture_violation_count},
      {"bootstrap_attempted", e.diagnostics.bootstrap_attempted},
      {"bootstrap_succeeded", e.diagnostics.bootstrap_succeeded},
      {"bootstrap_failures", e.diagnostics.bootstrap_failures}};

  return {{"config_echo", cfg_echo}, {"estimates", rows},
          {"diagnostics", diag}};
}

std::string format_table(const EffectEstimates& e) {
  auto cell = [](double v, const std::optional<Interval>& ci) {
    char buf[64];
    if (ci)
      std::snprintf(buf, sizeof(buf), "%8.3f [%8.3f, %8.3f]", v, ci->first,
                    ci->second);
    else
      std::snprintf(buf, sizeof(buf), "%8.3f", v);
    return std::string(buf);
  };
  const bool with_ci = !e.rows.empty() && e.rows.front().ci_cace.has_value();
  const int width = with_ci ? 28 : 8;

  std::string out = "   param";
  for (const char* name : {"CACE", "NACE", "ATE"}) {
    std::string head(name);
    head.insert(0, static_cast<std::size_t>(width) + 2 - head.size(), ' ');
    out += head;
  }
  out += '\n';
  for (const EffectRow& r : e.rows) {
    char param[32];
    if (std::isnan(r.param))
      std::snprintf(param, sizeof(param), "%8s", "-");
    else
      std::snprintf(param, sizeof(param), "%8.3f", r.param);
    out += param;
    out += "  " + cell(r.cace, r.ci_cace);
    out += "  " + cell(r.nace, r.ci_nace);
    out += "  " + cell(r.ate, r.ci_ate);
    out += '\n';
  }
  return out;
}

}  // namespace pce
