#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pce/config.hpp"
#include "pce/dataset.hpp"

#include "json.hpp"

namespace pce {

using Interval = std::pair<double, double>;

/// Estimates for one sensitivity-parameter value (param is NaN under ER
/// and PI, which carry no sensitivity parameter).
struct EffectRow {
  double param;
  double cace = 0.0, nace = 0.0, ate = 0.0;
  std::optional<Interval> ci_cace, ci_nace, ci_ate;
};

struct EffectEstimates {
  std::vector<EffectRow> rows;

  struct Diagnostics {
    double clamp_fraction = 0.0;
    std::size_t mixture_violation_count = 0;
    long bootstrap_attempted = 0;
    long bootstrap_succeeded = 0;
    std::map<std::string, long> bootstrap_failures;  // failure taxonomy
  } diagnostics;
};

/// Plug-in point estimates of CACE, NACE and ATE: fits the nuisance models
/// once, solves the two mixture equations per the configured assumptions,
/// and averages the identification integrands over all n units.
EffectEstimates point_estimates(const Dataset& d, const AnalysisConfig& cfg);

struct BootstrapSettings {
  long replicates = 0;
  std::uint64_t master_seed = 0;
  double level = 0.95;
};

/// Percentile bootstrap: B iid resamples of n units, the full pipeline
/// re-run per resample (substream seeds from substream_seed(master, r)).
/// Replicates that fail estimation are skipped and counted; fewer than
/// 95% successes raises InferenceError with the failure taxonomy.
EffectEstimates bootstrap_ci(const Dataset& d, const AnalysisConfig& cfg,
                             const BootstrapSettings& s);

nlohmann::json to_json(const EffectEstimates& e, const AnalysisConfig& cfg);

/// Fixed-width results table (3 decimals), one row per sensitivity value.
std::string format_table(const EffectEstimates& e);

}  // namespace pce
