#include "pce/config.hpp"

#include <cmath>

#include "pce/errors.hpp"

namespace pce {

bool is_pisens(Principal p) {
  return p == Principal::pisens_gor || p == Principal::pisens_mr ||
         p == Principal::pisens_smde;
}

std::string to_string(Principal p) {
  switch (p) {
    case Principal::er: return "ER";
    case Principal::pi: return "PI";
    case Principal::pisens_gor: return "PIsens_GOR";
    case Principal::pisens_mr: return "PIsens_MR";
    case Principal::pisens_smde: return "PIsens_SMDe";
  }
  return "?";
}

std::string to_string(Missingness m) {
  switch (m) {
    case Missingness::near_snr: return "near_SNR";
    case Missingness::near_scr: return "near_SCR";
    case Missingness::rpi: return "rPI";
    case Missingness::rpo: return "rPO";
    case Missingness::none: return "none";
  }
  return "?";
}

Principal principal_from_string(const std::string& s) {
  if (s == "ER") return Principal::er;
  if (s == "PI") return Principal::pi;
  if (s == "PIsens_GOR") return Principal::pisens_gor;
  if (s == "PIsens_MR") return Principal::pisens_mr;
  if (s == "PIsens_SMDe") return Principal::pisens_smde;
  throw ConfigError("unknown principal identification assumption: " + s);
}

Missingness missingness_from_string(const std::string& s) {
  if (s == "near_SNR") return Missingness::near_snr;
  if (s == "near_SCR") return Missingness::near_scr;
  if (s == "rPI") return Missingness::rpi;
  if (s == "rPO") return Missingness::rpo;
  if (s == "none") return Missingness::none;
  throw ConfigError("unknown missingness mechanism: " + s);
}

void AnalysisConfig::validate() const {
  if (missingness == Missingness::none && principal != Principal::pi)
    throw ConfigError("missingness 'none' is legal only with principal 'PI'");
  if (is_pisens(principal) && sensitivity_params.empty())
    throw ConfigError(to_string(principal) +
                      " requires at least one sensitivity parameter");
  if (!is_pisens(principal) && !sensitivity_params.empty())
    throw ConfigError(to_string(principal) +
                      " takes no sensitivity parameters");
  for (double v : sensitivity_params) {
    if (!std::isfinite(v))
      throw ConfigError("sensitivity parameter must be finite");
    if (principal == Principal::pisens_gor && !(v > 0.0))
      throw ConfigError("GOR sensitivity parameter psi must be > 0");
    if (principal == Principal::pisens_mr && !(v > 0.0))
      throw ConfigError("MR sensitivity parameter rho must be > 0");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw ConfigError("epsilon must lie in (0, 0.5)");
  if (bootstrap_replicates < 0)
    throw ConfigError("bootstrap replicate count must be nonnegative");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("confidence level must lie in (0,1)");
  if (!(outcome_bounds.first < outcome_bounds.second))
    throw ConfigError("outcome bounds require l < h");
}

}  // namespace pce
