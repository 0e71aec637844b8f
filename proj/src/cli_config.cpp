#include "pce/cli_config.hpp"

#include <fstream>
#include <set>

#include "pce/errors.hpp"

namespace pce {

namespace {

void reject_unknown(const nlohmann::json& j,
                    const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

}  // namespace

CliConfig cli_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"principal_id", "missingness", "outcome_bounds", "bootstrap",
                  "input_csv", "output_json"},
                 "config");
  CliConfig c;
  try {
    const auto& pj = j.at("principal_id");
    reject_unknown(pj, {"type", "params"}, "principal_id");
    c.analysis.principal =
        principal_from_string(pj.at("type").get<std::string>());
    if (pj.contains("params"))
      c.analysis.sensitivity_params =
          pj.at("params").get<std::vector<double>>();

    const auto& mj = j.at("missingness");
    reject_unknown(mj, {"type", "epsilon"}, "missingness");
    c.analysis.missingness =
        missingness_from_string(mj.at("type").get<std::string>());
    if (mj.contains("epsilon"))
      c.analysis.epsilon = mj.at("epsilon").get<double>();

    const auto& b = j.at("outcome_bounds");
    if (!b.is_array() || b.size() != 2)
      throw ConfigError("outcome_bounds must be [l, h]");
    c.analysis.outcome_bounds = {b[0].get<double>(), b[1].get<double>()};

    if (j.contains("bootstrap")) {
      const auto& bj = j.at("bootstrap");
      reject_unknown(bj, {"replicates", "seed", "level"}, "bootstrap");
      if (bj.contains("replicates"))
        c.analysis.bootstrap_replicates = bj.at("replicates").get<long>();
      if (bj.contains("seed"))
        c.analysis.seed = bj.at("seed").get<std::uint64_t>();
      if (bj.contains("level")) c.analysis.level = bj.at("level").get<double>();
    }

    c.input_csv = j.at("input_csv").get<std::string>();
    if (j.contains("output_json"))
      c.output_json = j.at("output_json").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  c.analysis.validate();
  return c;
}

CliConfig load_cli_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON in ") + path + ": " +
                      e.what());
  }
  return cli_config_from_json(j);
}

}  // namespace pce
