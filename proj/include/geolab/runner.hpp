#pragma once

#include <map>
#include <string>
#include <vector>

#include "geolab/report.hpp"

namespace geolab {

struct RunConfig {
  std::vector<std::string> suites;
  int L = 15;
  int M = 16;
  int n = 64;
  double T = 4.0;
  double delta = 1.0;
  std::uint64_t seed = 7;
  int trials = 100;
  nlohmann::json foliation = {{"type", "wave"}, {"amp", 0.2}, {"band", 4}};
  std::map<std::string, double> tolerances;
  std::string out;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

const std::vector<std::string>& known_suites();

// executes the named suites; throws std::invalid_argument on bad config
Report run_suites(const RunConfig& cfg);

// one sub-report per value plus fitted log2 slopes per check family
Report run_sweep(const RunConfig& cfg, const std::string& axis,
                 const std::vector<double>& values);

// full command-line entry point; returns the process exit code
// (0 all-pass, 1 any-fail, 2 config error)
int cli_main(int argc, char** argv);

}  // namespace geolab
