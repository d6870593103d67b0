#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lostsales::app {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;   // one line
  nlohmann::json detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  int threads = 1;
  std::vector<int> only;  // empty runs 1..11
};

/// "PASS  3  tail bounds  ..." style line.
std::string format_line(const CriterionResult& r);

/// Runs the criteria in order; each line is written to `log` as soon as the
/// criterion finishes. An exception inside a criterion is reported as FAIL.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream* log = nullptr);

nlohmann::json to_json(const std::vector<CriterionResult>& results);

}  // namespace lostsales::app
