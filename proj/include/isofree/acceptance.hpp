#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace isofree {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  nlohmann::json detail;  // measured values and thresholds, no timings
  double seconds;         // wall time, reported separately
};

// Runs the desk-scale acceptance suite. on_result is called after each
// criterion (for progress output) and may be empty.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// {"criteria": [...], "all_pass": bool} without timings.
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace isofree
