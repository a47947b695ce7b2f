#pragma once

// The acceptance suite: ten end-to-end criteria, each reported as PASS, FAIL
// or SKIPPED(reason). A criterion that exceeds its time budget fails.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace coupled_levy {

enum class CriterionStatus { pass, fail, skipped };

struct CriterionResult {
  int id = 0;
  std::string title;
  CriterionStatus status = CriterionStatus::fail;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240531;
  /// Criteria to run; empty runs all. The rest are reported as skipped.
  std::vector<int> only;
};

inline constexpr int kCriterionCount = 10;

/// Runs the selected criteria in order; when `progress` is set each line is
/// printed as soon as its criterion finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            std::ostream* progress = nullptr);

/// "PASS  [ 3] title (1.23 s / 10 s): detail"
std::string format_result(const CriterionResult& r);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace coupled_levy
