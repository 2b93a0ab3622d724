#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "admissions/counterfactual.hpp"
#include "admissions/econometrics.hpp"

namespace admissions {

enum class Report { table1, table2, table3, table4, table5, figure1, assignments, diagnostics, calibration };

std::string to_string(Report report);
/// Throws Error("UnknownReport").
Report parse_report(const std::string& text);

struct RunConfig {
  std::optional<std::filesystem::path> input_dir;
  std::optional<std::string> synth;  // "default" or a JSON config file
  std::optional<std::uint64_t> seed;  // overrides the synth config seed
  std::vector<ScenarioId> scenarios{std::begin(kAllScenarios), std::end(kAllScenarios)};
  // Unset: every report the data supports. An explicit request for table5 or
  // calibration fails when the panel cannot back it.
  std::optional<std::set<Report>> reports;
  std::filesystem::path out_dir = "out";
  StandardErrors standard_errors = StandardErrors::classical;

  /// Throws Error("InvalidRunConfig").
  void validate() const;
};

struct RunSummary {
  std::vector<std::filesystem::path> written;
  std::size_t applicants = 0;
  std::size_t assigned = 0;
  std::size_t proposing_side_differences = 0;
  std::optional<double> replication_rate;
};

/// Loads or generates the panel and writes the selected reports into
/// `out_dir`. Progress goes to `log`. On failure every file written so far is
/// removed before the error propagates.
RunSummary run(const RunConfig& config, std::ostream& log);

}  // namespace admissions
