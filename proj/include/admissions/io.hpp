#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <vector>

#include "admissions/core_model.hpp"
#include "admissions/counterfactual.hpp"
#include "admissions/econometrics.hpp"
#include "admissions/metrics.hpp"
#include "admissions/scoring.hpp"
#include "admissions/synth.hpp"

namespace admissions::io {

// Panel directory layout:
//   applicants.csv          applicant_id,cohort_year,grade_<subject>...
//   programs.csv            polytechnic_name,program_name,field,quota
//   applications.csv        year,applicant_id,polytechnic_name,program_name,listed_rank,
//                           exam_taken,exam_score,other_points
//   fields.csv              field,first_choice_bonus,weight_<subject>...
//   observed_assignment.csv applicant_id,polytechnic_name,program_name,accepted  (optional)
// The earliest application year is the base year.

struct PanelPaths {
  std::filesystem::path applicants;
  std::filesystem::path programs;
  std::filesystem::path applications;
  std::filesystem::path fields;
  std::optional<std::filesystem::path> observed_assignment;

  static PanelPaths in_directory(const std::filesystem::path& dir);
};

/// Parses, canonicalizes program keys and validates. Throws Error("ParseError")
/// with file/line/column detail, or ValidationError.
Panel load_panel(const PanelPaths& paths);
Panel load_panel(const std::filesystem::path& dir);

/// Writes the five files of the panel directory layout.
void save_panel(const Panel& panel, const std::filesystem::path& dir);

/// applicant_id,program_key,accepted over `universe`; unassigned rows carry an
/// empty program_key, unknown acceptance an empty flag.
void write_assignment(std::ostream& out, const Assignment& assignment,
                      const std::vector<std::string>& universe);
Assignment read_assignment(const std::filesystem::path& path);

void write_weight_report(std::ostream& out, const WeightReport& report);
void write_tercile_table(std::ostream& out, const std::vector<TercileRow>& rows);
void write_rank_stats(std::ostream& out, const std::array<RankStatsRow, kMaxListLength>& rows);
void write_scenario_table(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_lpm_report(std::ostream& out, const std::array<RegressionResult, 6>& columns);
void write_calibration(std::ostream& out, const std::vector<CalibrationRow>& rows);

/// Long format panel,bin,value. Panel "1" holds assigned counts, "uniform"
/// the reference level, and "2".."6" net changes of S2..S6 against S1.
struct FigurePanel {
  std::string name;
  Histogram100 histogram;
};
void write_figure(std::ostream& out, const Histogram100& assigned,
                  const std::vector<FigurePanel>& changes);

}  // namespace admissions::io
