#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "admissions/core_model.hpp"

namespace admissions {

/// Parameters of the synthetic three-year panel. Defaults give a 1:10 desk
/// scale version of a 50894-applicant, 16655-seat, 440-program, 8-field round.
struct SynthConfig {
  int n_applicants = 5000;
  int n_programs = 44;
  int n_fields = 8;
  int seats_total = 1636;
  int base_year = 2011;

  // P(list length == k), k = 1..4
  std::array<double, 4> list_length_probs{0.2036, 0.1982, 0.2239, 0.3743};
  // P(entrance exam taken | listed rank)
  std::array<double, 4> exam_prob_by_rank{0.59, 0.48, 0.45, 0.43};
  // number of fields (the last ones) that admit on grades alone; exam rates
  // elsewhere are scaled up so the per-rank shares above hold overall
  int gpa_only_fields = 1;
  double first_choice_bonus = 2.0;

  std::vector<std::string> subjects{"mother_tongue", "mathematics", "english",
                                    "swedish",       "science",     "humanities"};
  double grade_mean = 4.0;
  double grade_sd = 1.4;
  double grade_max = 7.0;
  double grade_ability_loading = 0.8;
  double subject_weight_min = 0.5;
  double subject_weight_max = 2.0;

  double exam_mean = 14.0;
  double exam_sd = 7.0;
  double exam_max = 40.0;
  double exam_ability_loading = 0.7;

  // other points: `other_points_value` with probability `other_points_prob`, else 0
  double other_points_value = 3.0;
  double other_points_prob = 0.3;

  double popularity_sigma = 0.5;
  double same_field_prob = 0.75;

  // seat acceptance: base + rank effect + exam effect
  double accept_base = 0.62;
  std::array<double, 4> accept_rank_effect{0.0, -0.12, -0.11, -0.19};
  double accept_exam_effect = 0.25;

  // later re-application
  double reapply_unassigned = 0.65;
  double reapply_assigned_base = 0.20;
  std::array<double, 4> reapply_rank_effect{0.0, 0.11, 0.13, 0.20};
  double reapply_exam_effect = -0.04;
  double reapply_declined_effect = 0.25;
  double first_later_year_prob = 0.7;   // re-entry starts in year 2 (else year 3)
  double second_later_year_prob = 0.35; // year-2 re-applicants also apply in year 3
  double retry_first_choice_prob = 0.4; // unassigned re-applicants list their old first choice first

  std::uint64_t seed = 42;

  /// Throws Error("InvalidConfig") naming the offending parameter.
  void validate() const;
};

void to_json(nlohmann::json& j, const SynthConfig& c);
/// Missing keys keep their defaults; unknown keys raise Error("InvalidConfig").
void from_json(const nlohmann::json& j, SynthConfig& c);

/// Deterministic in (config, seed). The observed base-year assignment comes
/// from program-proposing deferred acceptance on the generated scores;
/// acceptance and re-application follow the planted propensity model.
Panel generate_panel(const SynthConfig& config);

struct CalibrationRow {
  std::string metric;
  double target = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;

  double deviation() const { return actual - target; }
  bool within() const;
};

struct CalibrationTargets {
  std::array<double, 4> exam_share_by_rank{0.59, 0.48, 0.45, 0.43};
  double exam_share_tolerance = 0.03;
  double assigned_share = 16655.0 / 50894.0;
  double assigned_share_tolerance = 0.03;
  double mean_list_length = 2.77;
  double mean_list_length_tolerance = 0.15;
};

/// Generated marginals of the base year against the calibration targets.
/// Needs the panel's observed assignment.
std::vector<CalibrationRow> calibration_report(const Panel& panel,
                                               const CalibrationTargets& targets = {});

}  // namespace admissions
