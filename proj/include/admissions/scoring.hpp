#pragma once

#include <compare>
#include <map>
#include <string>

#include "admissions/core_model.hpp"

namespace admissions {

struct ScoreComponents {
  Points gpa = 0.0;
  Points exam = 0.0;
  Points first_choice_bonus = 0.0;
  Points other = 0.0;

  Points total() const { return gpa + exam + first_choice_bonus + other; }
  bool operator==(const ScoreComponents&) const = default;
};

enum class ScoreVariant { original, no_first_choice, no_first_choice_exam_propagated };

const char* to_string(ScoreVariant variant);

struct ScoreKey {
  std::string applicant_id;
  std::string program_key;
  int year = 0;

  auto operator<=>(const ScoreKey&) const = default;
  bool operator==(const ScoreKey&) const = default;
};

inline ScoreKey score_key(const Application& app) {
  return {app.applicant_id, app.program_key, app.year};
}

struct ScoreEntry {
  ScoreComponents components;
  bool own_exam = false;  // the application carried its own exam result

  bool operator==(const ScoreEntry&) const = default;
};

struct ScoreTable {
  ScoreVariant variant = ScoreVariant::original;
  std::map<ScoreKey, ScoreEntry> entries;

  /// Throws Error("MissingScore").
  const ScoreEntry& at(const ScoreKey& key) const;
  bool operator==(const ScoreTable&) const = default;
};

/// Field-weighted matriculation GPA: a dot product of subject weights with the
/// applicant's grades, missing subjects contributing zero.
Points weighted_gpa(const Applicant& applicant, const SubjectWeights& weights);

/// Scores every application in `applications`. The first-choice bonus goes to
/// entries with listed_rank == 1. Throws Error("MissingFieldWeights").
ScoreTable compute_score_table(const Panel& panel, const ApplicationSet& applications);

/// Zeroes every first-choice bonus. Requires an original table.
ScoreTable remove_first_choice_points(ScoreTable table);

/// For each (applicant, field), copies the chronologically first entrance exam
/// result found anywhere in the panel onto that applicant's exam-less entries
/// in the field. Ties within a year go to the lower listed rank, then the
/// lexicographically smaller program key. Requires a no-first-choice table.
ScoreTable propagate_entrance_exams(const Panel& panel, ScoreTable table);

/// Relative spread of the score components: each component's standard
/// deviation divided by the sum of the four. `residual` is the other-points
/// component.
struct WeightReport {
  double gpa = 0.0;
  double exam = 0.0;
  double first_choice_bonus = 0.0;
  double residual = 0.0;

  double sum() const { return gpa + exam + first_choice_bonus + residual; }
};

/// Throws Error("DegenerateTable") for fewer than two records or when no
/// component varies.
WeightReport effective_weights(const ScoreTable& table, const ApplicationSet& applications);

/// Score with the first-choice bonus and the entrance exam taken out.
inline Points adjusted_score(const ScoreComponents& c) {
  return c.total() - c.exam - c.first_choice_bonus;
}

}  // namespace admissions
