#include "admissions/scoring.hpp"

#include <cmath>
#include <tuple>
#include <vector>

#include <fmt/format.h>

namespace admissions {

const char* to_string(ScoreVariant variant) {
  switch (variant) {
    case ScoreVariant::original: return "original";
    case ScoreVariant::no_first_choice: return "no_first_choice";
    case ScoreVariant::no_first_choice_exam_propagated: return "no_first_choice_exam_propagated";
  }
  return "?";
}

const ScoreEntry& ScoreTable::at(const ScoreKey& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) {
    throw Error("MissingScore", fmt::format("no score for applicant {} at {} ({})",
                                            key.applicant_id, key.program_key, key.year));
  }
  return it->second;
}

Points weighted_gpa(const Applicant& applicant, const SubjectWeights& weights) {
  Points sum = 0.0;
  for (const auto& [subject, weight] : weights) {
    auto grade = applicant.grades.find(subject);
    if (grade != applicant.grades.end()) sum += weight * grade->second;
  }
  return sum;
}

ScoreTable compute_score_table(const Panel& panel, const ApplicationSet& applications) {
  ScoreTable table;
  table.variant = ScoreVariant::original;
  for (const auto& app : applications) {
    const Program& program = panel.program(app.program_key);
    auto weights = panel.field_weights.find(program.field);
    auto bonus = panel.bonus_points.find(program.field);
    if (weights == panel.field_weights.end() || bonus == panel.bonus_points.end()) {
      throw Error("MissingFieldWeights", fmt::format("no scoring rules for field '{}'", program.field));
    }
    const Applicant* applicant = panel.find_applicant(app.applicant_id);
    if (applicant == nullptr) {
      throw Error("DanglingForeignKey", fmt::format("unknown applicant '{}'", app.applicant_id));
    }

    ScoreEntry entry;
    entry.components.gpa = weighted_gpa(*applicant, weights->second);
    entry.components.exam = app.exam_score.value_or(0.0);
    entry.components.first_choice_bonus = app.listed_rank == 1 ? bonus->second : 0.0;
    entry.components.other = app.other_points;
    entry.own_exam = app.exam_taken();
    table.entries.insert_or_assign(score_key(app), entry);
  }
  return table;
}

ScoreTable remove_first_choice_points(ScoreTable table) {
  if (table.variant != ScoreVariant::original) {
    throw Error("WrongProvenance",
                fmt::format("expected an original table, got {}", to_string(table.variant)));
  }
  for (auto& [key, entry] : table.entries) entry.components.first_choice_bonus = 0.0;
  table.variant = ScoreVariant::no_first_choice;
  return table;
}

ScoreTable propagate_entrance_exams(const Panel& panel, ScoreTable table) {
  if (table.variant != ScoreVariant::no_first_choice) {
    throw Error("WrongProvenance",
                fmt::format("expected a no_first_choice table, got {}", to_string(table.variant)));
  }

  struct Source {
    std::tuple<int, int, std::string> order;
    Points score;
  };
  // (applicant, field) -> first exam taken
  std::map<std::pair<std::string, std::string>, Source> first_exam;
  for (const auto& app : panel.applications) {
    if (!app.exam_taken()) continue;
    const auto key = std::make_pair(app.applicant_id, panel.program(app.program_key).field);
    Source candidate{{app.year, app.listed_rank, app.program_key}, *app.exam_score};
    auto [it, inserted] = first_exam.emplace(key, candidate);
    if (!inserted && candidate.order < it->second.order) it->second = candidate;
  }

  for (auto& [key, entry] : table.entries) {
    if (entry.own_exam) continue;
    auto source = first_exam.find({key.applicant_id, panel.program(key.program_key).field});
    if (source != first_exam.end()) entry.components.exam = source->second.score;
  }
  table.variant = ScoreVariant::no_first_choice_exam_propagated;
  return table;
}

WeightReport effective_weights(const ScoreTable& table, const ApplicationSet& applications) {
  if (applications.size() < 2) {
    throw Error("DegenerateTable",
                fmt::format("need at least two records, got {}", applications.size()));
  }
  std::vector<ScoreComponents> rows;
  rows.reserve(applications.size());
  for (const auto& app : applications) rows.push_back(table.at(score_key(app)).components);

  auto sd = [&](auto member) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.*member;
    mean /= static_cast<double>(rows.size());
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.*member - mean) * (r.*member - mean);
    return std::sqrt(ss / static_cast<double>(rows.size() - 1));
  };

  const double s_gpa = sd(&ScoreComponents::gpa);
  const double s_exam = sd(&ScoreComponents::exam);
  const double s_bonus = sd(&ScoreComponents::first_choice_bonus);
  const double s_other = sd(&ScoreComponents::other);
  const double total = s_gpa + s_exam + s_bonus + s_other;
  if (!(total > 0.0)) throw Error("DegenerateTable", "no score component varies");
  return {s_gpa / total, s_exam / total, s_bonus / total, s_other / total};
}

}  // namespace admissions
