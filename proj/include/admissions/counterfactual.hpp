#pragma once

#include <span>
#include <string>
#include <vector>

#include "admissions/core_model.hpp"
#include "admissions/matching.hpp"
#include "admissions/scoring.hpp"

namespace admissions {

enum class ScenarioId { S1 = 1, S2, S3, S4, S5, S6 };
enum class ListVariant { original, extended };

inline constexpr ScenarioId kAllScenarios[] = {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                                               ScenarioId::S4, ScenarioId::S5, ScenarioId::S6};

struct Scenario {
  ScenarioId id;
  ListVariant lists;
  ScoreVariant scores;
};

/// Fixed table of the six application-list/score combinations.
Scenario scenario_definition(ScenarioId id);
std::string to_string(ScenarioId id);
/// Accepts "S1".."S6" (case-insensitive). Throws Error("UnknownScenario").
ScenarioId parse_scenario_id(const std::string& text);

/// Base-year lists with later-year applications appended: base-year entries in
/// their order, then year-2 entries for programs not yet listed, then year-3
/// entries likewise. Ranks are renumbered 1..k with no length cap, and each
/// entry keeps the year and exam/other points it was submitted with. Only
/// applicants present in the base year are included.
ApplicationSet extend_application_lists(const Panel& panel);

struct ScenarioData {
  ApplicationSet applications;
  ScoreTable scores;
};

ScenarioData build_scenario(const Panel& panel, ScenarioId id);

struct ScenarioResult {
  ScenarioId id = ScenarioId::S1;
  Assignment assignment;
  std::size_t assigned_count = 0;
  double applications_per_applicant = 0.0;
  AssignmentDiff diff;             // against S1
  double rank_improvement = 0.0;   // percentile points against S1
};

/// Runs program-proposing deferred acceptance on each requested scenario
/// (S1 is always computed as the benchmark) with the panel's quotas, and
/// compares every outcome with S1. Results are ordered by scenario id.
std::vector<ScenarioResult> run_scenario_suite(const Panel& panel,
                                               std::span<const ScenarioId> ids = kAllScenarios);

}  // namespace admissions
