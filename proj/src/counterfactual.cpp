#include "admissions/counterfactual.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <set>

#include <fmt/format.h>

#include "admissions/metrics.hpp"

namespace admissions {

Scenario scenario_definition(ScenarioId id) {
  switch (id) {
    case ScenarioId::S1: return {id, ListVariant::original, ScoreVariant::original};
    case ScenarioId::S2: return {id, ListVariant::extended, ScoreVariant::original};
    case ScenarioId::S3: return {id, ListVariant::original, ScoreVariant::no_first_choice};
    case ScenarioId::S4: return {id, ListVariant::extended, ScoreVariant::no_first_choice};
    case ScenarioId::S5:
      return {id, ListVariant::original, ScoreVariant::no_first_choice_exam_propagated};
    case ScenarioId::S6:
      return {id, ListVariant::extended, ScoreVariant::no_first_choice_exam_propagated};
  }
  throw Error("UnknownScenario", fmt::format("scenario {}", static_cast<int>(id)));
}

std::string to_string(ScenarioId id) { return fmt::format("S{}", static_cast<int>(id)); }

ScenarioId parse_scenario_id(const std::string& text) {
  if (text.size() == 2 && (text[0] == 'S' || text[0] == 's') && text[1] >= '1' && text[1] <= '6') {
    return static_cast<ScenarioId>(text[1] - '0');
  }
  throw Error("UnknownScenario", fmt::format("'{}' is not one of S1..S6", text));
}

ApplicationSet extend_application_lists(const Panel& panel) {
  // applicant -> year -> entries (rank order)
  std::map<std::string, std::map<int, std::vector<const Application*>>> lists;
  for (const auto& app : panel.applications) lists[app.applicant_id][app.year].push_back(&app);

  ApplicationSet out;
  for (auto& [applicant, by_year] : lists) {
    if (!by_year.contains(panel.base_year)) continue;
    std::set<std::string> listed;
    int rank = 0;
    for (int year = panel.base_year; year < panel.base_year + kPanelYears; ++year) {
      auto entries = by_year.find(year);
      if (entries == by_year.end()) continue;
      std::sort(entries->second.begin(), entries->second.end(),
                [](const Application* a, const Application* b) {
                  return a->listed_rank < b->listed_rank;
                });
      for (const Application* app : entries->second) {
        if (!listed.insert(app->program_key).second) continue;
        Application extended = *app;
        extended.listed_rank = ++rank;
        out.push_back(std::move(extended));
      }
    }
  }
  return out;
}

ScenarioData build_scenario(const Panel& panel, ScenarioId id) {
  const Scenario scenario = scenario_definition(id);
  ScenarioData data;
  data.applications = scenario.lists == ListVariant::extended ? extend_application_lists(panel)
                                                              : panel.base_applications();
  data.scores = compute_score_table(panel, data.applications);
  if (scenario.scores != ScoreVariant::original) {
    data.scores = remove_first_choice_points(std::move(data.scores));
  }
  if (scenario.scores == ScoreVariant::no_first_choice_exam_propagated) {
    data.scores = propagate_entrance_exams(panel, std::move(data.scores));
  }
  return data;
}

std::vector<ScenarioResult> run_scenario_suite(const Panel& panel, std::span<const ScenarioId> ids) {
  std::set<ScenarioId> wanted(ids.begin(), ids.end());
  wanted.insert(ScenarioId::S1);

  const auto quotas = panel.quotas();
  const auto universe = panel.base_applicants();
  const RankTable ranks = field_gpa_percentile_ranks(panel);

  std::vector<std::future<ScenarioResult>> pending;
  for (ScenarioId id : wanted) {
    pending.push_back(std::async(std::launch::async, [&panel, &quotas, &universe, id] {
      ScenarioData data = build_scenario(panel, id);
      const MatchInstance instance = build_instance(data.applications, data.scores, quotas);
      ScenarioResult result;
      result.id = id;
      result.assignment = to_assignment(instance, deferred_acceptance(instance, Proposing::programs));
      result.assigned_count = result.assignment.seat_of.size();
      result.applications_per_applicant =
          universe.empty() ? 0.0
                           : static_cast<double>(data.applications.size()) /
                                 static_cast<double>(universe.size());
      return result;
    }));
  }

  std::vector<ScenarioResult> results;
  for (auto& f : pending) results.push_back(f.get());

  const Assignment& baseline = results.front().assignment;  // S1 sorts first
  for (auto& r : results) {
    r.diff = compare_assignments(baseline, r.assignment, universe);
    r.rank_improvement = mean_rank_improvement(panel, ranks, baseline, r.assignment);
  }
  return results;
}

}  // namespace admissions
