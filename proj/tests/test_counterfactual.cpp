#include <doctest.h>

#include <set>

#include "admissions/counterfactual.hpp"
#include "admissions/synth.hpp"
#include "support.hpp"

using namespace admissions;
using testing::app;

namespace {

Panel four_program_panel() {
  Panel p;
  p.base_year = 2011;
  p.field_weights["f"] = {{"m", 1.0}};
  p.bonus_points["f"] = 4.0;
  for (const char* n : {"A", "B", "C", "D"}) p.programs.push_back(testing::program("P", n, "f", 1));
  p.applicants = {testing::applicant("x", {{"m", 5}}), testing::applicant("y", {{"m", 3}}),
                  testing::applicant("late", {{"m", 9}}, 2012)};
  p.applications = {app("x", "p::a", 2011, 1), app("x", "p::b", 2011, 2),
                    app("x", "p::b", 2012, 1, 8.0), app("x", "p::c", 2012, 2, 9.0),
                    app("x", "p::a", 2013, 1), app("x", "p::d", 2013, 2, 1.0, 2.0),
                    app("y", "p::c", 2011, 1), app("late", "p::a", 2012, 1)};
  return validate_panel(std::move(p));
}

}  // namespace

TEST_SUITE("counterfactual") {

TEST_CASE("scenario table") {
  CHECK(scenario_definition(ScenarioId::S1).lists == ListVariant::original);
  CHECK(scenario_definition(ScenarioId::S1).scores == ScoreVariant::original);
  CHECK(scenario_definition(ScenarioId::S2).lists == ListVariant::extended);
  CHECK(scenario_definition(ScenarioId::S4).scores == ScoreVariant::no_first_choice);
  CHECK(scenario_definition(ScenarioId::S6).scores == ScoreVariant::no_first_choice_exam_propagated);
  CHECK(scenario_definition(ScenarioId::S5).lists == ListVariant::original);
  std::set<std::pair<ListVariant, ScoreVariant>> seen;
  for (auto id : kAllScenarios) {
    seen.insert({scenario_definition(id).lists, scenario_definition(id).scores});
    CHECK(parse_scenario_id(to_string(id)) == id);
  }
  CHECK(seen.size() == 6);
  CHECK(parse_scenario_id("s3") == ScenarioId::S3);
  CHECK_THROWS_WITH_AS(parse_scenario_id("S7"), doctest::Contains("UnknownScenario"), Error);
  CHECK_THROWS_WITH_AS(parse_scenario_id(""), doctest::Contains("UnknownScenario"), Error);
}

TEST_CASE("extended lists") {
  const Panel p = four_program_panel();
  const ApplicationSet ext = extend_application_lists(p);

  std::vector<Application> x, y;
  for (const auto& a : ext) {
    if (a.applicant_id == "x") x.push_back(a);
    if (a.applicant_id == "y") y.push_back(a);
    CHECK(a.applicant_id != "late");  // not in the base year
  }
  std::sort(x.begin(), x.end(), [](auto& l, auto& r) { return l.listed_rank < r.listed_rank; });
  REQUIRE(x.size() == 4);
  CHECK(x[0].program_key == "p::a");
  CHECK(x[1].program_key == "p::b");
  CHECK(x[2].program_key == "p::c");
  CHECK(x[3].program_key == "p::d");
  for (int i = 0; i < 4; ++i) CHECK(x[i].listed_rank == i + 1);
  CHECK(x[1].year == 2011);  // base-year entry kept over the 2012 duplicate
  CHECK(x[1].exam_score == std::nullopt);
  CHECK(x[2].year == 2012);
  CHECK(x[2].exam_score == 9.0);
  CHECK(x[3].year == 2013);
  CHECK(x[3].other_points == 2.0);

  REQUIRE(y.size() == 1);
  CHECK(y[0] == p.base_applications()[2]);
}

TEST_CASE("extended lists keep the base prefix and stay duplicate free") {
  const Panel p = generate_panel(testing::small_synth(13));
  const auto ext = extend_application_lists(p);
  std::map<std::string, std::vector<Application>> by_applicant;
  for (const auto& a : ext) by_applicant[a.applicant_id].push_back(a);
  std::map<std::string, std::vector<Application>> base;
  for (const auto& a : p.base_applications()) base[a.applicant_id].push_back(a);
  CHECK(by_applicant.size() == base.size());
  bool any_longer = false;
  for (auto& [id, list] : by_applicant) {
    std::sort(list.begin(), list.end(), [](auto& l, auto& r) { return l.listed_rank < r.listed_rank; });
    const auto& b = base.at(id);
    REQUIRE(list.size() >= b.size());
    any_longer |= list.size() > b.size();
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(list[i] == b[i]);
    std::set<std::string> keys;
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(keys.insert(list[i].program_key).second);
      CHECK(list[i].listed_rank == static_cast<int>(i) + 1);
    }
  }
  CHECK(any_longer);
}

TEST_CASE("scenario inputs") {
  const Panel p = four_program_panel();
  SUBCASE("S1 is the identity scenario") {
    const auto s1 = build_scenario(p, ScenarioId::S1);
    CHECK(s1.applications == p.base_applications());
    CHECK(s1.scores == compute_score_table(p, p.base_applications()));
  }
  SUBCASE("appended entries carry no bonus") {
    const auto s2 = build_scenario(p, ScenarioId::S2);
    for (const auto& a : s2.applications) {
      const double bonus = s2.scores.at(score_key(a)).components.first_choice_bonus;
      CHECK(bonus == (a.year == 2011 && a.listed_rank == 1 ? 4.0 : 0.0));
    }
    CHECK(s2.scores.at({"x", "p::b", 2011}).components.first_choice_bonus == 0.0);
  }
  SUBCASE("no-first-choice variants zero every bonus") {
    for (auto id : {ScenarioId::S3, ScenarioId::S4, ScenarioId::S5, ScenarioId::S6}) {
      for (const auto& [k, e] : build_scenario(p, id).scores.entries) CHECK(e.components.first_choice_bonus == 0.0);
    }
  }
  SUBCASE("S5 differs from S3 only in propagated exams") {
    const Panel g = generate_panel(testing::small_synth(17));
    const auto s3 = build_scenario(g, ScenarioId::S3);
    const auto s5 = build_scenario(g, ScenarioId::S5);
    REQUIRE(s3.applications == s5.applications);
    std::size_t changed = 0;
    for (const auto& [k, e3] : s3.scores.entries) {
      const auto& e5 = s5.scores.at(k);
      CHECK(e3.components.gpa == e5.components.gpa);
      CHECK(e3.components.other == e5.components.other);
      CHECK(e3.components.first_choice_bonus == e5.components.first_choice_bonus);
      if (e3.components.exam != e5.components.exam) {
        ++changed;
        CHECK_FALSE(e3.own_exam);
      }
    }
    CHECK(changed > 0);
  }
  SUBCASE("pure construction") {
    for (auto id : kAllScenarios) {
      const auto a = build_scenario(p, id);
      const auto b = build_scenario(p, id);
      CHECK(a.applications == b.applications);
      CHECK(a.scores == b.scores);
    }
  }
}

TEST_CASE("zero bonus makes S3 match S1") {
  SynthConfig c = testing::small_synth(19);
  c.first_choice_bonus = 0.0;
  const Panel p = generate_panel(c);
  const std::vector<ScenarioId> ids{ScenarioId::S1, ScenarioId::S3};
  const auto results = run_scenario_suite(p, ids);
  REQUIRE(results.size() == 2);
  CHECK(results[1].assignment == results[0].assignment);
  CHECK(results[1].diff.differently_assigned_count == 0);
}

TEST_CASE("scenario suite") {
  const Panel p = generate_panel(testing::small_synth(23));
  const auto results = run_scenario_suite(p);
  REQUIRE(results.size() == 6);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].id == kAllScenarios[i]);
    const auto data = build_scenario(p, results[i].id);
    const auto inst = build_instance(data.applications, data.scores, p.quotas());
    CHECK(find_blocking_pairs(inst, results[i].assignment).empty());
    CHECK(assignment_violations(results[i].assignment, data.applications, p.quotas()).empty());
  }
  const auto& s1 = results.front();
  CHECK(s1.diff.differently_assigned_count == 0);
  CHECK(s1.rank_improvement == 0.0);
  CHECK(s1.assignment.seat_of == p.observed_assignment->seat_of);
  CHECK(results[1].applications_per_applicant > s1.applications_per_applicant);
  CHECK(results[2].applications_per_applicant == s1.applications_per_applicant);

  SUBCASE("subset always carries the benchmark") {
    const std::vector<ScenarioId> only{ScenarioId::S6};
    const auto sub = run_scenario_suite(p, only);
    REQUIRE(sub.size() == 2);
    CHECK(sub[0].id == ScenarioId::S1);
    CHECK(sub[1].assignment == results[5].assignment);
    CHECK(sub[1].rank_improvement == results[5].rank_improvement);
  }
}

}  // TEST_SUITE
