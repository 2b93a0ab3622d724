#pragma once

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "admissions/core_model.hpp"
#include "admissions/matching.hpp"
#include "admissions/synth.hpp"

namespace testing {

using namespace admissions;

inline Application app(std::string id, std::string key, int year, int rank,
                       std::optional<Points> exam = std::nullopt, Points other = 0.0) {
  Application a;
  a.applicant_id = std::move(id);
  a.program_key = std::move(key);
  a.year = year;
  a.listed_rank = rank;
  a.exam_score = exam;
  a.other_points = other;
  return a;
}

inline Program program(const std::string& poly, const std::string& name, std::string field, int quota) {
  Program p;
  p.polytechnic_name = poly;
  p.program_name = name;
  p.key = canonical_program_key(poly, name);
  p.field = std::move(field);
  p.quota = quota;
  return p;
}

inline Applicant applicant(std::string id, std::map<std::string, double> grades, int cohort = 2011) {
  return Applicant{std::move(id), std::move(grades), cohort};
}

/// Two fields, three programs, a handful of applicants over three years.
inline Panel small_panel() {
  Panel p;
  p.base_year = 2011;
  p.field_weights["engineering"] = {{"math", 2.0}, {"physics", 1.0}};
  p.field_weights["health"] = {{"math", 1.0}, {"biology", 2.0}};
  p.bonus_points["engineering"] = 5.0;
  p.bonus_points["health"] = 3.0;
  p.programs = {program("Alpha", "Eng", "engineering", 1), program("Alpha", "Nursing", "health", 1),
                program("Beta", "Eng", "engineering", 1)};
  p.applicants = {applicant("a1", {{"math", 6}, {"physics", 5}, {"biology", 2}}),
                  applicant("a2", {{"math", 4}, {"physics", 6}, {"biology", 6}}),
                  applicant("a3", {{"math", 5}, {"biology", 4}}),
                  applicant("a4", {{"math", 2}, {"physics", 2}, {"biology", 7}})};
  const std::string ae = "alpha::eng", an = "alpha::nursing", be = "beta::eng";
  p.applications = {app("a1", ae, 2011, 1, 30.0), app("a1", be, 2011, 2),
                    app("a2", ae, 2011, 1), app("a2", an, 2011, 2, 20.0),
                    app("a3", an, 2011, 1), app("a3", be, 2011, 2, 10.0, 2.0),
                    app("a4", an, 2011, 1, 25.0),
                    app("a3", be, 2012, 1, 15.0), app("a3", ae, 2012, 2),
                    app("a2", be, 2013, 1, 12.0)};
  return validate_panel(std::move(p));
}

inline SynthConfig small_synth(std::uint64_t seed = 7, int n = 400) {
  SynthConfig c;
  c.n_applicants = n;
  c.n_programs = 16;
  c.seats_total = n * 1636 / 5000;
  c.seed = seed;
  return c;
}

/// Random market: every applicant ranks a random subset of programs, every
/// program orders its applicants at random.
inline MatchInstance random_instance(std::mt19937_64& rng, int max_applicants, int max_programs,
                                     int max_quota) {
  std::uniform_int_distribution<int> na(1, max_applicants), np(1, max_programs), nq(0, max_quota);
  const int n_a = na(rng), n_p = np(rng);
  std::vector<std::string> ids, keys;
  std::vector<int> quotas;
  for (int a = 0; a < n_a; ++a) ids.push_back("a" + std::to_string(a));
  for (int p = 0; p < n_p; ++p) {
    keys.push_back("p" + std::to_string(p));
    quotas.push_back(nq(rng));
  }
  std::vector<std::vector<int>> prefs(n_a), prios(n_p);
  for (int a = 0; a < n_a; ++a) {
    std::vector<int> all(n_p);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const int len = std::uniform_int_distribution<int>(0, n_p)(rng);
    prefs[a].assign(all.begin(), all.begin() + len);
    for (int p : prefs[a]) prios[p].push_back(a);
  }
  for (auto& list : prios) std::shuffle(list.begin(), list.end(), rng);
  return MatchInstance::from_lists(ids, keys, quotas, prefs, prios);
}

/// Straight double loop over (applicant, program) pairs.
inline std::vector<std::pair<int, int>> naive_blocking_pairs(const MatchInstance& inst, const Matching& m) {
  std::vector<std::pair<int, int>> out;
  const int n_a = static_cast<int>(inst.applicant_count());
  const int n_p = static_cast<int>(inst.program_count());
  for (int a = 0; a < n_a; ++a) {
    const auto& prefs = inst.preferences(a);
    for (int p = 0; p < n_p; ++p) {
      auto where = std::find(prefs.begin(), prefs.end(), p);
      if (where == prefs.end()) continue;
      const int cur = m.program_of[a];
      if (cur == p) continue;
      if (cur != Matching::kUnassigned) {
        auto cur_pos = std::find(prefs.begin(), prefs.end(), cur);
        if (cur_pos < where) continue;
      }
      int held = 0;
      bool displaces = false;
      const auto& prio = inst.priorities(p);
      const auto a_pos = std::find(prio.begin(), prio.end(), a);
      for (int b = 0; b < n_a; ++b) {
        if (m.program_of[b] != p) continue;
        ++held;
        if (std::find(prio.begin(), prio.end(), b) > a_pos) displaces = true;
      }
      if (held < inst.quota(p) || displaces) out.emplace_back(a, p);
    }
  }
  return out;
}

/// Every feasible matching checked with the naive audit; no pruning.
inline std::vector<Matching> naive_stable_matchings(const MatchInstance& inst) {
  const int n_a = static_cast<int>(inst.applicant_count());
  std::vector<Matching> out;
  Matching m;
  m.program_of.assign(n_a, Matching::kUnassigned);
  std::vector<int> choice(n_a, 0);  // 0 = unassigned, k = k-th listed program
  while (true) {
    std::vector<int> load(inst.program_count(), 0);
    bool feasible = true;
    for (int a = 0; a < n_a; ++a) {
      m.program_of[a] = choice[a] == 0 ? Matching::kUnassigned : inst.preferences(a)[choice[a] - 1];
      if (m.program_of[a] != Matching::kUnassigned && ++load[m.program_of[a]] > inst.quota(m.program_of[a])) {
        feasible = false;
      }
    }
    if (feasible && naive_blocking_pairs(inst, m).empty()) out.push_back(m);
    int a = 0;
    for (; a < n_a; ++a) {
      if (++choice[a] <= static_cast<int>(inst.preferences(a).size())) break;
      choice[a] = 0;
    }
    if (a == n_a) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("admissions_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
