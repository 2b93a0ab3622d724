#include "admissions/matching.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace admissions {

MatchInstance MatchInstance::from_lists(std::vector<std::string> applicant_ids,
                                        std::vector<std::string> program_keys,
                                        std::vector<int> quotas,
                                        std::vector<std::vector<int>> preferences,
                                        std::vector<std::vector<int>> priorities,
                                        std::vector<std::vector<double>> priority_scores) {
  const auto n_app = static_cast<int>(applicant_ids.size());
  const auto n_prog = static_cast<int>(program_keys.size());
  auto fail = [](const std::string& message) { throw Error("InvalidInstance", message); };

  if (static_cast<int>(quotas.size()) != n_prog || static_cast<int>(priorities.size()) != n_prog) {
    fail("quota and priority tables must have one entry per program");
  }
  if (static_cast<int>(preferences.size()) != n_app) {
    fail("preference table must have one entry per applicant");
  }
  if (priority_scores.empty()) {
    priority_scores.resize(n_prog);
    for (int p = 0; p < n_prog; ++p) {
      for (std::size_t r = 0; r < priorities[p].size(); ++r) {
        priority_scores[p].push_back(-static_cast<double>(r));
      }
    }
  }
  if (static_cast<int>(priority_scores.size()) != n_prog) fail("score table size mismatch");

  MatchInstance inst;
  for (int a = 0; a < n_app; ++a) {
    if (!inst.applicant_lookup_.emplace(applicant_ids[a], a).second) {
      fail("duplicate applicant id " + applicant_ids[a]);
    }
  }
  for (int p = 0; p < n_prog; ++p) {
    if (!inst.program_lookup_.emplace(program_keys[p], p).second) {
      fail("duplicate program key " + program_keys[p]);
    }
    if (quotas[p] < 0) fail("negative quota at " + program_keys[p]);
  }

  std::set<std::pair<int, int>> listed;
  for (int a = 0; a < n_app; ++a) {
    for (int p : preferences[a]) {
      if (p < 0 || p >= n_prog) fail("preference names an unknown program");
      if (!listed.emplace(a, p).second) fail("duplicate program on a preference list");
    }
  }

  inst.priority_rank_.assign(n_prog, std::vector<int>(n_app, kNotRanked));
  std::size_t ranked_pairs = 0;
  for (int p = 0; p < n_prog; ++p) {
    if (priority_scores[p].size() != priorities[p].size()) fail("score list size mismatch");
    for (std::size_t r = 0; r < priorities[p].size(); ++r) {
      const int a = priorities[p][r];
      if (a < 0 || a >= n_app) fail("priority names an unknown applicant");
      if (inst.priority_rank_[p][a] != kNotRanked) fail("applicant ranked twice by a program");
      if (!listed.contains({a, p})) fail("program ranks an applicant who did not apply");
      if (r > 0 && priority_scores[p][r] > priority_scores[p][r - 1]) {
        fail("priority scores must be non-increasing");
      }
      inst.priority_rank_[p][a] = static_cast<int>(r);
      ++ranked_pairs;
    }
  }
  if (ranked_pairs != listed.size()) fail("a program does not rank every applicant listing it");

  inst.applicant_ids_ = std::move(applicant_ids);
  inst.program_keys_ = std::move(program_keys);
  inst.quotas_ = std::move(quotas);
  inst.preferences_ = std::move(preferences);
  inst.priorities_ = std::move(priorities);
  inst.priority_scores_ = std::move(priority_scores);
  return inst;
}

std::optional<int> MatchInstance::applicant_index(const std::string& id) const {
  auto it = applicant_lookup_.find(id);
  if (it == applicant_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MatchInstance::program_index(const std::string& key) const {
  auto it = program_lookup_.find(key);
  if (it == program_lookup_.end()) return std::nullopt;
  return it->second;
}

int MatchInstance::preference_rank(int a, int p) const {
  const auto& prefs = preferences_[a];
  auto it = std::find(prefs.begin(), prefs.end(), p);
  return it == prefs.end() ? kNotRanked : static_cast<int>(it - prefs.begin());
}

MatchInstance build_instance(const ApplicationSet& applications, const ScoreTable& scores,
                             const std::map<std::string, int>& quotas) {
  std::vector<std::string> program_keys;
  std::vector<int> quota_list;
  std::map<std::string, int> program_index;
  for (const auto& [key, q] : quotas) {
    program_index.emplace(key, static_cast<int>(program_keys.size()));
    program_keys.push_back(key);
    quota_list.push_back(q);
  }

  std::set<std::string> ids;
  for (const auto& app : applications) ids.insert(app.applicant_id);
  std::vector<std::string> applicant_ids(ids.begin(), ids.end());
  std::map<std::string, int> applicant_index;
  for (std::size_t a = 0; a < applicant_ids.size(); ++a) {
    applicant_index.emplace(applicant_ids[a], static_cast<int>(a));
  }

  // applicant -> (listed_rank, program)
  std::vector<std::vector<std::pair<int, int>>> ranked(applicant_ids.size());
  // program -> (score, applicant)
  std::vector<std::vector<std::pair<double, int>>> pools(program_keys.size());
  for (const auto& app : applications) {
    auto p = program_index.find(app.program_key);
    if (p == program_index.end()) {
      throw Error("DanglingForeignKey", fmt::format("no quota for program '{}'", app.program_key));
    }
    const int a = applicant_index.at(app.applicant_id);
    ranked[a].emplace_back(app.listed_rank, p->second);
    pools[p->second].emplace_back(scores.at(score_key(app)).components.total(), a);
  }

  std::vector<std::vector<int>> preferences(applicant_ids.size());
  for (std::size_t a = 0; a < ranked.size(); ++a) {
    std::sort(ranked[a].begin(), ranked[a].end());
    for (const auto& [rank, p] : ranked[a]) preferences[a].push_back(p);
  }
  std::vector<std::vector<int>> priorities(program_keys.size());
  std::vector<std::vector<double>> priority_scores(program_keys.size());
  for (std::size_t p = 0; p < pools.size(); ++p) {
    // applicant indices follow id order, so ascending index == ascending id
    std::sort(pools[p].begin(), pools[p].end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    for (const auto& [score, a] : pools[p]) {
      priorities[p].push_back(a);
      priority_scores[p].push_back(score);
    }
  }
  return MatchInstance::from_lists(std::move(applicant_ids), std::move(program_keys),
                                   std::move(quota_list), std::move(preferences),
                                   std::move(priorities), std::move(priority_scores));
}

namespace {

Matching applicant_proposing(const MatchInstance& inst) {
  const auto n_app = static_cast<int>(inst.applicant_count());
  const auto n_prog = static_cast<int>(inst.program_count());
  Matching m{std::vector<int>(n_app, Matching::kUnassigned)};
  std::vector<std::size_t> next(n_app, 0);
  // max-heap on priority rank: top is the weakest held applicant
  std::vector<std::priority_queue<std::pair<int, int>>> held(n_prog);

  std::deque<int> free;
  for (int a = 0; a < n_app; ++a) free.push_back(a);
  while (!free.empty()) {
    const int a = free.front();
    free.pop_front();
    const auto& prefs = inst.preferences(a);
    if (next[a] >= prefs.size()) continue;
    const int p = prefs[next[a]++];
    const int rank = inst.priority_rank(p, a);
    auto& pool = held[p];
    if (static_cast<int>(pool.size()) < inst.quota(p)) {
      pool.emplace(rank, a);
      m.program_of[a] = p;
    } else if (!pool.empty() && pool.top().first > rank) {
      const int bumped = pool.top().second;
      pool.pop();
      m.program_of[bumped] = Matching::kUnassigned;
      free.push_back(bumped);
      pool.emplace(rank, a);
      m.program_of[a] = p;
    } else {
      free.push_back(a);
    }
  }
  return m;
}

Matching program_proposing(const MatchInstance& inst) {
  const auto n_app = static_cast<int>(inst.applicant_count());
  const auto n_prog = static_cast<int>(inst.program_count());
  Matching m{std::vector<int>(n_app, Matching::kUnassigned)};
  std::vector<std::size_t> next(n_prog, 0);
  std::vector<int> holding(n_prog, 0);
  std::vector<int> held_rank(n_app, MatchInstance::kNotRanked);  // preference rank of held offer

  std::deque<int> active;
  for (int p = 0; p < n_prog; ++p) active.push_back(p);
  while (!active.empty()) {
    const int p = active.front();
    active.pop_front();
    const auto& order = inst.priorities(p);
    while (holding[p] < inst.quota(p) && next[p] < order.size()) {
      const int a = order[next[p]++];
      const int rank = inst.preference_rank(a, p);
      const int current = m.program_of[a];
      if (current == Matching::kUnassigned) {
        m.program_of[a] = p;
        held_rank[a] = rank;
        ++holding[p];
      } else if (rank < held_rank[a]) {
        --holding[current];
        active.push_back(current);
        m.program_of[a] = p;
        held_rank[a] = rank;
        ++holding[p];
      }
    }
  }
  return m;
}

void check_feasible(const MatchInstance& inst, const Matching& m) {
  if (m.program_of.size() != inst.applicant_count()) {
    throw Error("InfeasibleAssignment", "matching size differs from applicant count");
  }
  std::vector<int> fill(inst.program_count(), 0);
  for (std::size_t a = 0; a < m.program_of.size(); ++a) {
    const int p = m.program_of[a];
    if (p == Matching::kUnassigned) continue;
    if (p < 0 || p >= static_cast<int>(inst.program_count()) ||
        inst.priority_rank(p, static_cast<int>(a)) == MatchInstance::kNotRanked) {
      throw Error("InfeasibleAssignment",
                  fmt::format("applicant {} seated at a program not on their list",
                              inst.applicant_id(static_cast<int>(a))));
    }
    if (++fill[p] > inst.quota(p)) {
      throw Error("InfeasibleAssignment",
                  fmt::format("program {} over quota", inst.program_key(p)));
    }
  }
}

// Weakest held priority rank per program (-1 when empty) and seat counts.
struct ProgramLoad {
  std::vector<int> fill;
  std::vector<int> weakest;
};

ProgramLoad program_load(const MatchInstance& inst, const Matching& m) {
  ProgramLoad load{std::vector<int>(inst.program_count(), 0),
                   std::vector<int>(inst.program_count(), -1)};
  for (std::size_t a = 0; a < m.program_of.size(); ++a) {
    const int p = m.program_of[a];
    if (p == Matching::kUnassigned) continue;
    ++load.fill[p];
    load.weakest[p] = std::max(load.weakest[p], inst.priority_rank(p, static_cast<int>(a)));
  }
  return load;
}

template <typename OnPair>
void scan_blocking(const MatchInstance& inst, const Matching& m, const ProgramLoad& load,
                   OnPair&& on_pair) {
  for (std::size_t ai = 0; ai < m.program_of.size(); ++ai) {
    const int a = static_cast<int>(ai);
    const int current = m.program_of[ai];
    for (int p : inst.preferences(a)) {
      if (p == current) break;  // remaining programs are worse
      if (load.fill[p] < inst.quota(p) || load.weakest[p] > inst.priority_rank(p, a)) {
        if (!on_pair(a, p)) return;
      }
    }
  }
}

bool is_stable(const MatchInstance& inst, const Matching& m) {
  bool stable = true;
  scan_blocking(inst, m, program_load(inst, m), [&](int, int) {
    stable = false;
    return false;
  });
  return stable;
}

}  // namespace

Matching deferred_acceptance(const MatchInstance& instance, Proposing side) {
  return side == Proposing::applicants ? applicant_proposing(instance)
                                       : program_proposing(instance);
}

Assignment to_assignment(const MatchInstance& instance, const Matching& matching) {
  Assignment out;
  for (std::size_t a = 0; a < matching.program_of.size(); ++a) {
    const int p = matching.program_of[a];
    if (p != Matching::kUnassigned) {
      out.seat_of.emplace(instance.applicant_id(static_cast<int>(a)), instance.program_key(p));
    }
  }
  return out;
}

Matching to_matching(const MatchInstance& instance, const Assignment& assignment) {
  Matching m{std::vector<int>(instance.applicant_count(), Matching::kUnassigned)};
  for (const auto& [applicant, program] : assignment.seat_of) {
    auto a = instance.applicant_index(applicant);
    auto p = instance.program_index(program);
    if (!a || !p) {
      throw Error("InfeasibleAssignment",
                  fmt::format("seat {} -> {} names an unknown party", applicant, program));
    }
    m.program_of[*a] = *p;
  }
  check_feasible(instance, m);
  return m;
}

std::vector<std::pair<int, int>> find_blocking_pairs(const MatchInstance& instance,
                                                     const Matching& matching) {
  check_feasible(instance, matching);
  std::vector<std::pair<int, int>> pairs;
  scan_blocking(instance, matching, program_load(instance, matching), [&](int a, int p) {
    pairs.emplace_back(a, p);
    return true;
  });
  return pairs;
}

std::vector<std::pair<std::string, std::string>> find_blocking_pairs(
    const MatchInstance& instance, const Assignment& assignment) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, p] : find_blocking_pairs(instance, to_matching(instance, assignment))) {
    out.emplace_back(instance.applicant_id(a), instance.program_key(p));
  }
  return out;
}

std::vector<Matching> enumerate_stable_matchings(const MatchInstance& instance, std::size_t limit) {
  const auto n_app = static_cast<int>(instance.applicant_count());
  double space = 1.0;
  for (int a = 0; a < n_app; ++a) {
    space *= static_cast<double>(instance.preferences(a).size() + 1);
  }
  if (space > static_cast<double>(limit)) {
    throw Error("InstanceTooLarge",
                fmt::format("{:.0f} candidate matchings exceed the limit of {}", space, limit));
  }

  std::vector<Matching> stable;
  Matching current{std::vector<int>(n_app, Matching::kUnassigned)};
  std::vector<int> fill(instance.program_count(), 0);

  auto search = [&](auto&& self, int a) -> void {
    if (a == n_app) {
      if (is_stable(instance, current)) stable.push_back(current);
      return;
    }
    current.program_of[a] = Matching::kUnassigned;
    self(self, a + 1);
    for (int p : instance.preferences(a)) {
      if (fill[p] >= instance.quota(p)) continue;
      ++fill[p];
      current.program_of[a] = p;
      self(self, a + 1);
      --fill[p];
    }
    current.program_of[a] = Matching::kUnassigned;
  };
  search(search, 0);

  std::sort(stable.begin(), stable.end());
  return stable;
}

bool weakly_prefers(const MatchInstance& instance, int a, int x, int y) {
  if (y == Matching::kUnassigned) return true;
  if (x == Matching::kUnassigned) return false;
  return instance.preference_rank(a, x) <= instance.preference_rank(a, y);
}

AssignmentDiff compare_assignments(const Assignment& base, const Assignment& other,
                                   const std::vector<std::string>& universe) {
  const std::set<std::string> members(universe.begin(), universe.end());
  for (const Assignment* side : {&base, &other}) {
    for (const auto& [applicant, program] : side->seat_of) {
      if (!members.contains(applicant)) {
        throw Error("UniverseMismatch",
                    fmt::format("applicant {} is seated but outside the universe", applicant));
      }
    }
  }

  auto seat = [](const Assignment& x, const std::string& id) -> std::optional<std::string> {
    auto it = x.seat_of.find(id);
    if (it == x.seat_of.end()) return std::nullopt;
    return it->second;
  };

  AssignmentDiff diff;
  for (const auto& id : members) {
    auto from = seat(base, id);
    auto to = seat(other, id);
    if (from != to) diff.transitions.push_back({id, std::move(from), std::move(to)});
  }
  diff.differently_assigned_count = diff.transitions.size();
  diff.differently_assigned_share =
      members.empty() ? 0.0
                      : static_cast<double>(diff.differently_assigned_count) /
                            static_cast<double>(members.size());
  return diff;
}

std::map<std::string, Points> program_thresholds(const MatchInstance& instance,
                                                 const Matching& matching) {
  std::map<std::string, Points> out;
  for (std::size_t a = 0; a < matching.program_of.size(); ++a) {
    const int p = matching.program_of[a];
    if (p == Matching::kUnassigned) continue;
    const Points score =
        instance.priority_scores(p)[instance.priority_rank(p, static_cast<int>(a))];
    auto [it, inserted] = out.emplace(instance.program_key(p), score);
    if (!inserted) it->second = std::min(it->second, score);
  }
  return out;
}

double replicate_assignment(const Panel& panel, const Assignment& computed) {
  if (!panel.observed_assignment) {
    throw Error("NoObservedAssignment", "panel carries no observed assignment");
  }
  const auto& observed = panel.observed_assignment->seat_of;
  auto admitted = [](const std::map<std::string, std::string>& seats, const Application& app) {
    auto it = seats.find(app.applicant_id);
    return it != seats.end() && it->second == app.program_key;
  };

  std::size_t total = 0;
  std::size_t agree = 0;
  for (const auto& app : panel.applications) {
    if (app.year != panel.base_year) continue;
    ++total;
    if (admitted(observed, app) == admitted(computed.seat_of, app)) ++agree;
  }
  return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
}

std::map<std::string, int> infer_quotas(const Panel& panel) {
  if (!panel.observed_assignment) {
    throw Error("NoObservedAssignment", "quota inference needs an observed assignment");
  }
  std::map<std::string, int> out;
  for (const auto& p : panel.programs) out.emplace(p.key, 0);
  for (const auto& [applicant, program] : panel.observed_assignment->seat_of) ++out[program];
  return out;
}

}  // namespace admissions
