#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "admissions/core_model.hpp"
#include "admissions/scoring.hpp"

namespace admissions {

/// Index-based two-sided market. Applicants and programs are addressed by
/// position; ids are kept for conversion back to an Assignment.
///
/// Invariants (checked on construction): preference lists are duplicate-free,
/// each program's priority order holds exactly the applicants listing it, and
/// quotas are nonnegative.
class MatchInstance {
public:
  static constexpr int kNotRanked = -1;

  MatchInstance() = default;

  /// `priorities[p]` is best-first. `priority_scores`, when given, parallels
  /// `priorities` and must be non-increasing. Throws Error("InvalidInstance").
  static MatchInstance from_lists(std::vector<std::string> applicant_ids,
                                  std::vector<std::string> program_keys, std::vector<int> quotas,
                                  std::vector<std::vector<int>> preferences,
                                  std::vector<std::vector<int>> priorities,
                                  std::vector<std::vector<double>> priority_scores = {});

  std::size_t applicant_count() const { return applicant_ids_.size(); }
  std::size_t program_count() const { return program_keys_.size(); }

  const std::string& applicant_id(int a) const { return applicant_ids_[a]; }
  const std::string& program_key(int p) const { return program_keys_[p]; }
  std::optional<int> applicant_index(const std::string& id) const;
  std::optional<int> program_index(const std::string& key) const;

  int quota(int p) const { return quotas_[p]; }
  const std::vector<int>& preferences(int a) const { return preferences_[a]; }
  const std::vector<int>& priorities(int p) const { return priorities_[p]; }
  const std::vector<double>& priority_scores(int p) const { return priority_scores_[p]; }

  /// Position of `p` on applicant `a`'s list, or kNotRanked.
  int preference_rank(int a, int p) const;
  /// Position of `a` in program `p`'s priority order, or kNotRanked.
  int priority_rank(int p, int a) const { return priority_rank_[p][a]; }

  const std::vector<std::string>& applicant_ids() const { return applicant_ids_; }

private:
  std::vector<std::string> applicant_ids_;
  std::vector<std::string> program_keys_;
  std::map<std::string, int> applicant_lookup_;
  std::map<std::string, int> program_lookup_;
  std::vector<int> quotas_;
  std::vector<std::vector<int>> preferences_;
  std::vector<std::vector<int>> priorities_;
  std::vector<std::vector<double>> priority_scores_;
  std::vector<std::vector<int>> priority_rank_;  // [program][applicant]
};

/// program_of[a] is a program index or kUnassigned.
struct Matching {
  static constexpr int kUnassigned = -1;
  std::vector<int> program_of;

  auto operator<=>(const Matching&) const = default;
  bool operator==(const Matching&) const = default;
};

enum class Proposing { applicants, programs };

/// Preferences follow listed_rank; priorities sort by total score descending
/// with ties to the smaller applicant id. Every program in `quotas` takes part.
/// Throws Error("MissingScore") or Error("DanglingForeignKey").
MatchInstance build_instance(const ApplicationSet& applications, const ScoreTable& scores,
                             const std::map<std::string, int>& quotas);

/// Quota-respecting deferred acceptance. Applicant proposing yields the
/// applicant-optimal stable matching, program proposing the program-optimal one.
Matching deferred_acceptance(const MatchInstance& instance, Proposing side);

Assignment to_assignment(const MatchInstance& instance, const Matching& matching);

/// Throws Error("InfeasibleAssignment") when the assignment names unknown
/// parties, unlisted pairs, or exceeds a quota.
Matching to_matching(const MatchInstance& instance, const Assignment& assignment);

/// All (applicant, program) pairs where the applicant prefers the program to
/// their current outcome and the program has a free seat or holds someone of
/// lower priority. Throws Error("InfeasibleAssignment").
std::vector<std::pair<int, int>> find_blocking_pairs(const MatchInstance& instance,
                                                     const Matching& matching);
std::vector<std::pair<std::string, std::string>> find_blocking_pairs(
    const MatchInstance& instance, const Assignment& assignment);

/// Every stable matching, by exhaustive search over feasible matchings. The
/// search space is the product of (list length + 1) over applicants; above
/// `limit` this throws Error("InstanceTooLarge") instead of truncating.
/// Result is sorted.
std::vector<Matching> enumerate_stable_matchings(const MatchInstance& instance,
                                                 std::size_t limit = 20'000'000);

/// True when applicant `a` weakly prefers outcome `x` to outcome `y`
/// (program indices or kUnassigned; unassigned is worst).
bool weakly_prefers(const MatchInstance& instance, int a, int x, int y);

struct SeatTransition {
  std::string applicant_id;
  std::optional<std::string> from;
  std::optional<std::string> to;

  bool operator==(const SeatTransition&) const = default;
};

struct AssignmentDiff {
  std::size_t differently_assigned_count = 0;
  double differently_assigned_share = 0.0;  // over the whole universe
  std::vector<SeatTransition> transitions;
};

/// Throws Error("UniverseMismatch") when either assignment seats someone
/// outside `universe`.
AssignmentDiff compare_assignments(const Assignment& base, const Assignment& other,
                                   const std::vector<std::string>& universe);

/// Lowest admitted total score per program with at least one admit.
std::map<std::string, Points> program_thresholds(const MatchInstance& instance,
                                                 const Matching& matching);

/// Share of base-year application decisions (admitted there or not) on which
/// `computed` agrees with the panel's observed assignment.
/// Throws Error("NoObservedAssignment").
double replicate_assignment(const Panel& panel, const Assignment& computed);

/// Quota proxy: the number of applicants the observed assignment seats at
/// each program (zero for programs without admits).
std::map<std::string, int> infer_quotas(const Panel& panel);

}  // namespace admissions
