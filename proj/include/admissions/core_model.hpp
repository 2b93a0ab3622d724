#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "admissions/errors.hpp"

namespace admissions {

/// Admission-score points. Grades, exam results and bonuses share the unit.
using Points = double;

struct Applicant {
  std::string id;
  /// Subject -> grade points. Subjects absent here count as zero.
  std::map<std::string, double> grades;
  int cohort_year = 0;

  bool operator==(const Applicant&) const = default;
};

struct Program {
  std::string key;
  std::string polytechnic_name;
  std::string program_name;
  std::string field;
  int quota = 0;

  bool operator==(const Program&) const = default;
};

struct Application {
  std::string applicant_id;
  std::string program_key;
  int year = 0;
  int listed_rank = 1;
  std::optional<Points> exam_score;  // present iff an entrance exam was taken
  Points other_points = 0.0;

  bool exam_taken() const { return exam_score.has_value(); }
  bool operator==(const Application&) const = default;
};

/// The applications taking part in one admission round. Entries keep the year
/// they were submitted in; extended lists mix years within one round.
using ApplicationSet = std::vector<Application>;

/// Many-to-one outcome of a round. Applicants missing from `seat_of` are
/// unassigned. `accepted` only carries entries for assigned applicants.
struct Assignment {
  std::map<std::string, std::string> seat_of;
  std::map<std::string, bool> accepted;

  bool operator==(const Assignment&) const = default;
};

using SubjectWeights = std::map<std::string, double>;

struct Panel {
  int base_year = 0;
  std::vector<Applicant> applicants;
  std::vector<Program> programs;
  std::vector<Application> applications;
  std::optional<Assignment> observed_assignment;
  std::map<std::string, SubjectWeights> field_weights;
  std::map<std::string, Points> bonus_points;

  bool operator==(const Panel&) const = default;

  // Lookups assume the canonical ordering established by validate_panel.
  const Applicant* find_applicant(std::string_view id) const;
  const Program* find_program(std::string_view key) const;
  const Program& program(std::string_view key) const;

  std::vector<int> years() const;
  ApplicationSet applications_in_year(int year) const;
  ApplicationSet base_applications() const { return applications_in_year(base_year); }
  /// Sorted ids of applicants with at least one base-year application.
  std::vector<std::string> base_applicants() const;
  std::map<std::string, int> quotas() const;
};

inline constexpr int kMaxListLength = 4;
inline constexpr int kPanelYears = 3;

/// Canonical program identifier built from the two name parts: each part is
/// trimmed and Unicode case-folded, ':' and '\' are backslash-escaped, and the
/// parts are joined with "::". Throws Error("EmptyName").
std::string canonical_program_key(std::string_view polytechnic_name,
                                  std::string_view program_name);

/// Checks every model invariant and returns the panel in canonical order
/// (applicants by id, programs by key, applications by year/applicant/rank).
/// Throws ValidationError listing all violations found.
Panel validate_panel(Panel raw);

/// Shared Assignment checker: at most one seat per applicant, quotas respected,
/// seats backed by a submitted application, acceptance flags only for seats.
std::vector<Violation> assignment_violations(const Assignment& assignment,
                                             const ApplicationSet& applications,
                                             const std::map<std::string, int>& quotas);

}  // namespace admissions
