#include "admissions/core_model.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <unicode/unistr.h>

namespace admissions {

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error("ValidationError",
            violations.empty()
                ? std::string("no violations")
                : fmt::format("{} violation(s); first: {} at {}: {}", violations.size(),
                              violations.front().code, violations.front().location,
                              violations.front().message)),
      violations_(std::move(violations)) {}

bool ValidationError::has(const std::string& code) const {
  return std::any_of(violations_.begin(), violations_.end(),
                     [&](const Violation& v) { return v.code == code; });
}

namespace {

std::string fold_part(std::string_view part) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(part.data(), static_cast<int32_t>(part.size())));
  text.trim();
  text.foldCase();
  std::string folded;
  text.toUTF8String(folded);

  std::string escaped;
  escaped.reserve(folded.size());
  for (char c : folded) {
    if (c == ':' || c == '\\') escaped.push_back('\\');
    escaped.push_back(c);
  }
  return escaped;
}

bool application_order(const Application& a, const Application& b) {
  return std::tie(a.year, a.applicant_id, a.listed_rank, a.program_key) <
         std::tie(b.year, b.applicant_id, b.listed_rank, b.program_key);
}

std::string app_location(std::size_t index, const Application& app) {
  return fmt::format("applications[{}] (applicant {}, year {}, program {})", index,
                     app.applicant_id, app.year, app.program_key);
}

}  // namespace

std::string canonical_program_key(std::string_view polytechnic_name,
                                  std::string_view program_name) {
  std::string poly = fold_part(polytechnic_name);
  std::string prog = fold_part(program_name);
  if (poly.empty() || prog.empty()) {
    throw Error("EmptyName", fmt::format("program name parts must be nonempty (got '{}', '{}')",
                                         polytechnic_name, program_name));
  }
  return poly + "::" + prog;
}

const Applicant* Panel::find_applicant(std::string_view id) const {
  auto it = std::lower_bound(applicants.begin(), applicants.end(), id,
                             [](const Applicant& a, std::string_view v) { return a.id < v; });
  return it != applicants.end() && it->id == id ? &*it : nullptr;
}

const Program* Panel::find_program(std::string_view key) const {
  auto it = std::lower_bound(programs.begin(), programs.end(), key,
                             [](const Program& p, std::string_view v) { return p.key < v; });
  return it != programs.end() && it->key == key ? &*it : nullptr;
}

const Program& Panel::program(std::string_view key) const {
  const Program* p = find_program(key);
  if (p == nullptr) throw Error("DanglingForeignKey", fmt::format("unknown program '{}'", key));
  return *p;
}

std::vector<int> Panel::years() const {
  std::set<int> ys;
  for (const auto& app : applications) ys.insert(app.year);
  return {ys.begin(), ys.end()};
}

ApplicationSet Panel::applications_in_year(int year) const {
  ApplicationSet out;
  std::copy_if(applications.begin(), applications.end(), std::back_inserter(out),
               [year](const Application& a) { return a.year == year; });
  return out;
}

std::vector<std::string> Panel::base_applicants() const {
  std::set<std::string> ids;
  for (const auto& app : applications) {
    if (app.year == base_year) ids.insert(app.applicant_id);
  }
  return {ids.begin(), ids.end()};
}

std::map<std::string, int> Panel::quotas() const {
  std::map<std::string, int> out;
  for (const auto& p : programs) out.emplace(p.key, p.quota);
  return out;
}

Panel validate_panel(Panel raw) {
  std::vector<Violation> found;
  auto report = [&](std::string code, std::string location, std::string message) {
    found.push_back({std::move(code), std::move(location), std::move(message)});
  };

  std::set<std::string> applicant_ids;
  for (std::size_t i = 0; i < raw.applicants.size(); ++i) {
    const auto& a = raw.applicants[i];
    const auto loc = fmt::format("applicants[{}] ({})", i, a.id);
    if (a.id.empty()) report("EmptyId", loc, "applicant id is empty");
    if (!applicant_ids.insert(a.id).second) report("DuplicateId", loc, "duplicate applicant id");
    for (const auto& [subject, grade] : a.grades) {
      if (!(grade >= 0.0)) report("NegativeGrade", loc, fmt::format("grade for {} is negative", subject));
    }
  }

  std::set<std::string> program_keys;
  for (std::size_t i = 0; i < raw.programs.size(); ++i) {
    const auto& p = raw.programs[i];
    const auto loc = fmt::format("programs[{}] ({})", i, p.key);
    if (!program_keys.insert(p.key).second) report("DuplicateId", loc, "duplicate program key");
    if (p.quota < 0) report("QuotaNegative", loc, fmt::format("quota {} < 0", p.quota));
    try {
      if (canonical_program_key(p.polytechnic_name, p.program_name) != p.key) {
        report("NonCanonicalKey", loc, "key is not the canonical form of the program names");
      }
    } catch (const Error& e) {
      report(e.code(), loc, e.what());
    }
  }

  // (applicant, year) -> ranks / programs
  std::map<std::pair<std::string, int>, std::vector<int>> ranks;
  std::map<std::pair<std::string, int>, std::set<std::string>> listed;
  for (std::size_t i = 0; i < raw.applications.size(); ++i) {
    const auto& app = raw.applications[i];
    const auto loc = app_location(i, app);
    if (!applicant_ids.contains(app.applicant_id)) {
      report("DanglingForeignKey", loc, fmt::format("unknown applicant '{}'", app.applicant_id));
    }
    if (!program_keys.contains(app.program_key)) {
      report("DanglingForeignKey", loc, fmt::format("unknown program '{}'", app.program_key));
    }
    if (app.year < raw.base_year || app.year >= raw.base_year + kPanelYears) {
      report("YearOutOfRange", loc,
             fmt::format("year {} outside {}..{}", app.year, raw.base_year,
                         raw.base_year + kPanelYears - 1));
    }
    if (app.exam_score && !(*app.exam_score >= 0.0)) {
      report("NegativePoints", loc, "exam score is negative");
    }
    if (!(app.other_points >= 0.0)) report("NegativePoints", loc, "other points are negative");

    const auto key = std::make_pair(app.applicant_id, app.year);
    ranks[key].push_back(app.listed_rank);
    if (!listed[key].insert(app.program_key).second) {
      report("DuplicateApplication", loc, "program listed twice in the same year");
    }
  }
  for (auto& [key, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    const auto loc = fmt::format("applicant {} year {}", key.first, key.second);
    bool prefix = true;
    for (std::size_t r = 0; r < rs.size(); ++r) prefix = prefix && rs[r] == static_cast<int>(r) + 1;
    if (!prefix) {
      report("RankGap", loc, "listed ranks do not form a prefix 1..k");
    } else if (rs.size() > static_cast<std::size_t>(kMaxListLength)) {
      report("ListTooLong", loc, fmt::format("{} programs listed", rs.size()));
    }
  }

  if (raw.observed_assignment) {
    ApplicationSet base;
    std::copy_if(raw.applications.begin(), raw.applications.end(), std::back_inserter(base),
                 [&](const Application& a) { return a.year == raw.base_year; });
    std::map<std::string, int> quotas;
    for (const auto& p : raw.programs) quotas.emplace(p.key, p.quota);
    for (const auto& [applicant, program] : raw.observed_assignment->seat_of) {
      if (!applicant_ids.contains(applicant)) {
        report("DanglingForeignKey", "observed_assignment",
               fmt::format("unknown applicant '{}'", applicant));
      }
      if (!program_keys.contains(program)) {
        report("DanglingForeignKey", "observed_assignment",
               fmt::format("unknown program '{}'", program));
      }
    }
    for (auto& v : assignment_violations(*raw.observed_assignment, base, quotas)) {
      v.location = "observed_assignment: " + v.location;
      found.push_back(std::move(v));
    }
  }

  if (!found.empty()) throw ValidationError(std::move(found));

  std::sort(raw.applicants.begin(), raw.applicants.end(),
            [](const Applicant& a, const Applicant& b) { return a.id < b.id; });
  std::sort(raw.programs.begin(), raw.programs.end(),
            [](const Program& a, const Program& b) { return a.key < b.key; });
  std::sort(raw.applications.begin(), raw.applications.end(), application_order);
  return raw;
}

std::vector<Violation> assignment_violations(const Assignment& assignment,
                                             const ApplicationSet& applications,
                                             const std::map<std::string, int>& quotas) {
  std::vector<Violation> found;
  std::set<std::pair<std::string, std::string>> submitted;
  for (const auto& app : applications) submitted.emplace(app.applicant_id, app.program_key);

  std::map<std::string, int> fill;
  for (const auto& [applicant, program] : assignment.seat_of) {
    ++fill[program];
    if (!submitted.contains({applicant, program})) {
      found.push_back({"UnlistedSeat", applicant,
                       fmt::format("seat at '{}' without a submitted application", program)});
    }
  }
  for (const auto& [program, count] : fill) {
    auto q = quotas.find(program);
    if (q == quotas.end()) {
      found.push_back({"DanglingForeignKey", program, "seat at a program without a quota"});
    } else if (count > q->second) {
      found.push_back({"QuotaExceeded", program,
                       fmt::format("{} seats filled, quota {}", count, q->second)});
    }
  }
  for (const auto& [applicant, flag] : assignment.accepted) {
    if (!assignment.seat_of.contains(applicant)) {
      found.push_back({"AcceptedWithoutSeat", applicant, "acceptance flag for unassigned applicant"});
    }
  }
  return found;
}

}  // namespace admissions
