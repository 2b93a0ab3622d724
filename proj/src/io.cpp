#include "admissions/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "admissions/csv.hpp"

namespace admissions::io {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kGradePrefix = "grade_";
constexpr std::string_view kWeightPrefix = "weight_";

struct Columns {
  const csv::Table& table;
  std::string file;

  std::size_t require(std::string_view name) const {
    const std::size_t c = table.column(name);
    if (c == std::string::npos) {
      throw Error("ParseError", fmt::format("{}: missing column '{}'", file, name));
    }
    return c;
  }

  /// Rejects any header that is neither fixed nor carries `prefix`.
  void reject_unknown(std::initializer_list<std::string_view> fixed, std::string_view prefix = {}) const {
    for (const auto& h : table.header) {
      const bool known = std::find(fixed.begin(), fixed.end(), h) != fixed.end() ||
                         (!prefix.empty() && h.starts_with(prefix) && h.size() > prefix.size());
      if (!known) throw Error("ParseError", fmt::format("{}: unknown header '{}'", file, h));
    }
  }

  std::string where(std::size_t row, std::size_t column) const {
    return fmt::format("{} line {} column '{}'", file, table.line_numbers[row], table.header[column]);
  }
};

void open_for_write(std::ofstream& out, const fs::path& path) {
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoError", fmt::format("cannot write {}", path.string()));
}

std::string integer(long long v) { return std::to_string(v); }

}  // namespace

PanelPaths PanelPaths::in_directory(const fs::path& dir) {
  PanelPaths paths{dir / "applicants.csv", dir / "programs.csv", dir / "applications.csv",
                   dir / "fields.csv", std::nullopt};
  if (fs::exists(dir / "observed_assignment.csv")) paths.observed_assignment = dir / "observed_assignment.csv";
  return paths;
}

Panel load_panel(const fs::path& dir) { return load_panel(PanelPaths::in_directory(dir)); }

Panel load_panel(const PanelPaths& paths) {
  Panel panel;
  std::vector<Violation> dangling;

  {
    const auto table = csv::read(paths.fields);
    const Columns cols{table, "fields.csv"};
    cols.reject_unknown({"field", "first_choice_bonus"}, kWeightPrefix);
    const auto c_field = cols.require("field");
    const auto c_bonus = cols.require("first_choice_bonus");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const std::string& field = row[c_field];
      if (panel.bonus_points.contains(field)) {
        throw Error("ParseError", fmt::format("{}: duplicate field '{}'", cols.where(r, c_field), field));
      }
      panel.bonus_points[field] = csv::parse_double(row[c_bonus], cols.where(r, c_bonus));
      auto& weights = panel.field_weights[field];
      for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (!table.header[c].starts_with(kWeightPrefix) || row[c].empty()) continue;
        weights[table.header[c].substr(kWeightPrefix.size())] = csv::parse_double(row[c], cols.where(r, c));
      }
    }
  }

  {
    const auto table = csv::read(paths.applicants);
    const Columns cols{table, "applicants.csv"};
    cols.reject_unknown({"applicant_id", "cohort_year"}, kGradePrefix);
    const auto c_id = cols.require("applicant_id");
    const auto c_cohort = cols.require("cohort_year");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      Applicant a;
      a.id = row[c_id];
      a.cohort_year = static_cast<int>(csv::parse_integer(row[c_cohort], cols.where(r, c_cohort)));
      for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (!table.header[c].starts_with(kGradePrefix) || row[c].empty()) continue;
        a.grades[table.header[c].substr(kGradePrefix.size())] = csv::parse_double(row[c], cols.where(r, c));
      }
      panel.applicants.push_back(std::move(a));
    }
  }

  {
    const auto table = csv::read(paths.programs);
    const Columns cols{table, "programs.csv"};
    cols.reject_unknown({"polytechnic_name", "program_name", "field", "quota"});
    const auto c_poly = cols.require("polytechnic_name");
    const auto c_name = cols.require("program_name");
    const auto c_field = cols.require("field");
    const auto c_quota = cols.require("quota");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      Program p;
      p.polytechnic_name = row[c_poly];
      p.program_name = row[c_name];
      try {
        p.key = canonical_program_key(p.polytechnic_name, p.program_name);
      } catch (const Error& e) {
        throw Error("ParseError", fmt::format("{}: {}", cols.where(r, c_name), e.what()));
      }
      p.field = row[c_field];
      p.quota = static_cast<int>(csv::parse_integer(row[c_quota], cols.where(r, c_quota)));
      panel.programs.push_back(std::move(p));
    }
  }

  std::set<std::string> applicant_ids;
  for (const auto& a : panel.applicants) applicant_ids.insert(a.id);
  std::set<std::string> program_keys;
  for (const auto& p : panel.programs) program_keys.insert(p.key);

  auto resolve_program = [&](const Columns& cols, std::size_t r, std::size_t c_poly,
                             std::size_t c_name) {
    const auto& row = cols.table.rows[r];
    std::string key;
    try {
      key = canonical_program_key(row[c_poly], row[c_name]);
    } catch (const Error& e) {
      throw Error("ParseError", fmt::format("{}: {}", cols.where(r, c_name), e.what()));
    }
    if (!program_keys.contains(key)) {
      dangling.push_back({"DanglingForeignKey",
                          fmt::format("{} line {}", cols.file, cols.table.line_numbers[r]),
                          fmt::format("unknown program '{}'", key)});
    }
    return key;
  };
  auto resolve_applicant = [&](const Columns& cols, std::size_t r, const std::string& id) {
    if (!applicant_ids.contains(id)) {
      dangling.push_back({"DanglingForeignKey",
                          fmt::format("{} line {}", cols.file, cols.table.line_numbers[r]),
                          fmt::format("unknown applicant '{}'", id)});
    }
  };

  {
    const auto table = csv::read(paths.applications);
    const Columns cols{table, "applications.csv"};
    cols.reject_unknown({"year", "applicant_id", "polytechnic_name", "program_name", "listed_rank",
                         "exam_taken", "exam_score", "other_points"});
    const auto c_year = cols.require("year");
    const auto c_id = cols.require("applicant_id");
    const auto c_poly = cols.require("polytechnic_name");
    const auto c_name = cols.require("program_name");
    const auto c_rank = cols.require("listed_rank");
    const auto c_taken = cols.require("exam_taken");
    const auto c_score = cols.require("exam_score");
    const auto c_other = cols.require("other_points");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      Application app;
      app.year = static_cast<int>(csv::parse_integer(row[c_year], cols.where(r, c_year)));
      app.applicant_id = row[c_id];
      resolve_applicant(cols, r, app.applicant_id);
      app.program_key = resolve_program(cols, r, c_poly, c_name);
      app.listed_rank = static_cast<int>(csv::parse_integer(row[c_rank], cols.where(r, c_rank)));
      if (csv::parse_bool(row[c_taken], cols.where(r, c_taken))) {
        app.exam_score = csv::parse_double(row[c_score], cols.where(r, c_score));
      } else if (!row[c_score].empty()) {
        throw Error("ParseError", fmt::format("{}: exam score given but exam_taken is 0",
                                              cols.where(r, c_score)));
      }
      app.other_points = csv::parse_double(row[c_other], cols.where(r, c_other));
      panel.applications.push_back(std::move(app));
    }
  }

  if (paths.observed_assignment) {
    const auto table = csv::read(*paths.observed_assignment);
    const Columns cols{table, "observed_assignment.csv"};
    cols.reject_unknown({"applicant_id", "polytechnic_name", "program_name", "accepted"});
    const auto c_id = cols.require("applicant_id");
    const auto c_poly = cols.require("polytechnic_name");
    const auto c_name = cols.require("program_name");
    const auto c_acc = cols.require("accepted");
    Assignment observed;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      resolve_applicant(cols, r, row[c_id]);
      const std::string key = resolve_program(cols, r, c_poly, c_name);
      if (!observed.seat_of.emplace(row[c_id], key).second) {
        throw Error("ParseError", fmt::format("{}: applicant seated twice", cols.where(r, c_id)));
      }
      if (!row[c_acc].empty()) observed.accepted[row[c_id]] = csv::parse_bool(row[c_acc], cols.where(r, c_acc));
    }
    panel.observed_assignment = std::move(observed);
  }

  if (!dangling.empty()) throw ValidationError(std::move(dangling));

  if (!panel.applications.empty()) {
    panel.base_year = std::min_element(panel.applications.begin(), panel.applications.end(),
                                       [](const Application& a, const Application& b) {
                                         return a.year < b.year;
                                       })->year;
  }
  return validate_panel(std::move(panel));
}

void save_panel(const Panel& panel, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out;

  {
    std::set<std::string> subjects;
    for (const auto& [field, weights] : panel.field_weights) {
      for (const auto& [s, w] : weights) subjects.insert(s);
    }
    std::set<std::string> fields;
    for (const auto& [f, w] : panel.field_weights) fields.insert(f);
    for (const auto& [f, b] : panel.bonus_points) fields.insert(f);

    open_for_write(out, dir / "fields.csv");
    csv::Writer w(out);
    std::vector<std::string> header{"field", "first_choice_bonus"};
    for (const auto& s : subjects) header.push_back(std::string(kWeightPrefix) + s);
    w.row(header);
    for (const auto& f : fields) {
      auto bonus = panel.bonus_points.find(f);
      std::vector<std::string> row{f, bonus == panel.bonus_points.end() ? "0.000000" : csv::number(bonus->second)};
      auto weights = panel.field_weights.find(f);
      for (const auto& s : subjects) {
        if (weights == panel.field_weights.end() || !weights->second.contains(s)) {
          row.emplace_back();
        } else {
          row.push_back(csv::number(weights->second.at(s)));
        }
      }
      w.row(row);
    }
    out.close();
  }

  {
    std::set<std::string> subjects;
    for (const auto& a : panel.applicants) {
      for (const auto& [s, g] : a.grades) subjects.insert(s);
    }
    open_for_write(out, dir / "applicants.csv");
    csv::Writer w(out);
    std::vector<std::string> header{"applicant_id", "cohort_year"};
    for (const auto& s : subjects) header.push_back(std::string(kGradePrefix) + s);
    w.row(header);
    for (const auto& a : panel.applicants) {
      std::vector<std::string> row{a.id, integer(a.cohort_year)};
      for (const auto& s : subjects) {
        auto g = a.grades.find(s);
        row.push_back(g == a.grades.end() ? std::string() : csv::number(g->second));
      }
      w.row(row);
    }
    out.close();
  }

  {
    open_for_write(out, dir / "programs.csv");
    csv::Writer w(out);
    w.row({"polytechnic_name", "program_name", "field", "quota"});
    for (const auto& p : panel.programs) {
      w.row({p.polytechnic_name, p.program_name, p.field, integer(p.quota)});
    }
    out.close();
  }

  {
    open_for_write(out, dir / "applications.csv");
    csv::Writer w(out);
    w.row({"year", "applicant_id", "polytechnic_name", "program_name", "listed_rank", "exam_taken",
           "exam_score", "other_points"});
    for (const auto& app : panel.applications) {
      const Program& p = panel.program(app.program_key);
      w.row({integer(app.year), app.applicant_id, p.polytechnic_name, p.program_name,
             integer(app.listed_rank), app.exam_taken() ? "1" : "0",
             app.exam_taken() ? csv::number(*app.exam_score) : std::string(),
             csv::number(app.other_points)});
    }
    out.close();
  }

  const fs::path observed_path = dir / "observed_assignment.csv";
  if (panel.observed_assignment) {
    open_for_write(out, observed_path);
    csv::Writer w(out);
    w.row({"applicant_id", "polytechnic_name", "program_name", "accepted"});
    for (const auto& [applicant, key] : panel.observed_assignment->seat_of) {
      const Program& p = panel.program(key);
      auto acc = panel.observed_assignment->accepted.find(applicant);
      w.row({applicant, p.polytechnic_name, p.program_name,
             acc == panel.observed_assignment->accepted.end() ? "" : (acc->second ? "1" : "0")});
    }
    out.close();
  } else {
    fs::remove(observed_path);
  }
}

void write_assignment(std::ostream& out, const Assignment& assignment,
                      const std::vector<std::string>& universe) {
  csv::Writer w(out);
  w.row({"applicant_id", "program_key", "accepted"});
  for (const auto& id : universe) {
    auto seat = assignment.seat_of.find(id);
    auto acc = assignment.accepted.find(id);
    w.row({id, seat == assignment.seat_of.end() ? "" : seat->second,
           acc == assignment.accepted.end() ? "" : (acc->second ? "1" : "0")});
  }
}

Assignment read_assignment(const fs::path& path) {
  const auto table = csv::read(path);
  const Columns cols{table, path.filename().string()};
  cols.reject_unknown({"applicant_id", "program_key", "accepted"});
  const auto c_id = cols.require("applicant_id");
  const auto c_key = cols.require("program_key");
  const auto c_acc = cols.require("accepted");
  Assignment out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[c_key].empty()) continue;
    out.seat_of.emplace(row[c_id], row[c_key]);
    if (!row[c_acc].empty()) out.accepted[row[c_id]] = csv::parse_bool(row[c_acc], cols.where(r, c_acc));
  }
  return out;
}

void write_weight_report(std::ostream& out, const WeightReport& report) {
  csv::Writer w(out);
  w.row({"component", "effective_weight"});
  w.row({"matriculation_gpa", csv::number(report.gpa)});
  w.row({"entrance_exam", csv::number(report.exam)});
  w.row({"program_listed_first", csv::number(report.first_choice_bonus)});
  w.row({"residual", csv::number(report.residual)});
}

void write_tercile_table(std::ostream& out, const std::vector<TercileRow>& rows) {
  csv::Writer w(out);
  w.row({"criterion", "highest_third", "middle_third", "lowest_third"});
  for (const auto& r : rows) {
    w.row({to_string(r.criterion), csv::number(r.unassigned_share[0]),
           csv::number(r.unassigned_share[1]), csv::number(r.unassigned_share[2])});
  }
}

void write_rank_stats(std::ostream& out, const std::array<RankStatsRow, kMaxListLength>& rows) {
  csv::Writer w(out);
  w.row({"statistic", "listed_1st", "listed_2nd", "listed_3rd", "listed_4th"});
  std::vector<std::string> counts{"applications"}, exams{"exam_taken_share"}, admits{"admitted_share"};
  for (const auto& r : rows) {
    counts.push_back(integer(static_cast<long long>(r.applications)));
    exams.push_back(csv::number(r.exam_share));
    admits.push_back(csv::number(r.admitted_share));
  }
  w.row(counts);
  w.row(exams);
  w.row(admits);
}

void write_scenario_table(std::ostream& out, const std::vector<ScenarioResult>& results) {
  csv::Writer w(out);
  w.row({"scenario", "apps_per_applicant", "pct_differently_assigned", "rank_improvement"});
  for (const auto& r : results) {
    w.row({to_string(r.id), csv::number(r.applications_per_applicant),
           csv::number(100.0 * r.diff.differently_assigned_share), csv::number(r.rank_improvement)});
  }
}

void write_lpm_report(std::ostream& out, const std::array<RegressionResult, 6>& columns) {
  csv::Writer w(out);
  w.row({"column", "term", "estimate", "se"});
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& res = columns[c];
    const std::string id = integer(static_cast<long long>(c + 1));
    for (std::size_t t = 0; t < res.terms.size(); ++t) {
      const auto i = static_cast<Eigen::Index>(t);
      w.row({id, res.terms[t], csv::number(res.coefficients(i)), csv::number(res.standard_errors(i))});
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    w.row({integer(static_cast<long long>(c + 1)), "mean_dependent_variable",
           csv::number(columns[c].mean_y), ""});
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    w.row({integer(static_cast<long long>(c + 1)), "n", integer(static_cast<long long>(columns[c].n)), ""});
  }
}

void write_calibration(std::ostream& out, const std::vector<CalibrationRow>& rows) {
  csv::Writer w(out);
  w.row({"metric", "target", "actual", "deviation", "tolerance", "within"});
  for (const auto& r : rows) {
    w.row({r.metric, csv::number(r.target), csv::number(r.actual), csv::number(r.deviation()),
           csv::number(r.tolerance), r.within() ? "1" : "0"});
  }
}

void write_figure(std::ostream& out, const Histogram100& assigned,
                  const std::vector<FigurePanel>& changes) {
  csv::Writer w(out);
  w.row({"panel", "bin", "value"});
  for (std::size_t k = 0; k < assigned.bins.size(); ++k) {
    w.row({"1", integer(static_cast<long long>(k)), integer(assigned.bins[k])});
  }
  for (std::size_t k = 0; k < assigned.bins.size(); ++k) {
    w.row({"uniform", integer(static_cast<long long>(k)), csv::number(assigned.uniform_level)});
  }
  for (const auto& panel : changes) {
    for (std::size_t k = 0; k < panel.histogram.bins.size(); ++k) {
      w.row({panel.name, integer(static_cast<long long>(k)), integer(panel.histogram.bins[k])});
    }
  }
}

}  // namespace admissions::io
