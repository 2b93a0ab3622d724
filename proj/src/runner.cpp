#include "admissions/runner.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

#include <fmt/format.h>
#include <json.hpp>

#include "admissions/csv.hpp"
#include "admissions/io.hpp"
#include "admissions/matching.hpp"
#include "admissions/metrics.hpp"
#include "admissions/scoring.hpp"
#include "admissions/synth.hpp"

namespace admissions {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Report, const char*> kReportNames[] = {
    {Report::table1, "table1"},           {Report::table2, "table2"},
    {Report::table3, "table3"},           {Report::table4, "table4"},
    {Report::table5, "table5"},           {Report::figure1, "figure1"},
    {Report::assignments, "assignments"}, {Report::diagnostics, "diagnostics"},
    {Report::calibration, "calibration"},
};

SynthConfig load_synth_config(const RunConfig& config) {
  SynthConfig synth;
  if (*config.synth != "default") {
    std::ifstream in(*config.synth);
    if (!in) throw Error("InvalidRunConfig", fmt::format("cannot open synth config {}", *config.synth));
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error("InvalidConfig", fmt::format("{}: {}", *config.synth, e.what()));
    }
    synth = j.get<SynthConfig>();
  }
  if (config.seed) synth.seed = *config.seed;
  synth.validate();
  return synth;
}

// Writes files under the output directory and forgets nothing it created.
class OutputTree {
public:
  explicit OutputTree(fs::path dir) : dir_(std::move(dir)) {}

  void open() {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    } else if (!fs::is_directory(dir_)) {
      throw Error("InvalidRunConfig", fmt::format("{} is not a directory", dir_.string()));
    }
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path path = dir_ / name;
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", fmt::format("cannot write {}", path.string()));
    body(out);
    out.close();
    if (!out) throw Error("IoError", fmt::format("failed writing {}", path.string()));
  }

  void roll_back() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    written_.clear();
  }

  const std::vector<fs::path>& written() const { return written_; }

private:
  fs::path dir_;
  bool created_dir_ = false;
  std::vector<fs::path> written_;
};

std::size_t count_proposing_differences(const Panel& panel, const ScoreTable& scores) {
  const auto apps = panel.base_applications();
  const auto instance = build_instance(apps, scores, panel.quotas());
  const Matching a = deferred_acceptance(instance, Proposing::applicants);
  const Matching p = deferred_acceptance(instance, Proposing::programs);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.program_of.size(); ++i) differ += a.program_of[i] != p.program_of[i];
  return differ;
}

}  // namespace

std::string to_string(Report report) {
  for (const auto& [r, name] : kReportNames) {
    if (r == report) return name;
  }
  return "unknown";
}

Report parse_report(const std::string& text) {
  for (const auto& [r, name] : kReportNames) {
    if (text == name) return r;
  }
  throw Error("UnknownReport", fmt::format("unknown report '{}'", text));
}

void RunConfig::validate() const {
  if (input_dir.has_value() == synth.has_value()) {
    throw Error("InvalidRunConfig", "exactly one of an input directory and a synth config is required");
  }
  if (out_dir.empty()) throw Error("InvalidRunConfig", "output directory is empty");
  if (input_dir && reports && reports->contains(Report::calibration)) {
    throw Error("InvalidRunConfig", "the calibration report needs a synthetic panel");
  }
}

RunSummary run(const RunConfig& config, std::ostream& log) {
  config.validate();

  Panel panel;
  if (config.input_dir) {
    panel = io::load_panel(*config.input_dir);
    log << fmt::format("loaded panel from {}\n", config.input_dir->string());
  } else {
    const SynthConfig synth = load_synth_config(config);
    panel = generate_panel(synth);
    log << fmt::format("generated synthetic panel (seed {})\n", synth.seed);
  }

  auto wanted = [&](Report r) {
    if (config.reports) return config.reports->contains(r);
    if (r == Report::table5) return panel.observed_assignment.has_value();
    if (r == Report::calibration) return !config.input_dir && panel.observed_assignment.has_value();
    return true;
  };
  if (wanted(Report::table5) && !panel.observed_assignment) {
    throw Error("NoObservedAssignment", "table5 needs observed_assignment.csv");
  }

  RunSummary summary;
  const auto base_apps = panel.base_applications();
  const auto universe = panel.base_applicants();
  summary.applicants = universe.size();

  OutputTree out(config.out_dir);
  out.open();
  try {
    const auto results = run_scenario_suite(panel, config.scenarios);
    const ScenarioResult& s1 = results.front();
    summary.assigned = s1.assigned_count;
    const Assignment& descriptive = panel.observed_assignment ? *panel.observed_assignment : s1.assignment;
    const ScoreTable original = compute_score_table(panel, base_apps);

    if (wanted(Report::table1)) {
      out.write("table1.csv", [&](std::ostream& os) {
        io::write_weight_report(os, effective_weights(original, base_apps));
      });
    }
    if (wanted(Report::table2)) {
      std::vector<TercileRow> rows{
          tercile_unassignment(panel, original, descriptive, PriorityCriterion::matriculation),
          tercile_unassignment(panel, original, descriptive, PriorityCriterion::admission_score)};
      out.write("table2.csv", [&](std::ostream& os) { io::write_tercile_table(os, rows); });
    }
    if (wanted(Report::table3)) {
      out.write("table3.csv", [&](std::ostream& os) {
        io::write_rank_stats(os, application_rank_stats(panel, descriptive));
      });
    }
    if (wanted(Report::table4)) {
      out.write("table4.csv", [&](std::ostream& os) { io::write_scenario_table(os, results); });
    }
    if (wanted(Report::table5)) {
      const auto columns = lpm_report(panel, *panel.observed_assignment, config.standard_errors);
      out.write("table5.csv", [&](std::ostream& os) { io::write_lpm_report(os, columns); });
    }

    const RankTable ranks = field_gpa_percentile_ranks(panel);
    const Histogram100 baseline = assigned_rank_histogram(panel, ranks, s1.assignment);
    if (wanted(Report::figure1)) {
      std::vector<io::FigurePanel> changes;
      for (const auto& r : results) {
        if (r.id == ScenarioId::S1) continue;
        changes.push_back({std::to_string(static_cast<int>(r.id)),
                           net_change_histogram(baseline, assigned_rank_histogram(panel, ranks, r.assignment))});
      }
      out.write("figure1.csv", [&](std::ostream& os) { io::write_figure(os, baseline, changes); });
    }
    if (wanted(Report::assignments)) {
      for (const auto& r : results) {
        out.write(fmt::format("assignment_{}.csv", to_string(r.id)),
                  [&](std::ostream& os) { io::write_assignment(os, r.assignment, universe); });
      }
    }

    summary.proposing_side_differences = count_proposing_differences(panel, original);
    if (panel.observed_assignment) summary.replication_rate = replicate_assignment(panel, s1.assignment);

    if (wanted(Report::diagnostics)) {
      out.write("diagnostics.csv", [&](std::ostream& os) {
        csv::Writer w(os);
        w.row({"metric", "value"});
        w.row({"base_applicants", std::to_string(universe.size())});
        w.row({"assigned_s1", std::to_string(s1.assigned_count)});
        w.row({"proposing_side_differences", std::to_string(summary.proposing_side_differences)});
        w.row({"proposing_side_difference_share",
               csv::number(universe.empty() ? 0.0
                                            : static_cast<double>(summary.proposing_side_differences) /
                                                  static_cast<double>(universe.size()))});
        if (summary.replication_rate) w.row({"replication_rate", csv::number(*summary.replication_rate)});
        if (s1.assigned_count > 0) {
          w.row({"mean_assigned_rank_s1", csv::number(mean_assigned_rank(panel, ranks, s1.assignment))});
        }
        if (baseline.uniform_level > 0) {
          w.row({"top_bin_over_uniform", csv::number(static_cast<double>(baseline.bins.back()) /
                                                     baseline.uniform_level)});
        }
      });
    }
    if (wanted(Report::calibration)) {
      if (config.input_dir) throw Error("InvalidRunConfig", "the calibration report needs a synthetic panel");
      out.write("calibration.csv", [&](std::ostream& os) {
        io::write_calibration(os, calibration_report(panel));
      });
    }

    log << fmt::format("base-year applicants: {}\n", universe.size());
    for (const auto& r : results) {
      log << fmt::format("{}: assigned {}, {:.2f} applications per applicant, {:.2f}% differently "
                         "assigned, rank improvement {:.3f}\n",
                         to_string(r.id), r.assigned_count, r.applications_per_applicant,
                         100.0 * r.diff.differently_assigned_share, r.rank_improvement);
    }
    log << fmt::format("applicant- vs program-proposing differences: {}\n",
                       summary.proposing_side_differences);
    if (summary.replication_rate) {
      log << fmt::format("replication of observed assignment: {:.6f}\n", *summary.replication_rate);
    }
    log << fmt::format("wrote {} files to {}\n", out.written().size(), config.out_dir.string());
  } catch (...) {
    out.roll_back();
    throw;
  }
  summary.written = out.written();
  return summary;
}

}  // namespace admissions
