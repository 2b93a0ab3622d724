#include "admissions/econometrics.hpp"

#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "admissions/matching.hpp"

namespace admissions {

DesignSpec report_column(int column) {
  if (column < 1 || column > 6) {
    throw Error("UnknownColumn", fmt::format("report column {} outside 1..6", column));
  }
  DesignSpec spec;
  spec.outcome = column <= 3 ? Outcome::accepted_seat : Outcome::reapplied_later;
  const int variant = (column - 1) % 3;
  spec.score_controls = variant >= 1;
  spec.field_interactions = variant == 2;
  return spec;
}

DesignMatrix build_design_matrix(const Panel& panel, const Assignment& assignment,
                                 const ScoreTable& scores,
                                 const std::map<std::string, Points>& thresholds,
                                 const DesignSpec& spec) {
  if (assignment.seat_of.empty()) throw Error("EmptySample", "no admitted applicants");

  std::set<std::string> later_applicants;
  std::map<std::pair<std::string, std::string>, const Application*> base_apps;
  for (const auto& app : panel.applications) {
    if (app.year == panel.base_year) {
      base_apps.emplace(std::make_pair(app.applicant_id, app.program_key), &app);
    } else {
      later_applicants.insert(app.applicant_id);
    }
  }

  struct Row {
    const Application* app;
    std::string field;
    double adjusted;
    double threshold;
    double outcome;
  };
  std::vector<Row> rows;
  std::set<std::string> fields;
  for (const auto& [applicant, program] : assignment.seat_of) {
    auto app = base_apps.find({applicant, program});
    if (app == base_apps.end()) {
      throw Error("InfeasibleAssignment",
                  fmt::format("{} holds {} without a base-year application", applicant, program));
    }
    auto threshold = thresholds.find(program);
    if (threshold == thresholds.end()) {
      throw Error("MissingThreshold", fmt::format("no admission threshold for {}", program));
    }
    double outcome = 0.0;
    if (spec.outcome == Outcome::accepted_seat) {
      auto flag = assignment.accepted.find(applicant);
      if (flag == assignment.accepted.end()) {
        throw Error("MissingAcceptance", fmt::format("no acceptance flag for {}", applicant));
      }
      outcome = flag->second ? 1.0 : 0.0;
    } else {
      outcome = later_applicants.contains(applicant) ? 1.0 : 0.0;
    }
    const std::string& field = panel.program(program).field;
    fields.insert(field);
    rows.push_back({app->second, field,
                    adjusted_score(scores.at(score_key(*app->second)).components),
                    threshold->second, outcome});
  }

  DesignMatrix dm;
  dm.terms = {"intercept", "rank2", "rank3", "rank4", "exam_taken"};
  if (spec.score_controls) {
    dm.terms.emplace_back("adjusted_score");
    dm.terms.emplace_back("threshold");
  }
  std::vector<std::string> interacted;
  if (spec.field_interactions && !fields.empty()) {
    interacted.assign(std::next(fields.begin()), fields.end());  // first field is the reference
    for (const auto& f : interacted) dm.terms.push_back(fmt::format("field[{}]", f));
    if (spec.score_controls) {
      for (const auto& f : interacted) dm.terms.push_back(fmt::format("adjusted_score:field[{}]", f));
      for (const auto& f : interacted) dm.terms.push_back(fmt::format("threshold:field[{}]", f));
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  dm.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(dm.terms.size()));
  dm.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    dm.x(i, c++) = 1.0;
    for (int rank = 2; rank <= 4; ++rank) dm.x(i, c++) = r.app->listed_rank == rank ? 1.0 : 0.0;
    dm.x(i, c++) = r.app->exam_taken() ? 1.0 : 0.0;
    if (spec.score_controls) {
      dm.x(i, c++) = r.adjusted;
      dm.x(i, c++) = r.threshold;
    }
    if (spec.field_interactions) {
      for (const auto& f : interacted) dm.x(i, c++) = r.field == f ? 1.0 : 0.0;
      if (spec.score_controls) {
        for (const auto& f : interacted) dm.x(i, c++) = r.field == f ? r.adjusted : 0.0;
        for (const auto& f : interacted) dm.x(i, c++) = r.field == f ? r.threshold : 0.0;
      }
    }
    dm.y(i) = r.outcome;
  }
  return dm;
}

RegressionResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     std::vector<std::string> terms, StandardErrors se) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.size() != n) {
    throw Error("DimensionMismatch", fmt::format("X has {} rows but y has {}", n, y.size()));
  }
  if (terms.empty()) {
    for (Eigen::Index j = 0; j < k; ++j) terms.push_back(fmt::format("x{}", j));
  }
  if (static_cast<Eigen::Index>(terms.size()) != k) {
    throw Error("DimensionMismatch", "one term name per column required");
  }
  if (n <= k) {
    throw Error("InsufficientDegreesOfFreedom", fmt::format("{} rows for {} columns", n, k));
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  std::vector<std::string> collinear;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0.0 || std::abs(r(j, j)) <= 1e-10 * norm) {
      collinear.push_back(terms[static_cast<std::size_t>(j)]);
    }
  }
  if (!collinear.empty()) {
    throw Error("RankDeficient",
                fmt::format("columns linearly dependent on earlier ones: {}", fmt::join(collinear, ", ")));
  }

  const Eigen::VectorXd qty = (qr.householderQ().adjoint() * y).head(k);
  const auto upper = r.triangularView<Eigen::Upper>();

  RegressionResult result;
  result.terms = std::move(terms);
  result.coefficients = upper.solve(qty);
  result.residuals = y - x * result.coefficients;
  result.rss = result.residuals.squaredNorm();
  result.n = static_cast<std::size_t>(n);
  result.mean_y = y.mean();

  const Eigen::MatrixXd r_inv = upper.solve(Eigen::MatrixXd::Identity(k, k));
  const double dof = static_cast<double>(n - k);
  if (se == StandardErrors::classical) {
    const double s2 = result.rss / dof;
    result.standard_errors = (r_inv.rowwise().squaredNorm() * s2).cwiseSqrt();
  } else {
    const Eigen::MatrixXd b = x * r_inv;
    const Eigen::MatrixXd meat =
        b.transpose() * result.residuals.array().square().matrix().asDiagonal() * b;
    const Eigen::MatrixXd cov = r_inv * meat * r_inv.transpose() * (static_cast<double>(n) / dof);
    result.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  return result;
}

std::array<RegressionResult, 6> lpm_report(const Panel& panel, const Assignment& assignment,
                                           StandardErrors se) {
  const ApplicationSet base = panel.base_applications();
  const ScoreTable scores = compute_score_table(panel, base);
  const MatchInstance instance = build_instance(base, scores, panel.quotas());
  const auto thresholds = program_thresholds(instance, to_matching(instance, assignment));

  std::array<RegressionResult, 6> out;
  for (int column = 1; column <= 6; ++column) {
    DesignMatrix dm = build_design_matrix(panel, assignment, scores, thresholds, report_column(column));
    out[static_cast<std::size_t>(column - 1)] = ols(dm.x, dm.y, std::move(dm.terms), se);
  }
  return out;
}

}  // namespace admissions
