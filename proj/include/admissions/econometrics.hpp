#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "admissions/core_model.hpp"
#include "admissions/scoring.hpp"

namespace admissions {

enum class Outcome { accepted_seat, reapplied_later };

/// Regressors always include an intercept, rank-2/3/4 dummies (rank 1 is the
/// reference) and an exam dummy. `score_controls` adds the adjusted score and
/// the program's admission threshold; `field_interactions` adds field dummies
/// and both controls interacted with them, the lexicographically first field
/// in the sample serving as reference.
struct DesignSpec {
  Outcome outcome = Outcome::accepted_seat;
  bool score_controls = false;
  bool field_interactions = false;
};

/// Column layout of the six-column report: (1)-(3) seat acceptance, (4)-(6)
/// re-application, each as base / +controls / +field interactions.
DesignSpec report_column(int column);

struct DesignMatrix {
  std::vector<std::string> terms;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/// One row per admitted applicant, built from the base-year application to the
/// program they hold. `reapplied_later` is 1 for applicants with any
/// application in a later panel year. Throws Error("EmptySample") or
/// Error("MissingThreshold").
DesignMatrix build_design_matrix(const Panel& panel, const Assignment& assignment,
                                 const ScoreTable& scores,
                                 const std::map<std::string, Points>& thresholds,
                                 const DesignSpec& spec);

enum class StandardErrors { classical, robust_hc1 };

struct RegressionResult {
  std::vector<std::string> terms;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd residuals;
  std::size_t n = 0;
  double mean_y = 0.0;
  double rss = 0.0;
};

/// Least squares through a Householder QR factorization. A column whose
/// diagonal entry in R is negligible against its own norm is collinear with
/// the columns before it; those are reported via Error("RankDeficient")
/// rather than dropped. Classical errors use s^2 = RSS / (n - k).
RegressionResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     std::vector<std::string> terms = {},
                     StandardErrors se = StandardErrors::classical);

/// Fits the six report columns on the applicants `assignment` seats.
/// Thresholds come from the base-year instance under original scores.
std::array<RegressionResult, 6> lpm_report(const Panel& panel, const Assignment& assignment,
                                           StandardErrors se = StandardErrors::classical);

}  // namespace admissions
