#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "admissions/core_model.hpp"
#include "admissions/scoring.hpp"

namespace admissions {

/// Midpoint percentile ranks: 100 * (mean rank - 0.5) / N, ties sharing their
/// mean rank, larger values ranking higher.
std::vector<double> midpoint_percentile_ranks(std::span<const double> values);

/// Field-specific GPA percentile rank of every panel applicant.
class RankTable {
public:
  void set(const std::string& field, const std::string& applicant_id, double rank);
  /// Throws Error("MissingRank").
  double rank(const std::string& field, const std::string& applicant_id) const;
  const std::map<std::string, std::map<std::string, double>>& by_field() const { return ranks_; }

private:
  std::map<std::string, std::map<std::string, double>> ranks_;
};

/// Ranks the whole applicant population by field-weighted GPA, once per field
/// that has programs. Throws Error("MissingFieldWeights").
RankTable field_gpa_percentile_ranks(const Panel& panel);

enum class PriorityCriterion { matriculation, admission_score };

const char* to_string(PriorityCriterion criterion);

/// Share of applicants left without any seat, per priority tercile.
/// Index 0 is the highest third, 2 the lowest.
struct TercileRow {
  PriorityCriterion criterion = PriorityCriterion::matriculation;
  std::array<double, 3> unassigned_share{};
  std::array<std::size_t, 3> size{};
  std::vector<std::string> excluded;  // base-panel applicants without base-year applications
};

/// Each applicant's mean percentile rank across the applicant pools of the
/// programs they applied to in the base year, split into thirds at positions
/// floor(N/3) and floor(2N/3) of the ascending order; values tied across a
/// boundary join the lower group. `scores` supplies admission-score pools.
TercileRow tercile_unassignment(const Panel& panel, const ScoreTable& scores,
                                const Assignment& assignment, PriorityCriterion criterion);

struct RankStatsRow {
  int listed_rank = 0;
  std::size_t applications = 0;
  double exam_share = 0.0;
  double admitted_share = 0.0;
};

/// Base-year application statistics for listed ranks 1..4.
std::array<RankStatsRow, kMaxListLength> application_rank_stats(const Panel& panel,
                                                                const Assignment& assignment);

inline constexpr std::size_t kHistogramBins = 100;

/// Bins are [k, k+1) for k = 0..99, the last bin closed at 100.
struct Histogram100 {
  std::vector<std::int64_t> bins = std::vector<std::int64_t>(kHistogramBins, 0);
  double uniform_level = 0.0;

  std::int64_t sum() const;
};

std::size_t percentile_bin(double rank);

/// Bins assigned applicants by their rank in the field of the program they
/// hold. The uniform reference level is |base-year applicants| / 100.
Histogram100 assigned_rank_histogram(const Panel& panel, const RankTable& ranks,
                                     const Assignment& assignment);

/// Per-bin cf - base. Throws Error("BinMismatch").
Histogram100 net_change_histogram(const Histogram100& base, const Histogram100& cf);

/// Mean field-rank of admitted applicants. Throws Error("EmptyAssignment").
double mean_assigned_rank(const Panel& panel, const RankTable& ranks, const Assignment& assignment);

/// mean_assigned_rank(cf) - mean_assigned_rank(base).
double mean_rank_improvement(const Panel& panel, const RankTable& ranks, const Assignment& base,
                             const Assignment& cf);

}  // namespace admissions
