#include "admissions/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace admissions {

std::vector<double> midpoint_percentile_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // 1-based ranks i+1 .. j+1 share their mean
    const double mean_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
    const double pct = 100.0 * (mean_rank - 0.5) / static_cast<double>(n);
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = pct;
    i = j + 1;
  }
  return out;
}

void RankTable::set(const std::string& field, const std::string& applicant_id, double rank) {
  ranks_[field][applicant_id] = rank;
}

double RankTable::rank(const std::string& field, const std::string& applicant_id) const {
  auto f = ranks_.find(field);
  if (f != ranks_.end()) {
    auto a = f->second.find(applicant_id);
    if (a != f->second.end()) return a->second;
  }
  throw Error("MissingRank", fmt::format("no rank for applicant {} in field {}", applicant_id, field));
}

RankTable field_gpa_percentile_ranks(const Panel& panel) {
  std::set<std::string> fields;
  for (const auto& p : panel.programs) fields.insert(p.field);

  RankTable table;
  for (const auto& field : fields) {
    auto weights = panel.field_weights.find(field);
    if (weights == panel.field_weights.end()) {
      throw Error("MissingFieldWeights", fmt::format("no GPA weights for field '{}'", field));
    }
    std::vector<double> gpa;
    gpa.reserve(panel.applicants.size());
    for (const auto& a : panel.applicants) gpa.push_back(weighted_gpa(a, weights->second));
    const auto pct = midpoint_percentile_ranks(gpa);
    for (std::size_t i = 0; i < panel.applicants.size(); ++i) {
      table.set(field, panel.applicants[i].id, pct[i]);
    }
  }
  return table;
}

const char* to_string(PriorityCriterion criterion) {
  return criterion == PriorityCriterion::matriculation ? "matriculation" : "admission_score";
}

TercileRow tercile_unassignment(const Panel& panel, const ScoreTable& scores,
                                const Assignment& assignment, PriorityCriterion criterion) {
  // program -> base-year applications
  std::map<std::string, std::vector<const Application*>> pools;
  for (const auto& app : panel.applications) {
    if (app.year == panel.base_year) pools[app.program_key].push_back(&app);
  }

  std::map<std::string, std::pair<double, std::size_t>> rank_sum;  // applicant -> (sum, count)
  for (const auto& [program_key, pool] : pools) {
    const Program& program = panel.program(program_key);
    std::vector<double> values;
    values.reserve(pool.size());
    for (const Application* app : pool) {
      if (criterion == PriorityCriterion::matriculation) {
        auto weights = panel.field_weights.find(program.field);
        if (weights == panel.field_weights.end()) {
          throw Error("MissingFieldWeights", fmt::format("no GPA weights for field '{}'", program.field));
        }
        const Applicant* applicant = panel.find_applicant(app->applicant_id);
        values.push_back(weighted_gpa(*applicant, weights->second));
      } else {
        values.push_back(scores.at(score_key(*app)).components.total());
      }
    }
    const auto pct = midpoint_percentile_ranks(values);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      auto& acc = rank_sum[pool[i]->applicant_id];
      acc.first += pct[i];
      ++acc.second;
    }
  }

  TercileRow row;
  row.criterion = criterion;
  struct Entry {
    double mean;
    std::string id;
  };
  std::vector<Entry> entries;
  for (const auto& a : panel.applicants) {
    auto it = rank_sum.find(a.id);
    if (it == rank_sum.end()) {
      row.excluded.push_back(a.id);
      continue;
    }
    entries.push_back({it->second.first / static_cast<double>(it->second.second), a.id});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.mean != y.mean ? x.mean < y.mean : x.id < y.id;
  });

  const std::size_t n = entries.size();
  std::vector<int> group(n);  // 0 lowest third, 2 highest
  for (std::size_t i = 0; i < n; ++i) group[i] = i < n / 3 ? 0 : (i < 2 * n / 3 ? 1 : 2);
  for (std::size_t i = 1; i < n; ++i) {
    if (entries[i].mean == entries[i - 1].mean) group[i] = group[i - 1];
  }

  std::array<std::size_t, 3> unassigned{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = 2 - static_cast<std::size_t>(group[i]);
    ++row.size[slot];
    if (!assignment.seat_of.contains(entries[i].id)) ++unassigned[slot];
  }
  for (std::size_t t = 0; t < 3; ++t) {
    row.unassigned_share[t] =
        row.size[t] == 0 ? 0.0
                         : static_cast<double>(unassigned[t]) / static_cast<double>(row.size[t]);
  }
  return row;
}

std::array<RankStatsRow, kMaxListLength> application_rank_stats(const Panel& panel,
                                                                const Assignment& assignment) {
  std::array<RankStatsRow, kMaxListLength> rows{};
  std::array<std::size_t, kMaxListLength> exams{};
  std::array<std::size_t, kMaxListLength> admits{};
  for (int r = 0; r < kMaxListLength; ++r) rows[r].listed_rank = r + 1;

  for (const auto& app : panel.applications) {
    if (app.year != panel.base_year || app.listed_rank < 1 || app.listed_rank > kMaxListLength) {
      continue;
    }
    const auto r = static_cast<std::size_t>(app.listed_rank - 1);
    ++rows[r].applications;
    if (app.exam_taken()) ++exams[r];
    auto seat = assignment.seat_of.find(app.applicant_id);
    if (seat != assignment.seat_of.end() && seat->second == app.program_key) ++admits[r];
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].applications == 0) continue;
    const auto n = static_cast<double>(rows[r].applications);
    rows[r].exam_share = static_cast<double>(exams[r]) / n;
    rows[r].admitted_share = static_cast<double>(admits[r]) / n;
  }
  return rows;
}

std::int64_t Histogram100::sum() const {
  return std::accumulate(bins.begin(), bins.end(), std::int64_t{0});
}

std::size_t percentile_bin(double rank) {
  const double clamped = std::clamp(rank, 0.0, 100.0);
  return std::min(static_cast<std::size_t>(std::floor(clamped)), kHistogramBins - 1);
}

Histogram100 assigned_rank_histogram(const Panel& panel, const RankTable& ranks,
                                     const Assignment& assignment) {
  Histogram100 h;
  for (const auto& [applicant, program] : assignment.seat_of) {
    ++h.bins[percentile_bin(ranks.rank(panel.program(program).field, applicant))];
  }
  h.uniform_level = static_cast<double>(panel.base_applicants().size()) /
                    static_cast<double>(kHistogramBins);
  return h;
}

Histogram100 net_change_histogram(const Histogram100& base, const Histogram100& cf) {
  if (base.bins.size() != kHistogramBins || cf.bins.size() != kHistogramBins) {
    throw Error("BinMismatch", fmt::format("expected {} bins, got {} and {}", kHistogramBins,
                                           base.bins.size(), cf.bins.size()));
  }
  Histogram100 out;
  for (std::size_t k = 0; k < kHistogramBins; ++k) out.bins[k] = cf.bins[k] - base.bins[k];
  return out;
}

double mean_assigned_rank(const Panel& panel, const RankTable& ranks, const Assignment& assignment) {
  if (assignment.seat_of.empty()) throw Error("EmptyAssignment", "no admitted applicants");
  double sum = 0.0;
  for (const auto& [applicant, program] : assignment.seat_of) {
    sum += ranks.rank(panel.program(program).field, applicant);
  }
  return sum / static_cast<double>(assignment.seat_of.size());
}

double mean_rank_improvement(const Panel& panel, const RankTable& ranks, const Assignment& base,
                             const Assignment& cf) {
  return mean_assigned_rank(panel, ranks, cf) - mean_assigned_rank(panel, ranks, base);
}

}  // namespace admissions
