#include "admissions/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "admissions/matching.hpp"
#include "admissions/metrics.hpp"
#include "admissions/scoring.hpp"

namespace admissions {

namespace {

// Distribution code is written out here: the standard library's distributions
// are implementation-defined, which would tie panels to one toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double out = *spare_;
      spare_.reset();
      return out;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn proportionally to `weights`; returns weights.size() if all are zero.
  std::size_t weighted(const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) return weights.size();
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return weights.size();
  }

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

double round_to(double x, double step) { return std::round(x / step) * step; }

// Round one-decimal values through an integer so that they print and parse
// back to the same double.
double tenths(double x) { return std::round(x * 10.0) / 10.0; }

const std::vector<std::string>& default_field_names() {
  static const std::vector<std::string> names{
      "business", "culture",        "engineering",      "health",
      "hospitality", "humanities", "natural_resources", "natural_sciences"};
  return names;
}

std::string field_name(int f) {
  const auto& names = default_field_names();
  return f < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(f)]
                                            : fmt::format("field_{}", f + 1);
}

struct Person {
  double ability = 0.0;
  int home_field = 0;
  double other_points = 0.0;
};

class Generator {
public:
  explicit Generator(const SynthConfig& config) : cfg_(config), rng_(config.seed) {}

  Panel run();

private:
  void make_fields();
  void make_programs();
  void make_applicants();
  std::vector<int> draw_list(const Person& person, int length, std::optional<int> forced_first);
  void add_year(const std::string& id, const Person& person, int year, std::optional<int> forced_first);
  double exam_score(const std::string& id, const Person& person, int field, int year);
  int draw_length();
  void set_quotas();
  void play_base_round();

  const SynthConfig& cfg_;
  Rng rng_;
  Panel panel_;
  std::vector<Person> people_;
  std::vector<std::string> field_names_;
  std::vector<int> program_field_;
  std::vector<bool> gpa_only_;
  std::optional<std::array<double, 4>> exam_prob_;  // per rank, for exam-eligible programs
  void draw_exam(Application& app, const Person& person);
  void draw_base_exams();
  std::vector<std::string> program_keys_;  // generation order, unaffected by validation sorting
  std::map<std::string, int> program_number_;
  std::vector<double> popularity_;
  std::vector<std::vector<int>> programs_in_field_;
  std::vector<double> field_share_;
  std::map<std::tuple<std::string, int, int>, double> exam_cache_;  // (applicant, field, year)
};

void Generator::make_fields() {
  for (int f = 0; f < cfg_.n_fields; ++f) {
    field_names_.push_back(field_name(f));
    SubjectWeights weights;
    for (const auto& subject : cfg_.subjects) {
      const double w = cfg_.subject_weight_min +
                       (cfg_.subject_weight_max - cfg_.subject_weight_min) * rng_.uniform();
      weights[subject] = round_to(w, 0.25);
    }
    panel_.field_weights[field_names_.back()] = std::move(weights);
    panel_.bonus_points[field_names_.back()] = cfg_.first_choice_bonus;
    field_share_.push_back(0.5 + rng_.uniform());
  }
}

void Generator::make_programs() {
  programs_in_field_.assign(static_cast<std::size_t>(cfg_.n_fields), {});
  const int n_polytechnics = std::max(1, (cfg_.n_programs + 3) / 4);
  for (int p = 0; p < cfg_.n_programs; ++p) {
    const int f = p % cfg_.n_fields;
    Program program;
    program.polytechnic_name = fmt::format("Polytechnic {:02}", p % n_polytechnics + 1);
    program.program_name = fmt::format("{} {:02}", field_names_[static_cast<std::size_t>(f)], p + 1);
    program.key = canonical_program_key(program.polytechnic_name, program.program_name);
    program.field = field_names_[static_cast<std::size_t>(f)];
    program_number_.emplace(program.key, p);
    program_keys_.push_back(program.key);
    panel_.programs.push_back(std::move(program));
    program_field_.push_back(f);
    gpa_only_.push_back(f >= cfg_.n_fields - cfg_.gpa_only_fields);
    popularity_.push_back(std::exp(cfg_.popularity_sigma * rng_.normal()));
    programs_in_field_[static_cast<std::size_t>(f)].push_back(p);
  }
}

int Generator::draw_length() {
  const std::vector<double> probs(cfg_.list_length_probs.begin(), cfg_.list_length_probs.end());
  return static_cast<int>(rng_.weighted(probs)) + 1;
}

std::vector<int> Generator::draw_list(const Person& person, int length,
                                      std::optional<int> forced_first) {
  std::vector<int> list;
  std::set<int> used;
  if (forced_first) {
    list.push_back(*forced_first);
    used.insert(*forced_first);
  }
  while (static_cast<int>(list.size()) < std::min(length, cfg_.n_programs)) {
    const auto& home = programs_in_field_[static_cast<std::size_t>(person.home_field)];
    const bool home_left = std::any_of(home.begin(), home.end(), [&](int p) { return !used.contains(p); });
    const bool stay_home = home_left && rng_.bernoulli(cfg_.same_field_prob);
    std::vector<double> weights(popularity_.size(), 0.0);
    for (std::size_t p = 0; p < popularity_.size(); ++p) {
      if (used.contains(static_cast<int>(p))) continue;
      if (stay_home && program_field_[p] != person.home_field) continue;
      weights[p] = popularity_[p];
    }
    const std::size_t pick = rng_.weighted(weights);
    if (pick == weights.size()) break;
    list.push_back(static_cast<int>(pick));
    used.insert(static_cast<int>(pick));
  }
  return list;
}

double Generator::exam_score(const std::string& id, const Person& person, int field, int year) {
  const auto key = std::make_tuple(id, field, year);
  auto it = exam_cache_.find(key);
  if (it != exam_cache_.end()) return it->second;
  const double loading = cfg_.exam_ability_loading;
  const double latent = loading * person.ability + std::sqrt(1.0 - loading * loading) * rng_.normal();
  const double score = tenths(std::clamp(cfg_.exam_mean + cfg_.exam_sd * latent, 0.0, cfg_.exam_max));
  exam_cache_.emplace(key, score);
  return score;
}

void Generator::add_year(const std::string& id, const Person& person, int year,
                         std::optional<int> forced_first) {
  const auto list = draw_list(person, draw_length(), forced_first);
  for (std::size_t r = 0; r < list.size(); ++r) {
    const int p = list[r];
    Application app;
    app.applicant_id = id;
    app.program_key = program_keys_[static_cast<std::size_t>(p)];
    app.year = year;
    app.listed_rank = static_cast<int>(r) + 1;
    app.other_points = person.other_points;
    if (exam_prob_) draw_exam(app, person);
    panel_.applications.push_back(std::move(app));
  }
}

void Generator::draw_exam(Application& app, const Person& person) {
  const auto p = static_cast<std::size_t>(program_number_.at(app.program_key));
  if (gpa_only_[p]) return;
  const double prob = (*exam_prob_)[static_cast<std::size_t>(std::min(app.listed_rank, 4) - 1)];
  if (rng_.bernoulli(prob)) app.exam_score = exam_score(app.applicant_id, person, program_field_[p], app.year);
}

// Base-year exams are drawn once all lists exist, so the rate among
// exam-eligible programs can be set to hit the per-rank target overall.
void Generator::draw_base_exams() {
  std::array<double, 4> listed{}, eligible{};
  for (const auto& app : panel_.applications) {
    const auto r = static_cast<std::size_t>(std::min(app.listed_rank, 4) - 1);
    listed[r] += 1.0;
    if (!gpa_only_[static_cast<std::size_t>(program_number_.at(app.program_key))]) eligible[r] += 1.0;
  }
  std::array<double, 4> prob{};
  for (std::size_t r = 0; r < 4; ++r) {
    prob[r] = eligible[r] > 0.0 ? std::min(1.0, cfg_.exam_prob_by_rank[r] * listed[r] / eligible[r]) : 0.0;
  }
  exam_prob_ = prob;
  for (auto& app : panel_.applications) {
    draw_exam(app, people_[static_cast<std::size_t>(std::stoi(app.applicant_id.substr(1)) - 1)]);
  }
}

void Generator::make_applicants() {
  const double loading = cfg_.grade_ability_loading;
  for (int i = 0; i < cfg_.n_applicants; ++i) {
    Applicant applicant;
    applicant.id = fmt::format("A{:06}", i + 1);
    applicant.cohort_year = cfg_.base_year;
    Person person;
    person.ability = rng_.normal();
    for (const auto& subject : cfg_.subjects) {
      const double latent = loading * person.ability + std::sqrt(1.0 - loading * loading) * rng_.normal();
      applicant.grades[subject] =
          std::clamp(std::round(cfg_.grade_mean + cfg_.grade_sd * latent), 0.0, cfg_.grade_max);
    }
    person.home_field = static_cast<int>(rng_.weighted(field_share_));
    person.other_points = rng_.bernoulli(cfg_.other_points_prob) ? cfg_.other_points_value : 0.0;
    panel_.applicants.push_back(applicant);
    people_.push_back(person);
    add_year(applicant.id, person, cfg_.base_year, std::nullopt);
  }
}

void Generator::set_quotas() {
  // Seats follow base-year demand (first choices count double), split by
  // largest remainder so they sum to seats_total.
  std::vector<double> demand(panel_.programs.size(), 0.0);
  std::map<std::string, std::size_t> index;
  for (std::size_t p = 0; p < panel_.programs.size(); ++p) index.emplace(panel_.programs[p].key, p);
  for (const auto& app : panel_.applications) {
    demand[index.at(app.program_key)] += app.listed_rank == 1 ? 2.0 : 1.0;
  }
  const double total = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (!(total > 0.0)) return;

  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t p = 0; p < demand.size(); ++p) {
    const double exact = cfg_.seats_total * demand[p] / total;
    const int floor_seats = static_cast<int>(std::floor(exact));
    panel_.programs[p].quota = floor_seats;
    assigned += floor_seats;
    remainders.emplace_back(exact - floor_seats, p);
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (std::size_t i = 0; assigned < cfg_.seats_total && i < remainders.size(); ++i, ++assigned) {
    ++panel_.programs[remainders[i].second].quota;
  }
}

void Generator::play_base_round() {
  const ApplicationSet base = panel_.base_applications();
  const ScoreTable scores = compute_score_table(panel_, base);
  const MatchInstance instance = build_instance(base, scores, panel_.quotas());
  Assignment observed = to_assignment(instance, deferred_acceptance(instance, Proposing::programs));

  std::map<std::pair<std::string, std::string>, const Application*> lookup;
  for (const auto& app : base) lookup.emplace(std::make_pair(app.applicant_id, app.program_key), &app);

  std::map<std::string, std::size_t> person_index;
  for (std::size_t i = 0; i < panel_.applicants.size(); ++i) person_index.emplace(panel_.applicants[i].id, i);

  std::map<std::string, int> base_first_choice;
  for (const auto& app : base) {
    if (app.listed_rank == 1) {
      base_first_choice.emplace(app.applicant_id, program_number_.at(app.program_key));
    }
  }

  std::vector<std::pair<std::string, std::optional<int>>> later;  // re-applicants, retry program
  for (const auto& applicant : panel_.applicants) {
    const std::string& id = applicant.id;
    double p_reapply = cfg_.reapply_unassigned;
    std::optional<int> retry;
    auto seat = observed.seat_of.find(id);
    if (seat != observed.seat_of.end()) {
      const Application& app = *lookup.at({id, seat->second});
      const auto r = static_cast<std::size_t>(app.listed_rank - 1);
      const double exam = app.exam_taken() ? 1.0 : 0.0;
      const double p_accept = std::clamp(
          cfg_.accept_base + cfg_.accept_rank_effect[r] + cfg_.accept_exam_effect * exam, 0.0, 1.0);
      const bool accepted = rng_.bernoulli(p_accept);
      observed.accepted[id] = accepted;
      p_reapply = cfg_.reapply_assigned_base + cfg_.reapply_rank_effect[r] +
                  cfg_.reapply_exam_effect * exam + (accepted ? 0.0 : cfg_.reapply_declined_effect);
    } else if (rng_.bernoulli(cfg_.retry_first_choice_prob)) {
      retry = base_first_choice.at(id);
    }
    if (rng_.bernoulli(std::clamp(p_reapply, 0.0, 1.0))) later.emplace_back(id, retry);
  }

  for (const auto& [id, retry] : later) {
    const Person& person = people_[person_index.at(id)];
    if (rng_.bernoulli(cfg_.first_later_year_prob)) {
      add_year(id, person, cfg_.base_year + 1, retry);
      if (rng_.bernoulli(cfg_.second_later_year_prob)) add_year(id, person, cfg_.base_year + 2, std::nullopt);
    } else {
      add_year(id, person, cfg_.base_year + 2, retry);
    }
  }
  panel_.observed_assignment = std::move(observed);
}

Panel Generator::run() {
  panel_.base_year = cfg_.base_year;
  make_fields();
  make_programs();
  make_applicants();
  draw_base_exams();
  panel_ = validate_panel(std::move(panel_));
  set_quotas();
  play_base_round();
  return validate_panel(std::move(panel_));
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error("InvalidConfig", what); };
  auto probability = [&](double p, const std::string& name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(fmt::format("{} = {} is not a probability", name, p));
  };
  if (n_applicants < 0) fail("n_applicants must be nonnegative");
  if (n_programs < 1) fail("n_programs must be positive");
  if (n_fields < 1 || n_fields > n_programs) fail("n_fields must lie in 1..n_programs");
  if (seats_total < 0 || seats_total > n_applicants) fail("seats_total must lie in 0..n_applicants");
  if (subjects.empty()) fail("at least one subject is required");
  double length_total = 0.0;
  for (double p : list_length_probs) {
    probability(p, "list_length_probs");
    length_total += p;
  }
  if (std::abs(length_total - 1.0) > 1e-6) fail("list_length_probs must sum to 1");
  for (double p : exam_prob_by_rank) probability(p, "exam_prob_by_rank");
  if (gpa_only_fields < 0 || gpa_only_fields > n_fields) fail("gpa_only_fields must lie in [0, n_fields]");
  probability(other_points_prob, "other_points_prob");
  probability(same_field_prob, "same_field_prob");
  probability(reapply_unassigned, "reapply_unassigned");
  probability(first_later_year_prob, "first_later_year_prob");
  probability(second_later_year_prob, "second_later_year_prob");
  probability(retry_first_choice_prob, "retry_first_choice_prob");
  if (!(grade_ability_loading >= 0.0 && grade_ability_loading <= 1.0)) fail("grade_ability_loading must lie in [0,1]");
  if (!(exam_ability_loading >= 0.0 && exam_ability_loading <= 1.0)) fail("exam_ability_loading must lie in [0,1]");
  if (!(grade_sd >= 0.0) || !(exam_sd >= 0.0) || !(popularity_sigma >= 0.0)) fail("spreads must be nonnegative");
  if (!(grade_max > 0.0) || !(exam_max > 0.0)) fail("grade_max and exam_max must be positive");
  if (!(subject_weight_min >= 0.0 && subject_weight_max >= subject_weight_min)) fail("subject weight range is invalid");
  if (!(first_choice_bonus >= 0.0) || !(other_points_value >= 0.0)) fail("points must be nonnegative");
}

#define SYNTH_FIELDS(X)                                                                        \
  X(n_applicants) X(n_programs) X(n_fields) X(seats_total) X(base_year) X(list_length_probs)   \
  X(exam_prob_by_rank) X(gpa_only_fields) X(first_choice_bonus) X(subjects) X(grade_mean) X(grade_sd)             \
  X(grade_max) X(grade_ability_loading) X(subject_weight_min) X(subject_weight_max)            \
  X(exam_mean) X(exam_sd) X(exam_max) X(exam_ability_loading) X(other_points_value)            \
  X(other_points_prob) X(popularity_sigma) X(same_field_prob) X(accept_base)                   \
  X(accept_rank_effect) X(accept_exam_effect) X(reapply_unassigned) X(reapply_assigned_base)   \
  X(reapply_rank_effect) X(reapply_exam_effect) X(reapply_declined_effect)                     \
  X(first_later_year_prob) X(second_later_year_prob) X(retry_first_choice_prob) X(seed)

void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = nlohmann::json::object();
#define WRITE_FIELD(name) j[#name] = c.name;
  SYNTH_FIELDS(WRITE_FIELD)
#undef WRITE_FIELD
}

void from_json(const nlohmann::json& j, SynthConfig& c) {
  if (!j.is_object()) throw Error("InvalidConfig", "synth config must be a JSON object");
  std::set<std::string> known;
#define READ_FIELD(name)                                                                  \
  known.insert(#name);                                                                    \
  if (j.contains(#name)) {                                                                \
    try {                                                                                 \
      j.at(#name).get_to(c.name);                                                         \
    } catch (const nlohmann::json::exception& e) {                                        \
      throw Error("InvalidConfig", fmt::format("bad value for {}: {}", #name, e.what())); \
    }                                                                                     \
  }
  SYNTH_FIELDS(READ_FIELD)
#undef READ_FIELD
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error("InvalidConfig", fmt::format("unknown key '{}'", key));
  }
}

#undef SYNTH_FIELDS

Panel generate_panel(const SynthConfig& config) {
  config.validate();
  return Generator(config).run();
}

bool CalibrationRow::within() const { return std::abs(deviation()) <= tolerance; }

std::vector<CalibrationRow> calibration_report(const Panel& panel, const CalibrationTargets& targets) {
  if (!panel.observed_assignment) {
    throw Error("NoObservedAssignment", "calibration needs the observed assignment");
  }
  std::vector<CalibrationRow> rows;
  const auto stats = application_rank_stats(panel, *panel.observed_assignment);
  for (std::size_t r = 0; r < stats.size(); ++r) {
    rows.push_back({fmt::format("exam_share_rank{}", r + 1), targets.exam_share_by_rank[r],
                    stats[r].exam_share, targets.exam_share_tolerance});
  }
  const auto universe = panel.base_applicants().size();
  const double n = universe == 0 ? 1.0 : static_cast<double>(universe);
  rows.push_back({"assigned_share", targets.assigned_share,
                  static_cast<double>(panel.observed_assignment->seat_of.size()) / n,
                  targets.assigned_share_tolerance});
  rows.push_back({"mean_list_length", targets.mean_list_length,
                  static_cast<double>(panel.base_applications().size()) / n,
                  targets.mean_list_length_tolerance});
  return rows;
}

}  // namespace admissions
