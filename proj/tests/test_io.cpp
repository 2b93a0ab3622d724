#include <doctest.h>

#include <fstream>
#include <sstream>

#include "admissions/csv.hpp"
#include "admissions/io.hpp"
#include "admissions/runner.hpp"
#include "support.hpp"

using namespace admissions;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("csv parsing") {
  const auto t = csv::parse("a,b,c\r\n1,\"x, \"\"y\"\"\",3\n\n4,\"multi\nline\",\n", "t.csv");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "x, \"y\"", "3"});
  CHECK(t.rows[1] == std::vector<std::string>{"4", "multi\nline", ""});
  CHECK(t.line_numbers == std::vector<std::size_t>{2, 4});
  CHECK(t.column("c") == 2);
  CHECK(t.column("z") == std::string::npos);

  CHECK_THROWS_WITH_AS(csv::parse("a,b\n1\n", "t.csv"), doctest::Contains("t.csv line 2"), Error);
  CHECK_THROWS_WITH_AS(csv::parse("a\n\"open\n", "t.csv"), doctest::Contains("unterminated"), Error);
  CHECK_THROWS_WITH_AS(csv::parse("a\nx\"y\n", "t.csv"), doctest::Contains("stray quote"), Error);
  CHECK_THROWS_WITH_AS(csv::parse("", "t.csv"), doctest::Contains("missing header"), Error);
}

TEST_CASE("csv values") {
  CHECK(csv::number(1.0 / 3.0) == "0.333333");
  CHECK(csv::number(-0.0000001) == "0.000000");
  CHECK(csv::number(47) == "47.000000");
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::parse_double("2.5", "w") == 2.5);
  CHECK(csv::parse_integer("-12", "w") == -12);
  CHECK(csv::parse_bool("true", "w"));
  CHECK_FALSE(csv::parse_bool("0", "w"));
  CHECK_THROWS_WITH_AS(csv::parse_double("2.5x", "here"), doctest::Contains("here"), Error);
  CHECK_THROWS_AS(csv::parse_double("", "w"), Error);
  CHECK_THROWS_AS(csv::parse_integer("1.5", "w"), Error);
  CHECK_THROWS_AS(csv::parse_bool("yes", "w"), Error);

  std::ostringstream out;
  csv::Writer w(out);
  w.row({"a", "b,c", ""});
  CHECK(out.str() == "a,\"b,c\",\n");
}

TEST_CASE("panel round trip") {
  const Panel p = generate_panel(testing::small_synth(51, 300));
  const auto dir = testing::scratch_dir("roundtrip");
  io::save_panel(p, dir);
  const Panel back = io::load_panel(dir);
  CHECK(back == p);

  SUBCASE("hand-built panel with awkward names") {
    Panel q = testing::small_panel();
    q.programs.push_back(testing::program("Gamma, \"Quoted\"", "Multi\nLine", "health", 2));
    q.applications.push_back(testing::app("a4", q.programs.back().key, 2011, 2));
    q.observed_assignment = Assignment{{{"a1", "alpha::eng"}, {"a4", q.programs.back().key}},
                                       {{"a1", true}, {"a4", false}}};
    q = validate_panel(q);
    const auto d2 = testing::scratch_dir("roundtrip2");
    io::save_panel(q, d2);
    CHECK(io::load_panel(d2) == q);

    // no observed assignment: file removed and nothing loaded
    q.observed_assignment.reset();
    io::save_panel(q, d2);
    CHECK_FALSE(fs::exists(d2 / "observed_assignment.csv"));
    CHECK(io::load_panel(d2) == q);
  }
}

TEST_CASE("load errors") {
  const auto dir = testing::scratch_dir("errors");
  io::save_panel(testing::small_panel(), dir);
  const std::string applications = slurp(dir / "applications.csv");

  SUBCASE("unknown header") {
    std::string text = applications;
    text.replace(text.find("other_points"), 12, "bonus_guess");
    spit(dir / "applications.csv", text);
    try {
      io::load_panel(dir);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == "ParseError");
      CHECK(std::string(e.what()).find("bonus_guess") != std::string::npos);
    }
  }
  SUBCASE("dangling program reference") {
    spit(dir / "applications.csv", applications + "2011,a4,Nowhere,Program,2,0,,0\n");
    try {
      io::load_panel(dir);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].code == "DanglingForeignKey");
      CHECK(e.violations()[0].location == "applications.csv line 12");
    }
  }
  SUBCASE("cell-level problems name row and column") {
    spit(dir / "applications.csv", applications + "2011,a4,Beta,Eng,two,0,,0\n");
    try {
      io::load_panel(dir);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 12 column 'listed_rank'") != std::string::npos);
    }
    spit(dir / "applications.csv", applications + "2011,a4,Beta,Eng,2,0,15,0\n");
    CHECK(error_code_of([&] { io::load_panel(dir); }) == "ParseError");
  }
  SUBCASE("missing column") {
    spit(dir / "programs.csv", "polytechnic_name,program_name,field\nAlpha,Eng,engineering\n");
    CHECK(error_code_of([&] { io::load_panel(dir); }) == "ParseError");
  }
  SUBCASE("invariants are delegated") {
    spit(dir / "applications.csv", applications + "2011,a4,Beta,Eng,3,0,,0\n");
    CHECK(error_code_of([&] { io::load_panel(dir); }) == "ValidationError");
  }
  SUBCASE("missing file") {
    fs::remove(dir / "fields.csv");
    CHECK(error_code_of([&] { io::load_panel(dir); }) == "ParseError");
  }
}

TEST_CASE("assignment files") {
  const Assignment a{{{"b", "p::x"}, {"c", "p::y"}}, {{"b", true}, {"c", false}}};
  std::ostringstream out;
  io::write_assignment(out, a, {"a", "b", "c"});
  CHECK(out.str() == "applicant_id,program_key,accepted\na,,\nb,p::x,1\nc,p::y,0\n");
  const auto dir = testing::scratch_dir("assignment");
  spit(dir / "a.csv", out.str());
  CHECK(io::read_assignment(dir / "a.csv") == a);
}

TEST_CASE("report layouts") {
  std::ostringstream t1;
  io::write_weight_report(t1, WeightReport{0.25, 0.5, 0.125, 0.125});
  CHECK(t1.str() ==
        "component,effective_weight\nmatriculation_gpa,0.250000\nentrance_exam,0.500000\n"
        "program_listed_first,0.125000\nresidual,0.125000\n");

  std::ostringstream t4;
  ScenarioResult r;
  r.id = ScenarioId::S2;
  r.applications_per_applicant = 3.72;
  r.diff.differently_assigned_share = 0.1;
  r.rank_improvement = 1.45;
  io::write_scenario_table(t4, {r});
  CHECK(t4.str() == "scenario,apps_per_applicant,pct_differently_assigned,rank_improvement\n"
                    "S2,3.720000,10.000000,1.450000\n");

  std::ostringstream f;
  Histogram100 h;
  h.bins[3] = 4;
  h.uniform_level = 2.5;
  Histogram100 change;
  change.bins[3] = -1;
  io::write_figure(f, h, {{"2", change}});
  const std::string fig = f.str();
  CHECK(fig.rfind("panel,bin,value\n", 0) == 0);
  CHECK(fig.find("1,3,4\n") != std::string::npos);
  CHECK(fig.find("uniform,0,2.500000\n") != std::string::npos);
  CHECK(fig.find("2,3,-1\n") != std::string::npos);
  CHECK(std::count(fig.begin(), fig.end(), '\n') == 1 + 300);
}

TEST_CASE("run configuration") {
  RunConfig c;
  CHECK(error_code_of([&] { c.validate(); }) == "InvalidRunConfig");
  c.synth = "default";
  c.input_dir = "somewhere";
  CHECK(error_code_of([&] { c.validate(); }) == "InvalidRunConfig");
  c.input_dir.reset();
  CHECK_NOTHROW(c.validate());
  CHECK(parse_report("figure1") == Report::figure1);
  CHECK(to_string(Report::table5) == "table5");
  CHECK(error_code_of([] { parse_report("table9"); }) == "UnknownReport");
}

TEST_CASE("runner outputs") {
  const auto root = testing::scratch_dir("runner");
  const auto cfg_path = root / "synth.json";
  // three programs per field keeps every table 5 column full rank
  SynthConfig sc = testing::small_synth(61, 1200);
  sc.n_programs = 24;
  spit(cfg_path, nlohmann::json(sc).dump(2));

  RunConfig c;
  c.synth = cfg_path.string();
  std::ostringstream log;

  SUBCASE("baseline only") {
    c.out_dir = root / "s1";
    c.scenarios = {ScenarioId::S1};
    const auto summary = run(c, log);
    CHECK(fs::exists(c.out_dir / "assignment_S1.csv"));
    CHECK_FALSE(fs::exists(c.out_dir / "assignment_S2.csv"));
    CHECK(slurp(c.out_dir / "table4.csv").find("S2") == std::string::npos);
    CHECK(slurp(c.out_dir / "figure1.csv").find("\n2,") == std::string::npos);
    CHECK(summary.replication_rate == 1.0);
  }
  SUBCASE("report selection") {
    c.out_dir = root / "sel";
    c.reports = std::set<Report>{Report::table1};
    const auto summary = run(c, log);
    REQUIRE(summary.written.size() == 1);
    CHECK(summary.written[0].filename() == "table1.csv");
  }
  SUBCASE("same config twice gives identical bytes") {
    c.out_dir = root / "first";
    const auto a = run(c, log);
    c.out_dir = root / "second";
    const auto b = run(c, log);
    REQUIRE(a.written.size() == b.written.size());
    CHECK(a.written.size() == 14);
    for (std::size_t i = 0; i < a.written.size(); ++i) {
      CHECK(a.written[i].filename() == b.written[i].filename());
      CHECK(slurp(a.written[i]) == slurp(b.written[i]));
    }
  }
  SUBCASE("input directory matches the synthetic run") {
    c.out_dir = root / "synthetic";
    run(c, log);
    io::save_panel(generate_panel(sc), root / "panel");
    RunConfig from_files;
    from_files.input_dir = root / "panel";
    from_files.out_dir = root / "from_files";
    const auto s = run(from_files, log);
    CHECK_FALSE(fs::exists(from_files.out_dir / "calibration.csv"));
    for (const auto& path : s.written) CHECK(slurp(path) == slurp(c.out_dir / path.filename()));
  }
  SUBCASE("seed override changes the panel") {
    c.out_dir = root / "seed_a";
    run(c, log);
    c.seed = 62;
    c.out_dir = root / "seed_b";
    run(c, log);
    CHECK(slurp(root / "seed_a" / "assignment_S1.csv") != slurp(root / "seed_b" / "assignment_S1.csv"));
  }
  SUBCASE("failure removes partial output") {
    c.out_dir = root / "partial";
    fs::create_directories(c.out_dir / "table4.csv");  // blocks the fourth report
    CHECK(error_code_of([&] { run(c, log); }) == "IoError");
    CHECK_FALSE(fs::exists(c.out_dir / "table1.csv"));
    CHECK_FALSE(fs::exists(c.out_dir / "table3.csv"));
    CHECK(fs::exists(c.out_dir));
  }
  SUBCASE("fresh output directory is removed on failure") {
    RunConfig bad;
    bad.input_dir = root / "missing";
    bad.out_dir = root / "never";
    CHECK(error_code_of([&] { run(bad, log); }) == "ParseError");
    CHECK_FALSE(fs::exists(bad.out_dir));
  }
  SUBCASE("table5 needs an observed assignment") {
    Panel p = generate_panel(sc);
    p.observed_assignment.reset();
    io::save_panel(p, root / "bare");
    RunConfig r;
    r.input_dir = root / "bare";
    r.out_dir = root / "bare_out";
    run(r, log);
    CHECK_FALSE(fs::exists(r.out_dir / "table5.csv"));
    r.reports = std::set<Report>{Report::table5};
    r.out_dir = root / "bare_out2";
    CHECK(error_code_of([&] { run(r, log); }) == "NoObservedAssignment");
  }
}

}  // TEST_SUITE
