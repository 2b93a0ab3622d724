#include <doctest.h>

#include "admissions/core_model.hpp"
#include "admissions/synth.hpp"
#include "support.hpp"

using namespace admissions;
using testing::app;

namespace {

std::string violation_codes(const ValidationError& e) {
  std::string out;
  for (const auto& v : e.violations()) out += v.code + " ";
  return out;
}

template <typename F>
ValidationError expect_invalid(F&& make) {
  try {
    validate_panel(make());
  } catch (const ValidationError& e) {
    return e;
  }
  FAIL("panel unexpectedly valid");
  return ValidationError({});
}

}  // namespace

TEST_SUITE("core_model") {

TEST_CASE("canonical program keys") {
  CHECK(canonical_program_key("Metropolia", "Nursing") == "metropolia::nursing");
  CHECK(canonical_program_key("Metropolia ", "nursing") == "metropolia::nursing");
  CHECK(canonical_program_key(" A ", " B ") == canonical_program_key("A", "B"));
  CHECK(canonical_program_key("\tHÄMEEN AMK\n", "Sosiaaliala") == "hämeen amk::sosiaaliala");
  // full Unicode folding, not just ASCII lowering
  CHECK(canonical_program_key("STRASSE", "x") == canonical_program_key("straße", "X"));

  SUBCASE("separator cannot be forged") {
    CHECK(canonical_program_key("a:", ":b") != canonical_program_key("a", "::b"));
    CHECK(canonical_program_key("a::b", "c") != canonical_program_key("a", "b::c"));
    CHECK(canonical_program_key("a\\", "b") != canonical_program_key("a", "\\b"));
  }
  SUBCASE("empty names") {
    CHECK_THROWS_WITH_AS(canonical_program_key("", "x"), doctest::Contains("EmptyName"), Error);
    CHECK_THROWS_WITH_AS(canonical_program_key("x", "   "), doctest::Contains("EmptyName"), Error);
  }
  SUBCASE("normalization is idempotent") {
    for (std::string s : {" Mixed Case ", "ÅBO", "x:y", "tab\there"}) {
      const auto key = canonical_program_key(s, s);
      CHECK(canonical_program_key(s, s) == key);
    }
  }
}

TEST_CASE("empty panel is valid") {
  const Panel p = validate_panel(Panel{});
  CHECK(p.applicants.empty());
  CHECK(p.programs.empty());
}

TEST_CASE("small panel validates and sorts") {
  Panel raw = testing::small_panel();
  std::reverse(raw.applications.begin(), raw.applications.end());
  std::reverse(raw.applicants.begin(), raw.applicants.end());
  const Panel p = validate_panel(raw);
  CHECK(p == testing::small_panel());
  CHECK(validate_panel(p) == p);
  CHECK(p.years() == std::vector<int>{2011, 2012, 2013});
  CHECK(p.base_applicants() == std::vector<std::string>{"a1", "a2", "a3", "a4"});
  CHECK(p.applications_in_year(2012).size() == 2);
  CHECK(p.find_program("beta::eng")->field == "engineering");
  CHECK(p.find_applicant("zz") == nullptr);
  CHECK_THROWS_AS(p.program("nope::nope"), Error);
  CHECK(p.quotas().at("alpha::nursing") == 1);
}

TEST_CASE("rank gaps are reported") {
  auto e = expect_invalid([] {
    Panel p = testing::small_panel();
    p.applications.push_back(app("a4", "beta::eng", 2011, 3));
    return p;
  });
  CHECK_MESSAGE(e.has("RankGap"), violation_codes(e));
}

TEST_CASE("all violations are collected") {
  auto e = expect_invalid([] {
    Panel p = testing::small_panel();
    p.applicants.push_back(p.applicants.front());
    p.programs[0].quota = -1;
    p.applications.push_back(app("ghost", "alpha::eng", 2011, 1));
    p.applications.push_back(app("a4", "nowhere::x", 2011, 2));
    p.applications.push_back(app("a4", "alpha::eng", 2015, 1));
    p.applicants[1].grades["math"] = -1;
    return p;
  });
  for (const char* code : {"DuplicateId", "QuotaNegative", "DanglingForeignKey", "YearOutOfRange",
                           "NegativeGrade"}) {
    CHECK_MESSAGE(e.has(code), code, " missing from ", violation_codes(e));
  }
  for (const auto& v : e.violations()) CHECK_FALSE(v.location.empty());
}

TEST_CASE("application list rules") {
  SUBCASE("duplicate program in one year") {
    auto e = expect_invalid([] {
      Panel p = testing::small_panel();
      p.applications.push_back(app("a4", "alpha::nursing", 2011, 2));
      return p;
    });
    CHECK(e.has("DuplicateApplication"));
  }
  SUBCASE("more than four programs") {
    auto e = expect_invalid([] {
      Panel p = testing::small_panel();
      for (int i = 0; i < 3; ++i) p.programs.push_back(testing::program("Gamma", "P" + std::to_string(i), "health", 1));
      p.applications.push_back(app("a4", "alpha::eng", 2011, 2));
      p.applications.push_back(app("a4", "gamma::p0", 2011, 3));
      p.applications.push_back(app("a4", "gamma::p1", 2011, 4));
      p.applications.push_back(app("a4", "gamma::p2", 2011, 5));
      return p;
    });
    CHECK(e.has("ListTooLong"));
  }
  SUBCASE("negative points") {
    auto e = expect_invalid([] {
      Panel p = testing::small_panel();
      p.applications[0].exam_score = -3.0;
      return p;
    });
    CHECK(e.has("NegativePoints"));
  }
  SUBCASE("key must be canonical") {
    auto e = expect_invalid([] {
      Panel p = testing::small_panel();
      p.programs[0].key = "Alpha::Eng";
      return p;
    });
    CHECK(e.has("NonCanonicalKey"));
  }
}

TEST_CASE("observed assignment invariants") {
  SUBCASE("valid") {
    Panel p = testing::small_panel();
    p.observed_assignment = Assignment{{{"a1", "alpha::eng"}}, {{"a1", true}}};
    CHECK_NOTHROW(validate_panel(p));
  }
  SUBCASE("unlisted seat, quota and acceptance flag") {
    auto e = expect_invalid([] {
      Panel p = testing::small_panel();
      p.observed_assignment = Assignment{
          {{"a1", "alpha::eng"}, {"a2", "alpha::eng"}, {"a4", "beta::eng"}},
          {{"a3", true}}};
      return p;
    });
    CHECK(e.has("QuotaExceeded"));
    CHECK(e.has("UnlistedSeat"));
    CHECK(e.has("AcceptedWithoutSeat"));
  }
  SUBCASE("seat from a later year does not count") {
    auto e = expect_invalid([] {
      Panel p = testing::small_panel();
      p.observed_assignment = Assignment{{{"a2", "beta::eng"}}, {}};
      return p;
    });
    CHECK(e.has("UnlistedSeat"));
  }
}

TEST_CASE("generated panels pass validation") {
  SynthConfig c = testing::small_synth(3, 50);
  c.n_programs = 8;
  const Panel p = generate_panel(c);
  CHECK(p.applicants.size() == 50);
  CHECK(validate_panel(p) == p);
  CHECK(assignment_violations(*p.observed_assignment, p.base_applications(), p.quotas()).empty());
}

}  // TEST_SUITE
