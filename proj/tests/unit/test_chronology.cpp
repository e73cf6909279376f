#include <doctest.h>

#include <cmath>

#include "petrank/chronology.hpp"
#include "petrank/rng.hpp"
#include "support.hpp"

using namespace petrank;
using namespace std::chrono;

namespace {

Date ymd(int y, unsigned m, unsigned d) { return year{y} / month{m} / day{d}; }

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

const char* kTenDays =
    "The petition was filed on 1 January 2008 before this Court. The matter was taken up and "
    "the hearing scheduled on 11 January 2008.";

}  // namespace

TEST_CASE("find_dates recognizes the supported forms") {
  const std::string text = "filed on 12 March 2008";
  const auto m = find_dates(text);
  REQUIRE(m.size() == 1);
  CHECK(m[0].date == ymd(2008, 3, 12));
  CHECK(m[0].offset == text.find("12"));

  CHECK(find_dates("on 31/02/2008").empty());
  CHECK(find_dates("month 13/13/2008").empty());

  const auto two = find_dates("2008-03-12 and March 14, 2008");
  REQUIRE(two.size() == 2);
  CHECK(two[0].date == ymd(2008, 3, 12));
  CHECK(two[1].date == ymd(2008, 3, 14));
  CHECK(two[0].offset < two[1].offset);

  const auto more = find_dates("on 3rd of sept. 2010, then 5-6-2011 and 29 FEB 2012");
  REQUIRE(more.size() == 3);
  CHECK(more[0].date == ymd(2010, 9, 3));
  CHECK(more[1].date == ymd(2011, 6, 5));
  CHECK(more[2].date == ymd(2012, 2, 29));

  CHECK(find_dates("29 February 2011").empty());
  CHECK(find_dates("12/03/08").empty());
}

TEST_CASE("rank scores") {
  CHECK(rank_score_log(0) == 0.0);
  CHECK(rank_score_log(10) == doctest::Approx(2.397895).epsilon(1e-6));
  CHECK(rank_score_inverse_square(0) == 1.0);
  CHECK(rank_score_inverse_square(1) == 1.0);
  CHECK(rank_score_inverse_square(10) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(std::abs(rank_score_inverse_square(9) - 1.0 / 81.0) <= 1e-12);
}

TEST_CASE("rank scores are strictly monotone for gap >= 1") {
  for (std::int64_t g = 1; g < 2000; ++g) {
    CHECK(rank_score_log(g + 1) > rank_score_log(g));
    CHECK(rank_score_inverse_square(g + 1) < rank_score_inverse_square(g));
    CHECK(rank_score_inverse_square(g) > 0.0);
    CHECK(rank_score_inverse_square(g) <= 1.0);
  }
}

TEST_CASE("extract_chronology on the ten-day example") {
  const auto f = extract_chronology(kTenDays, AnchorConfig{});
  CHECK(f.acceptance_date == ymd(2008, 1, 1));
  CHECK(f.proceeding_date == ymd(2008, 1, 11));
  CHECK(f.gap_days == 10);
  CHECK(f.rank_score_log == doctest::Approx(std::log(11.0)).epsilon(1e-15));
  CHECK(f.rank_score_inverse_square == doctest::Approx(0.01).epsilon(1e-15));
  CHECK_FALSE(f.extraction_trace.empty());
}

TEST_CASE("extract_chronology with equal dates gives gap 0") {
  const auto f = extract_chronology(
      "Admitted on 5 May 2015. Heard on 5 May 2015 and disposed of.", AnchorConfig{});
  CHECK(f.gap_days == 0);
  CHECK(f.rank_score_log == 0.0);
  CHECK(f.rank_score_inverse_square == 1.0);
}

TEST_CASE("extract_chronology errors carry the trace") {
  CHECK(code_of([] {
          extract_chronology("The hearing was on 3 March 2009.", AnchorConfig{});
        }) == "NoAcceptanceDate");
  try {
    extract_chronology("Filed on 3 March 2009. Nothing else happened.", AnchorConfig{});
    FAIL("expected NoProceedingDate");
  } catch (const ChronologyError& e) {
    CHECK(e.code() == "NoProceedingDate");
    REQUIRE(e.trace().size() == 1);
    CHECK(e.trace()[0].role == AnchorRole::acceptance);
  }
}

TEST_CASE("dates outside the window or before acceptance are not used") {
  AnchorConfig cfg;
  cfg.window_chars = 20;
  const std::string far = "Filed " + std::string(40, 'x') + " 1 June 2010. Heard on 9 June 2010.";
  CHECK(code_of([&] { extract_chronology(far, cfg); }) == "NoAcceptanceDate");

  // A proceeding date earlier than the acceptance date is skipped. The
  // window is narrowed so "Listed" does not also reach the filing date.
  AnchorConfig narrow;
  narrow.window_chars = 30;
  const auto f = extract_chronology(
      "Listed on 1 May 2010 in the lower court. Filed on 1 June 2010. Heard on 20 June 2010.",
      narrow);
  CHECK(f.acceptance_date == ymd(2010, 6, 1));
  CHECK(f.proceeding_date == ymd(2010, 6, 20));
  CHECK(f.gap_days == 19);
}

TEST_CASE("gap symmetry") {
  CHECK(gap_days_between(ymd(2008, 1, 1), ymd(2008, 1, 11)) == 10);
  CHECK(gap_days_between(ymd(2008, 1, 11), ymd(2008, 1, 1)) == 10);
  CHECK(gap_days_between(ymd(2008, 2, 28), ymd(2008, 3, 1)) == 2);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const sys_days a = sys_days{ymd(2000, 1, 1)} + days{static_cast<long>(uniform_index(rng, 9000))};
    const sys_days b = sys_days{ymd(2000, 1, 1)} + days{static_cast<long>(uniform_index(rng, 9000))};
    CHECK(gap_days_between(Date{a}, Date{b}) == gap_days_between(Date{b}, Date{a}));
    CHECK(gap_days_between(Date{a}, Date{b}) == std::abs((b - a).count()));
  }
}

TEST_CASE("chronologize_corpus bookkeeping") {
  Corpus c;
  c.records = {{kTenDays, 1, Split::train, "train", "2008_1.txt"},
               {"No dates at all in this one.", 1, Split::train, "train", "2008_2.txt"},
               {kTenDays, 1, Split::test, "test", "2008_3.txt"}};
  const auto t = chronologize_corpus(c, AnchorConfig{});
  CHECK(t.facts.size() == 2);
  REQUIRE(t.exclusions.size() == 1);
  CHECK(t.exclusions[0].name == "2008_2.txt");
  CHECK(t.exclusions[0].code == "NoAcceptanceDate");
  for (const auto& [name, f] : t.facts) CHECK(f.gap_days == 10);

  const auto empty = chronologize_corpus(Corpus{}, AnchorConfig{});
  CHECK(empty.facts.empty());
  CHECK(empty.exclusions.empty());
}

TEST_CASE("chronology CSV round-trip") {
  Corpus c;
  c.records = {{kTenDays, 1, Split::train, "train", "2008_1.txt"},
               {"Filed on 2 Feb 2011; hearing on 1 Mar 2012.", 1, Split::test, "test",
                "2011_2.txt"}};
  const auto t = chronologize_corpus(c, AnchorConfig{});
  testsupport::TempDir dir;
  write_chronology_csv(t, dir / "chron.csv");
  const auto back = read_chronology_csv(dir / "chron.csv");
  REQUIRE(back.size() == 2);
  for (const auto& [name, f] : t.facts) {
    const auto& g = back.at(name);
    CHECK(g.acceptance_date == f.acceptance_date);
    CHECK(g.proceeding_date == f.proceeding_date);
    CHECK(g.gap_days == f.gap_days);
    CHECK(g.rank_score_log == f.rank_score_log);
    CHECK(g.rank_score_inverse_square == f.rank_score_inverse_square);
  }
}

TEST_CASE("anchor config validation") {
  AnchorConfig cfg;
  cfg.acceptance_keywords.clear();
  CHECK(code_of([&] { cfg.check(); }) == "ConfigError");
  AnchorConfig zero;
  zero.window_chars = 0;
  CHECK(code_of([&] { zero.check(); }) == "ConfigError");
}
