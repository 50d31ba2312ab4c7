#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "netdiff/calendar.hpp"
#include "netdiff/csv.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/rng.hpp"

using netdiff::data::Date;
using netdiff::data::LocalTime;

TEST_CASE("weekday agrees with known dates") {
  // 1970-01-01 was a Thursday, 2018-01-01 a Monday, 2018-12-30 a Sunday.
  CHECK(Date{1970, 1, 1}.weekday() == 3);
  CHECK(Date{2018, 1, 1}.weekday() == 0);
  CHECK(Date{2018, 12, 30}.weekday() == 6);
  CHECK(Date{2000, 2, 29}.weekday() == 1);  // leap-day Tuesday
}

TEST_CASE("days_since_epoch matches known anchors and is consecutive") {
  CHECK(Date{1970, 1, 1}.days_since_epoch() == 0);
  CHECK(Date{1970, 1, 2}.days_since_epoch() == 1);
  CHECK(Date{2018, 1, 1}.days_since_epoch() == 17532);
  CHECK(Date{2000, 1, 1}.days_since_epoch() == 10957);
  Date d{2018, 2, 26};
  for (int i = 0; i < 400; ++i) {  // spans a leap boundary (2020-02-29)
    Date n = d.next();
    CHECK(n.days_since_epoch() == d.days_since_epoch() + 1);
    d = n;
  }
}

TEST_CASE("date validity covers leap rules and range limits") {
  CHECK(Date{2020, 2, 29}.valid());
  CHECK(!Date{2018, 2, 29}.valid());
  CHECK(Date{2000, 2, 29}.valid());   // divisible by 400
  CHECK(!Date{1900, 2, 29}.valid());  // century, not by 400
  CHECK(!Date{2018, 0, 1}.valid());
  CHECK(!Date{2018, 13, 1}.valid());
  CHECK(!Date{2018, 4, 31}.valid());
  CHECK(Date{2018, 4, 30}.valid());
}

TEST_CASE("date ordering and iso round trip") {
  CHECK(Date{2018, 3, 1} < Date{2018, 3, 2});
  CHECK(Date{2018, 3, 1} < Date{2019, 1, 1});
  CHECK(Date{2018, 3, 1}.iso() == "2018-03-01");
  CHECK(Date::parse("2018-03-01") == Date{2018, 3, 1});
  CHECK(Date::parse(Date{1999, 12, 31}.iso()) == Date{1999, 12, 31});
  CHECK_THROWS_AS(Date::parse("2018-02-29"), netdiff::ParseError);
  CHECK_THROWS_AS(Date::parse("2018/03/01"), netdiff::ParseError);
  CHECK_THROWS_AS(Date::parse("notadate"), netdiff::ParseError);
}

TEST_CASE("month and year boundaries advance correctly") {
  CHECK(Date{2018, 1, 31}.next() == Date{2018, 2, 1});
  CHECK(Date{2018, 12, 31}.next() == Date{2019, 1, 1});
  CHECK(Date{2020, 2, 28}.next() == Date{2020, 2, 29});
  CHECK(Date{2020, 2, 29}.next() == Date{2020, 3, 1});
}

TEST_CASE("local timestamps parse and print minutes since midnight") {
  LocalTime t = LocalTime::parse("2018-03-01T13:45");
  CHECK(t.date == Date{2018, 3, 1});
  CHECK(t.minutes == 13 * 60 + 45);
  CHECK(t.iso() == "2018-03-01T13:45");
  CHECK(LocalTime::parse("2018-03-01T00:00").minutes == 0);
  CHECK(LocalTime::parse("2018-03-01T23:59").minutes == 1439);
  // space separator is tolerated on input, T is canonical on output
  CHECK(LocalTime::parse("2018-03-01 13:45").minutes == 13 * 60 + 45);
  CHECK_THROWS_AS(LocalTime::parse("2018-03-01T24:00"), netdiff::ParseError);
  CHECK_THROWS_AS(LocalTime::parse("2018-03-01X13:45"), netdiff::ParseError);
}

TEST_CASE("csv line splitting keeps empty fields") {
  using netdiff::io::split_csv_line;
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(split_csv_line(",") == std::vector<std::string>{"", ""});
  CHECK(split_csv_line("x") == std::vector<std::string>{"x"});
  // windows line endings are tolerated
  CHECK(split_csv_line("a,b\r") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("numeric fields parse with context in errors") {
  using netdiff::io::parse_field;
  using netdiff::io::parse_required;
  CHECK(parse_field("1.5", "x") == 1.5);
  CHECK(parse_field("-2e3", "x") == -2000.0);
  CHECK(!parse_field("", "x").has_value());
  CHECK_THROWS_AS(parse_field("abc", "x"), netdiff::ParseError);
  CHECK_THROWS_AS(parse_field("1.5x", "x"), netdiff::ParseError);
  CHECK_THROWS_AS(parse_required("", "col temp_c"), netdiff::ParseError);
  try {
    parse_required("oops", "col temp_c line 7");
    FAIL("expected throw");
  } catch (const netdiff::ParseError& e) {
    CHECK(std::string(e.what()).find("temp_c") != std::string::npos);
  }
}

TEST_CASE("doubles survive a text round trip bit exactly") {
  using netdiff::io::format_double;
  netdiff::numerics::Rng rng(123, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");  // shortest representation
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("csv files round trip through the reader and writer") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "netdiff_csv_test.csv";
  {
    netdiff::io::CsvWriter w(path.string());
    w.raw_line("h1,h2,h3");
    w.row({"1", "", "x y"});
    w.row({"-2.5", "7", ""});
  }
  netdiff::io::CsvReader r(path.string());
  std::vector<std::string> f;
  REQUIRE(r.next_row(f));
  CHECK(f == std::vector<std::string>{"h1", "h2", "h3"});
  CHECK(r.line_number() == 1);
  REQUIRE(r.next_row(f));
  CHECK(f == std::vector<std::string>{"1", "", "x y"});
  REQUIRE(r.next_row(f));
  CHECK(f == std::vector<std::string>{"-2.5", "7", ""});
  CHECK(!r.next_row(f));
  CHECK_THROWS_AS(netdiff::io::CsvReader("/no/such/file.csv"), netdiff::IoError);
}
