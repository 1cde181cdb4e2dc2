#include <cstdio>
#include <doctest.h>
#include <fstream>
#include <sstream>

#include "bell/dataset.hpp"
#include "bell/simulate.hpp"

using namespace bell;

TEST_CASE("counts CSV parsing") {
  std::istringstream in(
      "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n"
      "0,0,4980,12,8,5000\n");
  const Dataset d = parse_counts_csv(in, DuplicatePolicy::Merge, "test");
  REQUIRE(d.records.size() == 1);
  CHECK(d.records[0].settings.alpha_deg == 0.0);
  CHECK(d.records[0].n_pp == 4980);
  CHECK(d.records[0].total() == 10000);
}

TEST_CASE("parse errors carry line numbers") {
  {
    std::istringstream in(
        "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n"
        "0,0,10,-1,0,0\n");
    try {
      parse_counts_csv(in, DuplicatePolicy::Merge, "test");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
  }
  {
    std::istringstream in(
        "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n"
        "0,0,10,1,0\n");
    try {
      parse_counts_csv(in, DuplicatePolicy::Merge, "test");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  {
    std::istringstream in(
        "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n"
        "0,x,1,1,1,1\n");
    CHECK_THROWS_AS(parse_counts_csv(in, DuplicatePolicy::Merge, "test"),
                    ParseError);
  }
  {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_counts_csv(empty, DuplicatePolicy::Merge, "test"),
                    ParseError);
  }
  {
    std::istringstream header_only("alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n");
    CHECK_THROWS_AS(
        parse_counts_csv(header_only, DuplicatePolicy::Merge, "test"),
        ParseError);
  }
  {
    std::istringstream bad_header("alpha,beta,a,b,c,d\n1,2,3,4,5,6\n");
    CHECK_THROWS_AS(
        parse_counts_csv(bad_header, DuplicatePolicy::Merge, "test"),
        ParseError);
  }
}

TEST_CASE("duplicate angles merge by sum, or reject in strict mode") {
  const std::string text =
      "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n"
      "0,22.5,10,20,30,40\n"
      "0,22.5,1,2,3,4\n";
  std::istringstream merged_in(text);
  const Dataset merged =
      parse_counts_csv(merged_in, DuplicatePolicy::Merge, "test");
  REQUIRE(merged.records.size() == 1);
  CHECK(merged.records[0].n_pp == 11);
  CHECK(merged.records[0].n_mm == 44);

  std::istringstream strict_in(text);
  CHECK_THROWS_AS(parse_counts_csv(strict_in, DuplicatePolicy::Strict, "test"),
                  ParseError);
}

TEST_CASE("CRLF input parses; output always uses LF") {
  std::istringstream in(
      "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\r\n"
      "0,30,1,2,3,4\r\n");
  const Dataset d = parse_counts_csv(in, DuplicatePolicy::Merge, "test");
  REQUIRE(d.records.size() == 1);
  CHECK(d.records[0].settings.beta_deg == 30.0);
  CHECK(counts_csv(d).find('\r') == std::string::npos);
}

TEST_CASE("write -> read -> write is byte-identical") {
  ExperimentPlan plan;
  plan.setting_pairs = {{0.0, 22.5}, {30.0, 67.5}, {11.25, 0.1}};
  plan.shots_per_pair = 1000;
  plan.model = StateModel::max_entangled(0.9);
  plan.seed = 500;
  Dataset first;
  first.records = run_experiment(plan).records;

  const std::string text1 = counts_csv(first);
  std::istringstream in1(text1);
  const Dataset loaded = parse_counts_csv(in1, DuplicatePolicy::Merge, "t");
  const std::string text2 = counts_csv(loaded);
  CHECK(text1 == text2);

  std::istringstream in2(text2);
  const Dataset again = parse_counts_csv(in2, DuplicatePolicy::Merge, "t");
  CHECK(counts_csv(again) == text2);
  CHECK(again.records == loaded.records);
}

TEST_CASE("builtin setting lists") {
  const auto chsh = load_settings("builtin:chsh");
  REQUIRE(chsh.size() == 4);
  CHECK(chsh[0].alpha_deg == 0.0);
  CHECK(chsh[0].beta_deg == 22.5);
  CHECK(chsh[3].alpha_deg == 45.0);
  CHECK(chsh[3].beta_deg == 67.5);

  const auto grid = load_settings("builtin:grid16");
  CHECK(grid.size() == 16);

  CHECK_THROWS(load_settings("builtin:bogus"));
  CHECK_THROWS(load_settings("/nonexistent/path.csv"));
}

TEST_CASE("settings load from a CSV file") {
  const std::string path = "bell_settings_test.csv";
  {
    std::ofstream out(path);
    out << "alpha_deg,beta_deg\n0,11.25\n30,67.5\n";
  }
  const auto pairs = load_settings(path);
  std::remove(path.c_str());
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].beta_deg == 11.25);
  CHECK(pairs[1].alpha_deg == 30.0);
}

TEST_CASE("format_double survives parse round trips") {
  for (double x : {0.0, 22.5, -3.75, 0.1, 1.0 / 3.0, 1e-300, 12345.6789}) {
    const std::string text = format_double(x);
    CHECK(std::stod(text) == x);
  }
}
