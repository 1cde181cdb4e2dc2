#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bell/simulate.hpp"

namespace bell {

// How repeated (alpha, beta) rows in a counts file are handled.
enum class DuplicatePolicy { Merge, Strict };

struct Dataset {
  std::vector<CountsRecord> records;
  std::map<std::string, std::string> metadata;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Counts CSV: header alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm, one row per
// setting pair, degrees for angles, non-negative integers for counts, LF
// line endings. Path "-" reads stdin / writes stdout.
Dataset load_dataset(const std::string& path,
                     DuplicatePolicy policy = DuplicatePolicy::Merge);
Dataset parse_counts_csv(std::istream& in, DuplicatePolicy policy,
                         const std::string& source);
std::string counts_csv(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::string& path);

// Setting-pair source for `simulate`: "builtin:chsh" (the four CHSH pairs at
// 0/45 x 22.5/67.5 degrees), "builtin:grid16" (the 4x4 grid over
// {0, 22.5, 45, 67.5} degrees on both sides), or a CSV file with header
// alpha_deg,beta_deg.
std::vector<SettingPair> load_settings(const std::string& spec);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace bell
