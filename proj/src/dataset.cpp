#include "bell/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

namespace bell {

namespace {

constexpr const char* kCountsHeader = "alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_angle(const std::string& field, int line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParseError(line, "line " + std::to_string(line) +
                               ": malformed angle '" + field + "'");
  }
  return value;
}

std::uint64_t parse_count(const std::string& field, int line) {
  if (!field.empty() && field[0] == '-') {
    throw ParseError(line, "line " + std::to_string(line) +
                               ": negative count '" + field + "'");
  }
  std::uint64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(line, "line " + std::to_string(line) +
                               ": malformed count '" + field + "'");
  }
  return value;
}

// Reads a line and strips one trailing '\r' so CRLF input still parses.
bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Dataset parse_counts_csv(std::istream& in, DuplicatePolicy policy,
                         const std::string& source) {
  std::string line;
  if (!read_line(in, line)) {
    throw ParseError(0, "empty counts file: " + source);
  }
  if (line != kCountsHeader) {
    throw ParseError(1, "line 1: expected header '" +
                            std::string(kCountsHeader) + "', got '" + line +
                            "'");
  }

  Dataset dataset;
  dataset.metadata["source"] = source;
  std::map<std::pair<double, double>, std::size_t> seen;
  int line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 6) {
      throw ParseError(line_no, "line " + std::to_string(line_no) +
                                    ": expected 6 fields, got " +
                                    std::to_string(fields.size()));
    }
    CountsRecord rec;
    rec.settings.alpha_deg = parse_angle(fields[0], line_no);
    rec.settings.beta_deg = parse_angle(fields[1], line_no);
    rec.n_pp = parse_count(fields[2], line_no);
    rec.n_pm = parse_count(fields[3], line_no);
    rec.n_mp = parse_count(fields[4], line_no);
    rec.n_mm = parse_count(fields[5], line_no);

    const std::pair<double, double> key{rec.settings.alpha_deg,
                                        rec.settings.beta_deg};
    const auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, dataset.records.size());
      dataset.records.push_back(rec);
    } else if (policy == DuplicatePolicy::Merge) {
      CountsRecord& merged = dataset.records[it->second];
      merged.n_pp += rec.n_pp;
      merged.n_pm += rec.n_pm;
      merged.n_mp += rec.n_mp;
      merged.n_mm += rec.n_mm;
    } else {
      throw ParseError(line_no,
                       "line " + std::to_string(line_no) +
                           ": duplicate setting pair (strict mode)");
    }
  }
  if (dataset.records.empty()) {
    throw ParseError(line_no, "counts file has no data rows: " + source);
  }
  return dataset;
}

Dataset load_dataset(const std::string& path, DuplicatePolicy policy) {
  if (path == "-") {
    return parse_counts_csv(std::cin, policy, "<stdin>");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open counts file: " + path);
  }
  return parse_counts_csv(in, policy, path);
}

std::string counts_csv(const Dataset& dataset) {
  std::string out = kCountsHeader;
  out += '\n';
  for (const CountsRecord& rec : dataset.records) {
    out += format_double(rec.settings.alpha_deg);
    out += ',';
    out += format_double(rec.settings.beta_deg);
    out += ',';
    out += std::to_string(rec.n_pp);
    out += ',';
    out += std::to_string(rec.n_pm);
    out += ',';
    out += std::to_string(rec.n_mp);
    out += ',';
    out += std::to_string(rec.n_mm);
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  const std::string body = counts_csv(dataset);
  if (path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write counts file: " + path);
  }
  out << body;
}

std::vector<SettingPair> load_settings(const std::string& spec) {
  if (spec == "builtin:chsh") {
    return {{0.0, 22.5}, {0.0, 67.5}, {45.0, 22.5}, {45.0, 67.5}};
  }
  if (spec == "builtin:grid16") {
    const double angles[4] = {0.0, 22.5, 45.0, 67.5};
    std::vector<SettingPair> pairs;
    for (double a : angles)
      for (double b : angles) pairs.push_back({a, b});
    return pairs;
  }
  if (spec.rfind("builtin:", 0) == 0) {
    throw std::runtime_error("unknown builtin settings '" + spec +
                             "' (have builtin:chsh, builtin:grid16)");
  }

  std::ifstream in(spec, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open settings file: " + spec);
  }
  std::string line;
  if (!read_line(in, line) || line != "alpha_deg,beta_deg") {
    throw ParseError(1, "line 1: expected header 'alpha_deg,beta_deg'");
  }
  std::vector<SettingPair> pairs;
  int line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 2) {
      throw ParseError(line_no, "line " + std::to_string(line_no) +
                                    ": expected 2 fields, got " +
                                    std::to_string(fields.size()));
    }
    pairs.push_back(
        {parse_angle(fields[0], line_no), parse_angle(fields[1], line_no)});
  }
  if (pairs.empty()) {
    throw ParseError(line_no, "settings file has no rows: " + spec);
  }
  return pairs;
}

}  // namespace bell
