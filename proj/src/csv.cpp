#include <cctype>
#include <cstdlib>
#include <string>

#include "projprime/errors.hpp"
#include "projprime/fitstats.hpp"

namespace projprime::fitstats {

namespace {

bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  if (first == std::string::npos) return true;
  const char c = line[first];
  return c == '#' || !(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.');
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  const auto first = s.find_first_not_of(" \t");
  return first == std::string::npos ? std::string() : s.substr(first);
}

long double parse_real(const std::string& field, const std::string& line) {
  const std::string t = trim(field);
  char* end = nullptr;
  const long double v = std::strtold(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw DomainError("bad number '" + t + "' in line '" + line + "'");
  return v;
}

}  // namespace

std::vector<Point> read_points_csv(std::istream& in) {
  std::vector<Point> out;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("expected 'x,y' in line '" + line + "'");
    const auto rest = line.substr(comma + 1);
    const auto comma2 = rest.find(',');
    out.push_back({parse_real(line.substr(0, comma), line), parse_real(rest.substr(0, comma2), line)});
  }
  return out;
}

std::vector<search::SegmentRecord> read_records_csv(std::istream& in) {
  std::vector<search::SegmentRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    try {
      out.push_back(search::parse_record(trim(line)));
    } catch (const IntegrityError& e) {
      throw DomainError(e.what());
    }
  }
  return out;
}

std::vector<long double> read_values_csv(std::istream& in) {
  std::vector<long double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    const auto comma = line.rfind(',');
    out.push_back(parse_real(comma == std::string::npos ? line : line.substr(comma + 1), line));
  }
  return out;
}

}  // namespace projprime::fitstats
