#include "thzgs/hitran/record.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace thzgs::hitran {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(' ');
  return s.substr(b, e - b + 1);
}

// Parse one fixed-width numeric field. Blank fields read as 0 (HITRAN leaves
// unknown parameters blank). Fortran 'D' exponents are accepted.
double parse_field(const std::string& record, int col_begin, int col_end) {
  std::string raw = record.substr(col_begin - 1, col_end - col_begin + 1);
  std::string text = trim(raw);
  if (text.empty()) return 0.0;
  std::replace(text.begin(), text.end(), 'D', 'E');
  std::replace(text.begin(), text.end(), 'd', 'E');
  const char* start = text.c_str();
  char* end = nullptr;
  double v = std::strtod(start, &end);
  if (end != start + text.size())
    throw FieldSyntax(col_begin, col_end, raw);
  return v;
}

int parse_int_field(const std::string& record, int col_begin, int col_end) {
  std::string raw = record.substr(col_begin - 1, col_end - col_begin + 1);
  std::string text = trim(raw);
  if (text.empty()) return 0;
  for (char c : text)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw FieldSyntax(col_begin, col_end, raw);
  return std::atoi(text.c_str());
}

// Fortran-style fixed field: right-justified, leading zero of "0.xxx"
// dropped when the value would not otherwise fit.
std::string fixed_field(double v, int width, int decimals, const char* name) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (static_cast<int>(s.size()) > width) {
    if (s.rfind("0.", 0) == 0)
      s.erase(0, 1);
    else if (s.rfind("-0.", 0) == 0)
      s.erase(1, 1);
  }
  if (static_cast<int>(s.size()) > width)
    throw FieldOverflow(std::string(name) + " value does not fit in " +
                        std::to_string(width) + " columns");
  return std::string(width - s.size(), ' ') + s;
}

std::string exp_field(double v, int width, int decimals, const char* name) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*E", decimals, v);
  std::string s(buf);
  if (static_cast<int>(s.size()) > width)
    throw FieldOverflow(std::string(name) + " value does not fit in " +
                        std::to_string(width) + " columns");
  return std::string(width - s.size(), ' ') + s;
}

}  // namespace

SpectralLine parse_par_record(const std::string& record) {
  if (record.size() != kRecordLength) throw WrongLength(record.size());

  SpectralLine line;
  line.molecule_id = parse_int_field(record, 1, 2);
  line.isotopologue_id = parse_int_field(record, 3, 3);
  line.line_center = parse_field(record, 4, 15);
  line.intensity = parse_field(record, 16, 25);
  line.einstein_a = parse_field(record, 26, 35);
  line.gamma_air = parse_field(record, 36, 40);
  line.gamma_self = parse_field(record, 41, 45);
  line.lower_state_energy = parse_field(record, 46, 55);
  line.n_air = parse_field(record, 56, 59);
  line.delta_air = parse_field(record, 60, 67);
  line.trailing = record.substr(67, 93);

  if (line.line_center < 0.0)
    throw RangeViolation("negative line center " + std::to_string(line.line_center));
  if (line.intensity < 0.0)
    throw RangeViolation("negative intensity " + std::to_string(line.intensity));
  return line;
}

std::string serialize_par_record(const SpectralLine& line) {
  if (line.molecule_id < 0 || line.molecule_id > 99)
    throw FieldOverflow("molecule_id outside 0-99");
  if (line.isotopologue_id < 0 || line.isotopologue_id > 9)
    throw FieldOverflow("isotopologue_id outside 0-9");

  char head[8];
  std::snprintf(head, sizeof(head), "%2d%1d", line.molecule_id,
                line.isotopologue_id);

  std::string out(head);
  out += fixed_field(line.line_center, 12, 6, "line_center");
  out += exp_field(line.intensity, 10, 3, "intensity");
  out += exp_field(line.einstein_a, 10, 3, "einstein_a");
  out += fixed_field(line.gamma_air, 5, 4, "gamma_air");
  out += fixed_field(line.gamma_self, 5, 4, "gamma_self");
  out += fixed_field(line.lower_state_energy, 10, 4, "lower_state_energy");
  out += fixed_field(line.n_air, 4, 2, "n_air");
  out += fixed_field(line.delta_air, 8, 6, "delta_air");

  std::string tail = line.trailing;
  if (tail.size() > 93) throw FieldOverflow("trailing string longer than 93");
  tail.resize(93, ' ');
  out += tail;
  return out;
}

}  // namespace thzgs::hitran
