#ifndef THZGS_HITRAN_RECORD_HPP
#define THZGS_HITRAN_RECORD_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thzgs::hitran {

// One transition from a HITRAN 160-character ".par" record. Quantum numbers,
// uncertainty indices and reference codes (columns 68-160) are carried as an
// opaque string so records can round-trip byte-for-byte.
struct SpectralLine {
  int molecule_id = 0;        // columns 1-2
  int isotopologue_id = 0;    // column 3, 0 = unspecified/aggregate
  double line_center = 0.0;   // cm^-1, columns 4-15
  double intensity = 0.0;     // cm^-1/(molecule cm^-2) at 296 K, columns 16-25
  double einstein_a = 0.0;    // s^-1, columns 26-35 (carried, unused)
  double gamma_air = 0.0;     // cm^-1/atm, columns 36-40
  double gamma_self = 0.0;    // cm^-1/atm, columns 41-45
  double lower_state_energy = 0.0;  // cm^-1, columns 46-55
  double n_air = 0.0;         // columns 56-59
  double delta_air = 0.0;     // cm^-1/atm, columns 60-67
  std::string trailing;       // columns 68-160, verbatim (93 chars or empty)

  bool operator==(const SpectralLine&) const = default;
};

inline constexpr std::size_t kRecordLength = 160;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WrongLength : ParseError {
  std::size_t actual;
  explicit WrongLength(std::size_t n)
      : ParseError("record is " + std::to_string(n) + " characters, expected 160"),
        actual(n) {}
};

// A field that should hold a number contains something else. Columns are
// 1-based and inclusive, matching the format documentation.
struct FieldSyntax : ParseError {
  int col_begin, col_end;
  FieldSyntax(int b, int e, const std::string& text)
      : ParseError("bad numeric field in columns " + std::to_string(b) + "-" +
                   std::to_string(e) + ": \"" + text + "\""),
        col_begin(b),
        col_end(e) {}
};

struct RangeViolation : ParseError {
  using ParseError::ParseError;
};

struct FieldOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Decode one exactly-160-character record (no line terminator).
SpectralLine parse_par_record(const std::string& record);

// Encode a line back to the 160-character format. Byte-identical to the
// original record when the trailing string was preserved.
std::string serialize_par_record(const SpectralLine& line);

}  // namespace thzgs::hitran

#endif  // THZGS_HITRAN_RECORD_HPP
