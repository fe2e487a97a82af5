#ifndef THZGS_HITRAN_CATALOG_HPP
#define THZGS_HITRAN_CATALOG_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thzgs/gas.hpp"
#include "thzgs/hitran/record.hpp"
#include "thzgs/units.hpp"

namespace thzgs::hitran {

// All lines of one molecule, sorted ascending by line center.
struct LineCatalog {
  int molecule_id = 0;
  std::optional<GasSpecies> gas;      // set when molecule_id is a known species
  std::vector<SpectralLine> lines;    // sorted by line_center
  std::string source;                 // file path or fetch URL + retrieval date
  std::optional<Band> coverage;       // band the catalog is known to cover
};

struct RecordError {
  std::size_t line_number = 0;  // 1-based
  std::string message;
};

struct ParFileResult {
  std::map<int, LineCatalog> catalogs;  // keyed by molecule_id
  std::vector<RecordError> errors;
};

struct EmptyCatalog : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse a stream of 160-character records, grouping by molecule. Blank lines
// are skipped; bad records are collected with their line numbers instead of
// aborting the parse. Throws EmptyCatalog when no record survives.
ParFileResult parse_par_file(std::istream& in, const std::string& source = "");
ParFileResult parse_par_file(const std::filesystem::path& path);

// Keep lines whose center lies within the band (converted to wavenumbers)
// widened by `margin_cm` on both sides. Order preserved; empty result legal.
LineCatalog filter_band(const LineCatalog& catalog, const Band& band,
                        double margin_cm);

// Catalog normalization: sort by line center and raise air half-widths below
// the floor up to it (a zero half-width would make the Lorentz profile
// singular).
void normalize_catalog(LineCatalog& catalog, double half_width_floor_cm = 1e-6);

// Load every *.par file in a directory, normalize, and key by species.
// Molecules outside the 13-gas set are ignored.
std::map<GasSpecies, LineCatalog> load_catalog_directory(
    const std::filesystem::path& dir, double half_width_floor_cm = 1e-6);

}  // namespace thzgs::hitran

#endif  // THZGS_HITRAN_CATALOG_HPP
