#include "thzgs/hitran/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace thzgs::hitran {

ParFileResult parse_par_file(std::istream& in, const std::string& source) {
  ParFileResult result;
  std::string raw;
  std::size_t line_number = 0;
  std::size_t valid = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(' ') == std::string::npos) continue;  // blank
    try {
      SpectralLine line = parse_par_record(raw);
      LineCatalog& cat = result.catalogs[line.molecule_id];
      if (cat.lines.empty()) {
        cat.molecule_id = line.molecule_id;
        cat.gas = species_from_molecule_id(line.molecule_id);
        cat.source = source;
      }
      cat.lines.push_back(std::move(line));
      ++valid;
    } catch (const ParseError& e) {
      result.errors.push_back({line_number, e.what()});
    }
  }
  if (valid == 0)
    throw EmptyCatalog("no valid records in " +
                       (source.empty() ? std::string("input") : source));
  for (auto& [id, cat] : result.catalogs)
    std::stable_sort(cat.lines.begin(), cat.lines.end(),
                     [](const SpectralLine& a, const SpectralLine& b) {
                       return a.line_center < b.line_center;
                     });
  return result;
}

ParFileResult parse_par_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return parse_par_file(in, path.string());
}

LineCatalog filter_band(const LineCatalog& catalog, const Band& band,
                        double margin_cm) {
  if (margin_cm < 0.0)
    throw std::invalid_argument("filter_band: margin must be >= 0");
  LineCatalog out;
  out.molecule_id = catalog.molecule_id;
  out.gas = catalog.gas;
  out.source = catalog.source;
  out.coverage = band;
  const double lo = band.nu_low_cm() - margin_cm;
  const double hi = band.nu_high_cm() + margin_cm;
  for (const SpectralLine& line : catalog.lines)
    if (line.line_center >= lo && line.line_center <= hi)
      out.lines.push_back(line);
  return out;
}

void normalize_catalog(LineCatalog& catalog, double half_width_floor_cm) {
  std::stable_sort(catalog.lines.begin(), catalog.lines.end(),
                   [](const SpectralLine& a, const SpectralLine& b) {
                     return a.line_center < b.line_center;
                   });
  for (SpectralLine& line : catalog.lines)
    if (line.gamma_air < half_width_floor_cm)
      line.gamma_air = half_width_floor_cm;
}

std::map<GasSpecies, LineCatalog> load_catalog_directory(
    const std::filesystem::path& dir, double half_width_floor_cm) {
  std::map<GasSpecies, LineCatalog> out;
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("line data directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".par")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    ParFileResult parsed = parse_par_file(path);
    for (auto& [id, cat] : parsed.catalogs) {
      if (!cat.gas) continue;
      LineCatalog& dest = out[*cat.gas];
      if (dest.lines.empty()) {
        dest = std::move(cat);
      } else {
        dest.lines.insert(dest.lines.end(), cat.lines.begin(), cat.lines.end());
        dest.source += ";" + cat.source;
      }
    }
  }
  for (auto& [gas, cat] : out) normalize_catalog(cat, half_width_floor_cm);
  return out;
}

}  // namespace thzgs::hitran
