#include "thzgs/gas.hpp"

namespace thzgs {

const char* to_string(GasSpecies g) {
  switch (g) {
    case GasSpecies::H2O: return "H2O";
    case GasSpecies::CO2: return "CO2";
    case GasSpecies::O3: return "O3";
    case GasSpecies::N2O: return "N2O";
    case GasSpecies::CO: return "CO";
    case GasSpecies::CH4: return "CH4";
    case GasSpecies::O2: return "O2";
    case GasSpecies::SO2: return "SO2";
    case GasSpecies::NO2: return "NO2";
    case GasSpecies::NH3: return "NH3";
    case GasSpecies::N2: return "N2";
    case GasSpecies::HCN: return "HCN";
    case GasSpecies::CH3OH: return "CH3OH";
  }
  return "?";
}

std::optional<GasSpecies> species_from_molecule_id(int id) {
  for (GasSpecies g : kAllSpecies)
    if (molecule_id(g) == id) return g;
  return std::nullopt;
}

std::optional<GasSpecies> species_from_name(const std::string& name) {
  for (GasSpecies g : kAllSpecies)
    if (name == to_string(g)) return g;
  return std::nullopt;
}

double standard_concentration_ppm(GasSpecies g) {
  switch (g) {
    case GasSpecies::H2O: return 10000.0;
    case GasSpecies::CO2: return 410.0;
    case GasSpecies::O3: return 0.07;
    case GasSpecies::N2O: return 0.5;
    case GasSpecies::CO: return 0.01;
    case GasSpecies::CH4: return 1.8;
    case GasSpecies::O2: return 209460.0;
    case GasSpecies::SO2: return 1.0;
    case GasSpecies::NO2: return 0.02;
    case GasSpecies::NH3: return 0.01;
    case GasSpecies::N2: return 780840.0;
    case GasSpecies::HCN: return 0.01;
    case GasSpecies::CH3OH: return 0.01;
  }
  return 0.0;
}

}  // namespace thzgs
