#ifndef THZGS_GAS_HPP
#define THZGS_GAS_HPP

#include <array>
#include <optional>
#include <string>

namespace thzgs {

// The 13 atmospheric gases tracked by the toolkit, keyed by their HITRAN
// molecule numbers.
enum class GasSpecies : int {
  H2O = 1,
  CO2 = 2,
  O3 = 3,
  N2O = 4,
  CO = 5,
  CH4 = 6,
  O2 = 7,
  SO2 = 9,
  NO2 = 10,
  NH3 = 11,
  N2 = 22,
  HCN = 23,
  CH3OH = 39,
};

inline constexpr std::array<GasSpecies, 13> kAllSpecies = {
    GasSpecies::H2O, GasSpecies::CO2, GasSpecies::O3,  GasSpecies::N2O,
    GasSpecies::CO,  GasSpecies::CH4, GasSpecies::O2,  GasSpecies::SO2,
    GasSpecies::NO2, GasSpecies::NH3, GasSpecies::N2,  GasSpecies::HCN,
    GasSpecies::CH3OH};

constexpr int molecule_id(GasSpecies g) { return static_cast<int>(g); }

const char* to_string(GasSpecies g);
std::optional<GasSpecies> species_from_molecule_id(int id);
std::optional<GasSpecies> species_from_name(const std::string& name);

// Standard atmospheric mixing ratio, ppm by volume.
double standard_concentration_ppm(GasSpecies g);

}  // namespace thzgs

#endif  // THZGS_GAS_HPP
