#ifndef THZGS_SPECTRA_HPP
#define THZGS_SPECTRA_HPP

#include <filesystem>
#include <map>
#include <stdexcept>
#include <vector>

#include "thzgs/gas.hpp"
#include "thzgs/hitran/catalog.hpp"
#include "thzgs/units.hpp"

namespace thzgs {

// Per-gas mixing ratios in ppm by volume, at the fixed reference state
// (296 K, 1 atm). Other temperatures or pressures are rejected outright
// rather than silently mishandled.
class GasMixture {
 public:
  GasMixture() = default;
  explicit GasMixture(std::map<GasSpecies, double> ppm,
                      double temperature_k = kReferenceTemperatureK,
                      double pressure_atm = kReferencePressureAtm);

  // Standard atmospheric concentrations for all 13 gases.
  static GasMixture standard_atmosphere();

  double ppm(GasSpecies g) const;
  void set_ppm(GasSpecies g, double ppm);
  double total_ppm() const;
  const std::map<GasSpecies, double>& mixing_ratios() const { return ppm_; }

  double temperature_k() const { return kReferenceTemperatureK; }
  double pressure_atm() const { return kReferencePressureAtm; }

 private:
  void validate() const;
  std::map<GasSpecies, double> ppm_;
};

struct SpectraOptions {
  bool self_broadening = false;   // off keeps the forward model exactly linear
  double wing_cutoff_cm = 25.0;   // Lorentz wings truncated beyond this
  double half_width_floor_cm = 1e-6;
};

struct AbsorptionSpectrum {
  FrequencyGrid grid;
  std::vector<double> k_per_m;  // absorption coefficient, m^-1
  GasMixture mixture;
};

struct MissingCatalog : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GridOutsideCoverage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pressure-broadened Lorentz half-width at half-maximum, cm^-1. The
// temperature factor (T0/T)^n_air is identically 1 at 296 K.
double line_half_width(const hitran::SpectralLine& line, double pressure_atm,
                       double q_self_ppm, const SpectraOptions& options = {});

// Medium absorption coefficient of a mixture on a frequency grid:
// k(nu) = sum over gases of N_i * sum over lines of S * phi_L, converted to
// m^-1. Only lines within the wing cutoff of a grid point contribute to it.
AbsorptionSpectrum absorption_coefficient(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const GasMixture& mixture, const FrequencyGrid& grid,
    const SpectraOptions& options = {});

// Beer-Lambert absorption loss over a path, dB per grid point.
std::vector<double> absorption_loss_db(const AbsorptionSpectrum& spectrum,
                                       double distance_m);

// Power transmittance exp(-k d) per grid point.
std::vector<double> transmittance(const AbsorptionSpectrum& spectrum,
                                  double distance_m);

// Absorption loss per 1 ppm of a single gas (one design-matrix column),
// dB/ppm per grid point. Self-broadening is forced off so scaling to any
// concentration is exact multiplication.
std::vector<double> unit_absorption_profile(
    GasSpecies gas, const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const FrequencyGrid& grid, double distance_m,
    const SpectraOptions& options = {});

// CSV export: header "frequency_thz,k_per_m", 17 significant digits.
void write_spectrum_csv(const std::filesystem::path& path,
                        const AbsorptionSpectrum& spectrum);

}  // namespace thzgs

#endif  // THZGS_SPECTRA_HPP
