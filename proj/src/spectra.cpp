#include "thzgs/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace thzgs {

GasMixture::GasMixture(std::map<GasSpecies, double> ppm, double temperature_k,
                       double pressure_atm)
    : ppm_(std::move(ppm)) {
  if (temperature_k != kReferenceTemperatureK)
    throw std::invalid_argument("GasMixture: only 296 K supported");
  if (pressure_atm != kReferencePressureAtm)
    throw std::invalid_argument("GasMixture: only 1 atm supported");
  validate();
}

void GasMixture::validate() const {
  double total = 0.0;
  for (const auto& [gas, q] : ppm_) {
    if (!(q >= 0.0 && q <= 1e6))
      throw std::invalid_argument(std::string("GasMixture: ") + to_string(gas) +
                                  " mixing ratio outside [0, 1e6] ppm");
    total += q;
  }
  // The standard trace-gas table quotes mixing ratios against dry air, so
  // with water vapor added the sum can exceed 1e6 ppm by up to ~1%.
  if (total > 1.01e6)
    throw std::invalid_argument("GasMixture: mixing ratios sum above 1e6 ppm");
}

GasMixture GasMixture::standard_atmosphere() {
  std::map<GasSpecies, double> ppm;
  for (GasSpecies g : kAllSpecies) ppm[g] = standard_concentration_ppm(g);
  return GasMixture(std::move(ppm));
}

double GasMixture::ppm(GasSpecies g) const {
  auto it = ppm_.find(g);
  return it == ppm_.end() ? 0.0 : it->second;
}

void GasMixture::set_ppm(GasSpecies g, double ppm) {
  ppm_[g] = ppm;
  validate();
}

double GasMixture::total_ppm() const {
  double total = 0.0;
  for (const auto& [gas, q] : ppm_) total += q;
  return total;
}

double line_half_width(const hitran::SpectralLine& line, double pressure_atm,
                       double q_self_ppm, const SpectraOptions& options) {
  if (pressure_atm <= 0.0)
    throw std::invalid_argument("line_half_width: pressure must be positive");
  double alpha;
  if (options.self_broadening) {
    const double p_self = q_self_ppm * 1e-6 * pressure_atm;
    alpha = line.gamma_air * (pressure_atm - p_self) + line.gamma_self * p_self;
  } else {
    alpha = line.gamma_air * pressure_atm;
  }
  return std::max(alpha, options.half_width_floor_cm);
}

namespace {

// Adds one gas's contribution to k (in cm^-1) over the grid. Lines only
// touch grid points within the wing cutoff of their (pressure-shifted)
// centers.
void accumulate_gas(const hitran::LineCatalog& catalog, double q_ppm,
                    const FrequencyGrid& grid, const SpectraOptions& options,
                    std::vector<double>& k_cm) {
  const double pressure = kReferencePressureAtm;
  const double number_density = kReferenceNumberDensity * q_ppm * 1e-6;
  const double nu0 = grid.wavenumber(0);
  const double step_cm = thz_to_wavenumber(grid.step_thz());
  const int n = grid.size();

  for (const hitran::SpectralLine& line : catalog.lines) {
    const double center = line.line_center + line.delta_air * pressure;
    const double alpha = line_half_width(line, pressure, q_ppm, options);
    const double strength = number_density * line.intensity / std::numbers::pi;

    int i_begin = static_cast<int>(
        std::ceil((center - options.wing_cutoff_cm - nu0) / step_cm));
    int i_end = static_cast<int>(
        std::floor((center + options.wing_cutoff_cm - nu0) / step_cm));
    i_begin = std::max(i_begin, 0);
    i_end = std::min(i_end, n - 1);
    for (int i = i_begin; i <= i_end; ++i) {
      const double d = nu0 + step_cm * i - center;
      k_cm[i] += strength * alpha / (d * d + alpha * alpha);
    }
  }
}

}  // namespace

AbsorptionSpectrum absorption_coefficient(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const GasMixture& mixture, const FrequencyGrid& grid,
    const SpectraOptions& options) {
  std::vector<double> k_cm(grid.size(), 0.0);

  for (const auto& [gas, q] : mixture.mixing_ratios()) {
    if (q == 0.0) continue;
    auto it = catalogs.find(gas);
    if (it == catalogs.end())
      throw MissingCatalog(std::string("no line catalog for ") + to_string(gas));
    const hitran::LineCatalog& catalog = it->second;
    if (catalog.coverage) {
      const Band& c = *catalog.coverage;
      if (c.f_low_thz > grid.band().f_low_thz ||
          c.f_high_thz < grid.band().f_high_thz)
        throw GridOutsideCoverage(std::string(to_string(gas)) +
                                  " catalog does not cover the grid band");
    }
    accumulate_gas(catalog, q, grid, options, k_cm);
  }

  AbsorptionSpectrum spectrum{grid, std::move(k_cm), mixture};
  for (double& k : spectrum.k_per_m) k *= 100.0;  // cm^-1 -> m^-1
  return spectrum;
}

std::vector<double> absorption_loss_db(const AbsorptionSpectrum& spectrum,
                                       double distance_m) {
  if (distance_m < 0.0)
    throw std::invalid_argument("absorption_loss_db: distance must be >= 0");
  std::vector<double> loss(spectrum.k_per_m.size());
  for (std::size_t i = 0; i < loss.size(); ++i)
    loss[i] = kDbPerNeper * spectrum.k_per_m[i] * distance_m;
  return loss;
}

std::vector<double> transmittance(const AbsorptionSpectrum& spectrum,
                                  double distance_m) {
  if (distance_m < 0.0)
    throw std::invalid_argument("transmittance: distance must be >= 0");
  std::vector<double> tau(spectrum.k_per_m.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    tau[i] = std::exp(-spectrum.k_per_m[i] * distance_m);
  return tau;
}

std::vector<double> unit_absorption_profile(
    GasSpecies gas, const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const FrequencyGrid& grid, double distance_m,
    const SpectraOptions& options) {
  SpectraOptions linear = options;
  linear.self_broadening = false;
  GasMixture mixture(std::map<GasSpecies, double>{{gas, 1.0}});
  AbsorptionSpectrum spectrum =
      absorption_coefficient(catalogs, mixture, grid, linear);
  return absorption_loss_db(spectrum, distance_m);
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const AbsorptionSpectrum& spectrum) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "frequency_thz,k_per_m\n";
  char buf[64];
  for (int i = 0; i < spectrum.grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n",
                  spectrum.grid.frequency_thz(i), spectrum.k_per_m[i]);
    out << buf;
  }
}

}  // namespace thzgs
