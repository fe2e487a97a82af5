#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "thzgs/hitran/catalog.hpp"
#include "thzgs/spectra.hpp"

using namespace thzgs;
using namespace thzgs::hitran;

namespace {

// Catalog with a single Lorentz line of the given center, intensity and
// air-broadened half-width.
std::map<GasSpecies, LineCatalog> one_line(GasSpecies gas, double center_cm,
                                           double intensity,
                                           double gamma_air = 0.07,
                                           double gamma_self = 0.09) {
  SpectralLine line;
  line.molecule_id = molecule_id(gas);
  line.isotopologue_id = 1;
  line.line_center = center_cm;
  line.intensity = intensity;
  line.gamma_air = gamma_air;
  line.gamma_self = gamma_self;
  line.trailing = std::string(93, ' ');
  LineCatalog catalog;
  catalog.molecule_id = line.molecule_id;
  catalog.gas = gas;
  catalog.lines = {line};
  return {{gas, catalog}};
}

std::map<GasSpecies, LineCatalog> corpus() {
  static auto catalogs = load_catalog_directory(THZGS_DATA_DIR);
  return catalogs;
}

}  // namespace

TEST_CASE("Lorentz peak matches the closed form N*S/(pi*alpha)") {
  // Grid point i=1 sits exactly at 2.0 THz; put the line center there.
  const double center = thz_to_wavenumber(2.0);
  const double S = 3.0e-21, gamma = 0.065, q_ppm = 12.5;
  auto catalogs = one_line(GasSpecies::O3, center, S, gamma);
  GasMixture mix(std::map<GasSpecies, double>{{GasSpecies::O3, q_ppm}});
  FrequencyGrid grid(Band(1.0, 3.0), 3);
  AbsorptionSpectrum spec = absorption_coefficient(catalogs, mix, grid);

  const double N = kReferenceNumberDensity * q_ppm * 1e-6;  // cm^-3
  const double k_expected = 100.0 * N * S / (std::numbers::pi * gamma);  // m^-1
  CHECK(spec.k_per_m[1] == doctest::Approx(k_expected).epsilon(1e-9));

  // Off-center point: full Lorentz profile.
  const double d = grid.wavenumber(0) - center;
  const double k0 = 100.0 * N * S / std::numbers::pi * gamma /
                    (d * d + gamma * gamma);
  // 1 THz is more than 25 cm^-1 from the line, so the wing is cut off there.
  CHECK(std::abs(d) > 25.0);
  CHECK(spec.k_per_m[0] == 0.0);
  (void)k0;
}

TEST_CASE("off-center Lorentz value inside the wing cutoff") {
  const double center = thz_to_wavenumber(2.0);
  const double S = 3.0e-21, gamma = 0.065, q_ppm = 5.0;
  auto catalogs = one_line(GasSpecies::O3, center, S, gamma);
  GasMixture mix(std::map<GasSpecies, double>{{GasSpecies::O3, q_ppm}});
  // Step 0.1 THz ~ 3.34 cm^-1: neighbors of the center are inside the cutoff.
  FrequencyGrid grid(Band(1.0, 3.0), 21);
  AbsorptionSpectrum spec = absorption_coefficient(catalogs, mix, grid);
  const double N = kReferenceNumberDensity * q_ppm * 1e-6;
  for (int i : {9, 10, 11}) {
    const double d = grid.wavenumber(i) - center;
    const double k = 100.0 * N * S / std::numbers::pi * gamma /
                     (d * d + gamma * gamma);
    CHECK(spec.k_per_m[i] == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("absorption is linear in the mixing ratio without self-broadening") {
  auto catalogs = one_line(GasSpecies::CO, thz_to_wavenumber(1.5), 1e-22);
  FrequencyGrid grid(Band(1.0, 3.0), 41);
  GasMixture a(std::map<GasSpecies, double>{{GasSpecies::CO, 3.0}});
  GasMixture b(std::map<GasSpecies, double>{{GasSpecies::CO, 6.0}});
  auto ka = absorption_coefficient(catalogs, a, grid).k_per_m;
  auto kb = absorption_coefficient(catalogs, b, grid).k_per_m;
  for (std::size_t i = 0; i < ka.size(); ++i)
    CHECK(kb[i] == doctest::Approx(2.0 * ka[i]).epsilon(1e-14));
}

TEST_CASE("mixture absorption is the sum of single-gas absorptions") {
  auto catalogs = corpus();
  FrequencyGrid grid(Band(1.0, 3.0), 101);
  GasMixture mix(std::map<GasSpecies, double>{{GasSpecies::H2O, 10000.0},
                                              {GasSpecies::O3, 0.07},
                                              {GasSpecies::CO, 0.01}});
  auto k_mix = absorption_coefficient(catalogs, mix, grid).k_per_m;
  std::vector<double> k_sum(grid.size(), 0.0);
  for (const auto& [gas, q] : mix.mixing_ratios()) {
    GasMixture single(std::map<GasSpecies, double>{{gas, q}});
    auto k = absorption_coefficient(catalogs, single, grid).k_per_m;
    for (int i = 0; i < grid.size(); ++i) k_sum[i] += k[i];
  }
  for (int i = 0; i < grid.size(); ++i)
    CHECK(k_mix[i] == doctest::Approx(k_sum[i]).epsilon(1e-12));
}

TEST_CASE("loss in dB is additive in distance; transmittance is exp(-kd)") {
  auto catalogs = corpus();
  FrequencyGrid grid(Band(1.0, 3.0), 51);
  AbsorptionSpectrum spec = absorption_coefficient(
      catalogs, GasMixture::standard_atmosphere(), grid);
  auto l1 = absorption_loss_db(spec, 40.0);
  auto l2 = absorption_loss_db(spec, 60.0);
  auto l3 = absorption_loss_db(spec, 100.0);
  auto tau = transmittance(spec, 100.0);
  for (int i = 0; i < grid.size(); ++i) {
    CHECK(l3[i] == doctest::Approx(l1[i] + l2[i]).epsilon(1e-12));
    CHECK(tau[i] == doctest::Approx(std::exp(-spec.k_per_m[i] * 100.0))
                        .epsilon(1e-14));
    // dB and nepers describe the same transmittance.
    CHECK(l3[i] == doctest::Approx(-10.0 * std::log10(tau[i])).epsilon(1e-9));
  }
  CHECK_THROWS_AS(absorption_loss_db(spec, -1.0), std::invalid_argument);
}

TEST_CASE("unit profile times concentration reproduces the gas loss") {
  auto catalogs = corpus();
  FrequencyGrid grid(Band(1.0, 3.0), 101);
  const double q = 0.07, d = 100.0;
  auto unit = unit_absorption_profile(GasSpecies::O3, catalogs, grid, d);
  GasMixture mix(std::map<GasSpecies, double>{{GasSpecies::O3, q}});
  auto loss = absorption_loss_db(absorption_coefficient(catalogs, mix, grid), d);
  for (int i = 0; i < grid.size(); ++i)
    CHECK(loss[i] == doctest::Approx(q * unit[i]).epsilon(1e-12));
}

TEST_CASE("lines beyond the wing cutoff contribute exactly zero") {
  // Line at 2 THz (~66.7 cm^-1); a grid around 1 THz (~33.4 cm^-1) is more
  // than 25 cm^-1 away everywhere.
  auto catalogs = one_line(GasSpecies::O3, thz_to_wavenumber(2.0), 1e-20);
  GasMixture mix(std::map<GasSpecies, double>{{GasSpecies::O3, 1.0}});
  FrequencyGrid far(Band(0.8, 1.1), 31);
  auto k = absorption_coefficient(catalogs, mix, far).k_per_m;
  CHECK(*std::max_element(k.begin(), k.end()) == 0.0);

  // Widening the cutoff to 50 cm^-1 brings the wing back in.
  SpectraOptions wide;
  wide.wing_cutoff_cm = 50.0;
  auto kw = absorption_coefficient(catalogs, mix, far, wide).k_per_m;
  CHECK(*std::max_element(kw.begin(), kw.end()) > 0.0);
}

TEST_CASE("widening the cutoff changes the band-mean loss only slightly") {
  auto catalogs = corpus();
  FrequencyGrid grid(Band(1.0, 3.0), 2001);
  GasMixture atm = GasMixture::standard_atmosphere();
  SpectraOptions base, wide;
  wide.wing_cutoff_cm = 50.0;
  auto k25 = absorption_coefficient(catalogs, atm, grid, base).k_per_m;
  auto k50 = absorption_coefficient(catalogs, atm, grid, wide).k_per_m;
  const double m25 = std::accumulate(k25.begin(), k25.end(), 0.0);
  const double m50 = std::accumulate(k50.begin(), k50.end(), 0.0);
  CHECK(m50 >= m25);  // more wings can only add absorption
  CHECK((m50 - m25) / m25 < 0.05);
}

TEST_CASE("half-width: air value, self-broadening blend, and the floor") {
  SpectralLine line;
  line.gamma_air = 0.06;
  line.gamma_self = 0.10;
  CHECK(line_half_width(line, 1.0, 5000.0) == doctest::Approx(0.06));
  SpectraOptions self_on;
  self_on.self_broadening = true;
  // 5000 ppm: alpha = 0.06*(1 - 0.005) + 0.10*0.005
  CHECK(line_half_width(line, 1.0, 5000.0, self_on) ==
        doctest::Approx(0.06 * 0.995 + 0.10 * 0.005).epsilon(1e-12));
  line.gamma_air = 0.0;
  CHECK(line_half_width(line, 1.0, 0.0) == 1e-6);
  CHECK_THROWS_AS(line_half_width(line, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("missing catalogs and insufficient coverage are typed errors") {
  auto catalogs = one_line(GasSpecies::O3, thz_to_wavenumber(2.0), 1e-20);
  FrequencyGrid grid(Band(1.0, 3.0), 11);
  GasMixture wants_co(std::map<GasSpecies, double>{{GasSpecies::CO, 1.0}});
  CHECK_THROWS_AS(absorption_coefficient(catalogs, wants_co, grid),
                  MissingCatalog);

  catalogs.at(GasSpecies::O3).coverage = Band(1.5, 2.5);  // narrower than grid
  GasMixture wants_o3(std::map<GasSpecies, double>{{GasSpecies::O3, 1.0}});
  CHECK_THROWS_AS(absorption_coefficient(catalogs, wants_o3, grid),
                  GridOutsideCoverage);
}

TEST_CASE("mixture validation rejects bad states") {
  CHECK_THROWS_AS(GasMixture(std::map<GasSpecies, double>{
                      {GasSpecies::O3, -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GasMixture(std::map<GasSpecies, double>{
                      {GasSpecies::N2, 8.0e5}, {GasSpecies::O2, 3.0e5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GasMixture(std::map<GasSpecies, double>{{GasSpecies::O3, 1.0}},
                             300.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(GasMixture(std::map<GasSpecies, double>{{GasSpecies::O3, 1.0}},
                             296.0, 0.5),
                  std::invalid_argument);
  // The standard atmosphere itself must be accepted (its total slightly
  // exceeds 1e6 ppm because trace gases are quoted against dry air).
  GasMixture atm = GasMixture::standard_atmosphere();
  CHECK(atm.total_ppm() > 1e6);
  CHECK(atm.total_ppm() < 1.01e6);
  CHECK(atm.ppm(GasSpecies::H2O) == 10000.0);
}

TEST_CASE("pressure shift moves the line center") {
  const double center = thz_to_wavenumber(2.0);
  auto catalogs = one_line(GasSpecies::H2O, center, 1e-20);
  auto shifted = catalogs;
  shifted.at(GasSpecies::H2O).lines[0].delta_air = 0.01;
  GasMixture mix(std::map<GasSpecies, double>{{GasSpecies::H2O, 100.0}});
  FrequencyGrid grid(Band(1.0, 3.0), 3);  // point 1 at the unshifted center
  auto k0 = absorption_coefficient(catalogs, mix, grid).k_per_m;
  auto k1 = absorption_coefficient(shifted, mix, grid).k_per_m;
  CHECK(k1[1] < k0[1]);  // peak moved off the grid point
}
