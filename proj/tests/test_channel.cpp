#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "thzgs/channel.hpp"
#include "thzgs/hitran/catalog.hpp"

using namespace thzgs;
using namespace thzgs::hitran;

namespace {

std::map<GasSpecies, LineCatalog> corpus() {
  static auto catalogs = load_catalog_directory(THZGS_DATA_DIR);
  return catalogs;
}

}  // namespace

TEST_CASE("spreading loss closed form and its scaling laws") {
  // 20*log10(4 pi f d / c) at 0.3 THz over 1 m.
  const double expected =
      20.0 * std::log10(4.0 * std::numbers::pi * 0.3e12 / kSpeedOfLightMPerS);
  CHECK(spreading_loss_db(0.3, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(spreading_loss_db(0.3, 1.0) == doctest::Approx(81.9853).epsilon(1e-4));
  // +20 dB per decade of distance, +6.02 dB per doubling of frequency.
  CHECK(spreading_loss_db(0.3, 10.0) - spreading_loss_db(0.3, 1.0) ==
        doctest::Approx(20.0).epsilon(1e-12));
  CHECK(spreading_loss_db(0.6, 1.0) - spreading_loss_db(0.3, 1.0) ==
        doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(spreading_loss_db(0.3, 0.0), DegenerateGeometry);
  CHECK_THROWS_AS(spreading_loss_db(0.0, 1.0), DegenerateGeometry);
}

TEST_CASE("total path loss is spreading plus Beer-Lambert in dB") {
  const double k = 2.5e-4;  // m^-1
  const double d = 100.0;
  CHECK(total_path_loss_db(1.0, d, k) ==
        doctest::Approx(spreading_loss_db(1.0, d) + kDbPerNeper * k * d)
            .epsilon(1e-12));
}

TEST_CASE("chirp construction, validation, and waveform energy") {
  ChirpPulse pulse = ChirpPulse::over_band(Band(1.0, 3.0));
  CHECK(pulse.f_start_thz == 1.0);
  CHECK(pulse.f_stop_thz == 3.0);
  CHECK(pulse.sample_rate == doctest::Approx(4.0 * 3.0e12));

  ChirpPulse bad = pulse;
  bad.sample_rate = 2.0 * 3.0e12 / ChirpPulse::kOversampleMargin;
  CHECK_THROWS_AS(chirp_waveform(bad), UndersampledPulse);

  // For a long pulse (many cycles) the energy of A*cos(phi(t)) approaches
  // A^2*T/2; check the discrete sum at 1 ns to 0.1%.
  ChirpPulse long_pulse = ChirpPulse::over_band(Band(1.0, 3.0), 1.0e-9);
  std::vector<double> x = chirp_waveform(long_pulse);
  const double energy =
      std::inner_product(x.begin(), x.end(), x.begin(), 0.0) /
      long_pulse.sample_rate;
  CHECK(energy == doctest::Approx(0.5 * 1.0e-9).epsilon(1e-3));
}

TEST_CASE("periodogram satisfies Parseval's identity exactly") {
  ChirpPulse pulse = ChirpPulse::over_band(Band(1.0, 3.0));
  std::vector<double> x = chirp_waveform(pulse);
  Periodogram p = compute_periodogram(x, pulse.sample_rate);
  const double time_energy =
      std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / pulse.sample_rate;
  const double freq_energy =
      std::accumulate(p.values.begin(), p.values.end(), 0.0) *
      p.bin_width_thz * 1e12;
  CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-10));
  CHECK_THROWS_AS(compute_periodogram({}, 1.0), EmptyInput);
}

TEST_CASE("transmit PSD peaks at 0 dBr inside the swept band") {
  ChirpPulse pulse = ChirpPulse::over_band(Band(1.0, 3.0));
  FrequencyGrid grid(Band(1.0, 3.0), 801);
  PsdCurve tx = transmit_psd(pulse, grid);
  const double peak =
      *std::max_element(tx.values_dbr.begin(), tx.values_dbr.end());
  CHECK(peak == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tx.reference_linear > 0.0);
}

TEST_CASE("received PSD with no absorption is transmit minus spreading") {
  FrequencyGrid grid(Band(1.0, 3.0), 201);
  ChirpPulse pulse = ChirpPulse::over_band(Band(1.0, 3.0));
  AbsorptionSpectrum vacuum{grid, std::vector<double>(grid.size(), 0.0),
                            GasMixture()};
  const double d = 10.0;
  PsdCurve tx = transmit_psd(pulse, grid);
  PsdCurve rx = received_psd(pulse, vacuum, d);
  for (int i = 0; i < grid.size(); ++i) {
    const double expected =
        tx.values_dbr[i] - spreading_loss_db(grid.frequency_thz(i), d);
    CHECK(rx.values_dbr[i] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("absorption noise can only raise the received PSD") {
  auto catalogs = corpus();
  FrequencyGrid grid(Band(1.0, 3.0), 201);
  ChirpPulse pulse = ChirpPulse::over_band(Band(1.0, 3.0));
  AbsorptionSpectrum spec = absorption_coefficient(
      catalogs, GasMixture::standard_atmosphere(), grid);
  PsdCurve quiet = received_psd(pulse, spec, 100.0, false);
  PsdCurve noisy = received_psd(pulse, spec, 100.0, true);
  CHECK(noisy.includes_absorption_noise);
  for (int i = 0; i < grid.size(); ++i)
    CHECK(noisy.values_dbr[i] >= quiet.values_dbr[i]);
}

TEST_CASE("psd_difference is zero at multiplier one and grows with it") {
  auto catalogs = corpus();
  FrequencyGrid grid(Band(0.7, 1.0), 301);
  GasMixture atm = GasMixture::standard_atmosphere();
  auto deltas = psd_difference(catalogs, atm, GasSpecies::O3,
                               {1.0, 10.0, 100.0}, grid, 100.0);
  REQUIRE(deltas.size() == 3);
  for (double v : deltas[0].delta_db) CHECK(v == doctest::Approx(0.0));
  PeakDifference p10 = find_peak_difference(deltas[1]);
  PeakDifference p100 = find_peak_difference(deltas[2]);
  // More gas absorbs more, so the signed peak delta is negative and deepens.
  CHECK(p10.magnitude_db < 0.0);
  CHECK(std::abs(p100.magnitude_db) > std::abs(p10.magnitude_db));
  // The strongest response sits on the isolated ozone line near 0.8424 THz.
  CHECK(p10.frequency_thz == doctest::Approx(0.8424).epsilon(2e-3));
}

TEST_CASE("find_peak_difference breaks ties toward the lower frequency") {
  PsdDelta delta{1.0, FrequencyGrid(Band(1.0, 2.0), 5), {1.0, 3.0, 2.0, 3.0, 0.5}};
  PeakDifference peak = find_peak_difference(delta);
  CHECK(peak.frequency_thz == doctest::Approx(1.25));
  CHECK(peak.magnitude_db == doctest::Approx(3.0));
  PsdDelta empty{1.0, FrequencyGrid(Band(1.0, 2.0), 5), {}};
  CHECK_THROWS_AS(find_peak_difference(empty), EmptyInput);
}

TEST_CASE("band score prefers the window holding the target's lines") {
  auto catalogs = corpus();
  // Ozone has lines in 0.59-0.69 THz; water does not. In 6-8 THz (no O3
  // lines in the corpus within the wing cutoff) the score collapses.
  const double good = band_score(GasSpecies::O3, catalogs, Band(0.59, 0.69),
                                 100.0, 1e-3);
  const double bad = band_score(GasSpecies::O3, catalogs, Band(6.0, 8.0),
                                100.0, 1e-3);
  CHECK(good > 100.0 * (bad + 1e-12));
}

TEST_CASE("received PSD rejects a mismatched spectrum grid") {
  FrequencyGrid g1(Band(1.0, 3.0), 11);
  FrequencyGrid g2(Band(1.0, 3.0), 12);
  ChirpPulse pulse = ChirpPulse::over_band(Band(1.0, 3.0));
  AbsorptionSpectrum spec{g2, std::vector<double>(g2.size(), 0.0), GasMixture()};
  PsdCurve ok = received_psd(pulse, spec, 1.0);
  CHECK(ok.grid == g2);
  // A spectrum whose stored values disagree with its own grid length is the
  // mismatch the API guards against.
  AbsorptionSpectrum broken{g1, std::vector<double>(5, 0.0), GasMixture()};
  CHECK_THROWS_AS(received_psd(pulse, broken, 1.0), GridMismatch);
}
