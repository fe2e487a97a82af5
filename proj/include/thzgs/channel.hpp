#ifndef THZGS_CHANNEL_HPP
#define THZGS_CHANNEL_HPP

#include <complex>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "thzgs/spectra.hpp"
#include "thzgs/units.hpp"

namespace thzgs {

struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UndersampledPulse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Free-space spreading loss 20*log10(4 pi f d / c), dB.
double spreading_loss_db(double f_thz, double d_m);

// Spreading plus Beer-Lambert absorption loss at one frequency.
double total_path_loss_db(double f_thz, double d_m, double k_per_m);

// Linear up-chirp with rectangular envelope. Default duration matches the
// 0.05 ns probing pulse used throughout the PSD analyses.
struct ChirpPulse {
  double f_start_thz = 0.0;
  double f_stop_thz = 0.0;
  double duration_s = 0.05e-9;
  double amplitude = 1.0;        // unit-normalized peak
  double sample_rate = 0.0;      // samples/second

  static constexpr double kOversampleMargin = 1.25;

  // Chirp sweeping exactly the analysis band, sampled at 4x f_stop.
  static ChirpPulse over_band(const Band& band, double duration_s = 0.05e-9);

  void validate() const;
};

// Real-valued samples of the chirp; length = round(duration * sample_rate).
std::vector<double> chirp_waveform(const ChirpPulse& pulse);

// One-sided periodogram of a sample record on the DFT bin grid.
// frequencies_thz[k] = k * fs / N, values in linear power units such that
// sum(values) * df equals the waveform energy sum(x^2)/fs.
struct Periodogram {
  std::vector<double> frequencies_thz;
  std::vector<double> values;
  double bin_width_thz = 0.0;
};
Periodogram compute_periodogram(const std::vector<double>& samples,
                                double sample_rate);

// PSD on an analysis grid, in dB relative to the transmit in-band peak.
struct PsdCurve {
  FrequencyGrid grid;
  std::vector<double> values_dbr;
  double reference_linear = 0.0;  // the 0 dBr level in linear units
  // context
  double distance_m = 0.0;
  std::string mixture_id;
  bool includes_absorption_noise = false;
};

// Magnitude-squared spectrum of the pulse evaluated on the analysis grid
// (rectangular window, single shot), normalized so the in-band peak is 0 dBr.
PsdCurve transmit_psd(const ChirpPulse& pulse, const FrequencyGrid& grid);

// Received PSD: transmit PSD times free-space spreading and transmittance,
// optionally plus the molecular absorption noise floor kB*T0*(1 - tau).
PsdCurve received_psd(const ChirpPulse& pulse,
                      const AbsorptionSpectrum& spectrum, double d_m,
                      bool include_noise = false);

// PSD change (dB) when one gas's concentration is scaled relative to the
// base mixture, same geometry.
struct PsdDelta {
  double multiplier = 1.0;
  FrequencyGrid grid;
  std::vector<double> delta_db;
};

std::vector<PsdDelta> psd_difference(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const GasMixture& base_mixture, GasSpecies gas,
    const std::vector<double>& multipliers, const FrequencyGrid& grid,
    double d_m, const SpectraOptions& options = {}, bool include_noise = false);

// Bin of maximal |delta|; ties broken toward the lower frequency.
struct PeakDifference {
  double frequency_thz = 0.0;
  double magnitude_db = 0.0;
};
PeakDifference find_peak_difference(const PsdDelta& delta);

// Band suitability for sensing `target`: mean target unit profile over mean
// H2O unit profile (plus epsilon). Higher is better.
double band_score(GasSpecies target,
                  const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
                  const Band& band, double d_m, double grid_step_thz = 1e-4,
                  const SpectraOptions& options = {});

// CSV export: "frequency_thz,psd_dbr"; deltas add a trailing multiplier column.
void write_psd_csv(const std::filesystem::path& path, const PsdCurve& curve);
void write_psd_delta_csv(const std::filesystem::path& path,
                         const std::vector<PsdDelta>& deltas);

}  // namespace thzgs

#endif  // THZGS_CHANNEL_HPP
