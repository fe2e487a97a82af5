#include "thzgs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace thzgs {

using std::numbers::pi;

double spreading_loss_db(double f_thz, double d_m) {
  if (f_thz <= 0.0 || d_m <= 0.0)
    throw DegenerateGeometry("spreading loss needs f > 0 and d > 0");
  const double f_hz = f_thz * 1e12;
  return 20.0 * std::log10(4.0 * pi * f_hz * d_m / kSpeedOfLightMPerS);
}

double total_path_loss_db(double f_thz, double d_m, double k_per_m) {
  return spreading_loss_db(f_thz, d_m) + kDbPerNeper * k_per_m * d_m;
}

ChirpPulse ChirpPulse::over_band(const Band& band, double duration_s) {
  ChirpPulse p;
  p.f_start_thz = band.f_low_thz;
  p.f_stop_thz = band.f_high_thz;
  p.duration_s = duration_s;
  p.sample_rate = 4.0 * band.f_high_thz * 1e12;
  return p;
}

void ChirpPulse::validate() const {
  if (!(f_start_thz < f_stop_thz) || duration_s <= 0.0)
    throw std::invalid_argument("ChirpPulse: need f_start < f_stop, duration > 0");
  if (sample_rate < 2.0 * f_stop_thz * 1e12 * kOversampleMargin)
    throw UndersampledPulse("ChirpPulse: sample rate below 2.5x f_stop");
}

std::vector<double> chirp_waveform(const ChirpPulse& pulse) {
  pulse.validate();
  const int n = static_cast<int>(std::lround(pulse.duration_s * pulse.sample_rate));
  const double f0 = pulse.f_start_thz * 1e12;
  const double sweep_rate =
      (pulse.f_stop_thz - pulse.f_start_thz) * 1e12 / pulse.duration_s;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    const double t = i / pulse.sample_rate;
    const double phase = 2.0 * pi * (f0 * t + 0.5 * sweep_rate * t * t);
    x[i] = pulse.amplitude * std::cos(phase);
  }
  return x;
}

Periodogram compute_periodogram(const std::vector<double>& samples,
                                double sample_rate) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) throw EmptyInput("periodogram of empty record");
  const int n_bins = n / 2 + 1;
  Periodogram out;
  out.bin_width_thz = sample_rate / n / 1e12;
  out.frequencies_thz.resize(n_bins);
  out.values.resize(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    double re = 0.0, im = 0.0;
    const double w = -2.0 * pi * k / n;
    for (int i = 0; i < n; ++i) {
      re += samples[i] * std::cos(w * i);
      im += samples[i] * std::sin(w * i);
    }
    // One-sided PSD with integral normalization: integrating values over
    // frequency (in Hz) recovers the waveform energy sum(x^2)/fs.
    double s = (re * re + im * im) / (sample_rate * sample_rate);
    const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
    out.values[k] = edge ? s : 2.0 * s;
    out.frequencies_thz[k] = k * sample_rate / n / 1e12;
  }
  return out;
}

namespace {

// |DTFT|^2 of the pulse at an arbitrary frequency, same normalization as the
// periodogram bins (one-sided).
double dtft_power(const std::vector<double>& x, double sample_rate,
                  double f_hz) {
  const double w = -2.0 * pi * f_hz / sample_rate;
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    re += x[i] * std::cos(w * static_cast<double>(i));
    im += x[i] * std::sin(w * static_cast<double>(i));
  }
  return 2.0 * (re * re + im * im) / (sample_rate * sample_rate);
}

std::vector<double> transmit_psd_linear(const ChirpPulse& pulse,
                                        const FrequencyGrid& grid,
                                        double* in_band_peak) {
  const std::vector<double> x = chirp_waveform(pulse);
  std::vector<double> s(grid.size());
  double peak = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double f = grid.frequency_thz(i);
    s[i] = dtft_power(x, pulse.sample_rate, f * 1e12);
    if (f >= pulse.f_start_thz && f <= pulse.f_stop_thz) peak = std::max(peak, s[i]);
  }
  if (peak <= 0.0) peak = *std::max_element(s.begin(), s.end());
  *in_band_peak = peak;
  return s;
}

}  // namespace

PsdCurve transmit_psd(const ChirpPulse& pulse, const FrequencyGrid& grid) {
  double peak = 0.0;
  std::vector<double> s = transmit_psd_linear(pulse, grid, &peak);
  PsdCurve curve{grid, {}, peak, 0.0, "", false};
  curve.values_dbr.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    curve.values_dbr[i] = 10.0 * std::log10(std::max(s[i], 1e-300) / peak);
  curve.mixture_id = "tx";
  return curve;
}

PsdCurve received_psd(const ChirpPulse& pulse,
                      const AbsorptionSpectrum& spectrum, double d_m,
                      bool include_noise) {
  if (d_m <= 0.0) throw DegenerateGeometry("received_psd needs d > 0");
  const FrequencyGrid& grid = spectrum.grid;
  if (pulse.f_start_thz < grid.band().f_low_thz ||
      pulse.f_stop_thz > grid.band().f_high_thz)
    throw GridMismatch("spectrum grid does not cover the pulse band");
  if (static_cast<int>(spectrum.k_per_m.size()) != grid.size())
    throw GridMismatch("absorption values disagree with the spectrum grid");

  double peak = 0.0;
  std::vector<double> s_tx = transmit_psd_linear(pulse, grid, &peak);
  const std::vector<double> tau = transmittance(spectrum, d_m);

  PsdCurve curve{grid, {}, peak, 0.0, "", false};
  curve.values_dbr.resize(s_tx.size());
  curve.distance_m = d_m;
  curve.includes_absorption_noise = include_noise;
  for (int i = 0; i < grid.size(); ++i) {
    const double f_hz = grid.frequency_thz(i) * 1e12;
    const double spread = kSpeedOfLightMPerS / (4.0 * pi * f_hz * d_m);
    double s = s_tx[i] * spread * spread * tau[i];
    if (include_noise)
      s += kBoltzmannJPerK * kReferenceTemperatureK * (1.0 - tau[i]);
    curve.values_dbr[i] = 10.0 * std::log10(std::max(s, 1e-300) / peak);
  }
  return curve;
}

std::vector<PsdDelta> psd_difference(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const GasMixture& base_mixture, GasSpecies gas,
    const std::vector<double>& multipliers, const FrequencyGrid& grid,
    double d_m, const SpectraOptions& options, bool include_noise) {
  for (double m : multipliers)
    if (m <= 0.0)
      throw std::invalid_argument("psd_difference: multipliers must be > 0");
  const double q_base = base_mixture.ppm(gas);

  ChirpPulse pulse = ChirpPulse::over_band(grid.band());
  AbsorptionSpectrum base_spec =
      absorption_coefficient(catalogs, base_mixture, grid, options);
  PsdCurve base = received_psd(pulse, base_spec, d_m, include_noise);

  std::vector<PsdDelta> deltas;
  deltas.reserve(multipliers.size());
  for (double m : multipliers) {
    GasMixture mixture = base_mixture;
    mixture.set_ppm(gas, q_base * m);
    AbsorptionSpectrum spec =
        absorption_coefficient(catalogs, mixture, grid, options);
    PsdCurve rx = received_psd(pulse, spec, d_m, include_noise);
    PsdDelta delta{m, grid, std::vector<double>(base.values_dbr.size())};
    for (std::size_t i = 0; i < delta.delta_db.size(); ++i)
      delta.delta_db[i] = rx.values_dbr[i] - base.values_dbr[i];
    deltas.push_back(std::move(delta));
  }
  return deltas;
}

PeakDifference find_peak_difference(const PsdDelta& delta) {
  if (delta.delta_db.empty()) throw EmptyInput("empty PSD delta");
  int best = 0;
  for (int i = 1; i < static_cast<int>(delta.delta_db.size()); ++i)
    if (std::abs(delta.delta_db[i]) > std::abs(delta.delta_db[best])) best = i;
  return {delta.grid.frequency_thz(best), delta.delta_db[best]};
}

double band_score(GasSpecies target,
                  const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
                  const Band& band, double d_m, double grid_step_thz,
                  const SpectraOptions& options) {
  const FrequencyGrid grid = FrequencyGrid::with_step(band, grid_step_thz);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double target_mean =
      mean(unit_absorption_profile(target, catalogs, grid, d_m, options));
  const double h2o_mean = mean(
      unit_absorption_profile(GasSpecies::H2O, catalogs, grid, d_m, options));
  return target_mean / (h2o_mean + 1e-12);
}

void write_psd_csv(const std::filesystem::path& path, const PsdCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "frequency_thz,psd_dbr\n";
  char buf[64];
  for (int i = 0; i < curve.grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", curve.grid.frequency_thz(i),
                  curve.values_dbr[i]);
    out << buf;
  }
}

void write_psd_delta_csv(const std::filesystem::path& path,
                         const std::vector<PsdDelta>& deltas) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "frequency_thz,psd_dbr,multiplier\n";
  char buf[96];
  for (const PsdDelta& delta : deltas)
    for (int i = 0; i < delta.grid.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%g\n",
                    delta.grid.frequency_thz(i), delta.delta_db[i],
                    delta.multiplier);
      out << buf;
    }
}

}  // namespace thzgs
