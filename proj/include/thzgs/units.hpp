#ifndef THZGS_UNITS_HPP
#define THZGS_UNITS_HPP

#include <stdexcept>
#include <vector>

namespace thzgs {

// Physical constants. The speed of light is pinned here once; every
// THz <-> wavenumber conversion in the project goes through it.
inline constexpr double kSpeedOfLightCmPerS = 2.99792458e10;
inline constexpr double kSpeedOfLightMPerS = 2.99792458e8;
inline constexpr double kBoltzmannJPerK = 1.380649e-23;

inline constexpr double kReferenceTemperatureK = 296.0;
inline constexpr double kReferencePressureAtm = 1.0;

// Ideal-gas number density at 296 K, 1 atm, molecule/cm^3.
inline constexpr double kReferenceNumberDensity = 2.4793e19;

// 10*log10(e): dB of loss per neper of optical depth.
inline constexpr double kDbPerNeper = 4.342944819032518;

constexpr double thz_to_wavenumber(double f_thz) {
  return f_thz * 1e12 / kSpeedOfLightCmPerS;
}

constexpr double wavenumber_to_thz(double nu_cm) {
  return nu_cm * kSpeedOfLightCmPerS / 1e12;
}

// Frequency band in THz. The working range of the toolkit is 0.1-10 THz.
struct Band {
  double f_low_thz = 0.0;
  double f_high_thz = 0.0;

  Band() = default;
  Band(double f_low, double f_high) : f_low_thz(f_low), f_high_thz(f_high) {
    if (!(f_low_thz >= 0.1 && f_low_thz < f_high_thz && f_high_thz <= 10.0))
      throw std::invalid_argument("Band: need 0.1 <= f_low < f_high <= 10.0 THz");
  }

  double nu_low_cm() const { return thz_to_wavenumber(f_low_thz); }
  double nu_high_cm() const { return thz_to_wavenumber(f_high_thz); }
  double width_thz() const { return f_high_thz - f_low_thz; }

  bool contains(double f_thz) const {
    return f_thz >= f_low_thz && f_thz <= f_high_thz;
  }
  bool covers(const Band& other) const {
    return f_low_thz <= other.f_low_thz && f_high_thz >= other.f_high_thz;
  }
};

// Uniform frequency grid over a band, endpoints included.
class FrequencyGrid {
 public:
  FrequencyGrid(Band band, int n_points) : band_(band), n_points_(n_points) {
    if (n_points_ < 2)
      throw std::invalid_argument("FrequencyGrid: n_points must be >= 2");
    step_ = band_.width_thz() / (n_points_ - 1);
  }

  // Grid with (approximately) the requested step; endpoints always land on
  // the band edges.
  static FrequencyGrid with_step(Band band, double step_thz) {
    if (step_thz <= 0.0)
      throw std::invalid_argument("FrequencyGrid: step must be positive");
    int n = static_cast<int>(band.width_thz() / step_thz + 0.5) + 1;
    return FrequencyGrid(band, n < 2 ? 2 : n);
  }

  const Band& band() const { return band_; }
  int size() const { return n_points_; }
  double step_thz() const { return step_; }

  double frequency_thz(int i) const { return band_.f_low_thz + step_ * i; }
  double wavenumber(int i) const { return thz_to_wavenumber(frequency_thz(i)); }

  std::vector<double> frequencies() const {
    std::vector<double> f(n_points_);
    for (int i = 0; i < n_points_; ++i) f[i] = frequency_thz(i);
    return f;
  }

  bool operator==(const FrequencyGrid& o) const {
    return band_.f_low_thz == o.band_.f_low_thz &&
           band_.f_high_thz == o.band_.f_high_thz && n_points_ == o.n_points_;
  }

 private:
  Band band_;
  int n_points_;
  double step_;
};

}  // namespace thzgs

#endif  // THZGS_UNITS_HPP
