#ifndef THZGS_DETECT_HPP
#define THZGS_DETECT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "thzgs/inversion.hpp"

namespace thzgs {

struct MonteCarloConfig {
  int runs = 200;                       // desk scale; 1000 for paper scale
  double noise_level_percent = 0.0;
  Band band{1.0, 3.0};
  double distance_m = 0.05;
  std::vector<GasSpecies> gases{kAllSpecies.begin(), kAllSpecies.end()};
  std::uint64_t master_seed = 20260823;
  double grid_step_thz = 1e-4;
  NoiseModel noise_model = NoiseModel::kPerFrequency;
  SpectraOptions spectra;
  int threads = 0;  // 0 = hardware concurrency
};

struct HarnessUnstable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GasStats {
  double mean = 0.0;
  double median = 0.0;
  double lcl = 0.0;  // 2.5th percentile
  double ucl = 0.0;  // 97.5th percentile
  double median_rel_error = 0.0;  // vs the true concentration
  bool identifiable = true;
};

struct McReport {
  std::map<GasSpecies, GasStats> stats;
  std::map<GasSpecies, double> x_true_ppm;
  int runs = 0;
  int failed_runs = 0;
  std::uint64_t master_seed = 0;
  double noise_level_percent = 0.0;
};

// Stable per-run seed so adding runs never reshuffles earlier draws.
std::uint64_t derive_run_seed(std::uint64_t master_seed, int run_index);

// Percentile with linear interpolation between order statistics; p in [0,1].
double percentile(std::vector<double> values, double p);

// `runs` independent simulate -> solve trials; 95% band from the 2.5/97.5
// percentiles. Run failures above 5% raise HarnessUnstable.
McReport monte_carlo_estimate(const DesignMatrix& A,
                              const MonteCarloConfig& config,
                              const std::map<GasSpecies, double>& x_true_ppm);

// Detection passes when the median relative error is within 10% and the 95%
// interval covers the truth. Unidentifiable gases never pass.
bool detection_criterion(const GasStats& stats, double x_true_ppm);

struct LevelResult {
  double noise_level_percent = 0.0;
  GasStats stats;
  bool pass = false;
};

struct DetectabilityReport {
  GasSpecies gas = GasSpecies::H2O;
  Band band{1.0, 3.0};
  std::vector<LevelResult> levels;           // coarse to fine
  std::optional<double> threshold_percent;   // coarsest passing level
  MonteCarloConfig config;
};

inline const std::vector<double> kDefaultNoiseLevels = {1e0,  1e-1, 1e-2, 1e-3,
                                                        1e-4, 1e-5, 1e-6};

// Reference analysis band for scanning each gas (the band its absorption
// signature is probed in) and the reference detectability outcome there.
Band reference_scan_band(GasSpecies gas);
bool reference_detectable(GasSpecies gas);
// Reference threshold noise level (percent) for detectable gases.
double reference_threshold_percent(GasSpecies gas);

// Walk the noise decades coarse to fine; by default stop at the first pass.
// With full_scan, finer levels are evaluated too and pass/fail monotonicity
// violations are retried at 4x runs.
DetectabilityReport detectability_scan(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs, GasSpecies gas,
    const Band& band, const std::vector<double>& levels_percent,
    const MonteCarloConfig& config, bool full_scan = false);

struct SensitivityCurve {
  GasSpecies gas = GasSpecies::H2O;
  std::vector<double> true_concentrations;  // ppm
  std::vector<double> predicted_mean;
  std::vector<double> lcl, ucl;
  std::vector<double> median_rel_error;
  double max_relative_deviation = 0.0;  // of predicted mean from truth
};

// Sweep the true concentration of one gas; the N2 filler absorbs the
// difference so the mixture keeps summing to 1e6 ppm.
SensitivityCurve sensitivity_curve(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs, GasSpecies gas,
    const std::vector<double>& sweep_ppm, double noise_level_percent,
    const Band& band, double distance_m, const MonteCarloConfig& config);

// JSON/CSV exports; every file embeds config, seed, and code version.
void write_detectability_json(const std::filesystem::path& path,
                              const DetectabilityReport& report);
void write_detectability_csv(const std::filesystem::path& path,
                             const DetectabilityReport& report);
void write_sensitivity_json(const std::filesystem::path& path,
                            const SensitivityCurve& curve,
                            const MonteCarloConfig& config);
void write_sensitivity_csv(const std::filesystem::path& path,
                           const SensitivityCurve& curve);

inline constexpr const char* kCodeVersion = "thzgs 0.1.0";

}  // namespace thzgs

#endif  // THZGS_DETECT_HPP
