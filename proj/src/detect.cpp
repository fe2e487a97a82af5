#include "thzgs/detect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

namespace thzgs {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

nlohmann::json config_json(const MonteCarloConfig& config) {
  nlohmann::json j;
  j["runs"] = config.runs;
  j["noise_level_percent"] = config.noise_level_percent;
  j["band_thz"] = {config.band.f_low_thz, config.band.f_high_thz};
  j["distance_m"] = config.distance_m;
  nlohmann::json gases = nlohmann::json::array();
  for (GasSpecies g : config.gases) gases.push_back(to_string(g));
  j["gases"] = gases;
  j["master_seed"] = config.master_seed;
  j["grid_step_thz"] = config.grid_step_thz;
  j["noise_model"] = config.noise_model == NoiseModel::kPerFrequency
                         ? "per_frequency"
                         : "band_max";
  j["self_broadening"] = config.spectra.self_broadening;
  j["wing_cutoff_cm"] = config.spectra.wing_cutoff_cm;
  j["version"] = kCodeVersion;
  return j;
}

}  // namespace

Band reference_scan_band(GasSpecies gas) {
  switch (gas) {
    case GasSpecies::H2O:   return {6.0, 8.0};
    case GasSpecies::CO2:   return {8.0, 10.0};
    case GasSpecies::O3:    return {1.0, 3.0};
    case GasSpecies::N2O:   return {0.1, 1.5};
    case GasSpecies::CO:    return {0.5, 3.0};
    case GasSpecies::CH4:   return {3.0, 4.5};
    case GasSpecies::O2:    return {0.5, 2.5};
    case GasSpecies::SO2:   return {0.5, 2.5};
    case GasSpecies::NO2:   return {1.0, 3.0};
    case GasSpecies::NH3:   return {3.0, 5.5};
    case GasSpecies::N2:    return {3.0, 5.0};
    case GasSpecies::HCN:   return {1.0, 3.0};
    case GasSpecies::CH3OH: return {0.1, 1.0};
  }
  throw std::invalid_argument("unknown gas");
}

bool reference_detectable(GasSpecies gas) {
  switch (gas) {
    case GasSpecies::N2:
    case GasSpecies::CO2:
    case GasSpecies::N2O:
    case GasSpecies::CH3OH:
      return false;
    default:
      return true;
  }
}

double reference_threshold_percent(GasSpecies gas) {
  switch (gas) {
    case GasSpecies::H2O: return 1e0;
    case GasSpecies::O2:  return 1e-2;
    case GasSpecies::SO2: return 1e-2;
    case GasSpecies::NH3: return 1e-2;
    case GasSpecies::O3:  return 1e-3;
    case GasSpecies::NO2: return 1e-3;
    case GasSpecies::HCN: return 1e-3;
    case GasSpecies::CO:  return 1e-4;
    case GasSpecies::CH4: return 1e-5;
    default:
      throw std::invalid_argument("gas has no reference threshold");
  }
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, int run_index) {
  return mix(master_seed, static_cast<std::uint64_t>(run_index));
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("percentile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

McReport monte_carlo_estimate(const DesignMatrix& A,
                              const MonteCarloConfig& config,
                              const std::map<GasSpecies, double>& x_true_ppm) {
  if (config.runs < 2)
    throw std::invalid_argument("monte_carlo_estimate: need runs >= 2");

  const Eigen::Index m = static_cast<Eigen::Index>(A.gases.size());
  Eigen::VectorXd x_true(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    auto it = x_true_ppm.find(A.gases[j]);
    x_true(j) = it == x_true_ppm.end() ? 0.0 : it->second;
  }

  // Per-run estimates, aggregated strictly by run index.
  std::vector<std::optional<EstimationResult>> runs(config.runs);
  auto worker = [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      Eigen::VectorXd y =
          simulate_measurement(A, x_true, config.noise_level_percent,
                               derive_run_seed(config.master_seed, r),
                               config.noise_model);
      // The truth must be feasible: the sum constraint is the true total
      // (the standard table sums slightly above 1e6 ppm).
      ConcentrationConstraints constraints;
      constraints.sum_total = x_true.sum();
      EstimationResult est = solve_constrained_ls(A, y, constraints);
      if (est.converged) runs[r] = std::move(est);
    }
  };

  int n_threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, config.runs);
  std::vector<std::future<void>> futures;
  const int chunk = (config.runs + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(config.runs, begin + chunk);
    if (begin >= end) break;
    futures.push_back(std::async(std::launch::async, worker, begin, end));
  }
  for (auto& f : futures) f.get();

  McReport report;
  report.runs = config.runs;
  report.master_seed = config.master_seed;
  report.noise_level_percent = config.noise_level_percent;
  for (Eigen::Index j = 0; j < m; ++j)
    report.x_true_ppm[A.gases[j]] = x_true(j);

  int failed = 0;
  for (const auto& r : runs)
    if (!r) ++failed;
  report.failed_runs = failed;
  if (failed > config.runs / 20)
    throw HarnessUnstable("more than 5% of Monte Carlo runs failed to converge");

  const std::vector<GasSpecies>& unident =
      [&]() -> const std::vector<GasSpecies>& {
    for (const auto& r : runs)
      if (r) return r->unidentifiable;
    throw HarnessUnstable("no successful Monte Carlo run");
  }();

  for (Eigen::Index j = 0; j < m; ++j) {
    const GasSpecies gas = A.gases[j];
    GasStats stats;
    if (std::find(unident.begin(), unident.end(), gas) != unident.end()) {
      stats.identifiable = false;
      report.stats[gas] = stats;
      continue;
    }
    std::vector<double> estimates, rel_errors;
    estimates.reserve(runs.size());
    for (const auto& r : runs) {
      if (!r) continue;
      const double e = r->estimates.at(gas);
      estimates.push_back(e);
      rel_errors.push_back(x_true(j) > 0.0 ? std::abs(e - x_true(j)) / x_true(j)
                                           : std::abs(e));
    }
    double sum = 0.0;
    for (double e : estimates) sum += e;
    stats.mean = sum / static_cast<double>(estimates.size());
    stats.median = percentile(estimates, 0.5);
    stats.lcl = percentile(estimates, 0.025);
    stats.ucl = percentile(estimates, 0.975);
    stats.median_rel_error = percentile(rel_errors, 0.5);
    report.stats[gas] = stats;
  }
  return report;
}

bool detection_criterion(const GasStats& stats, double x_true_ppm) {
  if (!stats.identifiable) return false;
  const bool covered = stats.lcl <= x_true_ppm && x_true_ppm <= stats.ucl;
  return stats.median_rel_error <= 0.10 && covered;
}

DetectabilityReport detectability_scan(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs, GasSpecies gas,
    const Band& band, const std::vector<double>& levels_percent,
    const MonteCarloConfig& config, bool full_scan) {
  for (std::size_t i = 1; i < levels_percent.size(); ++i)
    if (!(levels_percent[i] < levels_percent[i - 1]))
      throw std::invalid_argument("noise levels must be strictly decreasing");

  DetectabilityReport report;
  report.gas = gas;
  report.band = band;
  report.config = config;
  report.config.band = band;

  const FrequencyGrid grid = FrequencyGrid::with_step(band, config.grid_step_thz);
  const DesignMatrix A = build_design_matrix(catalogs, config.gases, grid,
                                             config.distance_m, config.spectra);
  const GasMixture atmosphere = GasMixture::standard_atmosphere();
  std::map<GasSpecies, double> x_true;
  for (GasSpecies g : config.gases) x_true[g] = atmosphere.ppm(g);

  auto run_level = [&](double level, int runs) {
    MonteCarloConfig cfg = config;
    cfg.band = band;
    cfg.noise_level_percent = level;
    cfg.runs = runs;
    // Independent, reproducible noise stream per level.
    cfg.master_seed = mix(config.master_seed,
                          static_cast<std::uint64_t>(level * 1e12));
    McReport mc = monte_carlo_estimate(A, cfg, x_true);
    LevelResult result;
    result.noise_level_percent = level;
    result.stats = mc.stats.at(gas);
    result.pass = detection_criterion(result.stats, x_true.at(gas));
    return result;
  };

  for (double level : levels_percent) {
    report.levels.push_back(run_level(level, config.runs));
    if (report.levels.back().pass) {
      if (!report.threshold_percent) report.threshold_percent = level;
      if (!full_scan) break;
    }
  }

  if (full_scan && report.threshold_percent) {
    // A pass at some level must hold at every finer level; treat violations
    // as statistical noise and retry them at 4x runs.
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
      if (report.levels[i].noise_level_percent <= *report.threshold_percent &&
          !report.levels[i].pass) {
        report.levels[i] =
            run_level(report.levels[i].noise_level_percent, config.runs * 4);
      }
    }
  }
  return report;
}

SensitivityCurve sensitivity_curve(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs, GasSpecies gas,
    const std::vector<double>& sweep_ppm, double noise_level_percent,
    const Band& band, double distance_m, const MonteCarloConfig& config) {
  SensitivityCurve curve;
  curve.gas = gas;
  curve.true_concentrations = sweep_ppm;

  const FrequencyGrid grid = FrequencyGrid::with_step(band, config.grid_step_thz);
  MonteCarloConfig cfg = config;
  cfg.band = band;
  cfg.distance_m = distance_m;
  cfg.noise_level_percent = noise_level_percent;
  const DesignMatrix A =
      build_design_matrix(catalogs, cfg.gases, grid, distance_m, cfg.spectra);

  const GasMixture atmosphere = GasMixture::standard_atmosphere();
  const double q_standard = atmosphere.ppm(gas);
  const double q_filler = atmosphere.ppm(GasSpecies::N2);

  for (std::size_t p = 0; p < sweep_ppm.size(); ++p) {
    const double q = sweep_ppm[p];
    // N2 absorbs the difference so the total stays at 1e6 ppm.
    const double filler = q_filler + (q_standard - q);
    if (filler < 0.0 || filler > 1e6)
      throw std::invalid_argument("sensitivity sweep value not rebalanceable");
    std::map<GasSpecies, double> x_true;
    for (GasSpecies g : cfg.gases) x_true[g] = atmosphere.ppm(g);
    x_true[gas] = q;
    x_true[GasSpecies::N2] = filler;

    MonteCarloConfig point_cfg = cfg;
    point_cfg.master_seed = mix(config.master_seed, 7000 + p);
    McReport mc = monte_carlo_estimate(A, point_cfg, x_true);
    const GasStats& stats = mc.stats.at(gas);
    curve.predicted_mean.push_back(stats.mean);
    curve.lcl.push_back(stats.lcl);
    curve.ucl.push_back(stats.ucl);
    curve.median_rel_error.push_back(stats.median_rel_error);
    if (q > 0.0)
      curve.max_relative_deviation = std::max(
          curve.max_relative_deviation, std::abs(stats.mean - q) / q);
  }
  return curve;
}

namespace {

nlohmann::json stats_json(const GasStats& stats) {
  return {{"identifiable", stats.identifiable},
          {"mean", stats.mean},
          {"median", stats.median},
          {"lcl", stats.lcl},
          {"ucl", stats.ucl},
          {"median_rel_error", stats.median_rel_error}};
}

}  // namespace

void write_detectability_json(const std::filesystem::path& path,
                              const DetectabilityReport& report) {
  nlohmann::json j;
  j["gas"] = to_string(report.gas);
  j["band_thz"] = {report.band.f_low_thz, report.band.f_high_thz};
  j["criterion"] = "median relative error <= 10% and 95% CI covers truth";
  j["config"] = config_json(report.config);
  nlohmann::json levels = nlohmann::json::array();
  for (const LevelResult& level : report.levels) {
    nlohmann::json lj = stats_json(level.stats);
    lj["noise_level_percent"] = level.noise_level_percent;
    lj["pass"] = level.pass;
    levels.push_back(lj);
  }
  j["levels"] = levels;
  if (report.threshold_percent)
    j["threshold_percent"] = *report.threshold_percent;
  else
    j["threshold_percent"] = nullptr;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_detectability_csv(const std::filesystem::path& path,
                             const DetectabilityReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "gas,noise_level_percent,pass,identifiable,mean,median,lcl,ucl,"
         "median_rel_error\n";
  for (const LevelResult& level : report.levels) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(report.gas), level.noise_level_percent,
                  level.pass ? 1 : 0, level.stats.identifiable ? 1 : 0,
                  level.stats.mean, level.stats.median, level.stats.lcl,
                  level.stats.ucl, level.stats.median_rel_error);
    out << buf;
  }
}

void write_sensitivity_json(const std::filesystem::path& path,
                            const SensitivityCurve& curve,
                            const MonteCarloConfig& config) {
  nlohmann::json j;
  j["gas"] = to_string(curve.gas);
  j["config"] = config_json(config);
  j["true_concentrations_ppm"] = curve.true_concentrations;
  j["predicted_mean_ppm"] = curve.predicted_mean;
  j["lcl_ppm"] = curve.lcl;
  j["ucl_ppm"] = curve.ucl;
  j["median_rel_error"] = curve.median_rel_error;
  j["max_relative_deviation"] = curve.max_relative_deviation;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_sensitivity_csv(const std::filesystem::path& path,
                           const SensitivityCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "gas,true_ppm,predicted_mean_ppm,lcl_ppm,ucl_ppm,median_rel_error\n";
  for (std::size_t i = 0; i < curve.true_concentrations.size(); ++i) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(curve.gas), curve.true_concentrations[i],
                  curve.predicted_mean[i], curve.lcl[i], curve.ucl[i],
                  curve.median_rel_error[i]);
    out << buf;
  }
}

}  // namespace thzgs
