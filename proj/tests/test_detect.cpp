#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thzgs/detect.hpp"
#include "thzgs/hitran/catalog.hpp"

using namespace thzgs;
using namespace thzgs::hitran;

namespace {

std::map<GasSpecies, LineCatalog> corpus() {
  static auto catalogs = load_catalog_directory(THZGS_DATA_DIR);
  return catalogs;
}

std::map<GasSpecies, double> standard_truth() {
  std::map<GasSpecies, double> x;
  for (GasSpecies g : kAllSpecies) x[g] = standard_concentration_ppm(g);
  return x;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("per-run seeds are stable and collision-free") {
  CHECK(derive_run_seed(1, 0) == derive_run_seed(1, 0));
  std::set<std::uint64_t> seeds;
  for (int run = 0; run < 10000; ++run) seeds.insert(derive_run_seed(123, run));
  CHECK(seeds.size() == 10000);
  CHECK(derive_run_seed(1, 5) != derive_run_seed(2, 5));
}

TEST_CASE("percentile interpolates order statistics") {
  std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 4.0);
  CHECK(percentile(v, 0.5) == doctest::Approx(2.5));
  CHECK(percentile(v, 1.0 / 3.0) == doctest::Approx(2.0));
  CHECK(percentile({7.0}, 0.5) == 7.0);
  CHECK_THROWS_AS(percentile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(percentile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("detection criterion: error bound, coverage, identifiability") {
  GasStats good{0.07, 0.07, 0.06, 0.08, 0.05, true};
  CHECK(detection_criterion(good, 0.07));
  GasStats big_error = good;
  big_error.median_rel_error = 0.15;
  CHECK(!detection_criterion(big_error, 0.07));
  GasStats miss_low = good;   // interval entirely above the truth
  miss_low.lcl = 0.071;
  CHECK(!detection_criterion(miss_low, 0.07));
  GasStats miss_high = good;  // interval entirely below the truth
  miss_high.ucl = 0.069;
  CHECK(!detection_criterion(miss_high, 0.07));
  GasStats unident = good;
  unident.identifiable = false;
  CHECK(!detection_criterion(unident, 0.07));
}

TEST_CASE("Monte Carlo runs are deterministic and zero noise is exact") {
  auto catalogs = corpus();
  MonteCarloConfig config;
  config.runs = 20;
  config.grid_step_thz = 1e-3;
  config.noise_level_percent = 1e-3;
  FrequencyGrid grid = FrequencyGrid::with_step(config.band,
                                                config.grid_step_thz);
  DesignMatrix A =
      build_design_matrix(catalogs, config.gases, grid, config.distance_m);
  auto truth = standard_truth();

  McReport r1 = monte_carlo_estimate(A, config, truth);
  McReport r2 = monte_carlo_estimate(A, config, truth);
  CHECK(r1.runs == 20);
  CHECK(r1.failed_runs == 0);
  for (GasSpecies g : config.gases) {
    CHECK(r1.stats.at(g).mean == r2.stats.at(g).mean);
    CHECK(r1.stats.at(g).ucl == r2.stats.at(g).ucl);
  }

  // Thread count must not change results (aggregation is by run index).
  MonteCarloConfig serial = config;
  serial.threads = 1;
  McReport r3 = monte_carlo_estimate(A, serial, truth);
  for (GasSpecies g : config.gases)
    CHECK(r1.stats.at(g).median == r3.stats.at(g).median);

  MonteCarloConfig quiet = config;
  quiet.noise_level_percent = 0.0;
  quiet.runs = 5;
  McReport r0 = monte_carlo_estimate(A, quiet, truth);
  CHECK(r0.stats.at(GasSpecies::H2O).median_rel_error < 1e-9);
  CHECK(r0.stats.at(GasSpecies::O3).median_rel_error < 1e-4);
  CHECK(!r0.stats.at(GasSpecies::N2).identifiable);
  CHECK(!r0.stats.at(GasSpecies::CO2).identifiable);
}

TEST_CASE("a small scan finds a threshold and stops at the first pass") {
  auto catalogs = corpus();
  MonteCarloConfig config;
  config.runs = 40;
  config.grid_step_thz = 1e-3;
  Band band = reference_scan_band(GasSpecies::O3);
  DetectabilityReport report = detectability_scan(
      catalogs, GasSpecies::O3, band, {1e-1, 1e-2, 1e-3, 1e-4}, config);
  REQUIRE(report.threshold_percent.has_value());
  CHECK(*report.threshold_percent == doctest::Approx(1e-3));
  // Short-circuit: the level below the first pass was never evaluated.
  CHECK(report.levels.size() == 3);
  CHECK(report.levels.back().pass);

  DetectabilityReport full = detectability_scan(
      catalogs, GasSpecies::O3, band, {1e-1, 1e-2, 1e-3, 1e-4}, config, true);
  CHECK(full.levels.size() == 4);
  CHECK(full.levels.back().pass);

  CHECK_THROWS_AS(detectability_scan(catalogs, GasSpecies::O3, band,
                                     {1e-3, 1e-2}, config),
                  std::invalid_argument);
}

TEST_CASE("reference bands and outcomes for all 13 gases") {
  int detectable = 0;
  for (GasSpecies g : kAllSpecies) {
    Band band = reference_scan_band(g);
    CHECK(band.f_low_thz < band.f_high_thz);
    if (reference_detectable(g)) {
      ++detectable;
      CHECK(reference_threshold_percent(g) > 0.0);
    }
  }
  CHECK(detectable == 9);
  CHECK(reference_scan_band(GasSpecies::H2O).f_low_thz == 6.0);
  CHECK(reference_threshold_percent(GasSpecies::H2O) == doctest::Approx(1.0));
  CHECK(reference_threshold_percent(GasSpecies::CH4) == doctest::Approx(1e-5));
  CHECK(!reference_detectable(GasSpecies::N2));
  CHECK(!reference_detectable(GasSpecies::CO2));
}

TEST_CASE("sensitivity sweep keeps the mixture rebalanced through N2") {
  auto catalogs = corpus();
  MonteCarloConfig config;
  config.runs = 30;
  config.grid_step_thz = 1e-3;
  const double q_std = standard_concentration_ppm(GasSpecies::O3);
  SensitivityCurve curve = sensitivity_curve(
      catalogs, GasSpecies::O3, {0.5 * q_std, q_std, 2.0 * q_std}, 1e-3,
      Band(1.0, 3.0), 0.05, config);
  REQUIRE(curve.true_concentrations.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(curve.lcl[i] <= curve.true_concentrations[i]);
    CHECK(curve.ucl[i] >= curve.true_concentrations[i]);
    CHECK(curve.predicted_mean[i] ==
          doctest::Approx(curve.true_concentrations[i]).epsilon(0.05));
  }
  CHECK(curve.max_relative_deviation < 0.05);

  // A sweep value larger than all the N2 filler cannot be rebalanced.
  CHECK_THROWS_AS(sensitivity_curve(catalogs, GasSpecies::O3, {9.0e5}, 1e-3,
                                    Band(1.0, 3.0), 0.05, config),
                  std::invalid_argument);
}

TEST_CASE("report writers are byte-deterministic and embed the config") {
  auto catalogs = corpus();
  MonteCarloConfig config;
  config.runs = 10;
  config.grid_step_thz = 1e-3;
  DetectabilityReport report = detectability_scan(
      catalogs, GasSpecies::O3, reference_scan_band(GasSpecies::O3),
      {1e-2, 1e-3}, config);
  auto dir = std::filesystem::temp_directory_path();
  auto j1 = dir / "thzgs_det_1.json", j2 = dir / "thzgs_det_2.json";
  auto c1 = dir / "thzgs_det_1.csv";
  write_detectability_json(j1, report);
  write_detectability_json(j2, report);
  write_detectability_csv(c1, report);
  CHECK(slurp(j1) == slurp(j2));

  nlohmann::json doc = nlohmann::json::parse(slurp(j1));
  CHECK(doc["gas"] == "O3");
  CHECK(doc["config"]["master_seed"] == 20260823);
  CHECK(doc["config"]["runs"] == 10);
  CHECK(doc["config"]["version"] == kCodeVersion);
  CHECK(doc["levels"].size() == report.levels.size());

  std::string csv = slurp(c1);
  CHECK(csv.rfind("gas,noise_level_percent,pass", 0) == 0);
  for (auto p : {j1, j2, c1}) std::filesystem::remove(p);
}
