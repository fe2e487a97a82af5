// thzgs: batch front end for the THz gas-sensing toolkit.
//
// Verbs: fetch | spectra | invert | scan | sensitivity | psd | psd-diff |
// band-score. Configuration precedence: flags > config file > defaults; the
// fully resolved config is echoed into every output artifact (JSON reports
// embed it, CSVs get a .config.json sidecar).
//
// Exit codes: 0 success, 1 usage error, 2 network/cache, 3 data format,
// 4 numerical non-convergence.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thzgs/channel.hpp"
#include "thzgs/detect.hpp"
#include "thzgs/hitran/fetch.hpp"
#include "thzgs/inversion.hpp"
#include "thzgs/spectra.hpp"

namespace {

using nlohmann::json;
using namespace thzgs;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNetwork = 2;
constexpr int kExitDataFormat = 3;
constexpr int kExitNumerical = 4;

struct RunConfig {
  std::vector<GasSpecies> gases{kAllSpecies.begin(), kAllSpecies.end()};
  std::map<GasSpecies, double> mixture_ppm;  // defaults to standard atmosphere
  double band_low_thz = 1.0;
  double band_high_thz = 3.0;
  double grid_step_thz = 1e-4;
  double distance_m = 0.05;
  std::string noise_model = "per-frequency";  // or "band-max"
  double noise_percent = 0.0;
  int runs = 200;
  std::uint64_t master_seed = 20260823;
  int threads = 0;
  std::string catalog_dir;
  std::string cache_dir;
  std::string output_dir = ".";
  std::string endpoint;
  bool self_broadening = false;
  double wing_cutoff_cm = 25.0;
};

GasSpecies parse_gas(const std::string& name) {
  auto g = species_from_name(name);
  if (!g) throw CLI::ValidationError("unknown gas: " + name);
  return *g;
}

std::vector<GasSpecies> parse_gas_list(const std::vector<std::string>& names) {
  if (names.empty() || (names.size() == 1 && names[0] == "all"))
    return {kAllSpecies.begin(), kAllSpecies.end()};
  std::vector<GasSpecies> out;
  for (const auto& n : names) out.push_back(parse_gas(n));
  return out;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot read config file: " + path);
  json j = json::parse(in);
  if (j.contains("gases")) {
    std::vector<std::string> names = j["gases"].get<std::vector<std::string>>();
    cfg.gases = parse_gas_list(names);
  }
  if (j.contains("mixture_ppm"))
    for (auto& [name, ppm] : j["mixture_ppm"].items())
      cfg.mixture_ppm[parse_gas(name)] = ppm.get<double>();
  if (j.contains("band_thz")) {
    cfg.band_low_thz = j["band_thz"][0].get<double>();
    cfg.band_high_thz = j["band_thz"][1].get<double>();
  }
  if (j.contains("grid_step_thz")) cfg.grid_step_thz = j["grid_step_thz"];
  if (j.contains("distance_m")) cfg.distance_m = j["distance_m"];
  if (j.contains("noise_model")) cfg.noise_model = j["noise_model"];
  if (j.contains("noise_percent")) cfg.noise_percent = j["noise_percent"];
  if (j.contains("runs")) cfg.runs = j["runs"];
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"];
  if (j.contains("threads")) cfg.threads = j["threads"];
  if (j.contains("catalog_dir")) cfg.catalog_dir = j["catalog_dir"];
  if (j.contains("cache_dir")) cfg.cache_dir = j["cache_dir"];
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"];
  if (j.contains("endpoint")) cfg.endpoint = j["endpoint"];
  if (j.contains("self_broadening")) cfg.self_broadening = j["self_broadening"];
  if (j.contains("wing_cutoff_cm")) cfg.wing_cutoff_cm = j["wing_cutoff_cm"];
}

json resolved_config_json(const RunConfig& cfg, const std::string& verb) {
  json gases = json::array();
  for (GasSpecies g : cfg.gases) gases.push_back(to_string(g));
  json mixture;
  GasMixture mix = cfg.mixture_ppm.empty() ? GasMixture::standard_atmosphere()
                                           : GasMixture(cfg.mixture_ppm);
  for (const auto& [g, q] : mix.mixing_ratios()) mixture[to_string(g)] = q;
  return {{"verb", verb},
          {"gases", gases},
          {"mixture_ppm", mixture},
          {"band_thz", {cfg.band_low_thz, cfg.band_high_thz}},
          {"grid_step_thz", cfg.grid_step_thz},
          {"distance_m", cfg.distance_m},
          {"noise_model", cfg.noise_model},
          {"noise_percent", cfg.noise_percent},
          {"runs", cfg.runs},
          {"master_seed", cfg.master_seed},
          {"threads", cfg.threads},
          {"catalog_dir", cfg.catalog_dir},
          {"cache_dir", cfg.cache_dir},
          {"output_dir", cfg.output_dir},
          {"self_broadening", cfg.self_broadening},
          {"wing_cutoff_cm", cfg.wing_cutoff_cm},
          {"version", kCodeVersion}};
}

void write_config_sidecar(const std::filesystem::path& artifact,
                          const RunConfig& cfg, const std::string& verb) {
  std::ofstream out(artifact.string() + ".config.json");
  out << resolved_config_json(cfg, verb).dump(2) << "\n";
}

std::map<GasSpecies, hitran::LineCatalog> load_catalogs(const RunConfig& cfg) {
  if (cfg.catalog_dir.empty())
    throw CLI::ValidationError("no catalog directory (set --catalog-dir)");
  return hitran::load_catalog_directory(cfg.catalog_dir);
}

GasMixture config_mixture(const RunConfig& cfg) {
  return cfg.mixture_ppm.empty() ? GasMixture::standard_atmosphere()
                                 : GasMixture(cfg.mixture_ppm);
}

SpectraOptions spectra_options(const RunConfig& cfg) {
  SpectraOptions opts;
  opts.self_broadening = cfg.self_broadening;
  opts.wing_cutoff_cm = cfg.wing_cutoff_cm;
  return opts;
}

NoiseModel noise_model(const RunConfig& cfg) {
  if (cfg.noise_model == "per-frequency") return NoiseModel::kPerFrequency;
  if (cfg.noise_model == "band-max") return NoiseModel::kBandMax;
  throw CLI::ValidationError("noise model must be per-frequency or band-max");
}

MonteCarloConfig mc_config(const RunConfig& cfg) {
  MonteCarloConfig mc;
  mc.runs = cfg.runs;
  mc.noise_level_percent = cfg.noise_percent;
  mc.band = Band(cfg.band_low_thz, cfg.band_high_thz);
  mc.distance_m = cfg.distance_m;
  mc.gases = cfg.gases;
  mc.master_seed = cfg.master_seed;
  mc.grid_step_thz = cfg.grid_step_thz;
  mc.noise_model = noise_model(cfg);
  mc.spectra = spectra_options(cfg);
  mc.threads = cfg.threads;
  return mc;
}

// ---------------------------------------------------------------------------

int cmd_fetch(const RunConfig& cfg, const std::vector<std::string>& gas_names) {
  if (cfg.endpoint.empty())
    throw CLI::ValidationError("fetch needs --endpoint");
  if (cfg.cache_dir.empty())
    throw CLI::ValidationError("fetch needs a cache dir (--cache-dir or "
                               "$THZGS_CACHE_DIR)");
  hitran::FetchOptions options;
  options.endpoint = cfg.endpoint;
  options.cache_dir = cfg.cache_dir;
  hitran::FetchReport report;
  const Band band(cfg.band_low_thz, cfg.band_high_thz);
  for (GasSpecies gas : parse_gas_list(gas_names)) {
    hitran::LineCatalog catalog =
        hitran::fetch_lines(gas, band, options, &report);
    std::cout << to_string(gas) << ": " << catalog.lines.size() << " lines\n";
  }
  std::cout << report.downloads << " downloads, " << report.cache_hits
            << " cache hits\n";
  return kExitOk;
}

int cmd_spectra(const RunConfig& cfg) {
  const auto catalogs = load_catalogs(cfg);
  const FrequencyGrid grid = FrequencyGrid::with_step(
      Band(cfg.band_low_thz, cfg.band_high_thz), cfg.grid_step_thz);
  const GasMixture mixture = config_mixture(cfg);
  const SpectraOptions opts = spectra_options(cfg);

  // One loss column per gas at its configured concentration (each gas alone
  // in air), plus the mixture total.
  std::vector<std::vector<double>> columns;
  for (GasSpecies gas : cfg.gases) {
    GasMixture single(std::map<GasSpecies, double>{{gas, mixture.ppm(gas)}});
    AbsorptionSpectrum spec =
        absorption_coefficient(catalogs, single, grid, opts);
    columns.push_back(absorption_loss_db(spec, cfg.distance_m));
  }
  AbsorptionSpectrum total =
      absorption_coefficient(catalogs, mixture, grid, opts);
  columns.push_back(absorption_loss_db(total, cfg.distance_m));

  const std::filesystem::path out_path =
      std::filesystem::path(cfg.output_dir) / "spectra.csv";
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream out(out_path);
  out << "frequency_thz";
  for (GasSpecies gas : cfg.gases) out << "," << to_string(gas) << "_loss_db";
  out << ",total_loss_db\n";
  char buf[64];
  for (int i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", grid.frequency_thz(i));
    out << buf;
    for (const auto& col : columns) {
      std::snprintf(buf, sizeof(buf), ",%.17g", col[i]);
      out << buf;
    }
    out << "\n";
  }
  write_config_sidecar(out_path, cfg, "spectra");
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

Eigen::VectorXd load_measurement_csv(const std::filesystem::path& path,
                                     const FrequencyGrid& grid) {
  std::ifstream in(path);
  if (!in)
    throw hitran::ParseError("cannot read measurement file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("frequency_thz,loss_db", 0) != 0)
    throw hitran::ParseError("measurement CSV row 1: expected header "
                             "'frequency_thz,loss_db'");
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double f, y;
    char comma;
    if (!(ss >> f >> comma >> y) || comma != ',')
      throw hitran::ParseError("measurement CSV row " + std::to_string(row) +
                               ": expected 'frequency,loss' columns");
    const int i = static_cast<int>(values.size());
    if (i >= grid.size() || std::abs(f - grid.frequency_thz(i)) >
                                0.5 * grid.step_thz())
      throw hitran::ParseError("measurement CSV row " + std::to_string(row) +
                               " column 1: frequency off the analysis grid");
    values.push_back(y);
  }
  if (static_cast<int>(values.size()) != grid.size())
    throw hitran::ParseError("measurement CSV has " +
                             std::to_string(values.size()) + " rows, grid has " +
                             std::to_string(grid.size()));
  return Eigen::Map<Eigen::VectorXd>(values.data(),
                                     static_cast<Eigen::Index>(values.size()));
}

int cmd_invert(const RunConfig& cfg, bool synthetic,
               const std::string& measurement_file) {
  if (synthetic == !measurement_file.empty())
    throw CLI::ValidationError("invert needs exactly one of --synthetic or "
                               "--measurement");
  const auto catalogs = load_catalogs(cfg);
  const FrequencyGrid grid = FrequencyGrid::with_step(
      Band(cfg.band_low_thz, cfg.band_high_thz), cfg.grid_step_thz);
  const DesignMatrix A = build_design_matrix(catalogs, cfg.gases, grid,
                                             cfg.distance_m,
                                             spectra_options(cfg));

  Eigen::VectorXd y;
  std::uint64_t seed = 0;
  if (synthetic) {
    const GasMixture mixture = config_mixture(cfg);
    Eigen::VectorXd x_true(static_cast<Eigen::Index>(cfg.gases.size()));
    for (std::size_t j = 0; j < cfg.gases.size(); ++j)
      x_true(static_cast<Eigen::Index>(j)) = mixture.ppm(cfg.gases[j]);
    seed = derive_run_seed(cfg.master_seed, 0);
    y = simulate_measurement(A, x_true, cfg.noise_percent, seed,
                             noise_model(cfg));
  } else {
    y = load_measurement_csv(measurement_file, grid);
  }

  // The configured mixture defines the total the estimate must sum to.
  ConcentrationConstraints constraints;
  constraints.sum_total = config_mixture(cfg).total_ppm();
  EstimationResult result = solve_constrained_ls(A, y, constraints);
  result.seed = seed;
  if (!result.converged) {
    std::cerr << "solver did not converge (kkt residual "
              << result.kkt_residual << ")\n";
    return kExitNumerical;
  }
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path out_path =
      std::filesystem::path(cfg.output_dir) / "estimate.json";
  write_estimation_json(out_path, result);
  write_config_sidecar(out_path, cfg, "invert");
  for (const auto& [gas, ppm] : result.estimates)
    std::cout << to_string(gas) << ": " << ppm << " ppm\n";
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_scan(const RunConfig& cfg, const std::vector<std::string>& gas_names,
             bool full_scan, bool band_overridden) {
  const auto catalogs = load_catalogs(cfg);
  const MonteCarloConfig mc = mc_config(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  for (GasSpecies gas : parse_gas_list(gas_names)) {
    const Band band = band_overridden
                          ? Band(cfg.band_low_thz, cfg.band_high_thz)
                          : reference_scan_band(gas);
    DetectabilityReport report = detectability_scan(
        catalogs, gas, band, kDefaultNoiseLevels, mc, full_scan);
    const std::string stem = std::string("scan_") + to_string(gas);
    const std::filesystem::path base = std::filesystem::path(cfg.output_dir);
    write_detectability_json(base / (stem + ".json"), report);
    write_detectability_csv(base / (stem + ".csv"), report);
    write_config_sidecar(base / (stem + ".csv"), cfg, "scan");
    std::cout << to_string(gas) << ": ";
    if (report.threshold_percent)
      std::cout << "detectable down to " << *report.threshold_percent << "%\n";
    else
      std::cout << "not detectable at any probed level\n";
  }
  return kExitOk;
}

int cmd_sensitivity(const RunConfig& cfg, const std::string& gas_name,
                    std::vector<double> sweep_ppm) {
  const GasSpecies gas = parse_gas(gas_name);
  const auto catalogs = load_catalogs(cfg);
  if (sweep_ppm.empty()) {
    const double q = standard_concentration_ppm(gas);
    sweep_ppm = {0.25 * q, 0.5 * q, q, 2.0 * q, 4.0 * q};
  }
  const MonteCarloConfig mc = mc_config(cfg);
  SensitivityCurve curve = sensitivity_curve(
      catalogs, gas, sweep_ppm, cfg.noise_percent,
      Band(cfg.band_low_thz, cfg.band_high_thz), cfg.distance_m, mc);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string stem = std::string("sensitivity_") + to_string(gas);
  const std::filesystem::path base = std::filesystem::path(cfg.output_dir);
  write_sensitivity_json(base / (stem + ".json"), curve, mc);
  write_sensitivity_csv(base / (stem + ".csv"), curve);
  write_config_sidecar(base / (stem + ".csv"), cfg, "sensitivity");
  std::cout << "max relative deviation of predicted mean: "
            << curve.max_relative_deviation << "\n";
  return kExitOk;
}

int cmd_psd(const RunConfig& cfg, bool include_noise,
            const std::vector<std::string>& without_gases) {
  const auto catalogs = load_catalogs(cfg);
  const Band band(cfg.band_low_thz, cfg.band_high_thz);
  const FrequencyGrid grid = FrequencyGrid::with_step(band, cfg.grid_step_thz);
  GasMixture mixture = config_mixture(cfg);
  for (const std::string& name : without_gases)
    mixture.set_ppm(parse_gas(name), 0.0);
  AbsorptionSpectrum spec =
      absorption_coefficient(catalogs, mixture, grid, spectra_options(cfg));
  const ChirpPulse pulse = ChirpPulse::over_band(band);
  PsdCurve rx = received_psd(pulse, spec, cfg.distance_m, include_noise);
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path out_path =
      std::filesystem::path(cfg.output_dir) / "psd.csv";
  write_psd_csv(out_path, rx);
  write_config_sidecar(out_path, cfg, "psd");
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_psd_diff(const RunConfig& cfg, const std::string& gas_name,
                 const std::vector<double>& multipliers, bool include_noise) {
  const GasSpecies gas = parse_gas(gas_name);
  const auto catalogs = load_catalogs(cfg);
  const Band band(cfg.band_low_thz, cfg.band_high_thz);
  const FrequencyGrid grid = FrequencyGrid::with_step(band, cfg.grid_step_thz);
  std::vector<PsdDelta> deltas =
      psd_difference(catalogs, config_mixture(cfg), gas, multipliers, grid,
                     cfg.distance_m, spectra_options(cfg), include_noise);
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path out_path =
      std::filesystem::path(cfg.output_dir) /
      (std::string("psd_diff_") + to_string(gas) + ".csv");
  write_psd_delta_csv(out_path, deltas);
  write_config_sidecar(out_path, cfg, "psd-diff");
  for (const PsdDelta& delta : deltas) {
    PeakDifference peak = find_peak_difference(delta);
    std::cout << "x" << delta.multiplier << ": peak " << peak.magnitude_db
              << " dB at " << peak.frequency_thz << " THz\n";
  }
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_band_score(const RunConfig& cfg, const std::string& gas_name,
                   const std::vector<std::string>& band_specs) {
  const GasSpecies gas = parse_gas(gas_name);
  const auto catalogs = load_catalogs(cfg);
  struct Scored {
    Band band;
    double score;
  };
  std::vector<Scored> scored;
  for (const std::string& spec : band_specs) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("band must be lo:hi in THz, got " + spec);
    Band band(std::stod(spec.substr(0, colon)),
              std::stod(spec.substr(colon + 1)));
    scored.push_back({band, band_score(gas, catalogs, band, cfg.distance_m,
                                       cfg.grid_step_thz,
                                       spectra_options(cfg))});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) {
                     return a.score > b.score;
                   });
  json out = json::array();
  for (const Scored& s : scored) {
    std::cout << s.band.f_low_thz << "-" << s.band.f_high_thz
              << " THz: score " << s.score << "\n";
    out.push_back({{"band_thz", {s.band.f_low_thz, s.band.f_high_thz}},
                   {"score", s.score}});
  }
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path out_path =
      std::filesystem::path(cfg.output_dir) /
      (std::string("band_score_") + to_string(gas) + ".json");
  std::ofstream f(out_path);
  f << json{{"gas", to_string(gas)},
            {"ranking", out},
            {"config", resolved_config_json(cfg, "band-score")}}
           .dump(2)
    << "\n";
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"THz atmospheric gas sensing toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("THZGS_CACHE_DIR")) cfg.cache_dir = env;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file");

  // Deferred overrides: flags beat the config file regardless of order.
  app.add_option_function<std::string>(
      "--catalog-dir", [&](const std::string& v) { cfg.catalog_dir = v; },
      "Directory of .par line lists");
  app.add_option_function<std::string>(
      "--cache-dir", [&](const std::string& v) { cfg.cache_dir = v; },
      "Fetch cache directory (default $THZGS_CACHE_DIR)");
  app.add_option_function<std::string>(
      "--output-dir", [&](const std::string& v) { cfg.output_dir = v; },
      "Output directory");
  app.add_option_function<std::string>(
      "--endpoint", [&](const std::string& v) { cfg.endpoint = v; },
      "Line-list HTTP endpoint");
  std::vector<double> band_flag;
  auto* band_opt =
      app.add_option("--band", band_flag, "Analysis band, THz (lo hi)")
          ->expected(2);
  app.add_option_function<double>(
      "--step", [&](double v) { cfg.grid_step_thz = v; }, "Grid step, THz");
  app.add_option_function<double>(
      "--distance", [&](double v) { cfg.distance_m = v; }, "Path length, m");
  app.add_option_function<double>(
      "--noise", [&](double v) { cfg.noise_percent = v; },
      "Relative noise level, percent");
  app.add_option_function<std::string>(
      "--noise-model", [&](const std::string& v) { cfg.noise_model = v; },
      "per-frequency | band-max");
  app.add_option_function<int>(
      "--runs", [&](int v) { cfg.runs = v; }, "Monte Carlo runs per level");
  bool paper_scale = false;
  app.add_flag("--paper-scale", paper_scale, "Use 1000 runs per level");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t v) { cfg.master_seed = v; }, "Master seed");
  app.add_option_function<int>(
      "--threads", [&](int v) { cfg.threads = v; },
      "Worker threads (0 = hardware)");

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Download line lists into cache");
  std::vector<std::string> fetch_gases;
  fetch->add_option("--gas", fetch_gases, "Gas names or 'all'");

  // spectra
  auto* spectra = app.add_subcommand("spectra", "Per-gas absorption loss CSV");

  // invert
  auto* invert = app.add_subcommand("invert", "Constrained concentration fit");
  bool synthetic = false;
  std::string measurement_file;
  invert->add_flag("--synthetic", synthetic,
                   "Simulate the measurement from the configured mixture");
  invert->add_option("--measurement", measurement_file,
                     "Measurement CSV (frequency_thz,loss_db)");

  // scan
  auto* scan = app.add_subcommand("scan", "Detectability scan over noise levels");
  std::vector<std::string> scan_gases;
  scan->add_option("--gas", scan_gases, "Gas names or 'all'");
  bool full_scan = false;
  scan->add_flag("--full", full_scan, "Probe all levels, no short-circuit");

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "Concentration sweep");
  std::string sens_gas;
  sens->add_option("--gas", sens_gas, "Target gas")->required();
  std::vector<double> sweep_ppm;
  sens->add_option("--sweep", sweep_ppm, "True concentrations, ppm");

  // psd
  auto* psd = app.add_subcommand("psd", "Received PSD of the probing chirp");
  bool include_noise = false;
  psd->add_flag("--molecular-noise", include_noise,
                "Add the molecular absorption noise floor");
  std::vector<std::string> without_gases;
  psd->add_option("--without", without_gases, "Zero these gases first");

  // psd-diff
  auto* psd_diff = app.add_subcommand("psd-diff",
                                      "PSD change vs gas concentration");
  std::string diff_gas;
  psd_diff->add_option("--gas", diff_gas, "Target gas")->required();
  std::vector<double> multipliers{2.0};
  psd_diff->add_option("--multiplier", multipliers,
                       "Concentration multipliers");
  bool diff_noise = false;
  psd_diff->add_flag("--molecular-noise", diff_noise,
                     "Add the molecular absorption noise floor");

  // band-score
  auto* bscore = app.add_subcommand("band-score", "Rank candidate bands");
  std::string score_gas;
  bscore->add_option("--gas", score_gas, "Target gas")->required();
  std::vector<std::string> band_specs;
  bscore->add_option("--bands", band_specs, "Candidate bands lo:hi, THz")
      ->required();

  // Global options may appear after the verb too; unmatched subcommand
  // arguments fall through to the parent parser.
  for (CLI::App* sub : {fetch, spectra, invert, scan, sens, psd, psd_diff,
                        bscore})
    sub->fallthrough();

  // Parse twice so the config file loads before flag callbacks run.
  try {
    app.parse(argc, argv);
    if (!config_file.empty()) {
      RunConfig base;
      if (const char* env = std::getenv("THZGS_CACHE_DIR"))
        base.cache_dir = env;
      apply_config_file(config_file, base);
      cfg = base;
      app.clear();
      app.parse(argc, argv);
    }
    if (band_opt->count() > 0) {
      cfg.band_low_thz = band_flag[0];
      cfg.band_high_thz = band_flag[1];
    }
    if (paper_scale) cfg.runs = 1000;

    if (*fetch) return cmd_fetch(cfg, fetch_gases);
    if (*spectra) return cmd_spectra(cfg);
    if (*invert) return cmd_invert(cfg, synthetic, measurement_file);
    if (*scan)
      return cmd_scan(cfg, scan_gases, full_scan, band_opt->count() > 0);
    if (*sens) return cmd_sensitivity(cfg, sens_gas, sweep_ppm);
    if (*psd) return cmd_psd(cfg, include_noise, without_gases);
    if (*psd_diff) return cmd_psd_diff(cfg, diff_gas, multipliers, diff_noise);
    if (*bscore) return cmd_band_score(cfg, score_gas, band_specs);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const hitran::NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const hitran::HttpStatus& e) {
    std::cerr << "server error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const hitran::CacheCorrupt& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const hitran::ParseError& e) {
    std::cerr << "data format error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const hitran::EmptyCatalog& e) {
    std::cerr << "data format error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const RankDeficient& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const HarnessUnstable& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
