#ifndef THZGS_INVERSION_HPP
#define THZGS_INVERSION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <vector>

#include "thzgs/spectra.hpp"

namespace thzgs {

// Linear forward model: rows = grid frequencies, columns = gases, entries in
// dB of absorption loss per ppm at the build distance.
struct DesignMatrix {
  Eigen::MatrixXd entries;
  std::vector<GasSpecies> gases;  // column order
  FrequencyGrid grid;
  double distance_m = 0.0;
  // Gases whose column norm is below the identifiability threshold; they are
  // structurally unidentifiable on this grid.
  std::vector<GasSpecies> zero_columns;
};

// Column norms below this (dB/ppm) mark a gas as structurally unidentifiable.
inline constexpr double kIdentifiabilityThreshold = 1e-15;

DesignMatrix build_design_matrix(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const std::vector<GasSpecies>& gases, const FrequencyGrid& grid,
    double distance_m, const SpectraOptions& options = {});

enum class NoiseModel {
  kPerFrequency,  // sigma(f) = level/100 * clean(f)
  kBandMax,       // sigma    = level/100 * max_f clean(f)
};

// Synthetic noisy measurement y = A x_true + Gaussian noise. Deterministic
// for a given seed.
Eigen::VectorXd simulate_measurement(const DesignMatrix& A,
                                     const Eigen::VectorXd& x_true_ppm,
                                     double noise_level_percent,
                                     std::uint64_t rng_seed,
                                     NoiseModel model = NoiseModel::kPerFrequency);

struct ConcentrationConstraints {
  Eigen::VectorXd lower;    // ppm, per gas (empty = all zeros)
  Eigen::VectorXd upper;    // ppm, per gas (empty = all 1e6)
  double sum_total = 1e6;   // equality, ppm
};

struct EstimationResult {
  std::map<GasSpecies, double> estimates;       // ppm, identifiable gases only
  std::vector<GasSpecies> unidentifiable;
  double residual_norm = 0.0;                   // ||A x - y||, dB
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;                       // echoed from the measurement
};

struct InfeasibleConstraints : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimize ||A x - y||^2 subject to lower <= x <= upper and sum(x) =
// sum_total. Structurally unidentifiable gases are taken out of the
// least-squares fit; their total acts as a free slack in the sum constraint.
// Primal active-set method with exact equality-constrained subproblem
// solves; deterministic and finitely terminating.
EstimationResult solve_constrained_ls(const DesignMatrix& A,
                                      const Eigen::VectorXd& y,
                                      const ConcentrationConstraints& constraints = {},
                                      double tolerance = 1e-8,
                                      int max_iterations = 20000);

// Ordinary least squares via column-pivoted QR; no constraints. Throws
// RankDeficient when the condition number exceeds 1e12.
Eigen::VectorXd solve_unconstrained_ls(const Eigen::MatrixXd& A_sub,
                                       const Eigen::VectorXd& y);

// JSON export of an estimation result ({gas: ppm} plus diagnostics).
void write_estimation_json(const std::filesystem::path& path,
                           const EstimationResult& result);

}  // namespace thzgs

#endif  // THZGS_INVERSION_HPP
