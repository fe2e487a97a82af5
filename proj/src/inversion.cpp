#include "thzgs/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

namespace thzgs {

DesignMatrix build_design_matrix(
    const std::map<GasSpecies, hitran::LineCatalog>& catalogs,
    const std::vector<GasSpecies>& gases, const FrequencyGrid& grid,
    double distance_m, const SpectraOptions& options) {
  if (distance_m <= 0.0)
    throw std::invalid_argument("build_design_matrix: distance must be > 0");
  DesignMatrix A{Eigen::MatrixXd(grid.size(), gases.size()), gases, grid,
                 distance_m, {}};
  for (std::size_t j = 0; j < gases.size(); ++j) {
    std::vector<double> column =
        unit_absorption_profile(gases[j], catalogs, grid, distance_m, options);
    for (int i = 0; i < grid.size(); ++i) A.entries(i, j) = column[i];
    if (A.entries.col(j).norm() < kIdentifiabilityThreshold)
      A.zero_columns.push_back(gases[j]);
  }
  return A;
}

Eigen::VectorXd simulate_measurement(const DesignMatrix& A,
                                     const Eigen::VectorXd& x_true_ppm,
                                     double noise_level_percent,
                                     std::uint64_t rng_seed, NoiseModel model) {
  if (noise_level_percent < 0.0)
    throw std::invalid_argument("noise level must be >= 0");
  Eigen::VectorXd clean = A.entries * x_true_ppm;
  if (noise_level_percent == 0.0) return clean;

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double level = noise_level_percent / 100.0;
  const double band_sigma = level * clean.maxCoeff();
  Eigen::VectorXd y = clean;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sigma =
        model == NoiseModel::kPerFrequency ? level * clean(i) : band_sigma;
    y(i) += sigma * normal(rng);
  }
  return y;
}

namespace {

// Projection onto {lower <= x <= upper, sum(x) == total} by bisection on the
// shift of the clamped vector.
Eigen::VectorXd project_simplex_box(const Eigen::VectorXd& v,
                                    const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper,
                                    double total) {
  auto clamped_sum = [&](double tau, Eigen::VectorXd* out) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      double x = std::clamp(v(j) - tau, lower(j), upper(j));
      if (out) (*out)(j) = x;
      s += x;
    }
    return s;
  };
  double lo = (v - upper).minCoeff() - 1.0;
  double hi = (v - lower).maxCoeff() + 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (clamped_sum(mid, nullptr) > total)
      lo = mid;
    else
      hi = mid;
  }
  Eigen::VectorXd x(v.size());
  clamped_sum(0.5 * (lo + hi), &x);
  return x;
}

// KKT residual of the box/sum-constrained least-squares problem, with the
// equality multiplier estimated from the free coordinates.
double kkt_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                    double total, double scale, double active_tol) {
  double lambda = 0.0;
  int n_free = 0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) > lower(j) + active_tol && x(j) < upper(j) - active_tol) {
      lambda -= grad(j);
      ++n_free;
    }
  }
  if (n_free > 0) lambda /= n_free;

  double r = std::abs(x.sum() - total) / std::max(total, 1.0);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double s = grad(j) + lambda;
    double viol;
    if (x(j) <= lower(j) + active_tol)
      viol = std::max(0.0, -s);
    else if (x(j) >= upper(j) - active_tol)
      viol = std::max(0.0, s);
    else
      viol = std::abs(s);
    r = std::max(r, viol / scale);
  }
  return r;
}

}  // namespace

EstimationResult solve_constrained_ls(const DesignMatrix& A,
                                      const Eigen::VectorXd& y,
                                      const ConcentrationConstraints& constraints,
                                      double tolerance, int max_iterations) {
  const Eigen::Index m = static_cast<Eigen::Index>(A.gases.size());
  if (y.size() != A.entries.rows())
    throw std::invalid_argument("solve_constrained_ls: y length mismatch");

  Eigen::VectorXd lower = constraints.lower.size()
                              ? constraints.lower
                              : Eigen::VectorXd::Zero(m);
  Eigen::VectorXd upper = constraints.upper.size()
                              ? constraints.upper
                              : Eigen::VectorXd::Constant(m, 1e6);
  if (lower.size() != m || upper.size() != m)
    throw std::invalid_argument("constraint bounds size mismatch");
  for (Eigen::Index j = 0; j < m; ++j)
    if (lower(j) > upper(j))
      throw InfeasibleConstraints("lower bound above upper bound");
  const double total = constraints.sum_total;
  if (total < lower.sum() - 1e-9 || total > upper.sum() + 1e-9)
    throw InfeasibleConstraints("sum constraint outside bound range");

  // Split gases into identifiable columns and structurally unidentifiable
  // ones; the latter participate only through a slack in the sum constraint.
  std::vector<Eigen::Index> ident;
  std::vector<GasSpecies> unident;
  double slack_lo = 0.0, slack_hi = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (A.entries.col(j).norm() >= kIdentifiabilityThreshold) {
      ident.push_back(j);
    } else {
      unident.push_back(A.gases[j]);
      slack_lo += lower(j);
      slack_hi += upper(j);
    }
  }
  if (ident.empty())
    throw std::invalid_argument("solve_constrained_ls: no identifiable column");

  const bool has_slack = !unident.empty();
  const Eigen::Index k = static_cast<Eigen::Index>(ident.size());
  const Eigen::Index n = k + (has_slack ? 1 : 0);

  Eigen::MatrixXd B(A.entries.rows(), k);
  Eigen::VectorXd lo(n), up(n);
  for (Eigen::Index jj = 0; jj < k; ++jj) {
    B.col(jj) = A.entries.col(ident[jj]);
    lo(jj) = lower(ident[jj]);
    up(jj) = upper(ident[jj]);
  }
  if (has_slack) {
    lo(k) = slack_lo;
    up(k) = slack_hi;
  }

  // Column scaling for conditioning: work on B*D with unit-norm columns.
  Eigen::VectorXd col_norm(k);
  for (Eigen::Index jj = 0; jj < k; ++jj) col_norm(jj) = B.col(jj).norm();

  const Eigen::MatrixXd H = B.transpose() * B;
  const Eigen::VectorXd c = B.transpose() * y;
  const double grad_scale = 1.0 + c.cwiseAbs().maxCoeff();
  const double active_tol = 1e-7 * (up.maxCoeff() - lo.minCoeff());
  const double bound_tol = 1e-9 * (up.maxCoeff() + 1.0);

  auto gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    g.head(k) = H * x.head(k) - c;
    return g;
  };

  // Primal active-set method. W(j): -1 free, 0 pinned at the lower bound,
  // +1 pinned at the upper bound. Each step solves the equality-constrained
  // least-squares problem exactly on the free coordinates (null-space method
  // on unit-normalized columns), then either walks toward that solution
  // until a bound blocks, or releases the bound with the most negative
  // multiplier. Finite termination for nondegenerate problems; the iteration
  // cap guards the degenerate ones.
  auto eq_solve = [&](const std::vector<int>& W) {
    std::vector<Eigen::Index> free_idx;
    bool slack_free = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (W[static_cast<std::size_t>(j)] != -1) continue;
      if (j == k && has_slack)
        slack_free = true;
      else
        free_idx.push_back(j);
    }

    Eigen::VectorXd candidate(n);
    Eigen::VectorXd r = y;
    double pinned_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const int w = W[static_cast<std::size_t>(j)];
      if (w == -1) continue;
      const double pin = w == 0 ? lo(j) : up(j);
      candidate(j) = pin;
      if (j < k) r -= B.col(j) * pin;
      pinned_sum += pin;
    }

    const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
    if (nf > 0) {
      Eigen::MatrixXd Bf(B.rows(), nf);
      Eigen::VectorXd scale_f(nf);
      for (Eigen::Index t = 0; t < nf; ++t) {
        scale_f(t) = col_norm(free_idx[static_cast<std::size_t>(t)]);
        Bf.col(t) = B.col(free_idx[static_cast<std::size_t>(t)]) / scale_f(t);
      }
      Eigen::VectorXd z;
      if (has_slack && slack_free) {
        // Sum constraint absorbed by the slack: plain least squares, with
        // one refinement step so the weak columns resolve cleanly.
        auto qr = Bf.colPivHouseholderQr();
        z = qr.solve(r);
        z += qr.solve(r - Bf * z);
      } else {
        // Null-space method for sum(x_free) = target.
        const double target = total - pinned_sum;
        if (nf == 1) {
          z = Eigen::VectorXd::Constant(1, target * scale_f(0));
        } else {
          // sum of unscaled x equals the scale-weighted sum of z.
          Eigen::VectorXd ones_unscaled = scale_f.cwiseInverse();
          Eigen::VectorXd zp =
              ones_unscaled * (target / ones_unscaled.squaredNorm());
          Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(
                                  ones_unscaled).householderQ();
          Eigen::MatrixXd N = q.rightCols(nf - 1);
          auto qr = (Bf * N).colPivHouseholderQr();
          Eigen::VectorXd w = qr.solve(r - Bf * zp);
          w += qr.solve(r - Bf * (zp + N * w));
          z = zp + N * w;
        }
      }
      for (Eigen::Index t = 0; t < nf; ++t)
        candidate(free_idx[static_cast<std::size_t>(t)]) = z(t) / scale_f(t);
    }
    if (has_slack && slack_free) {
      double s = total;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != k) s -= candidate(j);
      candidate(k) = s;
    }
    return candidate;
  };

  // Feasible start: uniform split projected onto the constraint set.
  Eigen::VectorXd x = project_simplex_box(
      Eigen::VectorXd::Constant(n, total / static_cast<double>(n)), lo, up,
      total);
  std::vector<int> W(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x(j) <= lo(j) + active_tol)
      W[static_cast<std::size_t>(j)] = 0;
    else if (x(j) >= up(j) - active_tol)
      W[static_cast<std::size_t>(j)] = 1;
  }

  EstimationResult result;
  int it = 0;
  double kkt = std::numeric_limits<double>::infinity();
  const int max_outer = std::min(max_iterations, 50 * static_cast<int>(n) + 50);
  for (; it < max_outer; ++it) {
    // Never run with an empty free set: release the worst-held bound first.
    if (std::count(W.begin(), W.end(), -1) == 0) {
      Eigen::VectorXd g = gradient(x);
      const double lambda = -g.mean();
      Eigen::Index worst = 0;
      double worst_mu = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (lo(j) == up(j)) continue;
        const double mu = W[static_cast<std::size_t>(j)] == 0
                              ? g(j) + lambda
                              : -(g(j) + lambda);
        if (mu < worst_mu) {
          worst_mu = mu;
          worst = j;
        }
      }
      W[static_cast<std::size_t>(worst)] = -1;
    }

    Eigen::VectorXd cand = eq_solve(W);

    // Blocking bound on the way from x to the trial point?
    double alpha = 1.0;
    Eigen::Index blocker = -1;
    int block_side = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (W[static_cast<std::size_t>(j)] != -1) continue;
      const double d = cand(j) - x(j);
      if (d < -bound_tol && cand(j) < lo(j) - bound_tol) {
        const double a = (x(j) - lo(j)) / -d;
        if (a < alpha) { alpha = a; blocker = j; block_side = 0; }
      } else if (d > bound_tol && cand(j) > up(j) + bound_tol) {
        const double a = (up(j) - x(j)) / d;
        if (a < alpha) { alpha = a; blocker = j; block_side = 1; }
      }
    }
    if (blocker >= 0) {
      x += alpha * (cand - x);
      for (Eigen::Index j = 0; j < n; ++j)
        x(j) = std::clamp(x(j), lo(j), up(j));
      x(blocker) = block_side == 0 ? lo(blocker) : up(blocker);
      W[static_cast<std::size_t>(blocker)] = block_side;
      continue;
    }

    for (Eigen::Index j = 0; j < n; ++j)
      cand(j) = std::clamp(cand(j), lo(j), up(j));
    x = cand;

    Eigen::VectorXd g = gradient(x);
    kkt = kkt_residual(x, g, lo, up, total, grad_scale, active_tol);
    if (kkt <= tolerance) break;

    // Multiplier check: release the most negative bound multiplier.
    double lambda = 0.0;
    int n_free = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (W[static_cast<std::size_t>(j)] == -1) {
        lambda -= g(j);
        ++n_free;
      }
    if (n_free > 0) lambda /= n_free;
    Eigen::Index worst = -1;
    double worst_mu = -tolerance * grad_scale;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (W[static_cast<std::size_t>(j)] == -1 || lo(j) == up(j)) continue;
      const double mu = W[static_cast<std::size_t>(j)] == 0 ? g(j) + lambda
                                                            : -(g(j) + lambda);
      if (mu < worst_mu) {
        worst_mu = mu;
        worst = j;
      }
    }
    if (worst < 0) {
      // KKT-optimal within the multiplier tolerance.
      kkt = std::min(kkt, tolerance);
      break;
    }
    W[static_cast<std::size_t>(worst)] = -1;
  }

  result.converged = kkt <= tolerance;
  result.kkt_residual = kkt;
  result.iterations = it;
  result.residual_norm = (B * x.head(k) - y).norm();
  for (Eigen::Index jj = 0; jj < k; ++jj)
    result.estimates[A.gases[ident[jj]]] = x(jj);
  result.unidentifiable = unident;
  return result;
}

Eigen::VectorXd solve_unconstrained_ls(const Eigen::MatrixXd& A_sub,
                                       const Eigen::VectorXd& y) {
  if (A_sub.rows() != y.size())
    throw std::invalid_argument("solve_unconstrained_ls: size mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A_sub);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw RankDeficient("design matrix condition number above 1e12");
  return A_sub.colPivHouseholderQr().solve(y);
}

void write_estimation_json(const std::filesystem::path& path,
                           const EstimationResult& result) {
  nlohmann::json j;
  nlohmann::json estimates;
  for (const auto& [gas, ppm] : result.estimates) estimates[to_string(gas)] = ppm;
  j["estimates"] = estimates;
  nlohmann::json unident = nlohmann::json::array();
  for (GasSpecies g : result.unidentifiable) unident.push_back(to_string(g));
  j["unidentifiable"] = unident;
  j["residual_norm"] = result.residual_norm;
  j["kkt_residual"] = result.kkt_residual;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["seed"] = result.seed;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace thzgs
