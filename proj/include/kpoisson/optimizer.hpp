#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace kpoisson {

struct OptimizerConfig {
  double tol = 1e-6;  // gradient infinity-norm
  /// Also stop once an accepted step reduces f by at most f_tol * max(|f|, 1).
  double f_tol = 1e-12;
  int max_iterations = 500;
  int memory = 10;
  int restarts = 3;
  std::uint64_t seed = 0;
  /// Standard deviation of the random start; <= 0 means 0.1 / sqrt(n).
  double init_scale = 0.0;
  /// Take absolute values of the first start's draw.
  bool coherent_first_start = true;
  /// Permit Mercer representations whose base measure is Gaussian rather than Lebesgue.
  bool allow_gaussian_measure = false;
  /// RKHS fits: optimize over w = F^T alpha, F the N x r feature matrix of k~,
  /// when r < N. Same objective values and minimizers; O(N r) per evaluation.
  bool primal = false;
};

/// Returns f(x); writes the gradient when grad is non-null. Non-finite values
/// mark infeasible points and are rejected by the line search.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct OptimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_norm = 0.0;  // infinity norm
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  int starts = 0;
};

/// Limited-memory BFGS with Armijo backtracking from x0. On a line-search
/// failure the memory is halved and the history dropped once; a second failure
/// returns the best point with line_search_failed set.
OptimizeResult minimize(const ObjectiveFn& objective, const Eigen::VectorXd& x0, const OptimizerConfig& config);

/// Runs config.restarts starts from i.i.d. normal(0, init_scale) draws and keeps the lowest value.
/// With coherent_first_start the first draw is replaced by its absolute value.
OptimizeResult minimize_with_restarts(const ObjectiveFn& objective, Eigen::Index n, const OptimizerConfig& config);

/// As above, with each start drawn in R^n and passed through start_map.
OptimizeResult minimize_with_restarts(const ObjectiveFn& objective, Eigen::Index n, const OptimizerConfig& config,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& start_map);

}  // namespace kpoisson
