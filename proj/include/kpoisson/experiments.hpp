#pragma once

#include "kpoisson/simulate.hpp"
#include "kpoisson/tune.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kpoisson {

/// Per-replicate rows plus summary statistics and the configuration that produced them.
struct ExperimentReport {
  std::string id;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, double>> summary;

  void add_config(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
  void add_summary(const std::string& key, double value) { summary.emplace_back(key, value); }
  /// Throws if the key is absent.
  double summary_value(const std::string& key) const;

  /// "# key=value" comment lines (id, seed, config), then the replicate table.
  void write_csv(std::ostream& out) const;
  /// CSV with columns name,value.
  void write_summary_csv(std::ostream& out) const;
};

/// Exact k~ for the order-1 periodic Sobolev kernel as a function of x - y,
/// summed in closed form over all frequencies.
double sobolev1_ktilde_exact(double d, double a, double gamma);

/// RMSE between exact and Nystrom k~ (s=1, a=10, gamma=0.5) in four settings:
/// grid m=10 and m=100 (evaluated on the grid), 400 Beta(0.5,0.5) points with
/// the m=100 grid at full rank and at rank 5.
ExperimentReport exp_sobolev_approx(std::uint64_t seed = 0);

struct HighDimConfig {
  MixtureFamily family = MixtureFamily::Gaussian;
  std::vector<int> dims{9, 10, 11, 12};
  int replicates = 20;
  std::uint64_t seed = 0;
  int components = 20;
  Eigen::Index query_points = 1000;
  Eigen::Index nystrom_landmarks = 200;
  /// 0: full rank.
  Eigen::Index nystrom_rank = 0;
  Eigen::Index integration_points = 1000;
  bool include_naive = true;
  /// RKHS and naive grids: a fixed at the training count, gamma and the SE
  /// lengthscale from these lists. Both objectives depend on (a, gamma) only
  /// through gamma / a.
  std::vector<double> gammas{2.5e-4, 1e-3, 4e-3, 1.6e-2, 6.4e-2, 0.256, 1.024, 4.096, 16.384, 65.536};
  std::vector<double> lengthscales = log_spaced(0.05, 0.5, 5);
  OptimizerConfig optimizer = default_highdim_optimizer();
  /// Primal solves, otherwise the defaults.
  static OptimizerConfig default_highdim_optimizer();
};

/// Per replicate: random squared-mixture surface, two realizations used as
/// the two CV folds for RKHS-k~, naive RKHS and KIE; the selected
/// configuration is refit on the union and halved; MSE against the truth at
/// uniform query points.
ExperimentReport exp_highdim(const HighDimConfig& config);

struct ScalingConfig {
  std::vector<Eigen::Index> ns{250, 500, 1000, 2000};
  std::vector<Eigen::Index> ms{500, 1000, 2000, 4000};
  Eigen::Index fixed_landmarks = 200;
  Eigen::Index fixed_n = 150;
  Eigen::Index rank = 20;
  int repeats = 5;
  int dim = 5;
  /// Optimizer starts per timed fit.
  int restarts = 3;
  std::uint64_t seed = 0;
};

/// Median wall time of a full Nystrom fit vs N and vs landmark count, with log-log slopes.
ExperimentReport exp_scaling(const ScalingConfig& config);

struct PeriodicConfig {
  std::vector<int> frequencies{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  std::uint64_t seed = 0;
  Eigen::Index landmarks = 800;
  Eigen::Index rank = 150;
  double space_sigma = 0.15;
  double time_sigma = 1.0;
  /// a = a_per_point * training fold size.
  double a_per_point = 1.0;
  /// Each frequency is scored at its best gamma.
  std::vector<double> gammas{1.0, 10.0, 100.0};
  /// Uniform Monte Carlo points for the held-out integral.
  Eigen::Index integration_points = 10000;
  OptimizerConfig optimizer = default_periodic_optimizer();

  static OptimizerConfig default_periodic_optimizer() {
    OptimizerConfig opt;
    opt.primal = true;
    opt.restarts = 10;
    return opt;
  }
};

/// "se@[0,1] * (periodic(p)+const(1))@[2] * se@[2]" for one frequency.
KernelSpec periodic_space_time_kernel(double frequency, double space_sigma, double time_sigma);

/// 2-fold CV held-out log-likelihood of the space-time kernel for each frequency
/// on a pattern in [0,1]^3 with time as the last coordinate, maximized over gamma.
ExperimentReport exp_periodic_crime(const PointPattern& pattern, const PeriodicConfig& config);

/// Space-time pattern on [0,1]^3 with lambda = c g(x,y)^2 (1 + depth cos(2 pi p t))^2;
/// frequency 0 gives an intensity constant in time.
PointPattern synthetic_periodic_pattern(int frequency, double expected_count, Rng& rng, double depth = 0.9);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Wilson 95% interval for a binomial proportion.
std::pair<double, double> wilson_interval(int successes, int trials);

}  // namespace kpoisson
