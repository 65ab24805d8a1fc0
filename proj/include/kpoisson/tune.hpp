#pragma once

#include "kpoisson/estimator.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace kpoisson {

/// Named hyperparameter values, e.g. {a, gamma, sigma} or {bandwidth}.
using Assignment = std::map<std::string, double>;

std::string to_string(const Assignment& assignment);

/// Builds a fitted predictor for one grid point from a training pattern.
using ModelFactory = std::function<std::shared_ptr<const IntensityPredictor>(
    const PointPattern& train, const Assignment& assignment, std::uint64_t seed)>;

struct CVPlan {
  int folds = 2;
  std::vector<Assignment> grid;
  std::uint64_t seed = 0;
  /// Integration points for the held-out likelihood.
  LandmarkSet landmarks;
  /// Scale held-out intensities by 1/(K-1) to match the thinned test fold.
  bool thinning_correction = true;
};

struct Fold {
  PointPattern train;
  PointPattern test;
};

/// Uniform random partition into K folds of near-equal size.
std::vector<Fold> split_folds(const PointPattern& pattern, int folds, std::uint64_t seed);

/// Mean held-out log-likelihood over the folds; -infinity disqualifies.
/// The per-fold fitting seed depends only on (plan.seed, fold index).
double cv_score(const std::vector<Fold>& folds, const ModelFactory& factory, const Assignment& assignment,
                const CVPlan& plan);
double cv_score(const PointPattern& pattern, const ModelFactory& factory, const Assignment& assignment,
                const CVPlan& plan);

struct Selection {
  Assignment best;
  double best_score = 0.0;
  std::vector<double> scores;  // aligned with plan.grid
  std::shared_ptr<const IntensityPredictor> model;
};

/// Highest mean score wins; ties go to larger gamma, then to the
/// lexicographically smaller assignment. The chosen assignment is refit on
/// `refit_on` (the full pattern).
Selection select(const std::vector<Fold>& folds, const PointPattern& refit_on, const ModelFactory& factory,
                 const CVPlan& plan);
Selection select(const PointPattern& pattern, const ModelFactory& factory, const CVPlan& plan);

/// Index of the winning grid point given its scores.
std::size_t select_index(const std::vector<Assignment>& grid, const std::vector<double>& scores);

/// Cartesian product of named value lists.
std::vector<Assignment> cartesian_grid(const std::map<std::string, std::vector<double>>& axes);
std::vector<double> log_spaced(double lo, double hi, int count);

/// a in {N/2, N, 2N, 4N}, gamma in {1e-3, 1e-2, 1e-1, 1}, and (when
/// with_lengthscale) sigma at 5 log-spaced values over [0.05, 0.5] * side.
std::vector<Assignment> default_rkhs_grid(Eigen::Index n_points, double side, bool with_lengthscale = true);
std::vector<Assignment> default_kie_grid(double side);

/// Reads "key=v1,v2,..." lines and returns their Cartesian product.
std::vector<Assignment> parse_grid(std::istream& in);

/// RKHS fit with a Nystrom k~ built from kernel_for(assignment) on the given landmarks.
ModelFactory rkhs_nystrom_factory(std::function<KernelSpec(const Assignment&)> kernel_for, LandmarkSet landmarks,
                                  Eigen::Index rank, OptimizerConfig opt = {});
/// RKHS fit with a truncated Mercer k~ built from kernel_for(assignment).
ModelFactory rkhs_mercer_factory(std::function<KernelSpec(const Assignment&)> kernel_for, int truncation,
                                 OptimizerConfig opt = {});
ModelFactory naive_factory(std::function<KernelSpec(const Assignment&)> kernel_for, LandmarkSet landmarks,
                           OptimizerConfig opt = {});
/// Reads "bandwidth".
ModelFactory kie_factory(bool edge_correct);

/// SE kernel over all coordinates with lengthscale assignment["sigma"].
std::function<KernelSpec(const Assignment&)> se_kernel_from_sigma();

}  // namespace kpoisson
