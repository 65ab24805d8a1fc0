#include "kpoisson/tune.hpp"
#include "kpoisson/parallel.hpp"
#include "kpoisson/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

namespace kpoisson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gamma_of(const Assignment& a) {
  const auto it = a.find("gamma");
  return it == a.end() ? 0.0 : it->second;
}

double require(const Assignment& a, const std::string& key) {
  const auto it = a.find(key);
  if (it == a.end()) throw Error("grid point " + to_string(a) + " lacks '" + key + "'");
  return it->second;
}

}  // namespace

std::string to_string(const Assignment& assignment) {
  std::string out;
  for (const auto& [k, v] : assignment) {
    if (!out.empty()) out += ';';
    out += k + '=' + format_double(v);
  }
  return out;
}

std::vector<Fold> split_folds(const PointPattern& pattern, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (pattern.size() < folds) {
    throw Error("cannot split " + std::to_string(pattern.size()) + " points into " + std::to_string(folds) + " folds");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pattern.size()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < order.size(); ++i) members[i % static_cast<std::size_t>(folds)].push_back(order[i]);

  std::vector<Fold> out;
  for (int k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> train;
    for (int j = 0; j < folds; ++j) {
      if (j == k) continue;
      train.insert(train.end(), members[static_cast<std::size_t>(j)].begin(), members[static_cast<std::size_t>(j)].end());
    }
    std::sort(train.begin(), train.end());
    auto test = members[static_cast<std::size_t>(k)];
    std::sort(test.begin(), test.end());
    out.push_back(Fold{pattern.subset(train), pattern.subset(test)});
  }
  return out;
}

double cv_score(const std::vector<Fold>& folds, const ModelFactory& factory, const Assignment& assignment,
                const CVPlan& plan) {
  if (folds.empty()) throw Error("no folds to score");
  const double k = static_cast<double>(folds.size());
  const double correction = (plan.thinning_correction && folds.size() > 1) ? 1.0 / (k - 1.0) : 1.0;
  double total = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::shared_ptr<const IntensityPredictor> model;
    try {
      model = factory(folds[f].train, assignment, derive_seed(plan.seed, f));
    } catch (const Error&) {
      return kNegInf;
    }
    const ScaledPredictor test_model(model, correction);
    const double ll = log_likelihood(test_model, folds[f].test, plan.landmarks);
    if (!std::isfinite(ll)) return kNegInf;
    total += ll;
  }
  return total / k;
}

double cv_score(const PointPattern& pattern, const ModelFactory& factory, const Assignment& assignment,
                const CVPlan& plan) {
  return cv_score(split_folds(pattern, plan.folds, plan.seed), factory, assignment, plan);
}

std::size_t select_index(const std::vector<Assignment>& grid, const std::vector<double>& scores) {
  if (grid.empty() || grid.size() != scores.size()) throw Error("grid and scores must be non-empty and aligned");
  std::size_t best = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(scores[i])) continue;
    if (best == grid.size()) {
      best = i;
      continue;
    }
    if (scores[i] > scores[best]) {
      best = i;
    } else if (scores[i] == scores[best]) {
      const double gi = gamma_of(grid[i]);
      const double gb = gamma_of(grid[best]);
      if (gi > gb || (gi == gb && grid[i] < grid[best])) best = i;
    }
  }
  if (best == grid.size()) throw Error("every grid point was disqualified");
  return best;
}

Selection select(const std::vector<Fold>& folds, const PointPattern& refit_on, const ModelFactory& factory,
                 const CVPlan& plan) {
  if (plan.grid.empty()) throw Error("hyperparameter grid is empty");
  Selection out;
  out.scores.assign(plan.grid.size(), kNegInf);
  parallel_for(plan.grid.size(), [&](std::size_t i) { out.scores[i] = cv_score(folds, factory, plan.grid[i], plan); });
  const std::size_t best = select_index(plan.grid, out.scores);
  out.best = plan.grid[best];
  out.best_score = out.scores[best];
  out.model = factory(refit_on, out.best, derive_seed(plan.seed, 0xF17));
  return out;
}

Selection select(const PointPattern& pattern, const ModelFactory& factory, const CVPlan& plan) {
  return select(split_folds(pattern, plan.folds, plan.seed), pattern, factory, plan);
}

std::vector<Assignment> cartesian_grid(const std::map<std::string, std::vector<double>>& axes) {
  std::vector<Assignment> grid{Assignment{}};
  for (const auto& [name, values] : axes) {
    if (values.empty()) throw Error("grid axis '" + name + "' has no values");
    std::vector<Assignment> next;
    for (const auto& partial : grid) {
      for (double v : values) {
        Assignment a = partial;
        a[name] = v;
        next.push_back(std::move(a));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw Error("invalid log-spaced range");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return out;
}

std::vector<Assignment> default_rkhs_grid(Eigen::Index n_points, double side, bool with_lengthscale) {
  const double n = std::max<double>(1.0, static_cast<double>(n_points));
  std::map<std::string, std::vector<double>> axes{
      {"a", {n / 2.0, n, 2.0 * n, 4.0 * n}},
      {"gamma", {1e-3, 1e-2, 1e-1, 1.0}},
  };
  if (with_lengthscale) axes["sigma"] = log_spaced(0.05 * side, 0.5 * side, 5);
  return cartesian_grid(axes);
}

std::vector<Assignment> default_kie_grid(double side) {
  return cartesian_grid({{"bandwidth", log_spaced(0.01 * side, 0.5 * side, 12)}});
}

std::vector<Assignment> parse_grid(std::istream& in) {
  std::map<std::string, std::vector<double>> axes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("grid line " + std::to_string(line_no) + ": expected key=values");
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream values(line.substr(eq + 1));
    std::string field;
    while (std::getline(values, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (field.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(field);
        axes[key].push_back(v);
      } catch (const std::exception&) {
        throw ParseError("grid line " + std::to_string(line_no) + ": bad number '" + field + "'");
      }
    }
  }
  if (axes.empty()) throw ParseError("grid file is empty");
  return cartesian_grid(axes);
}

ModelFactory rkhs_nystrom_factory(std::function<KernelSpec(const Assignment&)> kernel_for, LandmarkSet landmarks,
                                  Eigen::Index rank, OptimizerConfig opt) {
  struct Cache {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const NystromRep>> reps;
  };
  auto cache = std::make_shared<Cache>();
  return [kernel_for = std::move(kernel_for), landmarks = std::move(landmarks), rank, opt, cache](
             const PointPattern& train, const Assignment& assignment, std::uint64_t seed) {
    const KernelSpec kernel = kernel_for(assignment);
    const std::string key = kernel.to_string();
    std::shared_ptr<const NystromRep> base;
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->reps.find(key); it != cache->reps.end()) base = it->second;
    }
    if (!base) {
      base = std::make_shared<const NystromRep>(nystrom_eigensystem(kernel, landmarks, rank));
      std::lock_guard lock(cache->mutex);
      cache->reps.emplace(key, base);
    }
    auto rep = std::make_shared<const AdjustedKernelRep>(
        base->with_regularization(require(assignment, "a"), require(assignment, "gamma")));
    OptimizerConfig cfg = opt;
    cfg.seed = seed;
    return std::shared_ptr<const IntensityPredictor>(std::make_shared<IntensityModel>(fit_rkhs(train, rep, cfg)));
  };
}

ModelFactory rkhs_mercer_factory(std::function<KernelSpec(const Assignment&)> kernel_for, int truncation,
                                 OptimizerConfig opt) {
  return [kernel_for = std::move(kernel_for), truncation, opt](const PointPattern& train, const Assignment& assignment,
                                                                std::uint64_t seed) {
    const KernelSpec kernel = kernel_for(assignment);
    const auto ell = assignment.find("ell");
    MercerBasis basis = basis_for_kernel(kernel, truncation, ell == assignment.end() ? 1.0 : ell->second);
    auto rep = std::make_shared<const AdjustedKernelRep>(
        MercerKernelRep(std::move(basis), require(assignment, "a"), require(assignment, "gamma")));
    OptimizerConfig cfg = opt;
    cfg.seed = seed;
    return std::shared_ptr<const IntensityPredictor>(std::make_shared<IntensityModel>(fit_rkhs(train, rep, cfg)));
  };
}

ModelFactory naive_factory(std::function<KernelSpec(const Assignment&)> kernel_for, LandmarkSet landmarks,
                           OptimizerConfig opt) {
  return [kernel_for = std::move(kernel_for), landmarks = std::move(landmarks), opt](
             const PointPattern& train, const Assignment& assignment, std::uint64_t seed) {
    OptimizerConfig cfg = opt;
    cfg.seed = seed;
    return std::shared_ptr<const IntensityPredictor>(std::make_shared<NaiveModel>(
        fit_naive(train, kernel_for(assignment), landmarks, require(assignment, "a"), require(assignment, "gamma"), cfg)));
  };
}

ModelFactory kie_factory(bool edge_correct) {
  return [edge_correct](const PointPattern& train, const Assignment& assignment, std::uint64_t) {
    return std::shared_ptr<const IntensityPredictor>(
        std::make_shared<KIEModel>(fit_kie(train, require(assignment, "bandwidth"), edge_correct)));
  };
}

std::function<KernelSpec(const Assignment&)> se_kernel_from_sigma() {
  return [](const Assignment& a) { return KernelSpec::squared_exponential(require(a, "sigma")); };
}

}  // namespace kpoisson
