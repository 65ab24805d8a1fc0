#include "kpoisson/experiments.hpp"
#include "kpoisson/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace kpoisson {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rmse(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return std::sqrt((A - B).array().square().mean());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) { return format_double(v); }

Eigen::MatrixXd exact_sobolev_gram(const PointMatrix& X, double a, double gamma) {
  Eigen::MatrixXd E(X.rows(), X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) E(i, j) = sobolev1_ktilde_exact(X(i, 0) - X(j, 0), a, gamma);
  }
  return E;
}

double mse(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) { return (est - truth).array().square().mean(); }

std::string family_name(MixtureFamily f) { return f == MixtureFamily::Gaussian ? "gaussian" : "student_t"; }

// Draws exactly n points from a squared-mixture surface by pooling realizations.
PointMatrix mixture_points(int dim, Eigen::Index n, Rng& rng) {
  const IntensityFn unscaled =
      intensity_mixture_squared(dim, 20, MixtureFamily::Gaussian, {static_cast<double>(n), static_cast<double>(n)}, rng);
  PointMatrix out(n, dim);
  Eigen::Index filled = 0;
  while (filled < n) {
    const PointPattern draw = sample_inhomogeneous(unscaled, rng);
    const Eigen::Index take = std::min(n - filled, draw.size());
    out.middleRows(filled, take) = draw.points().topRows(take);
    filled += take;
  }
  return out;
}

double time_fit(const PointPattern& pattern, const KernelSpec& kernel, const LandmarkSet& landmarks, Eigen::Index rank,
                const OptimizerConfig& opt) {
  const auto start = Clock::now();
  auto rep = std::make_shared<const AdjustedKernelRep>(
      nystrom_eigensystem(kernel, landmarks, rank).with_regularization(static_cast<double>(pattern.size()), 0.1));
  const IntensityModel model = fit_rkhs(pattern, rep, opt);
  const double elapsed = seconds_since(start);
  if (!std::isfinite(model.diagnostics().objective)) throw Error("scaling fit produced a non-finite objective");
  return elapsed;
}

}  // namespace

double ExperimentReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  throw Error("report " + id + " has no summary '" + key + "'");
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "# experiment=" << id << '\n' << "# seed=" << seed << '\n';
  for (const auto& [k, v] : config) out << "# " << k << '=' << v << '\n';
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

void ExperimentReport::write_summary_csv(std::ostream& out) const {
  out << "name,value\n";
  for (const auto& [k, v] : summary) out << k << ',' << fmt(v) << '\n';
}

double sobolev1_ktilde_exact(double d, double a, double gamma) {
  // sum over m != 0 of cos(m theta) / (a + gamma (2 pi m)^2), theta = 2 pi {d}
  const double pi = std::numbers::pi;
  const double theta = 2.0 * pi * fractional_part(d);
  const double c = std::sqrt(a / (4.0 * pi * pi * gamma));
  const double series = pi * std::cosh(c * (pi - theta)) / (2.0 * c * std::sinh(c * pi)) - 1.0 / (2.0 * c * c);
  return 1.0 / (a + gamma) + 2.0 / (4.0 * pi * pi * gamma) * series;
}

ExperimentReport exp_sobolev_approx(std::uint64_t seed) {
  const double a = 10.0;
  const double gamma = 0.5;
  const KernelSpec kernel = KernelSpec::sobolev(1);
  const Window unit = Window::unit(1);

  ExperimentReport report;
  report.id = "sobolev_approx";
  report.seed = seed;
  report.add_config("kernel", kernel.to_string());
  report.add_config("a", fmt(a));
  report.add_config("gamma", fmt(gamma));
  report.columns = {"setting", "landmarks", "rank", "eval_points", "rmse", "seconds"};

  auto run = [&](const std::string& name, Eigen::Index m, Eigen::Index rank, const PointMatrix* eval) {
    const auto start = Clock::now();
    const LandmarkSet grid = make_landmarks(unit, m, LandmarkStrategy::Grid);
    const NystromRep rep = nystrom_eigensystem(kernel, grid, rank).with_regularization(a, gamma);
    const PointMatrix& X = eval ? *eval : grid.points;
    const double err = rmse(rep.gram(X), exact_sobolev_gram(X, a, gamma));
    report.rows.push_back({name, std::to_string(m), std::to_string(rep.rank()), std::to_string(X.rows()), fmt(err),
                           fmt(seconds_since(start))});
    report.add_summary("rmse_" + name, err);
  };

  Rng rng(seed);
  std::gamma_distribution<double> half(0.5, 1.0);
  PointMatrix beta(400, 1);
  for (Eigen::Index i = 0; i < beta.rows(); ++i) {
    const double g1 = half(rng);
    const double g2 = half(rng);
    beta(i, 0) = g1 / (g1 + g2);
  }
  run("grid10", 10, 10, nullptr);
  run("grid100", 100, 100, nullptr);
  run("beta400", 100, 100, &beta);
  run("rank5", 100, 5, &beta);
  return report;
}

OptimizerConfig HighDimConfig::default_highdim_optimizer() {
  OptimizerConfig opt;
  opt.primal = true;
  return opt;
}

ExperimentReport exp_highdim(const HighDimConfig& config) {
  if (config.replicates < 2) throw Error("exp_highdim needs at least 2 replicates");
  if (config.gammas.empty()) throw Error("no gamma values to evaluate");
  ExperimentReport report;
  report.id = "highdim";
  report.seed = config.seed;
  report.add_config("family", family_name(config.family));
  std::string dims;
  for (int d : config.dims) dims += (dims.empty() ? "" : ";") + std::to_string(d);
  report.add_config("dims", dims);
  report.add_config("replicates", std::to_string(config.replicates));
  report.add_config("components", std::to_string(config.components));
  report.add_config("query_points", std::to_string(config.query_points));
  report.add_config("nystrom_landmarks", std::to_string(config.nystrom_landmarks));
  const Eigen::Index rank =
      config.nystrom_rank > 0 ? std::min(config.nystrom_rank, config.nystrom_landmarks) : config.nystrom_landmarks;
  report.add_config("nystrom_rank", std::to_string(rank));
  report.add_config("integration_points", std::to_string(config.integration_points));
  report.add_config("include_naive", config.include_naive ? "1" : "0");
  std::string gammas;
  for (double g : config.gammas) gammas += (gammas.empty() ? "" : ";") + fmt(g);
  report.add_config("gammas", gammas);
  report.add_config("primal", config.optimizer.primal ? "1" : "0");
  std::string sigmas_text;
  for (double s : config.lengthscales) sigmas_text += (sigmas_text.empty() ? "" : ";") + fmt(s);
  report.add_config("lengthscales", sigmas_text);
  if (config.lengthscales.empty()) throw Error("no lengthscales to evaluate");
  report.columns = {"dim",       "replicate", "n1",        "n2",         "mse_rkhs",    "mse_naive",
                    "mse_kie",   "rkhs_a",    "rkhs_gamma", "rkhs_sigma", "bandwidth", "seconds"};

  const auto range = default_count_range(config.family);
  for (int D : config.dims) {
    const Window window = Window::unit(D);
    const double side = 1.0;
    std::vector<double> sigmas;
    for (double s : config.lengthscales) sigmas.push_back(s * side);
    struct Row {
      Eigen::Index n1 = 0, n2 = 0;
      double rkhs = NAN, naive = NAN, kie = NAN;
      Assignment rkhs_best, kie_best;
      double seconds = 0.0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(config.replicates));
    parallel_for(rows.size(), [&](std::size_t r) {
      const auto start = Clock::now();
      const std::uint64_t rep_seed = derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(D)), r);
      Rng rng(rep_seed);
      const IntensityFn truth = intensity_mixture_squared(D, config.components, config.family, range, rng);
      const PointPattern r1 = sample_inhomogeneous(truth, rng);
      const PointPattern r2 = sample_inhomogeneous(truth, rng);
      PointMatrix query(config.query_points, D);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (Eigen::Index i = 0; i < query.size(); ++i) query.data()[i] = unif(rng);
      const Eigen::VectorXd target = truth.evaluate(query);

      Row& row = rows[r];
      row.n1 = r1.size();
      row.n2 = r2.size();
      if (r1.size() == 0 || r2.size() == 0) {
        row.seconds = seconds_since(start);
        return;
      }
      const std::vector<Fold> folds{Fold{r1, r2}, Fold{r2, r1}};
      const PointPattern both = r1.merged(r2);

      CVPlan plan;
      plan.folds = 2;
      plan.seed = derive_seed(rep_seed, 1);
      plan.landmarks = make_landmarks(window, config.integration_points, LandmarkStrategy::UniformMC,
                                      derive_seed(rep_seed, 2));
      const LandmarkSet nystrom_landmarks =
          make_landmarks(window, config.nystrom_landmarks, LandmarkStrategy::UniformMC, derive_seed(rep_seed, 3));
      const Eigen::Index n_train = (r1.size() + r2.size()) / 2;

      auto evaluate = [&](const ModelFactory& factory, std::vector<Assignment> grid, Assignment* best) {
        plan.grid = std::move(grid);
        try {
          const Selection sel = select(folds, both, factory, plan);
          if (best) *best = sel.best;
          const ScaledPredictor halved(sel.model, 0.5);
          return mse(halved.intensities(query), target);
        } catch (const Error&) {
          return std::numeric_limits<double>::quiet_NaN();
        }
      };

      const OptimizerConfig& opt = config.optimizer;
      const std::vector<Assignment> grid = cartesian_grid({{"a", {static_cast<double>(std::max<Eigen::Index>(1, n_train))}},
                                                           {"gamma", config.gammas},
                                                           {"sigma", sigmas}});
      row.rkhs = evaluate(rkhs_nystrom_factory(se_kernel_from_sigma(), nystrom_landmarks, rank, opt),
                          grid, &row.rkhs_best);
      if (config.include_naive) row.naive = evaluate(naive_factory(se_kernel_from_sigma(), nystrom_landmarks, opt), grid, nullptr);
      row.kie = evaluate(kie_factory(true), default_kie_grid(side), &row.kie_best);
      row.seconds = seconds_since(start);
    });

    int wins_kie = 0, wins_naive = 0, valid_kie = 0, valid_naive = 0;
    std::vector<double> pct_kie, pct_naive;
    double sum_rkhs = 0.0, sum_kie = 0.0, sum_naive = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Row& row = rows[r];
      auto get = [](const Assignment& a, const char* k) {
        const auto it = a.find(k);
        return it == a.end() ? std::string("") : fmt(it->second);
      };
      report.rows.push_back({std::to_string(D), std::to_string(r), std::to_string(row.n1), std::to_string(row.n2),
                             fmt(row.rkhs), fmt(row.naive), fmt(row.kie), get(row.rkhs_best, "a"),
                             get(row.rkhs_best, "gamma"), get(row.rkhs_best, "sigma"), get(row.kie_best, "bandwidth"),
                             fmt(row.seconds)});
      // A method that failed to produce a model loses the comparison.
      if (!std::isnan(row.kie) || !std::isnan(row.rkhs)) {
        ++valid_kie;
        if (std::isnan(row.kie) || (!std::isnan(row.rkhs) && row.rkhs < row.kie)) ++wins_kie;
        if (!std::isnan(row.kie) && !std::isnan(row.rkhs)) {
          pct_kie.push_back(100.0 * (row.kie - row.rkhs) / row.kie);
          sum_rkhs += row.rkhs;
          sum_kie += row.kie;
        }
      }
      if (config.include_naive && (!std::isnan(row.naive) || !std::isnan(row.rkhs))) {
        ++valid_naive;
        if (std::isnan(row.naive) || (!std::isnan(row.rkhs) && row.rkhs < row.naive)) ++wins_naive;
        if (!std::isnan(row.naive) && !std::isnan(row.rkhs)) {
          pct_naive.push_back(100.0 * (row.naive - row.rkhs) / row.naive);
          sum_naive += row.naive;
        }
      }
    }
    const std::string tag = "_d" + std::to_string(D);
    const double win = valid_kie ? static_cast<double>(wins_kie) / valid_kie : 0.0;
    const auto ci = wilson_interval(wins_kie, valid_kie);
    report.add_summary("win_rkhs_vs_kie" + tag, win);
    report.add_summary("win_rkhs_vs_kie_lo" + tag, ci.first);
    report.add_summary("win_rkhs_vs_kie_hi" + tag, ci.second);
    report.add_summary("mean_mse_rkhs" + tag, pct_kie.empty() ? NAN : sum_rkhs / pct_kie.size());
    report.add_summary("mean_mse_kie" + tag, pct_kie.empty() ? NAN : sum_kie / pct_kie.size());
    report.add_summary("median_pct_improvement_vs_kie" + tag, pct_kie.empty() ? NAN : median(pct_kie));
    if (config.include_naive) {
      report.add_summary("win_rkhs_vs_naive" + tag, valid_naive ? static_cast<double>(wins_naive) / valid_naive : 0.0);
      report.add_summary("mean_mse_naive" + tag, pct_naive.empty() ? NAN : sum_naive / pct_naive.size());
      report.add_summary("median_pct_improvement_vs_naive" + tag, pct_naive.empty() ? NAN : median(pct_naive));
    }
  }
  return report;
}

ExperimentReport exp_scaling(const ScalingConfig& config) {
  if (config.ns.size() < 4 || config.ms.size() < 4) throw Error("exp_scaling needs at least 4 sizes per sweep");
  ExperimentReport report;
  report.id = "scaling";
  report.seed = config.seed;
  report.add_config("rank", std::to_string(config.rank));
  report.add_config("repeats", std::to_string(config.repeats));
  report.add_config("restarts", std::to_string(config.restarts));
  report.add_config("dim", std::to_string(config.dim));
  report.add_config("fixed_landmarks", std::to_string(config.fixed_landmarks));
  report.add_config("fixed_n", std::to_string(config.fixed_n));
  report.columns = {"sweep", "n", "landmarks", "rank", "median_seconds"};

  const Window window = Window::unit(config.dim);
  const KernelSpec kernel = KernelSpec::squared_exponential(0.3);
  OptimizerConfig opt;
  opt.seed = derive_seed(config.seed, 7);
  opt.restarts = config.restarts;

  auto measure = [&](Eigen::Index n, Eigen::Index m, std::uint64_t stream) {
    Rng rng(derive_seed(config.seed, stream));
    const PointPattern pattern(window, mixture_points(config.dim, n, rng));
    const LandmarkSet landmarks = make_landmarks(window, m, LandmarkStrategy::UniformMC, derive_seed(config.seed, stream + 1));
    std::vector<double> times;
    for (int k = 0; k < config.repeats; ++k) times.push_back(time_fit(pattern, kernel, landmarks, config.rank, opt));
    return median(times);
  };

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < config.ns.size(); ++i) {
    const Eigen::Index n = config.ns[i];
    const double t = measure(n, config.fixed_landmarks, 100 + 2 * i);
    report.rows.push_back({"n", std::to_string(n), std::to_string(config.fixed_landmarks), std::to_string(config.rank), fmt(t)});
    xs.push_back(static_cast<double>(n));
    ys.push_back(t);
  }
  report.add_summary("slope_n", loglog_slope(xs, ys));
  xs.clear();
  ys.clear();
  for (std::size_t i = 0; i < config.ms.size(); ++i) {
    const Eigen::Index m = config.ms[i];
    const double t = measure(config.fixed_n, m, 200 + 2 * i);
    report.rows.push_back({"landmarks", std::to_string(config.fixed_n), std::to_string(m), std::to_string(config.rank), fmt(t)});
    xs.push_back(static_cast<double>(m));
    ys.push_back(t);
  }
  report.add_summary("slope_landmarks", loglog_slope(xs, ys));
  return report;
}

KernelSpec periodic_space_time_kernel(double frequency, double space_sigma, double time_sigma) {
  return KernelSpec::product({KernelSpec::squared_exponential(space_sigma, {0, 1}),
                              KernelSpec::sum({KernelSpec::periodic(frequency, {2}), KernelSpec::constant(1.0)}),
                              KernelSpec::squared_exponential(time_sigma, {2})});
}

ExperimentReport exp_periodic_crime(const PointPattern& pattern, const PeriodicConfig& config) {
  if (pattern.dim() != 3) throw DimensionError("periodic experiment needs (x, y, t) points");
  if (config.frequencies.empty()) throw Error("no frequencies to evaluate");
  ExperimentReport report;
  report.id = "periodic";
  report.seed = config.seed;
  std::string freqs;
  for (int p : config.frequencies) freqs += (freqs.empty() ? "" : ";") + std::to_string(p);
  report.add_config("frequencies", freqs);
  report.add_config("points", std::to_string(pattern.size()));
  report.add_config("landmarks", std::to_string(config.landmarks));
  report.add_config("rank", std::to_string(config.rank));
  report.add_config("space_sigma", fmt(config.space_sigma));
  report.add_config("time_sigma", fmt(config.time_sigma));
  report.add_config("a_per_point", fmt(config.a_per_point));
  std::string gammas;
  for (double g : config.gammas) gammas += (gammas.empty() ? "" : ";") + fmt(g);
  report.add_config("gammas", gammas);
  report.add_config("integration_points", std::to_string(config.integration_points));
  report.add_config("restarts", std::to_string(config.optimizer.restarts));
  report.add_config("primal", config.optimizer.primal ? "1" : "0");
  report.columns = {"frequency", "cv_loglik", "gamma", "seconds"};
  if (config.gammas.empty()) throw Error("no gamma values to evaluate");

  const LandmarkSet landmarks = make_landmarks(pattern.window(), config.landmarks, LandmarkStrategy::HaltonQMC);
  const std::vector<Fold> folds = split_folds(pattern, 2, config.seed);
  const Eigen::Index n_train = folds.front().train.size();
  const double space_sigma = config.space_sigma;
  const double time_sigma = config.time_sigma;
  const std::uint64_t fit_seed = derive_seed(config.seed, 1);
  const LandmarkSet integration = make_landmarks(pattern.window(), config.integration_points,
                                                 LandmarkStrategy::UniformMC, derive_seed(config.seed, 2));

  const double a = config.a_per_point * static_cast<double>(n_train);
  const double cell = pattern.window().volume() / static_cast<double>(integration.size());
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> scores(config.frequencies.size(), kNegInf);
  std::vector<double> best_gamma(config.frequencies.size(), 0.0);
  std::vector<double> secs(config.frequencies.size());
  parallel_for(scores.size(), [&](std::size_t i) {
    const auto start = Clock::now();
    const KernelSpec kernel = periodic_space_time_kernel(config.frequencies[i], space_sigma, time_sigma);
    const NystromRep base = nystrom_eigensystem(kernel, landmarks, std::min(config.rank, landmarks.size()));
    const Eigen::MatrixXd projected = base.projected(integration.points);
    for (double gamma : config.gammas) {
      const auto rep = std::make_shared<const AdjustedKernelRep>(base.with_regularization(a, gamma));
      const Eigen::MatrixXd features = rep->nystrom().primal_from_projected(projected);
      double total = 0.0;
      for (std::size_t f = 0; f < folds.size() && std::isfinite(total); ++f) {
        OptimizerConfig opt = config.optimizer;
        opt.seed = derive_seed(fit_seed, f);
        try {
          const IntensityModel model = fit_rkhs(folds[f].train, rep, opt);
          const Eigen::VectorXd lam = model.intensities(folds[f].test.points());
          double ll = -cell * a * (features * model.weights()).squaredNorm();
          for (double l : lam) ll += l > 0.0 ? std::log(l) : kNegInf;
          total += ll;
        } catch (const Error&) {
          total = kNegInf;
        }
      }
      const double score = total / static_cast<double>(folds.size());
      if (score > scores[i]) {
        scores[i] = score;
        best_gamma[i] = gamma;
      }
    }
    secs[i] = seconds_since(start);
  });

  std::size_t best = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    report.rows.push_back({std::to_string(config.frequencies[i]), fmt(scores[i]), fmt(best_gamma[i]), fmt(secs[i])});
    if (scores[i] > scores[best]) best = i;
  }
  report.add_summary("argmax_frequency", config.frequencies[best]);
  report.add_summary("max_cv_loglik", scores[best]);
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  report.add_summary("cv_loglik_range", *hi - *lo);
  return report;
}

PointPattern synthetic_periodic_pattern(int frequency, double expected_count, Rng& rng, double depth) {
  if (frequency < 0) throw Error("frequency must be nonnegative");
  if (!(depth >= 0.0 && depth < 1.0)) throw Error("modulation depth must lie in [0, 1)");
  struct Bump {
    double x, y, s, w;
  };
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Bump> bumps;
  for (int k = 0; k < 3; ++k) bumps.push_back({0.2 + 0.6 * unif(rng), 0.2 + 0.6 * unif(rng), 0.1 + 0.1 * unif(rng), 0.5 + unif(rng)});
  const double floor = 0.3;
  double g_max = floor;
  for (const auto& b : bumps) g_max += b.w;
  const double two_pi_f = 2.0 * std::numbers::pi * frequency;
  IntensityFn::Evaluator eval = [bumps, floor, two_pi_f, depth](Point x) {
    double g = floor;
    for (const auto& b : bumps) {
      const double dx = x[0] - b.x, dy = x[1] - b.y;
      g += b.w * std::exp(-(dx * dx + dy * dy) / (2.0 * b.s * b.s));
    }
    const double m = two_pi_f > 0.0 ? 1.0 + depth * std::cos(two_pi_f * x[2]) : 1.0;
    return g * g * m * m;
  };
  const double bound = g_max * g_max * (1.0 + depth) * (1.0 + depth);
  const IntensityFn unscaled(Window::unit(3), eval, bound);
  const double c = calibrate_scale(unscaled, expected_count, 100000, rng);
  return sample_inhomogeneous(unscaled.scaled(c), rng);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope needs at least two aligned points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("log-log slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace kpoisson
