#include "kpoisson/cli.hpp"
#include "kpoisson/experiments.hpp"
#include "kpoisson/model_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace kpoisson {

namespace {

struct UsageError : Error {
  using Error::Error;
};

// Writes to a file, or to stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string slurp(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    buf << in.rdbuf();
  }
  return buf.str();
}

PointMatrix read_points(const std::string& path) {
  std::istringstream in(slurp(path));
  return read_points_csv(in);
}

PointPattern read_pattern(const std::string& path, const std::string& window_text) {
  const PointMatrix pts = read_points(path);
  if (window_text.empty()) {
    if (pts.cols() == 0) throw Error("cannot infer the dimension of an empty pattern; pass --window");
    return PointPattern(Window::unit(static_cast<int>(pts.cols())), pts);
  }
  return PointPattern(Window::parse(window_text), pts);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw UsageError("bad number '" + field + "' in list");
    }
  }
  return out;
}

void write_intensity_rows(std::ostream& out, const PointMatrix& X, const Eigen::VectorXd& lambda) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) out << 'x' << j << ',';
  out << "lambda\n";
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) out << format_double(X(i, j)) << ',';
    out << format_double(lambda(i)) << '\n';
  }
}

// ---- simulate ----

struct SimulateArgs {
  std::string family = "homog";
  int dim = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string intensity_out;
  std::string window;
  double rate = 100.0;
  double lengthscale = 0.5;
  int n_basis = 64;
  double target = 200.0;
  int components = 20;
  std::string count_range;
  int grid_points = 0;
};

void run_simulate(const SimulateArgs& args) {
  Rng rng(args.seed);
  const Window window = args.window.empty() ? Window::unit(args.dim) : Window::parse(args.window);
  if (window.dim() != args.dim && !args.window.empty() && args.dim != 1) {
    throw UsageError("--dim disagrees with --window");
  }
  std::optional<IntensityFn> truth;
  PointPattern pattern(window);
  if (args.family == "homog") {
    pattern = sample_homogeneous(window, args.rate, rng);
    truth.emplace(window, [rate = args.rate](Point) { return rate; }, args.rate);
  } else if (args.family == "se1d") {
    if (window.dim() != 1) throw UsageError("se1d is one-dimensional");
    truth.emplace(intensity_se_mercer_1d(args.lengthscale, args.n_basis, rng, window, 1.0, args.target));
    pattern = sample_inhomogeneous(*truth, rng);
  } else if (args.family == "gauss-mix" || args.family == "t-mix") {
    if (!args.window.empty() && !(window == Window::unit(window.dim()))) {
      throw UsageError("mixture families are defined on the unit cube");
    }
    const MixtureFamily fam = args.family == "gauss-mix" ? MixtureFamily::Gaussian : MixtureFamily::StudentT;
    auto range = default_count_range(fam);
    if (!args.count_range.empty()) {
      const auto v = parse_list(args.count_range);
      if (v.size() != 2) throw UsageError("--count-range needs lo,hi");
      range = {v[0], v[1]};
    }
    truth.emplace(intensity_mixture_squared(window.dim(), args.components, fam, range, rng));
    pattern = sample_inhomogeneous(*truth, rng);
  } else {
    throw UsageError("unknown family '" + args.family + "'");
  }

  Output out(args.out);
  write_pattern(pattern, out.stream());

  if (!args.intensity_out.empty()) {
    const int D = window.dim();
    PointMatrix grid;
    if (args.grid_points > 0 || D > 3) {
      const Eigen::Index m = args.grid_points > 0 ? args.grid_points : 10000;
      grid = make_landmarks(window, m, D > 3 ? LandmarkStrategy::UniformMC : LandmarkStrategy::Grid,
                            derive_seed(args.seed, 99))
                 .points;
    } else {
      grid = make_landmarks(window, D == 1 ? 1000 : (D == 2 ? 10000 : 27000), LandmarkStrategy::Grid).points;
    }
    Output iout(args.intensity_out);
    write_intensity_rows(iout.stream(), grid, truth->evaluate(grid));
  }
}

// ---- fit ----

struct FitArgs {
  std::string input;
  std::string window;
  std::string method = "rkhs";
  std::string kernel = "se(sigma=0.1)";
  std::string rep = "nystrom";
  std::optional<double> a;
  double gamma = 0.1;
  double bandwidth = 0.1;
  bool edge_correct = false;
  int landmarks = 0;
  std::string strategy;
  int rank = 0;
  int truncation = kDefaultTruncation;
  double ell = 1.0;
  bool allow_gaussian = false;
  std::uint64_t seed = 0;
  int restarts = 3;
  bool primal = false;
  bool report_spectrum = false;
  std::string out;
};

LandmarkSet landmarks_for(const Window& window, int m, const std::string& strategy, std::uint64_t seed) {
  if (m <= 0 && strategy.empty()) return default_landmarks(window, seed);
  LandmarkSet defaults = default_landmarks(window, seed);
  const Eigen::Index count = m > 0 ? m : defaults.size();
  const LandmarkStrategy s = strategy.empty() ? defaults.strategy : parse_landmark_strategy(strategy);
  return make_landmarks(window, count, s, seed);
}

void report_spectrum(std::ostream& err, const AdjustedKernelRep& rep, int truncation) {
  if (rep.is_mercer()) {
    const MercerKernelRep& m = rep.mercer();
    err << "spectrum: mercer truncation=" << truncation << " terms=" << m.basis().size()
        << " tail_bound=" << format_double(truncation_tail_bound(m.basis(), truncation, m.a(), m.gamma())) << '\n';
    const Eigen::Index show = std::min<Eigen::Index>(10, m.basis().eigenvalues().size());
    err << "eigenvalue,adjusted\n";
    for (Eigen::Index j = 0; j < show; ++j) {
      err << format_double(m.basis().eigenvalues()(j)) << ',' << format_double(m.adjusted_eigenvalues()(j)) << '\n';
    }
  } else {
    const NystromRep& n = rep.nystrom();
    const Eigen::VectorXd eta = n.operator_eigenvalues();
    err << "spectrum: nystrom landmarks=" << n.landmarks().size() << " rank=" << n.rank() << '\n';
    err << "eigenvalue,adjusted\n";
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(10, eta.size()); ++j) {
      err << format_double(eta(j)) << ',' << format_double(adjust_spectrum(eta(j), n.a(), n.gamma())) << '\n';
    }
  }
}

void run_fit(const FitArgs& args) {
  const PointPattern pattern = read_pattern(args.input, args.window);
  const Window& window = pattern.window();
  OptimizerConfig opt;
  opt.seed = args.seed;
  opt.restarts = args.restarts;
  opt.allow_gaussian_measure = args.allow_gaussian;
  opt.primal = args.primal;
  const double a = args.a.value_or(std::max<double>(1.0, static_cast<double>(pattern.size())));

  std::shared_ptr<const IntensityPredictor> model;
  if (args.method == "kie") {
    model = std::make_shared<KIEModel>(fit_kie(pattern, args.bandwidth, args.edge_correct));
  } else {
    const KernelSpec kernel = parse_kernel(args.kernel);
    kernel.check_dim(window.dim());
    if (args.method == "naive") {
      const LandmarkSet lm = landmarks_for(window, args.landmarks, args.strategy, args.seed);
      model = std::make_shared<NaiveModel>(fit_naive(pattern, kernel, lm, a, args.gamma, opt));
    } else if (args.method == "rkhs") {
      std::shared_ptr<const AdjustedKernelRep> rep;
      if (args.rep == "mercer") {
        rep = std::make_shared<const AdjustedKernelRep>(
            MercerKernelRep(basis_for_kernel(kernel, args.truncation, args.ell), a, args.gamma));
      } else if (args.rep == "nystrom") {
        const LandmarkSet lm = landmarks_for(window, args.landmarks, args.strategy, args.seed);
        const Eigen::Index rank = args.rank > 0 ? args.rank : lm.size();
        rep = std::make_shared<const AdjustedKernelRep>(
            nystrom_eigensystem(kernel, lm, rank).with_regularization(a, args.gamma));
      } else {
        throw UsageError("unknown --rep '" + args.rep + "'");
      }
      if (args.report_spectrum) report_spectrum(std::cerr, *rep, args.truncation);
      model = std::make_shared<IntensityModel>(fit_rkhs(pattern, rep, opt));
    } else {
      throw UsageError("unknown --method '" + args.method + "'");
    }
  }
  Output out(args.out);
  write_model(*model, out.stream());
}

// ---- predict ----

struct PredictArgs {
  std::string model;
  std::string query;
  std::string out;
};

void run_predict(const PredictArgs& args) {
  const auto model = load_model(args.model);
  const PointMatrix X = read_points(args.query);
  if (X.rows() > 0 && X.cols() != model->window().dim()) {
    throw DimensionError("query has " + std::to_string(X.cols()) + " columns, model window has " +
                         std::to_string(model->window().dim()));
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (!model->window().contains(row_of(X, i))) {
      throw Error("query row " + std::to_string(i + 1) + " lies outside the model window");
    }
  }
  Output out(args.out);
  write_intensity_rows(out.stream(), X, X.rows() ? model->intensities(X) : Eigen::VectorXd());
}

// ---- score ----

struct ScoreArgs {
  std::string model;
  std::string pattern;
  std::string truth;
  int landmarks = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  double interior = 0.1;
  std::string out;
};

void run_score(const ScoreArgs& args) {
  if (args.pattern.empty() && args.truth.empty()) throw UsageError("score needs --pattern and/or --truth");
  const auto model = load_model(args.model);
  const Window& window = model->window();
  Output out(args.out);
  out.stream() << "metric,value\n";
  if (!args.pattern.empty()) {
    const PointPattern test(window, read_points(args.pattern));
    const LandmarkSet lm = landmarks_for(window, args.landmarks, args.strategy, args.seed);
    out.stream() << "log_likelihood," << format_double(log_likelihood(*model, test, lm)) << '\n';
    out.stream() << "integral," << format_double(integral_intensity(*model, lm)) << '\n';
    out.stream() << "points," << test.size() << '\n';
  }
  if (!args.truth.empty()) {
    const PointMatrix table = read_points(args.truth);
    const int D = window.dim();
    if (table.cols() != D + 1) throw DimensionError("truth table needs the window dimension plus a lambda column");
    const PointMatrix X = table.leftCols(D);
    const Eigen::VectorXd truth = table.col(D);
    const Eigen::VectorXd est = model->intensities(X);
    const Eigen::ArrayXd diff = est - truth;
    out.stream() << "mse," << format_double(diff.square().mean()) << '\n';
    out.stream() << "rmse," << format_double(std::sqrt(diff.square().mean())) << '\n';
    double rel = 0.0, worst = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      bool inside = true;
      for (int d = 0; d < D; ++d) {
        const double t = (X(i, d) - window.low(d)) / window.side(d);
        inside = inside && t >= args.interior && t <= 1.0 - args.interior;
      }
      if (!inside || !(truth(i) > 0.0)) continue;
      const double r = std::abs(est(i) - truth(i)) / truth(i);
      rel += r;
      worst = std::max(worst, r);
      ++count;
    }
    if (count > 0) {
      out.stream() << "interior_mean_relative_error," << format_double(rel / count) << '\n';
      out.stream() << "interior_max_relative_error," << format_double(worst) << '\n';
    }
  }
}

// ---- cv ----

struct CvArgs {
  std::string input;
  std::string window;
  std::string grid;
  std::string method = "rkhs";
  std::string kernel;
  std::string rep = "nystrom";
  int folds = 2;
  std::uint64_t seed = 0;
  int landmarks = 0;
  std::string strategy;
  int rank = 0;
  int truncation = kDefaultTruncation;
  bool edge_correct = false;
  bool no_thinning_correction = false;
  bool primal = false;
  std::string out;
  std::string model_out;
};

void run_cv(const CvArgs& args) {
  const PointPattern pattern = read_pattern(args.input, args.window);
  const Window& window = pattern.window();
  double side = window.side(0);
  for (int d = 1; d < window.dim(); ++d) side = std::min(side, window.side(d));

  CVPlan plan;
  plan.folds = args.folds;
  plan.seed = args.seed;
  plan.thinning_correction = !args.no_thinning_correction;
  const LandmarkSet lm = landmarks_for(window, args.landmarks, args.strategy, args.seed);
  plan.landmarks = lm;

  const Eigen::Index n_train = pattern.size() * (args.folds - 1) / std::max(1, args.folds);
  std::function<KernelSpec(const Assignment&)> kernel_for;
  if (args.kernel.empty()) {
    kernel_for = se_kernel_from_sigma();
  } else {
    const KernelSpec fixed = parse_kernel(args.kernel);
    fixed.check_dim(window.dim());
    kernel_for = [fixed](const Assignment&) { return fixed; };
  }

  OptimizerConfig opt;
  opt.primal = args.primal;
  ModelFactory factory;
  if (args.method == "kie") {
    factory = kie_factory(args.edge_correct);
    plan.grid = default_kie_grid(side);
  } else if (args.method == "naive") {
    factory = naive_factory(kernel_for, lm, opt);
    plan.grid = default_rkhs_grid(n_train, side, args.kernel.empty());
  } else if (args.method == "rkhs") {
    if (args.rep == "mercer") {
      if (args.kernel.empty()) throw UsageError("--rep mercer needs --kernel");
      factory = rkhs_mercer_factory(kernel_for, args.truncation, opt);
    } else if (args.rep == "nystrom") {
      factory = rkhs_nystrom_factory(kernel_for, lm, args.rank > 0 ? args.rank : lm.size(), opt);
    } else {
      throw UsageError("unknown --rep '" + args.rep + "'");
    }
    plan.grid = default_rkhs_grid(n_train, side, args.kernel.empty());
  } else {
    throw UsageError("unknown --method '" + args.method + "'");
  }
  if (!args.grid.empty()) {
    std::istringstream in(slurp(args.grid));
    plan.grid = parse_grid(in);
  }

  const Selection sel = select(pattern, factory, plan);
  Output out(args.out);
  out.stream() << "assignment,score,selected\n";
  for (std::size_t i = 0; i < plan.grid.size(); ++i) {
    out.stream() << to_string(plan.grid[i]) << ',' << format_double(sel.scores[i]) << ','
                 << (plan.grid[i] == sel.best ? 1 : 0) << '\n';
  }
  if (!args.model_out.empty()) save_model(*sel.model, args.model_out);
  std::cerr << "selected " << to_string(sel.best) << " score " << format_double(sel.best_score) << '\n';
}

// ---- bench / reproduce ----

struct BenchArgs {
  std::string ns = "250,500,1000,2000";
  std::string ms = "500,1000,2000,4000";
  int fixed_n = 150;
  int fixed_landmarks = 200;
  int rank = 20;
  int repeats = 5;
  int restarts = 3;
  int dim = 5;
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<Eigen::Index> parse_sizes(const std::string& text) {
  std::vector<Eigen::Index> out;
  for (double v : parse_list(text)) {
    if (!(v >= 1.0)) throw UsageError("sizes must be positive");
    out.push_back(static_cast<Eigen::Index>(v));
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::string& out_path, const std::string& summary_path) {
  if (!out_path.empty()) {
    Output out(out_path);
    report.write_csv(out.stream());
  }
  Output summary(summary_path);
  report.write_summary_csv(summary.stream());
}

void run_bench(const BenchArgs& args, const std::string& summary_out) {
  ScalingConfig cfg;
  cfg.ns = parse_sizes(args.ns);
  cfg.ms = parse_sizes(args.ms);
  cfg.fixed_n = args.fixed_n;
  cfg.fixed_landmarks = args.fixed_landmarks;
  cfg.rank = args.rank;
  cfg.repeats = args.repeats;
  cfg.restarts = args.restarts;
  cfg.dim = args.dim;
  cfg.seed = args.seed;
  if (cfg.ns.size() < 4 || cfg.ms.size() < 4) throw UsageError("bench needs at least 4 sizes per sweep");
  emit_report(exp_scaling(cfg), args.out, summary_out);
}

struct ReproduceArgs {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string out;
  std::string summary_out;
  std::string family = "gaussian";
  std::string dims;
  int replicates = 20;
  bool no_naive = false;
  std::string input;
  bool synthetic = false;
  int true_frequency = 12;
  double expected_count = 1500.0;
};

void run_reproduce(const ReproduceArgs& args, const BenchArgs& bench) {
  if (args.experiment == "sobolev") {
    const ExperimentReport report = exp_sobolev_approx(args.seed);
    if (!args.out.empty()) {
      Output out(args.out);
      report.write_csv(out.stream());
    }
    Output summary(args.summary_out);
    report.write_summary_csv(summary.stream());
  } else if (args.experiment == "highdim") {
    HighDimConfig cfg;
    if (args.family == "gaussian") {
      cfg.family = MixtureFamily::Gaussian;
      cfg.dims = {9, 10, 11, 12};
    } else if (args.family == "student_t" || args.family == "student-t") {
      cfg.family = MixtureFamily::StudentT;
      cfg.dims = {5, 10, 15};
    } else {
      throw UsageError("unknown family '" + args.family + "'");
    }
    if (!args.dims.empty()) {
      cfg.dims.clear();
      for (double d : parse_list(args.dims)) cfg.dims.push_back(static_cast<int>(d));
    }
    cfg.replicates = args.replicates;
    cfg.seed = args.seed;
    cfg.include_naive = !args.no_naive;
    emit_report(exp_highdim(cfg), args.out, args.summary_out);
  } else if (args.experiment == "scaling") {
    BenchArgs b = bench;
    b.seed = args.seed;
    b.out = args.out;
    run_bench(b, args.summary_out);
  } else if (args.experiment == "periodic") {
    PeriodicConfig cfg;
    cfg.seed = args.seed;
    std::optional<PointPattern> data;
    if (!args.input.empty()) {
      data = read_pattern(args.input, "0,1,0,1,0,1");
    } else if (args.synthetic) {
      Rng rng(derive_seed(args.seed, 12));
      data = synthetic_periodic_pattern(args.true_frequency, args.expected_count, rng);
    } else {
      std::cerr << "periodic: no data file given (--input x,y,t CSV or --synthetic); skipped\n";
      return;
    }
    emit_report(exp_periodic_crime(*data, cfg), args.out, args.summary_out);
  } else {
    throw UsageError("unknown experiment '" + args.experiment + "'");
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Poisson intensity estimation in an adjusted RKHS", "kpoisson"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");
  app.failure_message(CLI::FailureMessage::help);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample a synthetic point pattern");
  simulate->add_option("--family", sim.family, "homog, se1d, gauss-mix or t-mix")
      ->check(CLI::IsMember({"homog", "se1d", "gauss-mix", "t-mix"}));
  simulate->add_option("--dim", sim.dim, "Dimension")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Pattern CSV (stdout if omitted)");
  simulate->add_option("--intensity-out", sim.intensity_out, "Also write the true intensity on an evaluation grid");
  simulate->add_option("--grid-points", sim.grid_points, "Evaluation points for --intensity-out");
  simulate->add_option("--window", sim.window, "Window as lo,hi[,lo,hi...]");
  simulate->add_option("--rate", sim.rate, "Rate for homog")->check(CLI::NonNegativeNumber);
  simulate->add_option("--lengthscale", sim.lengthscale, "SE lengthscale for se1d")->check(CLI::PositiveNumber);
  simulate->add_option("--basis", sim.n_basis, "Basis functions for se1d")->check(CLI::PositiveNumber);
  simulate->add_option("--target", sim.target, "Expected count for se1d")->check(CLI::PositiveNumber);
  simulate->add_option("--components", sim.components, "Mixture components")->check(CLI::PositiveNumber);
  simulate->add_option("--count-range", sim.count_range, "Expected-count range lo,hi for mixtures");

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "Fit an intensity model and write the model file");
  fitc->add_option("--input,-i", fit.input, "Pattern CSV ('-' for stdin)")->required();
  fitc->add_option("--window", fit.window, "Window as lo,hi[,lo,hi...]; unit cube if omitted");
  fitc->add_option("--method", fit.method, "rkhs, naive or kie")->check(CLI::IsMember({"rkhs", "naive", "kie"}));
  fitc->add_option("--kernel", fit.kernel, "Kernel expression");
  fitc->add_option("--rep", fit.rep, "nystrom or mercer")->check(CLI::IsMember({"nystrom", "mercer"}));
  fitc->add_option("--a", fit.a, "Intensity scale a (default: number of points)")->check(CLI::PositiveNumber);
  fitc->add_option("--gamma", fit.gamma, "Regularization gamma")->check(CLI::PositiveNumber);
  fitc->add_option("--bandwidth", fit.bandwidth, "KIE bandwidth")->check(CLI::PositiveNumber);
  fitc->add_flag("--edge-correct", fit.edge_correct, "KIE edge correction");
  fitc->add_option("--landmarks", fit.landmarks, "Landmark count")->check(CLI::PositiveNumber);
  fitc->add_option("--landmark-strategy", fit.strategy, "grid, uniform-mc or halton-qmc");
  fitc->add_option("--rank", fit.rank, "Nystrom rank (default: landmark count)")->check(CLI::PositiveNumber);
  fitc->add_option("--truncation", fit.truncation, "Mercer truncation")->check(CLI::PositiveNumber);
  fitc->add_option("--ell", fit.ell, "Gaussian measure scale for SE Mercer")->check(CLI::PositiveNumber);
  fitc->add_flag("--allow-gaussian-measure", fit.allow_gaussian, "Accept SE Mercer reps on a Gaussian base measure");
  fitc->add_option("--seed", fit.seed, "Random seed");
  fitc->add_option("--restarts", fit.restarts, "Optimizer restarts")->check(CLI::PositiveNumber);
  fitc->add_flag("--primal", fit.primal, "Solve over feature weights when rank < N");
  fitc->add_flag("--report-spectrum", fit.report_spectrum, "Print eigenvalues and truncation bound to stderr");
  fitc->add_option("--out,-o", fit.out, "Model file (stdout if omitted)");

  PredictArgs pred;
  auto* predict = app.add_subcommand("predict", "Evaluate a fitted model at query points");
  predict->add_option("--model,-m", pred.model, "Model file")->required();
  predict->add_option("--query,-q", pred.query, "Query CSV ('-' for stdin)")->required();
  predict->add_option("--out,-o", pred.out, "Output CSV (stdout if omitted)");

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Log-likelihood or error of a fitted model");
  score->add_option("--model,-m", sc.model, "Model file")->required();
  score->add_option("--pattern", sc.pattern, "Test pattern CSV for the log-likelihood");
  score->add_option("--truth", sc.truth, "CSV of points and true intensity");
  score->add_option("--landmarks", sc.landmarks, "Integration points")->check(CLI::PositiveNumber);
  score->add_option("--landmark-strategy", sc.strategy, "grid, uniform-mc or halton-qmc");
  score->add_option("--seed", sc.seed, "Random seed");
  score->add_option("--interior", sc.interior, "Margin excluded from relative errors, as a fraction of the side");
  score->add_option("--out,-o", sc.out, "Output CSV (stdout if omitted)");

  CvArgs cv;
  auto* cvc = app.add_subcommand("cv", "Cross-validated hyperparameter selection");
  cvc->add_option("--input,-i", cv.input, "Pattern CSV ('-' for stdin)")->required();
  cvc->add_option("--window", cv.window, "Window as lo,hi[,lo,hi...]");
  cvc->add_option("--grid", cv.grid, "Grid file with key=v1,v2,... lines");
  cvc->add_option("--method", cv.method, "rkhs, naive or kie")->check(CLI::IsMember({"rkhs", "naive", "kie"}));
  cvc->add_option("--kernel", cv.kernel, "Fixed kernel (default: SE with grid sigma)");
  cvc->add_option("--rep", cv.rep, "nystrom or mercer")->check(CLI::IsMember({"nystrom", "mercer"}));
  cvc->add_option("--folds", cv.folds, "Number of folds")->check(CLI::Range(2, 1000));
  cvc->add_option("--seed", cv.seed, "Random seed");
  cvc->add_option("--landmarks", cv.landmarks, "Landmark count")->check(CLI::PositiveNumber);
  cvc->add_option("--landmark-strategy", cv.strategy, "grid, uniform-mc or halton-qmc");
  cvc->add_option("--rank", cv.rank, "Nystrom rank")->check(CLI::PositiveNumber);
  cvc->add_option("--truncation", cv.truncation, "Mercer truncation")->check(CLI::PositiveNumber);
  cvc->add_flag("--primal", cv.primal, "Solve over feature weights when rank < N");
  cvc->add_flag("--edge-correct", cv.edge_correct, "KIE edge correction");
  cvc->add_flag("--no-thinning-correction", cv.no_thinning_correction, "Score held-out folds without the 1/(K-1) factor");
  cvc->add_option("--out,-o", cv.out, "Score CSV (stdout if omitted)");
  cvc->add_option("--model-out", cv.model_out, "Write the refit model here");

  BenchArgs bench;
  std::string bench_summary;
  auto* benchc = app.add_subcommand("bench", "Fit timing sweeps over N and landmark count");
  benchc->add_option("--ns", bench.ns, "Point counts");
  benchc->add_option("--ms", bench.ms, "Landmark counts");
  benchc->add_option("--fixed-n", bench.fixed_n, "N for the landmark sweep")->check(CLI::PositiveNumber);
  benchc->add_option("--fixed-landmarks", bench.fixed_landmarks, "Landmarks for the N sweep")->check(CLI::PositiveNumber);
  benchc->add_option("--rank", bench.rank, "Nystrom rank")->check(CLI::PositiveNumber);
  benchc->add_option("--repeats", bench.repeats, "Timed runs per size")->check(CLI::PositiveNumber);
  benchc->add_option("--restarts", bench.restarts, "Optimizer starts per timed fit")->check(CLI::PositiveNumber);
  benchc->add_option("--dim", bench.dim, "Dimension")->check(CLI::PositiveNumber);
  benchc->add_option("--seed", bench.seed, "Random seed");
  benchc->add_option("--out,-o", bench.out, "Per-size CSV");
  benchc->add_option("--summary-out", bench_summary, "Summary CSV (stdout if omitted)");

  ReproduceArgs rep;
  auto* repro = app.add_subcommand("reproduce", "Run a reproduction experiment");
  repro->add_option("experiment", rep.experiment, "sobolev, highdim, scaling or periodic")
      ->required()
      ->check(CLI::IsMember({"sobolev", "highdim", "scaling", "periodic"}));
  repro->add_option("--seed", rep.seed, "Random seed");
  repro->add_option("--out,-o", rep.out, "Per-replicate report CSV");
  repro->add_option("--summary-out", rep.summary_out, "Summary CSV (stdout if omitted)");
  repro->add_option("--family", rep.family, "highdim: gaussian or student_t");
  repro->add_option("--dims", rep.dims, "highdim: comma-separated dimensions");
  repro->add_option("--replicates", rep.replicates, "highdim: replicates per dimension")->check(CLI::Range(2, 100000));
  repro->add_flag("--no-naive", rep.no_naive, "highdim: skip the naive model");
  repro->add_option("--input,-i", rep.input, "periodic: x,y,t CSV normalized to [0,1]");
  repro->add_flag("--synthetic", rep.synthetic, "periodic: use a simulated weekly pattern");
  repro->add_option("--true-frequency", rep.true_frequency, "periodic: frequency of the simulated pattern");
  repro->add_option("--expected-count", rep.expected_count, "periodic: expected size of the simulated pattern");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*simulate) run_simulate(sim);
    if (*fitc) run_fit(fit);
    if (*predict) run_predict(pred);
    if (*score) run_score(sc);
    if (*cvc) run_cv(cv);
    if (*benchc) run_bench(bench, bench_summary);
    if (*repro) run_reproduce(rep, bench);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace kpoisson
