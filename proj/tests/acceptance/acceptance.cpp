// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// nonzero if any selected criterion fails. "--only N" runs a single criterion.

#include "kpoisson/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace kpoisson;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

PointMatrix uniform_points(Eigen::Index n, int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointMatrix X(n, dim);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = u(rng);
  return X;
}

double fd_relative_error(const ObjectiveFn& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g;
  f(x, &g);
  Eigen::VectorXd fd(x.size());
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    fd(i) = (f(xp, nullptr) - f(xm, nullptr)) / (2 * h);
  }
  return (g - fd).norm() / g.norm();
}

Outcome criterion1() {
  const auto t = Clock::now();
  const ExperimentReport r = exp_sobolev_approx();
  const double secs = seconds_since(t);
  const double g10 = r.summary_value("rmse_grid10"), g100 = r.summary_value("rmse_grid100");
  const double beta = r.summary_value("rmse_beta400"), rank5 = r.summary_value("rmse_rank5");
  const bool ok = g10 >= 0.7e-3 && g10 <= 6e-3 && g100 >= 0.5e-5 && g100 <= 5e-5 && beta >= 0.3e-3 && beta <= 3e-3 &&
                  rank5 >= 0.5e-2 && rank5 <= 5e-2 && secs < 10.0;
  return {ok, "grid10=" + num(g10) + " grid100=" + num(g100) + " beta400=" + num(beta) + " rank5=" + num(rank5) +
                  " time=" + num(secs) + "s"};
}

Outcome criterion2() {
  const auto t = Clock::now();
  Rng rng(2);
  double worst_rkhs = 0.0, worst_naive = 0.0;
  std::normal_distribution<double> normal(0.0, 0.3);
  for (int inst = 0; inst < 10; ++inst) {
    const int dim = 1 + inst % 3;
    const Eigen::Index n = 20 + 3 * inst;
    const PointMatrix X = uniform_points(n, dim, rng);
    const Window w = Window::unit(dim);
    const LandmarkSet lm = make_landmarks(w, 120, LandmarkStrategy::HaltonQMC);
    const KernelSpec k = KernelSpec::squared_exponential(0.2 + 0.05 * inst);
    const double a = static_cast<double>(n), gamma = 0.01 * (inst + 1);
    const Eigen::MatrixXd Kt = nystrom_eigensystem(k, lm, 120).with_regularization(a, gamma).gram(X);
    const ObjectiveFn rk = rkhs_objective(Kt, a);
    const ObjectiveFn nv = naive_objective(gram(k, X), naive_penalty(k, X, lm, a, gamma), a);
    Eigen::VectorXd alpha(n);
    for (auto& v : alpha) v = normal(rng);
    worst_rkhs = std::max(worst_rkhs, fd_relative_error(rk, alpha));
    worst_naive = std::max(worst_naive, fd_relative_error(nv, alpha));
  }
  const double secs = seconds_since(t);
  return {worst_rkhs <= 1e-5 && worst_naive <= 1e-5 && secs < 5.0,
          "max rel err rkhs=" + num(worst_rkhs) + " naive=" + num(worst_naive) + " time=" + num(secs) + "s"};
}

Outcome criterion3() {
  const auto t = Clock::now();
  struct Construction {
    std::string name;
    int dim;
    std::function<std::shared_ptr<AdjustedKernelRep>()> make;
  };
  const double a = 25.0, gamma = 0.2;
  auto mercer = [=](MercerBasis b) { return std::make_shared<AdjustedKernelRep>(MercerKernelRep(std::move(b), a, gamma)); };
  auto nystrom = [=](const std::string& kernel, int dim, Eigen::Index m, LandmarkStrategy s, Eigen::Index rank) {
    const LandmarkSet lm = make_landmarks(Window::unit(dim), m, s, 3);
    return std::make_shared<AdjustedKernelRep>(nystrom_eigensystem(parse_kernel(kernel), lm, rank).with_regularization(a, gamma));
  };
  const std::vector<Construction> cases{
      {"mercer sobolev s=1", 1, [&] { return mercer(sobolev_basis(1, 50)); }},
      {"mercer sobolev s=2", 1, [&] { return mercer(sobolev_basis(2, 50)); }},
      {"mercer sobolev s=3", 1, [&] { return mercer(sobolev_basis(3, 50)); }},
      {"mercer brownian bridge", 1, [&] { return mercer(brownian_bridge_basis(50)); }},
      {"mercer se", 1, [&] { return mercer(se_basis(0.3, 1.0, 50)); }},
      {"mercer tensor", 2, [&] { return mercer(basis_for_kernel(parse_kernel("tensor(sobolev(s=1)@[0], bb@[1])"), 20)); }},
      {"nystrom se", 3, [&] { return nystrom("se(sigma=0.3)", 3, 300, LandmarkStrategy::HaltonQMC, 300); }},
      {"nystrom se low rank", 5, [&] { return nystrom("se(sigma=0.5)", 5, 200, LandmarkStrategy::UniformMC, 20); }},
      {"nystrom sobolev", 1, [&] { return nystrom("sobolev(s=1)", 1, 200, LandmarkStrategy::Grid, 200); }},
      {"nystrom brownian bridge", 1, [&] { return nystrom("bb", 1, 200, LandmarkStrategy::Grid, 200); }},
      {"nystrom periodic", 1, [&] { return nystrom("periodic(p=3)", 1, 100, LandmarkStrategy::Grid, 100); }},
      {"nystrom space-time", 3,
       [&] { return nystrom("se(sigma=0.3)@[0,1] * (periodic(p=4)+const(1))@[2] * se(sigma=1)@[2]", 3, 400,
                            LandmarkStrategy::HaltonQMC, 100); }},
  };
  Rng rng(3);
  std::string failures;
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto rep = c.make();
    for (int set = 0; set < 50; ++set) {
      const PointMatrix X = uniform_points(40, c.dim, rng);
      const Eigen::MatrixXd K = rep->gram(X);
      const bool symmetric = (K.array() == K.transpose().array()).all();
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K, Eigen::EigenvaluesOnly).eigenvalues();
      const double rel = ev.minCoeff() / std::max(ev.maxCoeff(), 1e-300);
      worst = std::min(worst, rel);
      if (!symmetric || rel < -1e-8) {
        failures += " " + c.name + (symmetric ? "(psd)" : "(asym)");
        break;
      }
    }
  }
  const double secs = seconds_since(t);
  return {failures.empty() && secs < 30.0,
          std::to_string(cases.size()) + " constructions x 50 sets, worst min/max eig=" + num(worst) + " time=" +
              num(secs) + "s" + (failures.empty() ? "" : " failing:" + failures)};
}

Outcome criterion4() {
  const double a = 10.0, gamma = 0.5;
  const LandmarkSet grid = make_landmarks(Window::unit(1), 200, LandmarkStrategy::Grid);
  Rng rng(4);
  const PointMatrix X = uniform_points(100, 1, rng);
  const PointMatrix Y = uniform_points(100, 1, rng);
  std::string detail;
  bool ok = true;
  for (const auto& [name, kernel, basis] : {std::tuple{"sobolev", KernelSpec::sobolev(1), sobolev_basis(1, 50)},
                                            std::tuple{"brownian_bridge", KernelSpec::brownian_bridge(),
                                                       brownian_bridge_basis(50)}}) {
    const NystromRep ny = nystrom_eigensystem(kernel, grid, 200).with_regularization(a, gamma);
    const MercerKernelRep me(basis, a, gamma);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double d = ny(row_of(X, i), row_of(Y, i)) - me(row_of(X, i), row_of(Y, i));
      sq += d * d;
    }
    const double rmse = std::sqrt(sq / X.rows());
    ok = ok && rmse <= 1e-3;
    detail += std::string(detail.empty() ? "" : " ") + name + " rmse=" + num(rmse);
  }
  return {ok, detail};
}

Outcome criterion5() {
  const auto t = Clock::now();
  const IntensityFn tri(Window::unit(1), [](Point x) { return 200.0 * x[0]; }, 200.0);
  Rng rng(5);
  std::vector<double> pts;
  while (pts.size() < 10000) {
    const PointPattern p = sample_inhomogeneous(tri, rng);
    for (Eigen::Index i = 0; i < p.size(); ++i) pts.push_back(p.points()(i, 0));
  }
  std::sort(pts.begin(), pts.end());
  const double n = static_cast<double>(pts.size());
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double F = pts[i] * pts[i];
    d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
  }
  const double ks_crit = 1.628 / std::sqrt(n);  // level 0.01

  const int reps = 1000;
  const double rate = 100.0;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double c = static_cast<double>(sample_homogeneous(Window::unit(1), rate, rng).size());
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / reps;
  const double var = (sum2 - reps * mean * mean) / (reps - 1);
  const double dispersion = var / mean;
  const bool mean_ok = std::abs(mean - rate) <= 3.0 * std::sqrt(rate / reps);
  const bool disp_ok = std::abs(dispersion - 1.0) <= 3.0 * std::sqrt(2.0 / (reps - 1));
  const double secs = seconds_since(t);
  return {d < ks_crit && mean_ok && disp_ok && secs < 20.0,
          "KS D=" + num(d) + " (crit " + num(ks_crit) + ", n=" + std::to_string(pts.size()) + ") mean N=" + num(mean) +
              " var/mean=" + num(dispersion) + " time=" + num(secs) + "s"};
}

Outcome criterion6() {
  const auto t = Clock::now();
  const int seeds = 20;
  const LandmarkSet lm = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
  const LandmarkSet interior = make_landmarks(Window::parse("0.1,0.9"), 41, LandmarkStrategy::Grid);
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(interior.size());
  double mean_abs_rel = 0.0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(600, s));
    const PointPattern p = sample_homogeneous(Window::unit(1), 100.0, rng);
    CVPlan plan;
    plan.folds = 2;
    plan.seed = derive_seed(601, s);
    plan.landmarks = lm;
    plan.grid = default_rkhs_grid(p.size() / 2, 1.0, false);
    const Selection sel =
        select(p, rkhs_mercer_factory([](const Assignment&) { return KernelSpec::sobolev(1); }, kDefaultTruncation), plan);
    const Eigen::VectorXd lam = sel.model->intensities(interior.points);
    avg += lam / seeds;
    mean_abs_rel += ((lam.array() - 100.0).abs() / 100.0).mean() / seeds;
  }
  const double worst = ((avg.array() - 100.0).abs() / 100.0).maxCoeff();
  const double secs = seconds_since(t);
  return {worst <= 0.15 && secs < 120.0,
          "max relative error of seed-averaged estimate over interior grid=" + num(worst) +
              " (per-seed mean abs rel err=" + num(mean_abs_rel) + ") time=" + num(secs) + "s"};
}

Outcome criterion7() {
  const auto t = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& [family, dims] : {std::pair{MixtureFamily::Gaussian, std::vector<int>{9, 10, 11, 12}},
                                     std::pair{MixtureFamily::StudentT, std::vector<int>{5, 10, 15}}}) {
    HighDimConfig cfg;
    cfg.family = family;
    cfg.dims = dims;
    cfg.replicates = 20;
    cfg.seed = 7;
    cfg.include_naive = false;
    const ExperimentReport r = exp_highdim(cfg);
    detail += family == MixtureFamily::Gaussian ? "gaussian" : " student_t";
    for (int d : dims) {
      const double w = r.summary_value("win_rkhs_vs_kie_d" + std::to_string(d));
      ok = ok && w > 0.5;
      detail += " D" + std::to_string(d) + "=" + num(w);
    }
  }
  const double secs = seconds_since(t);
  return {ok && secs < 1800.0, "RKHS-vs-KIE win fractions: " + detail + " time=" + num(secs) + "s"};
}

Outcome criterion8() {
  const auto t = Clock::now();
  const ExperimentReport r = exp_scaling(ScalingConfig{});
  const double sn = r.summary_value("slope_n"), ss = r.summary_value("slope_landmarks");
  const double secs = seconds_since(t);
  std::string times;
  for (const auto& row : r.rows) times += " " + row[0] + "(" + (row[0] == "n" ? row[1] : row[2]) + ")=" + num(std::stod(row[4]));
  return {sn >= 1.5 && sn <= 2.5 && ss >= 1.5 && ss <= 2.5 && secs < 300.0,
          "slope vs N=" + num(sn) + " slope vs landmarks=" + num(ss) + " time=" + num(secs) + "s;" + times};
}

Outcome criterion9() {
  const auto t = Clock::now();
  int hits = 0;
  std::string argmaxes;
  for (int s = 0; s < 10; ++s) {
    Rng rng(derive_seed(900, s));
    const PointPattern p = synthetic_periodic_pattern(12, 1500.0, rng);
    PeriodicConfig cfg;
    cfg.seed = derive_seed(901, s);
    const ExperimentReport r = exp_periodic_crime(p, cfg);
    const int best = static_cast<int>(r.summary_value("argmax_frequency"));
    hits += best == 12;
    argmaxes += (argmaxes.empty() ? "" : ",") + std::to_string(best);
  }
  const double secs = seconds_since(t);
  return {hits >= 8 && secs < 600.0,
          "argmax=12 in " + std::to_string(hits) + "/10 seeds (argmaxes " + argmaxes + ") time=" + num(secs) + "s"};
}

Outcome criterion10() {
  double worst = 0.0;
  Rng rng(10);
  for (int inst = 0; inst < 5; ++inst) {
    const PointPattern p = sample_homogeneous(Window::unit(1), 30.0 + 10.0 * inst, rng);
    std::shared_ptr<const AdjustedKernelRep> rep;
    const double a = static_cast<double>(p.size());
    if (inst % 2 == 0) {
      rep = std::make_shared<const AdjustedKernelRep>(MercerKernelRep(sobolev_basis(1, 50), a, 0.5));
    } else {
      const LandmarkSet lm = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
      rep = std::make_shared<const AdjustedKernelRep>(
          nystrom_eigensystem(KernelSpec::squared_exponential(0.15), lm, 100).with_regularization(a, 0.1));
    }
    OptimizerConfig opt;
    opt.seed = inst;
    const IntensityModel m = fit_rkhs(p, rep, opt);
    const Eigen::MatrixXd K = rep->gram(p.points());
    const Eigen::VectorXd f = K * m.alpha();
    const double base = rkhs_objective(K, a)(m.alpha(), nullptr);
    const PointMatrix Z = uniform_points(5, 1, rng);
    for (Eigen::Index zi = 0; zi < Z.rows(); ++zi) {
      const PointMatrix z = Z.row(zi);
      const Eigen::VectorXd kz = rep->gram(p.points(), z).col(0);
      const double fz = kz.dot(m.alpha());
      const double kzz = rep->gram(z)(0, 0);
      // J(beta) - J(0) for f + beta k~(z, .)
      const ObjectiveFn J = [&](const Eigen::VectorXd& b, Eigen::VectorXd* g) {
        const Eigen::ArrayXd fi = f.array() + b(0) * kz.array();
        if ((fi == 0.0).any()) return std::numeric_limits<double>::infinity();
        if (g) {
          g->resize(1);
          (*g)(0) = -2.0 * (kz.array() / fi).sum() + 2.0 * fz + 2.0 * b(0) * kzz;
        }
        return -(fi.square() / f.array().square()).log().sum() + 2.0 * b(0) * fz + b(0) * b(0) * kzz;
      };
      OptimizerConfig one;
      one.tol = 1e-12;
      const OptimizeResult r = minimize(J, Eigen::VectorXd::Zero(1), one);
      worst = std::max(worst, -r.value);
    }
    (void)base;
  }
  return {worst <= 1e-6, "max objective improvement from an extra expansion point=" + num(worst)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
      {"Sobolev k~ approximation", criterion1},
      {"gradient oracle", criterion2},
      {"PSD and symmetry of k~ Gram matrices", criterion3},
      {"Mercer vs Nystrom agreement", criterion4},
      {"simulation correctness", criterion5},
      {"homogeneous end-to-end recovery", criterion6},
      {"high-dimensional RKHS vs KIE", criterion7},
      {"scaling slopes", criterion8},
      {"periodicity recovery", criterion9},
      {"representer spot check", criterion10},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 1;
    }
  }
  const auto& list = criteria();
  if (only < 0 || only > static_cast<int>(list.size())) {
    std::cerr << "criterion must be 1.." << list.size() << '\n';
    return 1;
  }
  int failed = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = list[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << list[i].first << "): " << o.detail
              << std::endl;
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
