#include <doctest.h>

#include "kpoisson/estimator.hpp"
#include "kpoisson/simulate.hpp"

#include <cmath>
#include <random>

using namespace kpoisson;

namespace {

PointPattern uniform_pattern(Eigen::Index n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointMatrix X(n, dim);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = u(rng);
  return PointPattern(Window::unit(dim), X);
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
  return (g - fd).norm() / std::max(1e-12, g.norm());
}

std::shared_ptr<const AdjustedKernelRep> sobolev_rep(double a, double gamma) {
  return std::make_shared<const AdjustedKernelRep>(MercerKernelRep(sobolev_basis(1, 50), a, gamma));
}

}  // namespace

TEST_SUITE("estimator") {
  TEST_CASE("objective gradients match central differences") {
    const PointPattern p = uniform_pattern(30, 1, 2);
    const auto rep = sobolev_rep(30.0, 0.1);
    const ObjectiveFn J = rkhs_objective(rep->gram(p.points()), 30.0);
    const LandmarkSet lm = make_landmarks(Window::unit(1), 50, LandmarkStrategy::Grid);
    const KernelSpec k = KernelSpec::squared_exponential(0.2);
    const ObjectiveFn naive = naive_objective(gram(k, p.points()), naive_penalty(k, p.points(), lm, 30.0, 0.1), 30.0);
    Rng rng(8);
    std::normal_distribution<double> n(0.0, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd alpha(30);
      for (auto& v : alpha) v = n(rng);
      CHECK(fd_relative_error(J, alpha) < 1e-5);
      CHECK(fd_relative_error(naive, alpha) < 1e-5);
    }
  }

  TEST_CASE("objectives are sign symmetric") {
    const PointPattern p = uniform_pattern(10, 1, 3);
    const ObjectiveFn J = rkhs_objective(sobolev_rep(10.0, 0.5)->gram(p.points()), 10.0);
    Eigen::VectorXd alpha = Eigen::VectorXd::LinSpaced(10, -1.0, 2.0);
    CHECK(J(alpha, nullptr) == J(-alpha, nullptr));
  }

  TEST_CASE("rkhs gradient is 2 K (alpha - 1/f)") {
    const PointPattern p = uniform_pattern(8, 1, 4);
    const Eigen::MatrixXd K = sobolev_rep(8.0, 0.5)->gram(p.points());
    const ObjectiveFn J = rkhs_objective(K, 8.0);
    const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(8, 0.7);
    Eigen::VectorXd g;
    J(alpha, &g);
    const Eigen::VectorXd f = K * alpha;
    CHECK((g - 2.0 * K * (alpha - f.cwiseInverse())).norm() < 1e-10 * g.norm());
  }

  TEST_CASE("fit on homogeneous data gives a positive, plausible intensity") {
    Rng rng(21);
    const PointPattern p = sample_homogeneous(Window::unit(1), 200.0, rng);
    const IntensityModel m = fit_rkhs(p, sobolev_rep(static_cast<double>(p.size()), 1.0));
    CHECK(m.diagnostics().converged);
    const LandmarkSet lm = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    const Eigen::VectorXd lam = m.intensities(lm.points);
    CHECK(lam.minCoeff() >= 0.0);
    CHECK(integral_intensity(m, lm) == doctest::Approx(static_cast<double>(p.size())).epsilon(0.15));
    CHECK(rkhs_objective_value(m) == doctest::Approx(m.diagnostics().objective));
  }

  TEST_CASE("primal solve reaches the dual optimum") {
    Rng rng(31);
    const PointPattern p = sample_homogeneous(Window::unit(2), 150.0, rng);
    const double a = static_cast<double>(p.size());
    const LandmarkSet lm = make_landmarks(Window::unit(2), 400, LandmarkStrategy::Grid);
    const auto rep = std::make_shared<const AdjustedKernelRep>(
        nystrom_eigensystem(KernelSpec::squared_exponential(0.3), lm, 40).with_regularization(a, 1.0));
    const Eigen::MatrixXd F = rep->features(p.points());
    REQUIRE(F.cols() < F.rows());
    Eigen::VectorXd w = F.transpose() * Eigen::VectorXd::Constant(F.rows(), 1.0 / a);
    std::normal_distribution<double> n(0.0, 0.01);
    for (auto& v : w) v += n(rng) * w.norm();
    REQUIRE((F * w).cwiseAbs().minCoeff() > 1e-2 * (F * w).cwiseAbs().maxCoeff());
    CHECK(fd_relative_error(rkhs_primal_objective(F, a), w) < 1e-5);

    const IntensityModel dual = fit_rkhs(p, rep);
    OptimizerConfig cfg;
    cfg.primal = true;
    const IntensityModel primal = fit_rkhs(p, rep, cfg);
    CHECK(primal.diagnostics().converged);
    CHECK(rkhs_objective_value(primal) == doctest::Approx(primal.diagnostics().objective).epsilon(1e-9));
    CHECK(primal.diagnostics().objective <= dual.diagnostics().objective + 1e-6 * std::abs(dual.diagnostics().objective));
    Eigen::VectorXd g;
    rkhs_objective(rep->gram(p.points()), a)(primal.alpha(), &g);
    CHECK(g.lpNorm<Eigen::Infinity>() == doctest::Approx(primal.diagnostics().grad_norm).epsilon(1e-6));
    CHECK(g.lpNorm<Eigen::Infinity>() < 1e-3);
  }

  TEST_CASE("fit refuses empty patterns and Gaussian-measure reps") {
    CHECK_THROWS_AS(fit_rkhs(PointPattern(Window::unit(1)), sobolev_rep(1.0, 1.0)), Error);
    const auto se = std::make_shared<const AdjustedKernelRep>(MercerKernelRep(se_basis(0.3, 1.0, 20), 10.0, 0.1));
    const PointPattern p = uniform_pattern(10, 1, 5);
    CHECK_THROWS_AS(fit_rkhs(p, se), Error);
    OptimizerConfig cfg;
    cfg.allow_gaussian_measure = true;
    CHECK_NOTHROW(fit_rkhs(p, se, cfg));
  }

  TEST_CASE("naive fit") {
    const PointPattern p = uniform_pattern(40, 2, 6);
    const LandmarkSet lm = make_landmarks(Window::unit(2), 100, LandmarkStrategy::Grid);
    const NaiveModel m = fit_naive(p, KernelSpec::squared_exponential(0.3), lm, 40.0, 0.1);
    CHECK(m.intensities(lm.points).minCoeff() >= 0.0);
    CHECK(std::isfinite(log_likelihood(m, p, lm)));
  }

  TEST_CASE("KIE and edge correction") {
    const PointPattern p = uniform_pattern(200, 1, 7);
    const KIEModel plain = fit_kie(p, 0.05, false);
    const KIEModel corrected = fit_kie(p, 0.05, true);
    PointMatrix edge(3, 1);
    edge << 0.0, 0.01, 1.0;
    const Eigen::VectorXd a = plain.intensities(edge), b = corrected.intensities(edge);
    for (int i = 0; i < 3; ++i) CHECK(b(i) >= a(i));
    const double zero[] = {0.0};
    CHECK(corrected.edge_mass(zero) == doctest::Approx(0.5).epsilon(1e-6));
    const double mid[] = {0.5};
    CHECK(kie_predict(plain, mid) == doctest::Approx(predict_intensity(plain, mid)));
    CHECK_THROWS_AS(fit_kie(p, 0.0, false), Error);
  }

  TEST_CASE("prediction outside the window is an error") {
    const KIEModel m = fit_kie(uniform_pattern(5, 1, 1), 0.1, false);
    const double x[] = {1.5};
    CHECK_THROWS_AS(predict_intensity(m, x), Error);
  }

  TEST_CASE("log-likelihood") {
    const PointPattern p = uniform_pattern(20, 1, 9);
    const LandmarkSet lm = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    const ScaledPredictor zero(std::make_shared<KIEModel>(fit_kie(p, 0.1, false)), 0.0);
    CHECK(log_likelihood(zero, p, lm) == -std::numeric_limits<double>::infinity());
    const KIEModel m = fit_kie(p, 0.1, false);
    const Eigen::VectorXd lam = m.intensities(p.points());
    const double expected = lam.array().log().sum() - integral_intensity(m, lm);
    CHECK(log_likelihood(m, p, lm) == doctest::Approx(expected));
  }

  TEST_CASE("representer spot check") {
    Rng rng(13);
    const PointPattern p = sample_homogeneous(Window::unit(1), 40.0, rng);
    const auto rep = sobolev_rep(static_cast<double>(p.size()), 0.5);
    OptimizerConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iterations = 2000;
    const IntensityModel m = fit_rkhs(p, rep, cfg);
    // Extend by z with coefficient beta; J(beta) = -sum log(a (f_i + beta k(x_i,z))^2) + ||f + beta k(z,.)||^2.
    const Eigen::VectorXd f = m.f_values(p.points());
    PointMatrix z(1, 1);
    z << 0.4321;
    const Eigen::VectorXd kz = rep->gram(p.points(), z).col(0);
    const double fz = m.f_values(z)(0);
    const double kzz = rep->gram(z)(0, 0);
    const double norm = m.alpha().dot(rep->gram(p.points()) * m.alpha());
    auto J = [&](double beta) {
      const Eigen::ArrayXd fi = f.array() + beta * kz.array();
      return -(m.a() * fi.square()).log().sum() + norm + 2 * beta * fz + beta * beta * kzz;
    };
    double best = J(0.0);
    for (double beta = -1e-2; beta <= 1e-2; beta += 1e-5) best = std::min(best, J(beta));
    CHECK(J(0.0) - best <= 1e-6);
  }
}
