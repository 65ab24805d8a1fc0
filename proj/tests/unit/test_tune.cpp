#include <doctest.h>

#include "kpoisson/simulate.hpp"
#include "kpoisson/tune.hpp"

#include <algorithm>
#include <set>
#include <sstream>

using namespace kpoisson;

namespace {

PointPattern homogeneous(double rate, std::uint64_t seed) {
  Rng rng(seed);
  return sample_homogeneous(Window::unit(1), rate, rng);
}

std::function<KernelSpec(const Assignment&)> sobolev_kernel() {
  return [](const Assignment&) { return KernelSpec::sobolev(1); };
}

}  // namespace

TEST_SUITE("tune") {
  TEST_CASE("folds partition the pattern") {
    const PointPattern p = homogeneous(50.0, 1);
    for (int K : {2, 3, 5}) {
      const auto folds = split_folds(p, K, 9);
      REQUIRE(folds.size() == static_cast<std::size_t>(K));
      std::multiset<double> seen;
      for (const auto& f : folds) {
        CHECK(f.train.size() + f.test.size() == p.size());
        CHECK(f.test.size() >= p.size() / K);
        CHECK(f.test.size() <= p.size() / K + 1);
        for (Eigen::Index i = 0; i < f.test.size(); ++i) seen.insert(f.test.points()(i, 0));
      }
      std::multiset<double> all;
      for (Eigen::Index i = 0; i < p.size(); ++i) all.insert(p.points()(i, 0));
      CHECK(seen == all);
    }
    const auto a = split_folds(p, 2, 4), b = split_folds(p, 2, 4);
    CHECK((a[0].test.points().array() == b[0].test.points().array()).all());
    CHECK_THROWS_AS(split_folds(p.subset({0}), 2, 0), Error);
    CHECK_THROWS_AS(split_folds(p, 1, 0), Error);
  }

  TEST_CASE("grids") {
    const auto g = cartesian_grid({{"a", {1, 2}}, {"gamma", {0.1, 1, 10}}});
    CHECK(g.size() == 6);
    CHECK(default_rkhs_grid(100, 1.0).size() == 80);
    CHECK(default_rkhs_grid(100, 1.0, false).size() == 16);
    const auto ls = log_spaced(0.05, 0.5, 5);
    CHECK(ls.front() == doctest::Approx(0.05));
    CHECK(ls.back() == doctest::Approx(0.5));
    std::istringstream in("# grid\na=10,20\ngamma = 0.5\n");
    const auto parsed = parse_grid(in);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1].at("a") == 20.0);
    CHECK(parsed[1].at("gamma") == 0.5);
    std::istringstream bad("a=1,x\n");
    CHECK_THROWS_AS(parse_grid(bad), ParseError);
    CHECK(to_string(Assignment{{"a", 2.0}, {"gamma", 0.5}}) == "a=2;gamma=0.5");
  }

  TEST_CASE("selection tie-breaks and disqualification") {
    const std::vector<Assignment> grid{{{"gamma", 0.1}}, {{"gamma", 1.0}}, {{"gamma", 0.5}}};
    CHECK(select_index(grid, {3.0, 3.0, 2.0}) == 1);
    CHECK(select_index(grid, {3.0, 2.0, 4.0}) == 2);
    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK(select_index(grid, {ninf, 1.0, ninf}) == 1);
    CHECK_THROWS_AS(select_index(grid, {ninf, ninf, ninf}), Error);
    const std::vector<Assignment> same{{{"a", 2.0}, {"gamma", 1.0}}, {{"a", 1.0}, {"gamma", 1.0}}};
    CHECK(select_index(same, {1.0, 1.0}) == 1);
  }

  TEST_CASE("cv score is deterministic and penalizes absurd regularization") {
    const PointPattern p = homogeneous(100.0, 2);
    CVPlan plan;
    plan.folds = 2;
    plan.seed = 3;
    plan.landmarks = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    const ModelFactory factory = rkhs_mercer_factory(sobolev_kernel(), 30);
    const Assignment good{{"a", 50.0}, {"gamma", 1.0}};
    const Assignment absurd{{"a", 50.0}, {"gamma", 1e6}};
    const double s1 = cv_score(p, factory, good, plan);
    CHECK(s1 == cv_score(p, factory, good, plan));
    CHECK(cv_score(p, factory, absurd, plan) < s1);
  }

  TEST_CASE("thinning correction is the identity for two folds") {
    const PointPattern p = homogeneous(60.0, 5);
    CVPlan plan;
    plan.seed = 1;
    plan.landmarks = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    const Assignment h{{"bandwidth", 0.1}};
    const double with = cv_score(p, kie_factory(false), h, plan);
    plan.thinning_correction = false;
    CHECK(cv_score(p, kie_factory(false), h, plan) == with);
    plan.folds = 3;
    const double uncorrected = cv_score(p, kie_factory(false), h, plan);
    plan.thinning_correction = true;
    CHECK(cv_score(p, kie_factory(false), h, plan) != uncorrected);
  }

  TEST_CASE("select is invariant to grid order and a singleton grid wins") {
    const PointPattern p = homogeneous(80.0, 6);
    CVPlan plan;
    plan.seed = 2;
    plan.landmarks = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    plan.grid = cartesian_grid({{"bandwidth", {0.02, 0.1, 0.3}}});
    const Selection a = select(p, kie_factory(true), plan);
    std::reverse(plan.grid.begin(), plan.grid.end());
    const Selection b = select(p, kie_factory(true), plan);
    CHECK(a.best == b.best);
    plan.grid = {{{"bandwidth", 0.2}}};
    const Selection c = select(p, kie_factory(true), plan);
    CHECK(c.best.at("bandwidth") == 0.2);
    REQUIRE(c.model);
    plan.grid.clear();
    CHECK_THROWS_AS(select(p, kie_factory(true), plan), Error);
  }

  TEST_CASE("nystrom factory selects a reasonable homogeneous fit") {
    const PointPattern p = homogeneous(150.0, 7);
    CVPlan plan;
    plan.seed = 4;
    plan.landmarks = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    plan.grid = default_rkhs_grid(p.size() / 2, 1.0);
    const Selection s = select(p, rkhs_nystrom_factory(se_kernel_from_sigma(), plan.landmarks, 100), plan);
    const Eigen::VectorXd lam = s.model->intensities(make_landmarks(Window::parse("0.2,0.8"), 20, LandmarkStrategy::Grid).points);
    CHECK(lam.mean() == doctest::Approx(150.0).epsilon(0.3));
  }

  TEST_CASE("selected model on the SE-Mercer synthetic is within 2x of the best grid point") {
    Rng rng(17);
    const IntensityFn truth = intensity_se_mercer_1d(0.5, 64, rng);
    const PointPattern p = sample_inhomogeneous(truth, rng);
    CVPlan plan;
    plan.seed = 5;
    plan.landmarks = make_landmarks(Window::unit(1), 100, LandmarkStrategy::Grid);
    plan.grid = default_rkhs_grid(p.size() / 2, 1.0);
    const ModelFactory factory = rkhs_nystrom_factory(se_kernel_from_sigma(), plan.landmarks, 100);
    const Selection s = select(p, factory, plan);
    const LandmarkSet eval = make_landmarks(Window::unit(1), 200, LandmarkStrategy::Grid);
    const Eigen::VectorXd target = truth.evaluate(eval.points);
    auto rmse = [&](const IntensityPredictor& m) {
      return std::sqrt((m.intensities(eval.points) - target).array().square().mean());
    };
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : plan.grid) best = std::min(best, rmse(*factory(p, g, 0)));
    CHECK(rmse(*s.model) <= 2.0 * best);
  }
}
