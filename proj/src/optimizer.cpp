#include "kpoisson/optimizer.hpp"
#include "kpoisson/rng.hpp"
#include "kpoisson/types.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace kpoisson {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

struct Pair {
  Eigen::VectorXd s, y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<Pair>& history, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  if (!history.empty()) {
    const auto& last = history.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return -q;
}

}  // namespace

OptimizeResult minimize(const ObjectiveFn& objective, const Eigen::VectorXd& x0, const OptimizerConfig& config) {
  OptimizeResult result;
  result.starts = 1;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(x.size());
  double f = objective(x, &g);
  if (!std::isfinite(f)) throw Error("objective is not finite at the starting point");

  int memory = std::max(1, config.memory);
  bool retried = false;
  std::deque<Pair> history;

  int it = 0;
  for (; it < config.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= config.tol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd dir = two_loop(history, g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      history.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = history.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;

    Eigen::VectorXd x_new(x.size());
    Eigen::VectorXd g_new(x.size());
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      x_new = x + step * dir;
      f_new = objective(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (retried) {
        result.line_search_failed = true;
        break;
      }
      retried = true;
      memory = std::max(1, memory / 2);
      history.clear();
      continue;
    }

    Pair p{x_new - x, g_new - g, 0.0};
    const double sy = p.s.dot(p.y);
    if (sy > 1e-12 * p.s.norm() * p.y.norm()) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      while (static_cast<int>(history.size()) > memory) history.pop_front();
    }
    const bool stalled = f - f_new <= config.f_tol * std::max({std::abs(f), std::abs(f_new), 1.0});
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    if (stalled) {
      result.converged = true;
      ++it;
      break;
    }
  }
  if (!result.converged && g.lpNorm<Eigen::Infinity>() <= config.tol) result.converged = true;
  result.x = std::move(x);
  result.value = f;
  result.grad_norm = g.lpNorm<Eigen::Infinity>();
  result.iterations = it;
  return result;
}

OptimizeResult minimize_with_restarts(const ObjectiveFn& objective, Eigen::Index n, const OptimizerConfig& config) {
  return minimize_with_restarts(objective, n, config, [](const Eigen::VectorXd& x) { return x; });
}

OptimizeResult minimize_with_restarts(const ObjectiveFn& objective, Eigen::Index n, const OptimizerConfig& config,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& start_map) {
  if (n < 1) throw Error("optimization problem has no variables");
  const double scale = config.init_scale > 0.0 ? config.init_scale : 0.1 / std::sqrt(static_cast<double>(n));
  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, scale);
  OptimizeResult best;
  bool have_best = false;
  const int starts = std::max(1, config.restarts);
  for (int r = 0; r < starts; ++r) {
    Eigen::VectorXd x0;
    double f0 = std::numeric_limits<double>::infinity();
    // Redraw on the (measure-zero) event of an infeasible start.
    for (int attempt = 0; attempt < 10 && !std::isfinite(f0); ++attempt) {
      Eigen::VectorXd draw(n);
      for (Eigen::Index i = 0; i < n; ++i) draw(i) = normal(rng);
      // The first start is sign-coherent.
      if (r == 0 && config.coherent_first_start) draw = draw.cwiseAbs();
      x0 = start_map(draw);
      f0 = objective(x0, nullptr);
    }
    if (!std::isfinite(f0)) continue;
    OptimizeResult run = minimize(objective, x0, config);
    if (!have_best || run.value < best.value) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) throw Error("no feasible starting point found");
  best.starts = starts;
  return best;
}

}  // namespace kpoisson
