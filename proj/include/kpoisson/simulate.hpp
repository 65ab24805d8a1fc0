#pragma once

#include "kpoisson/domain.hpp"
#include "kpoisson/rng.hpp"

#include <functional>
#include <optional>
#include <utility>

namespace kpoisson {

/// Gaussian (dof <= 0) or multivariate Student-t density on R^D.
struct DensityComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;  // lower Cholesky factor of the scale matrix
  double dof = 0.0;

  double log_density(Point x) const;
  double density(Point x) const;
  void sample(Rng& rng, double* out) const;
};

/// Dominating intensity g(x) = sum_k weight_k q_k(x) over R^D used for
/// thinning and importance-sampled integrals.
struct MixtureEnvelope {
  std::vector<DensityComponent> components;
  Eigen::VectorXd weights;

  double total_mass() const { return weights.sum(); }
  double operator()(Point x) const;
  MixtureEnvelope scaled(double c) const;
};

/// Nonnegative intensity over a window with a finite declared upper bound.
class IntensityFn {
 public:
  using Evaluator = std::function<double(Point)>;

  IntensityFn(Window window, Evaluator evaluator, double lambda_max, std::optional<MixtureEnvelope> envelope = {});

  const Window& window() const { return window_; }
  double lambda_max() const { return lambda_max_; }
  const std::optional<MixtureEnvelope>& envelope() const { return envelope_; }
  double operator()(Point x) const { return evaluator_(x); }
  Eigen::VectorXd evaluate(const PointMatrix& X) const;

  IntensityFn scaled(double c) const;

 private:
  Window window_;
  Evaluator evaluator_;
  double lambda_max_;
  std::optional<MixtureEnvelope> envelope_;
};

PointPattern sample_homogeneous(const Window& window, double rate, Rng& rng);

/// Lewis-Shedler thinning. Proposals come from a homogeneous process at
/// lambda_max, or from the mixture envelope when one is present. A proposal
/// where the intensity exceeds its bound is a hard error.
PointPattern sample_inhomogeneous(const IntensityFn& intensity, Rng& rng);

/// c = target / (Monte Carlo estimate of the window integral). Uses the
/// envelope as importance density when available, uniform draws otherwise.
double calibrate_scale(const IntensityFn& unscaled, double target, Eigen::Index mc_points, Rng& rng);

/// Window integral by the same estimator calibrate_scale uses.
double mc_integral(const IntensityFn& intensity, Eigen::Index mc_points, Rng& rng);

/// Squared random combination of SE Mercer eigenfunctions (Gaussian measure
/// of scale ell centred at the window centre), calibrated to target_count points.
IntensityFn intensity_se_mercer_1d(double lengthscale, int n_basis, Rng& rng, const Window& window = Window::unit(1),
                                   double ell = 1.0, double target_count = 200.0);

enum class MixtureFamily { Gaussian, StudentT };

/// c (sum_k p_k(x))^2 over [0,1]^D with random means and covariances
/// (A A^T / D + 0.05 I) s^2, s = 0.2; the expected count is drawn
/// log-uniformly from target_count_range.
IntensityFn intensity_mixture_squared(int dim, int n_components, MixtureFamily family,
                                      std::pair<double, double> target_count_range, Rng& rng);

/// Default count ranges: 190-210 for Gaussian, 10-1000 for Student-t.
std::pair<double, double> default_count_range(MixtureFamily family);

}  // namespace kpoisson
