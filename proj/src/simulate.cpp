#include "kpoisson/simulate.hpp"
#include "kpoisson/mercer.hpp"

#include <cmath>
#include <numbers>

namespace kpoisson {

namespace {

constexpr double kStudentDof = 5.0;
constexpr double kEnvelopeSlack = 1e-9;

double log_det_from_chol(const Eigen::MatrixXd& L) { return 2.0 * L.diagonal().array().log().sum(); }

// Mahalanobis distance (x - mean)^T (L L^T)^{-1} (x - mean).
double mahalanobis(const DensityComponent& c, Point x) {
  Eigen::VectorXd diff(c.mean.size());
  for (Eigen::Index d = 0; d < diff.size(); ++d) diff(d) = x[static_cast<std::size_t>(d)] - c.mean(d);
  c.chol.triangularView<Eigen::Lower>().solveInPlace(diff);
  return diff.squaredNorm();
}

// Log normalizing constant of the density at its mode.
double log_peak(const DensityComponent& c) {
  const double D = static_cast<double>(c.mean.size());
  const double half_logdet = 0.5 * log_det_from_chol(c.chol);
  if (c.dof <= 0.0) return -0.5 * D * std::log(2.0 * std::numbers::pi) - half_logdet;
  const double nu = c.dof;
  return std::lgamma(0.5 * (nu + D)) - std::lgamma(0.5 * nu) - 0.5 * D * std::log(nu * std::numbers::pi) - half_logdet;
}

// p^2 = weight * q with q a density of the same family: Gaussian with halved
// covariance, or Student-t with dof 2 nu + D and scale nu / (2 nu + D).
std::pair<double, DensityComponent> squared_as_density(const DensityComponent& p) {
  DensityComponent q = p;
  const double D = static_cast<double>(p.mean.size());
  if (p.dof <= 0.0) {
    q.chol = p.chol / std::numbers::sqrt2;
  } else {
    q.dof = 2.0 * p.dof + D;
    q.chol = p.chol * std::sqrt(p.dof / q.dof);
  }
  const double log_weight = 2.0 * log_peak(p) - log_peak(q);
  return {std::exp(log_weight), q};
}

}  // namespace

double DensityComponent::log_density(Point x) const {
  const double delta = mahalanobis(*this, x);
  if (dof <= 0.0) return log_peak(*this) - 0.5 * delta;
  const double D = static_cast<double>(mean.size());
  return log_peak(*this) - 0.5 * (dof + D) * std::log1p(delta / dof);
}

double DensityComponent::density(Point x) const { return std::exp(log_density(x)); }

void DensityComponent::sample(Rng& rng, double* out) const {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index d = 0; d < z.size(); ++d) z(d) = normal(rng);
  Eigen::VectorXd x = chol.triangularView<Eigen::Lower>() * z;
  if (dof > 0.0) {
    std::chi_squared_distribution<double> chi2(dof);
    x *= std::sqrt(dof / chi2(rng));
  }
  x += mean;
  for (Eigen::Index d = 0; d < x.size(); ++d) out[d] = x(d);
}

double MixtureEnvelope::operator()(Point x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < components.size(); ++k) acc += weights(static_cast<Eigen::Index>(k)) * components[k].density(x);
  return acc;
}

MixtureEnvelope MixtureEnvelope::scaled(double c) const { return MixtureEnvelope{components, weights * c}; }

IntensityFn::IntensityFn(Window window, Evaluator evaluator, double lambda_max, std::optional<MixtureEnvelope> envelope)
    : window_(std::move(window)), evaluator_(std::move(evaluator)), lambda_max_(lambda_max), envelope_(std::move(envelope)) {
  if (!(lambda_max_ >= 0.0) || !std::isfinite(lambda_max_)) throw Error("intensity bound must be finite and >= 0");
}

Eigen::VectorXd IntensityFn::evaluate(const PointMatrix& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = evaluator_(row_of(X, i));
  return out;
}

IntensityFn IntensityFn::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error("intensity scale must be finite and >= 0");
  Evaluator inner = evaluator_;
  std::optional<MixtureEnvelope> env;
  if (envelope_) env = envelope_->scaled(c);
  return IntensityFn(window_, [inner, c](Point x) { return c * inner(x); }, c * lambda_max_, std::move(env));
}

PointPattern sample_homogeneous(const Window& window, double rate, Rng& rng) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw Error("homogeneous rate must be finite and >= 0");
  if (rate == 0.0) return PointPattern(window);
  std::poisson_distribution<long long> count(rate * window.volume());
  const long long n = count(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointMatrix pts(n, window.dim());
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < window.dim(); ++d) pts(i, d) = window.low(d) + unif(rng) * window.side(d);
  return PointPattern(window, std::move(pts));
}

PointPattern sample_inhomogeneous(const IntensityFn& intensity, Rng& rng) {
  const Window& window = intensity.window();
  const int D = window.dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> kept;
  std::vector<double> x(static_cast<std::size_t>(D));

  if (const auto& env = intensity.envelope(); env) {
    const double mass = env->total_mass();
    if (mass > 0.0) {
      std::poisson_distribution<long long> count(mass);
      std::discrete_distribution<std::size_t> pick(env->weights.data(), env->weights.data() + env->weights.size());
      const long long n = count(rng);
      for (long long i = 0; i < n; ++i) {
        env->components[pick(rng)].sample(rng, x.data());
        const double u = unif(rng);
        const Point p(x);
        if (!window.contains(p)) continue;
        const double g = (*env)(p);
        const double lam = intensity(p);
        if (lam > g * (1.0 + kEnvelopeSlack)) {
          throw Error("intensity " + format_double(lam) + " exceeds its envelope " + format_double(g) + " at a proposal");
        }
        if (u * g < lam) kept.insert(kept.end(), x.begin(), x.end());
      }
    }
  } else {
    const double lmax = intensity.lambda_max();
    if (lmax > 0.0) {
      const PointPattern proposals = sample_homogeneous(window, lmax, rng);
      for (Eigen::Index i = 0; i < proposals.size(); ++i) {
        const Point p = proposals.point(i);
        const double lam = intensity(p);
        if (lam > lmax) {
          std::string where;
          for (double v : p) where += (where.empty() ? "" : ",") + format_double(v);
          throw Error("intensity " + format_double(lam) + " exceeds declared bound " + format_double(lmax) + " at (" +
                      where + ")");
        }
        if (lam < 0.0) throw Error("intensity is negative at a proposal");
        if (unif(rng) * lmax < lam) kept.insert(kept.end(), p.begin(), p.end());
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(kept.size() / static_cast<std::size_t>(D));
  PointMatrix pts = Eigen::Map<PointMatrix>(kept.data(), n, D);
  return PointPattern(window, std::move(pts));
}

double mc_integral(const IntensityFn& intensity, Eigen::Index mc_points, Rng& rng) {
  if (mc_points < 1) throw Error("Monte Carlo integral needs at least one point");
  const Window& window = intensity.window();
  const int D = window.dim();
  std::vector<double> x(static_cast<std::size_t>(D));
  double acc = 0.0;
  if (const auto& env = intensity.envelope(); env && env->total_mass() > 0.0) {
    std::discrete_distribution<std::size_t> pick(env->weights.data(), env->weights.data() + env->weights.size());
    for (Eigen::Index i = 0; i < mc_points; ++i) {
      env->components[pick(rng)].sample(rng, x.data());
      const Point p(x);
      if (!window.contains(p)) continue;
      const double g = (*env)(p);
      if (g > 0.0) acc += intensity(p) / g;
    }
    return env->total_mass() * acc / static_cast<double>(mc_points);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < mc_points; ++i) {
    for (int d = 0; d < D; ++d) x[static_cast<std::size_t>(d)] = window.low(d) + unif(rng) * window.side(d);
    acc += intensity(Point(x));
  }
  return window.volume() * acc / static_cast<double>(mc_points);
}

double calibrate_scale(const IntensityFn& unscaled, double target, Eigen::Index mc_points, Rng& rng) {
  if (!(target > 0.0)) throw Error("calibration target must be positive");
  const double integral = mc_integral(unscaled, mc_points, rng);
  if (!(integral > 0.0)) throw Error("intensity integral estimate is zero; cannot calibrate");
  return target / integral;
}

IntensityFn intensity_se_mercer_1d(double lengthscale, int n_basis, Rng& rng, const Window& window, double ell,
                                   double target_count) {
  if (n_basis < 1) throw Error("n_basis must be >= 1");
  if (window.dim() != 1) throw DimensionError("SE Mercer synthetic intensity is one-dimensional");
  const MercerBasis basis = se_basis(lengthscale, ell, n_basis);
  std::normal_distribution<double> normal;
  Eigen::VectorXd w(n_basis);
  for (int i = 0; i < n_basis; ++i) w(i) = normal(rng);
  const double centre = window.center()(0);
  // Sorted order equals native order for a single SE factor.
  auto f2 = [basis, w, centre](Point x) {
    const double t = x[0] - centre;
    const double f = basis.features(Point(&t, 1)).dot(w);
    return f * f;
  };
  constexpr int kGrid = 10000;
  double peak = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double t = window.low(0) + window.side(0) * i / kGrid;
    peak = std::max(peak, f2(Point(&t, 1)));
  }
  IntensityFn unscaled(window, f2, 1.2 * peak);
  const double c = calibrate_scale(unscaled, target_count, 100000, rng);
  return unscaled.scaled(c);
}

std::pair<double, double> default_count_range(MixtureFamily family) {
  return family == MixtureFamily::Gaussian ? std::pair{190.0, 210.0} : std::pair{10.0, 1000.0};
}

IntensityFn intensity_mixture_squared(int dim, int n_components, MixtureFamily family,
                                      std::pair<double, double> target_count_range, Rng& rng) {
  if (dim < 2) throw DimensionError("mixture intensities need dimension >= 2");
  if (n_components < 1) throw Error("mixture needs at least one component");
  const auto [lo, hi] = target_count_range;
  if (!(lo > 0.0) || !(hi >= lo)) throw Error("invalid target count range");

  const Window window = Window::unit(dim);
  constexpr double kSide = 0.2;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::vector<DensityComponent> comps;
  for (int k = 0; k < n_components; ++k) {
    DensityComponent c;
    c.mean.resize(dim);
    for (int d = 0; d < dim; ++d) c.mean(d) = unif(rng);
    Eigen::MatrixXd A(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) A(i, j) = normal(rng);
    const Eigen::MatrixXd cov =
        (A * A.transpose() / dim + 0.05 * Eigen::MatrixXd::Identity(dim, dim)) * (kSide * kSide);
    c.chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
    c.dof = family == MixtureFamily::StudentT ? kStudentDof : 0.0;
    comps.push_back(std::move(c));
  }

  // (sum_k p_k)^2 <= K sum_k p_k^2 (Cauchy-Schwarz), and each p_k^2 is a
  // scaled density of the same family, so the envelope samples exactly.
  MixtureEnvelope env;
  env.weights.resize(n_components);
  double bound = 0.0;
  for (int k = 0; k < n_components; ++k) {
    auto [w, q] = squared_as_density(comps[static_cast<std::size_t>(k)]);
    env.weights(k) = n_components * w;
    bound += n_components * std::exp(2.0 * log_peak(comps[static_cast<std::size_t>(k)]));
    env.components.push_back(std::move(q));
  }
  auto eval = [comps](Point x) {
    double s = 0.0;
    for (const auto& c : comps) s += c.density(x);
    return s * s;
  };
  IntensityFn unscaled(window, eval, bound, std::move(env));

  const double target = lo == hi ? lo : std::exp(std::log(lo) + unif(rng) * (std::log(hi) - std::log(lo)));
  const double c = calibrate_scale(unscaled, target, 100000, rng);
  return unscaled.scaled(c);
}

}  // namespace kpoisson
