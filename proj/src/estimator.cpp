#include "kpoisson/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace kpoisson {

namespace {

FitDiagnostics diagnostics_of(const OptimizeResult& r) {
  return FitDiagnostics{r.value, r.iterations, r.grad_norm, r.converged, r.line_search_failed};
}

double log_term(const Eigen::VectorXd& f, double a) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double v = a * f(i) * f(i);
    if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
    acc -= std::log(v);
  }
  return acc;
}

void require_points(const PointPattern& pattern) {
  if (pattern.size() == 0) throw Error("cannot fit an intensity to an empty pattern");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

IntensityModel::IntensityModel(Window window, PointMatrix train, Eigen::VectorXd alpha,
                               std::shared_ptr<const AdjustedKernelRep> rep, FitDiagnostics diagnostics)
    : window_(std::move(window)),
      train_(std::move(train)),
      alpha_(std::move(alpha)),
      rep_(std::move(rep)),
      diagnostics_(diagnostics) {
  if (!rep_) throw Error("intensity model needs a kernel representation");
  if (alpha_.size() != train_.rows()) throw DimensionError("one dual coefficient per training point required");
  if (train_.rows() > 0) weights_ = rep_->features(train_).transpose() * alpha_;
}

Eigen::VectorXd IntensityModel::f_values(const PointMatrix& X) const {
  if (train_.rows() == 0) return Eigen::VectorXd::Zero(X.rows());
  return rep_->features(X) * weights_;
}

Eigen::VectorXd IntensityModel::intensities(const PointMatrix& X) const {
  return rep_->a() * f_values(X).array().square().matrix();
}

NaiveModel::NaiveModel(Window window, PointMatrix train, Eigen::VectorXd alpha, KernelSpec kernel, LandmarkSet landmarks,
                       double a, double gamma, FitDiagnostics diagnostics)
    : window_(std::move(window)),
      train_(std::move(train)),
      alpha_(std::move(alpha)),
      kernel_(std::move(kernel)),
      landmarks_(std::move(landmarks)),
      a_(a),
      gamma_(gamma),
      diagnostics_(diagnostics) {
  if (!(a_ > 0.0) || !(gamma_ > 0.0)) throw Error("naive model needs a > 0 and gamma > 0");
  if (alpha_.size() != train_.rows()) throw DimensionError("one dual coefficient per training point required");
}

Eigen::VectorXd NaiveModel::f_values(const PointMatrix& X) const {
  if (train_.rows() == 0) return Eigen::VectorXd::Zero(X.rows());
  return gram(kernel_, X, train_) * alpha_;
}

Eigen::VectorXd NaiveModel::intensities(const PointMatrix& X) const {
  return a_ * f_values(X).array().square().matrix();
}

KIEModel::KIEModel(Window window, PointMatrix train, double bandwidth, bool edge_correct)
    : window_(std::move(window)), train_(std::move(train)), bandwidth_(bandwidth), edge_correct_(edge_correct) {
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw Error("KIE bandwidth must be positive");
}

double KIEModel::edge_mass(Point x) const {
  double mass = 1.0;
  for (int d = 0; d < window_.dim(); ++d) {
    mass *= normal_cdf((window_.high(d) - x[d]) / bandwidth_) - normal_cdf((window_.low(d) - x[d]) / bandwidth_);
  }
  return mass;
}

Eigen::VectorXd KIEModel::intensities(const PointMatrix& X) const {
  const int D = window_.dim();
  const double h2 = bandwidth_ * bandwidth_;
  const double norm = std::pow(2.0 * std::numbers::pi * h2, -0.5 * D);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
  if (train_.rows() > 0) {
    const KernelSpec se = KernelSpec::squared_exponential(bandwidth_);
    out = norm * (gram(se, X, train_).rowwise().sum());
  }
  if (edge_correct_) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double c = edge_mass(row_of(X, i));
      out(i) = c > 0.0 ? out(i) / c : 0.0;
    }
  }
  return out;
}

ScaledPredictor::ScaledPredictor(std::shared_ptr<const IntensityPredictor> inner, double factor)
    : inner_(std::move(inner)), factor_(factor) {
  if (!inner_) throw Error("scaled predictor needs a model");
  if (!(factor_ >= 0.0)) throw Error("scale factor must be nonnegative");
}

ObjectiveFn rkhs_objective(const Eigen::MatrixXd& ktilde, double a) {
  return [ktilde, a](const Eigen::VectorXd& alpha, Eigen::VectorXd* grad) {
    const Eigen::VectorXd f = ktilde * alpha;
    const double value = log_term(f, a) + alpha.dot(f);
    if (grad && std::isfinite(value)) *grad = 2.0 * (ktilde * (alpha - f.cwiseInverse()));
    return value;
  };
}

ObjectiveFn rkhs_primal_objective(const Eigen::MatrixXd& features, double a) {
  return [features, a](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    const Eigen::VectorXd f = features * w;
    const double value = log_term(f, a) + w.squaredNorm();
    if (grad && std::isfinite(value)) *grad = 2.0 * (w - features.transpose() * f.cwiseInverse());
    return value;
  };
}

ObjectiveFn naive_objective(const Eigen::MatrixXd& k, const Eigen::MatrixXd& penalty, double a) {
  return [k, penalty, a](const Eigen::VectorXd& alpha, Eigen::VectorXd* grad) {
    const Eigen::VectorXd f = k * alpha;
    const Eigen::VectorXd pa = penalty * alpha;
    const double value = log_term(f, a) + alpha.dot(pa);
    if (grad && std::isfinite(value)) *grad = 2.0 * pa - 2.0 * (k * f.cwiseInverse());
    return value;
  };
}

Eigen::MatrixXd naive_penalty(const KernelSpec& kernel, const PointMatrix& train, const LandmarkSet& landmarks, double a,
                              double gamma) {
  const Eigen::MatrixXd Kxu = gram(kernel, train, landmarks.points);
  const double scale = a * landmarks.window.volume() / static_cast<double>(landmarks.size());
  Eigen::MatrixXd P = gamma * gram(kernel, train);
  P.selfadjointView<Eigen::Lower>().rankUpdate(Kxu, scale);
  P.triangularView<Eigen::StrictlyUpper>() = P.transpose();
  return P;
}

IntensityModel fit_rkhs(const PointPattern& pattern, std::shared_ptr<const AdjustedKernelRep> rep,
                        const OptimizerConfig& opt) {
  require_points(pattern);
  if (!rep) throw Error("fit_rkhs needs a kernel representation");
  if (rep->gaussian_measure() && !opt.allow_gaussian_measure) {
    throw Error(
        "the SE Mercer expansion is orthonormal under a Gaussian measure, not Lebesgue on the window; "
        "use the Nystrom representation or set allow_gaussian_measure");
  }
  if (opt.primal) {
    const Eigen::MatrixXd F = rep->features(pattern.points());
    if (F.cols() < F.rows()) {
      const Eigen::MatrixXd Ft = F.transpose();
      OptimizeResult r = minimize_with_restarts(rkhs_primal_objective(F, rep->a()), pattern.size(), opt,
                                                [&Ft](const Eigen::VectorXd& alpha) { return Eigen::VectorXd(Ft * alpha); });
      // Minimum-norm alpha with F^T alpha = w; the dual gradient is F times the primal one.
      const Eigen::VectorXd w = r.x;
      Eigen::VectorXd g;
      rkhs_primal_objective(F, rep->a())(w, &g);
      r.grad_norm = (F * g).lpNorm<Eigen::Infinity>();
      r.x = Ft.completeOrthogonalDecomposition().solve(w);
      return IntensityModel(pattern.window(), pattern.points(), std::move(r.x), std::move(rep), diagnostics_of(r));
    }
  }
  const Eigen::MatrixXd K = rep->gram(pattern.points());
  const ObjectiveFn objective = rkhs_objective(K, rep->a());
  OptimizeResult r = minimize_with_restarts(objective, pattern.size(), opt);
  return IntensityModel(pattern.window(), pattern.points(), std::move(r.x), std::move(rep), diagnostics_of(r));
}

NaiveModel fit_naive(const PointPattern& pattern, const KernelSpec& kernel, const LandmarkSet& landmarks, double a,
                     double gamma, const OptimizerConfig& opt) {
  require_points(pattern);
  if (!(a > 0.0) || !(gamma > 0.0)) throw Error("naive fit needs a > 0 and gamma > 0");
  if (landmarks.size() == 0) throw Error("naive fit needs landmarks");
  const Eigen::MatrixXd K = gram(kernel, pattern.points());
  const Eigen::MatrixXd P = naive_penalty(kernel, pattern.points(), landmarks, a, gamma);
  OptimizeResult r = minimize_with_restarts(naive_objective(K, P, a), pattern.size(), opt);
  return NaiveModel(pattern.window(), pattern.points(), std::move(r.x), kernel, landmarks, a, gamma, diagnostics_of(r));
}

KIEModel fit_kie(const PointPattern& pattern, double bandwidth, bool edge_correct) {
  return KIEModel(pattern.window(), pattern.points(), bandwidth, edge_correct);
}

double predict_intensity(const IntensityPredictor& model, Point x) {
  if (!model.window().contains(x)) throw Error("query point lies outside the model window");
  PointMatrix X(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t d = 0; d < x.size(); ++d) X(0, static_cast<Eigen::Index>(d)) = x[d];
  return model.intensities(X)(0);
}

double kie_predict(const KIEModel& model, Point x) { return predict_intensity(model, x); }

double integral_intensity(const IntensityPredictor& model, const LandmarkSet& landmarks) {
  if (landmarks.size() == 0) throw Error("integral needs a non-empty landmark set");
  return model.window().volume() / static_cast<double>(landmarks.size()) * model.intensities(landmarks.points).sum();
}

double log_likelihood(const IntensityPredictor& model, const PointPattern& pattern, const LandmarkSet& landmarks) {
  const double integral = integral_intensity(model, landmarks);
  if (pattern.size() == 0) return -integral;
  const Eigen::VectorXd lam = model.intensities(pattern.points());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!(lam(i) > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += std::log(lam(i));
  }
  return acc - integral;
}

double rkhs_objective_value(const IntensityModel& model) {
  const Eigen::MatrixXd K = model.rep().gram(model.training_points());
  return rkhs_objective(K, model.a())(model.alpha(), nullptr);
}

}  // namespace kpoisson
