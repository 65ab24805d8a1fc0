#pragma once

#include "kpoisson/adjusted_kernel.hpp"
#include "kpoisson/domain.hpp"
#include "kpoisson/nystrom.hpp"
#include "kpoisson/optimizer.hpp"

#include <memory>

namespace kpoisson {

/// Anything that predicts a nonnegative intensity over a window.
class IntensityPredictor {
 public:
  virtual ~IntensityPredictor() = default;
  virtual const Window& window() const = 0;
  /// Intensity at each row of X; rows are not checked against the window.
  virtual Eigen::VectorXd intensities(const PointMatrix& X) const = 0;
};

struct FitDiagnostics {
  double objective = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  bool line_search_failed = false;
};

/// lambda(x) = a f(x)^2 with f = sum_j alpha_j k~(x_j, .).
class IntensityModel : public IntensityPredictor {
 public:
  IntensityModel(Window window, PointMatrix train, Eigen::VectorXd alpha, std::shared_ptr<const AdjustedKernelRep> rep,
                 FitDiagnostics diagnostics = {});

  const Window& window() const override { return window_; }
  Eigen::VectorXd intensities(const PointMatrix& X) const override;
  Eigen::VectorXd f_values(const PointMatrix& X) const;

  const PointMatrix& training_points() const { return train_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// F(train)^T alpha; f(X) = F(X) weights().
  const Eigen::VectorXd& weights() const { return weights_; }
  const AdjustedKernelRep& rep() const { return *rep_; }
  std::shared_ptr<const AdjustedKernelRep> rep_ptr() const { return rep_; }
  double a() const { return rep_->a(); }
  double gamma() const { return rep_->gamma(); }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  Window window_;
  PointMatrix train_;
  Eigen::VectorXd alpha_;
  std::shared_ptr<const AdjustedKernelRep> rep_;
  Eigen::VectorXd weights_;
  FitDiagnostics diagnostics_;
};

/// lambda(x) = a f(x)^2 with f = sum_j alpha_j k(x_j, .) in the unadjusted kernel.
class NaiveModel : public IntensityPredictor {
 public:
  NaiveModel(Window window, PointMatrix train, Eigen::VectorXd alpha, KernelSpec kernel, LandmarkSet landmarks, double a,
             double gamma, FitDiagnostics diagnostics = {});

  const Window& window() const override { return window_; }
  Eigen::VectorXd intensities(const PointMatrix& X) const override;
  Eigen::VectorXd f_values(const PointMatrix& X) const;

  const PointMatrix& training_points() const { return train_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const KernelSpec& kernel() const { return kernel_; }
  const LandmarkSet& landmarks() const { return landmarks_; }
  double a() const { return a_; }
  double gamma() const { return gamma_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  Window window_;
  PointMatrix train_;
  Eigen::VectorXd alpha_;
  KernelSpec kernel_;
  LandmarkSet landmarks_;
  double a_;
  double gamma_;
  FitDiagnostics diagnostics_;
};

/// Classical smoothing-kernel estimate with an isotropic Gaussian of scale h,
/// optionally divided by the in-window kernel mass at x.
class KIEModel : public IntensityPredictor {
 public:
  KIEModel(Window window, PointMatrix train, double bandwidth, bool edge_correct);

  const Window& window() const override { return window_; }
  Eigen::VectorXd intensities(const PointMatrix& X) const override;
  /// c_h(x) = integral over the window of the kernel centred at x.
  double edge_mass(Point x) const;

  const PointMatrix& training_points() const { return train_; }
  double bandwidth() const { return bandwidth_; }
  bool edge_correct() const { return edge_correct_; }

 private:
  Window window_;
  PointMatrix train_;
  double bandwidth_;
  bool edge_correct_;
};

/// Multiplies another predictor's intensity by a constant.
class ScaledPredictor : public IntensityPredictor {
 public:
  ScaledPredictor(std::shared_ptr<const IntensityPredictor> inner, double factor);
  const Window& window() const override { return inner_->window(); }
  Eigen::VectorXd intensities(const PointMatrix& X) const override { return factor_ * inner_->intensities(X); }

 private:
  std::shared_ptr<const IntensityPredictor> inner_;
  double factor_;
};

/// J(alpha) = -sum_i log(a (K alpha)_i^2) + alpha^T K alpha.
ObjectiveFn rkhs_objective(const Eigen::MatrixXd& ktilde, double a);
/// The same objective in w = F^T alpha for K = F F^T: -sum_i log(a (F w)_i^2) + |w|^2.
ObjectiveFn rkhs_primal_objective(const Eigen::MatrixXd& features, double a);
/// J(alpha) = -sum_i log(a (K alpha)_i^2) + alpha^T penalty alpha.
ObjectiveFn naive_objective(const Eigen::MatrixXd& k, const Eigen::MatrixXd& penalty, double a);
/// (aV/m) K_xu K_ux + gamma K_xx.
Eigen::MatrixXd naive_penalty(const KernelSpec& kernel, const PointMatrix& train, const LandmarkSet& landmarks, double a,
                              double gamma);

IntensityModel fit_rkhs(const PointPattern& pattern, std::shared_ptr<const AdjustedKernelRep> rep,
                        const OptimizerConfig& opt = {});
NaiveModel fit_naive(const PointPattern& pattern, const KernelSpec& kernel, const LandmarkSet& landmarks, double a,
                     double gamma, const OptimizerConfig& opt = {});
KIEModel fit_kie(const PointPattern& pattern, double bandwidth, bool edge_correct);

/// Throws if x lies outside the model's window.
double predict_intensity(const IntensityPredictor& model, Point x);
double kie_predict(const KIEModel& model, Point x);

/// (V/m) sum_i lambda(u_i) with V the window volume.
double integral_intensity(const IntensityPredictor& model, const LandmarkSet& landmarks);

/// sum_i log lambda(x_i) - integral; -infinity when some lambda(x_i) = 0.
double log_likelihood(const IntensityPredictor& model, const PointPattern& pattern, const LandmarkSet& landmarks);

/// Objective of the fitted model evaluated with alpha.
double rkhs_objective_value(const IntensityModel& model);

}  // namespace kpoisson
