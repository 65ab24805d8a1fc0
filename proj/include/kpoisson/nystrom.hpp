#pragma once

#include "kpoisson/domain.hpp"
#include "kpoisson/kernels.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace kpoisson {

enum class LandmarkStrategy { Grid, UniformMC, HaltonQMC };

std::string to_string(LandmarkStrategy strategy);
LandmarkStrategy parse_landmark_strategy(const std::string& text);

struct LandmarkSet {
  Window window = Window::unit(1);
  PointMatrix points;
  LandmarkStrategy strategy = LandmarkStrategy::Grid;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return points.rows(); }
};

/// Grid: cell centres of a (m^(1/D))^D lattice. UniformMC: i.i.d. uniform draws.
/// HaltonQMC: Halton points 1..m (prime bases) scaled to the window.
LandmarkSet make_landmarks(const Window& window, Eigen::Index m, LandmarkStrategy strategy, std::uint64_t seed = 0);

/// Grid with 100 / 400 / 1000 points for D = 1 / 2 / 3, otherwise 200 uniform draws.
LandmarkSet default_landmarks(const Window& window, std::uint64_t seed = 0);

/// Landmark eigensystem K_uu = Q diag(lambda) Q^T, truncated to rank p, with an
/// optional (a, gamma) attached. Operator eigenvalues are V lambda / m and the
/// adjusted filter is 1 / ((aV/m) lambda^2 + gamma lambda).
class NystromRep {
 public:
  NystromRep(LandmarkSet landmarks, KernelSpec kernel, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

  const LandmarkSet& landmarks() const { return landmarks_; }
  const KernelSpec& kernel() const { return kernel_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return Q_; }
  Eigen::Index rank() const { return lambda_.size(); }
  double volume() const { return landmarks_.window.volume(); }

  bool regularized() const { return regularization_.has_value(); }
  double a() const;
  double gamma() const;

  /// V lambda_i / m.
  Eigen::VectorXd operator_eigenvalues() const;
  /// Row i: estimated L2(S)-normalized eigenfunctions at X_i.
  Eigen::MatrixXd eigenfunctions(const PointMatrix& X) const;

  NystromRep with_regularization(double a, double gamma) const;

  /// Rows are primal features; gram = F_X F_Y^T.
  Eigen::MatrixXd primal_feature_matrix(const PointMatrix& X) const;
  /// K_XU Q, the part of the features that does not depend on (a, gamma).
  Eigen::MatrixXd projected(const PointMatrix& X) const;
  /// primal_feature_matrix(X) from projected(X).
  Eigen::MatrixXd primal_from_projected(const Eigen::MatrixXd& P) const;
  Eigen::VectorXd primal_features(Point x) const;
  Eigen::MatrixXd gram(const PointMatrix& X, const PointMatrix& Y) const;
  Eigen::MatrixXd gram(const PointMatrix& X) const;
  double operator()(Point x, Point y) const;

 private:
  void require_regularized() const;

  LandmarkSet landmarks_;
  KernelSpec kernel_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd Q_;
  struct Regularization {
    double a;
    double gamma;
    Eigen::VectorXd inv_sqrt_filter;
  };
  std::optional<Regularization> regularization_;
};

inline constexpr double kEigenvalueFloor = 1e-12;

/// Keeps the top `rank` eigenpairs above kEigenvalueFloor * max eigenvalue.
/// Large landmark sets with small rank use randomized subspace iteration.
NystromRep nystrom_eigensystem(const KernelSpec& kernel, const LandmarkSet& landmarks, Eigen::Index rank);

NystromRep attach_regularization(const NystromRep& rep, double a, double gamma);

Eigen::MatrixXd ktilde_gram_nystrom(const NystromRep& rep, const PointMatrix& X, const PointMatrix& Y);

Eigen::VectorXd primal_features(const NystromRep& rep, Point x);

}  // namespace kpoisson
