#pragma once

#include "kpoisson/kernels.hpp"
#include "kpoisson/types.hpp"

#include <cstddef>
#include <vector>

namespace kpoisson {

enum class MercerFamily { Sobolev, SquaredExponential, BrownianBridge };
enum class BaseMeasure { Lebesgue, Gaussian };

/// One-dimensional explicit eigensystem. Native index order:
///   Sobolev: 0 -> e_0, 2m-1 -> sqrt2 cos(2 pi m x), 2m -> sqrt2 sin(2 pi m x)
///   Brownian bridge: m-1 -> sqrt2 sin(pi m x)
///   SE: i -> i-th Hermite eigenfunction
struct MercerFactor {
  MercerFamily family;
  int coord = -1;  // -1 until placed; a 1-D basis reads x[0]
  int order = 1;
  double sigma = 1.0;
  double ell = 1.0;
  int truncation = 1;

  std::size_t size() const;
  Eigen::VectorXd eigenvalues() const;
  /// Writes all native eigenfunction values at t into out[0..size()).
  void evaluate(double t, double* out) const;
};

/// Truncated Mercer eigensystem with eigenvalues sorted non-increasing
/// (ties by native index). Tensor products keep one factor per coordinate.
class MercerBasis {
 public:
  MercerBasis(std::vector<MercerFactor> factors, std::size_t budget);

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const std::vector<MercerFactor>& factors() const { return factors_; }
  BaseMeasure measure() const;
  int truncation() const { return factors_.front().truncation; }
  int dim() const;

  double eigenfunction(std::size_t j, Point x) const;
  /// Values of every eigenfunction at x, in sorted order.
  Eigen::VectorXd features(Point x) const;
  /// Row i holds features(X_i).
  Eigen::MatrixXd feature_matrix(const PointMatrix& X) const;

 private:
  double coordinate(const MercerFactor& f, Point x) const;

  std::vector<MercerFactor> factors_;
  std::vector<std::vector<int>> terms_;
  Eigen::VectorXd eigenvalues_;
};

inline constexpr std::size_t kDefaultTensorBudget = 1'000'000;
inline constexpr int kDefaultTruncation = 50;

MercerBasis sobolev_basis(int order, int truncation, int coord = -1);
/// Expansion with respect to the Gaussian measure N(0, ell^2).
MercerBasis se_basis(double sigma, double ell, int truncation, int coord = -1);
MercerBasis brownian_bridge_basis(int truncation, int coord = -1);
/// Factors without a coordinate take their position in the list.
MercerBasis tensor_basis(const std::vector<MercerBasis>& bases, std::size_t budget = kDefaultTensorBudget);

/// Builds the explicit basis for Sobolev, Brownian-bridge, SE (Gaussian
/// measure with lengthscale ell) leaves and tensor/product combinations of them.
MercerBasis basis_for_kernel(const KernelSpec& spec, int truncation, double ell = 1.0);

/// eta / (a eta + gamma).
double adjust_spectrum(double eta, double a, double gamma);

/// Truncated series for k~ = sum_j eta_j/(a eta_j + gamma) e_j(x) e_j(y).
class MercerKernelRep {
 public:
  MercerKernelRep(MercerBasis basis, double a, double gamma);

  const MercerBasis& basis() const { return basis_; }
  double a() const { return a_; }
  double gamma() const { return gamma_; }
  const Eigen::VectorXd& adjusted_eigenvalues() const { return adjusted_; }

  double operator()(Point x, Point y) const;
  Eigen::MatrixXd gram(const PointMatrix& X, const PointMatrix& Y) const;
  Eigen::MatrixXd gram(const PointMatrix& X) const;
  /// Rows are sqrt(adjusted) * features, so gram = F_X F_Y^T.
  Eigen::MatrixXd weighted_features(const PointMatrix& X) const;

 private:
  MercerBasis basis_;
  double a_;
  double gamma_;
  Eigen::VectorXd adjusted_;
  Eigen::VectorXd sqrt_adjusted_;
};

double ktilde_eval_mercer(const MercerKernelRep& rep, Point x, Point y);

/// Upper bound on the sup-norm of the discarded terms j > M of k~ using
/// adjusted eigenvalues <= eta/gamma. Sobolev and Brownian bridge use
/// sup|e_j|^2 = 2 and an integral bound on the power-law tail; SE returns the
/// geometric eigenvalue tail sum_{i>=M} eta_i / gamma (an L2(nu) trace bound,
/// since the Hermite eigenfunctions are not uniformly bounded). Tensor bases
/// use the product of factor traces minus the product of kept traces.
double truncation_tail_bound(const MercerBasis& basis, int truncation, double a, double gamma);

}  // namespace kpoisson
