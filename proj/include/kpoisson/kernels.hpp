#pragma once

#include "kpoisson/types.hpp"

#include <set>
#include <string>
#include <vector>

namespace kpoisson {

enum class KernelKind {
  SquaredExponential,
  SobolevPeriodic,
  BrownianBridge,
  PeriodicSE,
  Const,
  Sum,
  Product,
  TensorProduct,
};

/// Expression tree of base kernels. Leaves act on a list of coordinate
/// indices; an empty list means "every coordinate of the input".
class KernelSpec {
 public:
  static KernelSpec squared_exponential(double sigma, std::vector<int> coords = {});
  /// Periodic Sobolev kernel of order 1 <= s <= 3 on [0,1).
  static KernelSpec sobolev(int order, std::vector<int> coords = {});
  /// min(x,y) - xy on [0,1].
  static KernelSpec brownian_bridge(std::vector<int> coords = {});
  /// exp(-2 sin^2(pi p (x-y))).
  static KernelSpec periodic(double frequency, std::vector<int> coords = {});
  static KernelSpec constant(double value);
  static KernelSpec sum(std::vector<KernelSpec> children);
  static KernelSpec product(std::vector<KernelSpec> children);
  /// Product of children acting on pairwise disjoint coordinate sets.
  static KernelSpec tensor(std::vector<KernelSpec> children);

  /// Assigns coordinates to every leaf that does not carry its own.
  KernelSpec with_coords(const std::vector<int>& coords) const;

  double operator()(Point x, Point y) const;

  KernelKind kind() const { return kind_; }
  double parameter() const { return param_; }
  int order() const { return static_cast<int>(param_); }
  const std::vector<int>& coords() const { return coords_; }
  const std::vector<KernelSpec>& children() const { return children_; }
  bool is_leaf() const;

  /// Union of the leaves' coordinate indices; empty if any leaf acts on all coordinates.
  std::set<int> coordinate_set() const;
  /// Smallest input dimension the kernel can be evaluated on.
  int min_dim() const;
  /// Throws DimensionError if the kernel cannot act on dim-dimensional points.
  void check_dim(int dim) const;

  /// Canonical text form, accepted by parse_kernel.
  std::string to_string() const;

 private:
  KernelSpec(KernelKind kind, double param, std::vector<int> coords, std::vector<KernelSpec> children);

  KernelKind kind_;
  double param_;
  std::vector<int> coords_;
  std::vector<KernelSpec> children_;
};

double eval_kernel(const KernelSpec& spec, Point x, Point y);

/// Entry (i,j) = k(X_i, Y_j).
Eigen::MatrixXd gram(const KernelSpec& spec, const PointMatrix& X, const PointMatrix& Y);
/// Symmetric Gram matrix of X with itself; exactly symmetric by construction.
Eigen::MatrixXd gram(const KernelSpec& spec, const PointMatrix& X);

/// B_2, B_4, B_6 Bernoulli polynomials.
double bernoulli_polynomial(int degree, double t);
double fractional_part(double t);

/// Parses e.g. "se(sigma=0.3)@[0,1] * (periodic(p=12)+const(1))@[2] * se(sigma=0.1)@[2]".
KernelSpec parse_kernel(const std::string& text);

}  // namespace kpoisson
