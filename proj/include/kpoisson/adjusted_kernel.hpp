#pragma once

#include "kpoisson/mercer.hpp"
#include "kpoisson/nystrom.hpp"

#include <variant>

namespace kpoisson {

/// Evaluable k~: truncated Mercer series or regularized Nystrom eigensystem.
class AdjustedKernelRep {
 public:
  AdjustedKernelRep(MercerKernelRep rep);  // NOLINT(google-explicit-constructor)
  /// Throws if no (a, gamma) is attached.
  AdjustedKernelRep(NystromRep rep);  // NOLINT(google-explicit-constructor)

  double a() const;
  double gamma() const;
  bool is_mercer() const { return std::holds_alternative<MercerKernelRep>(rep_); }
  const MercerKernelRep& mercer() const { return std::get<MercerKernelRep>(rep_); }
  const NystromRep& nystrom() const { return std::get<NystromRep>(rep_); }

  /// True when the representation's base measure is not Lebesgue on the window.
  bool gaussian_measure() const;

  double operator()(Point x, Point y) const;
  Eigen::MatrixXd gram(const PointMatrix& X, const PointMatrix& Y) const;
  Eigen::MatrixXd gram(const PointMatrix& X) const;
  /// Finite feature map F with gram(X, Y) = F(X) F(Y)^T.
  Eigen::MatrixXd features(const PointMatrix& X) const;

 private:
  std::variant<MercerKernelRep, NystromRep> rep_;
};

}  // namespace kpoisson
