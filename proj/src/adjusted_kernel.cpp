#include "kpoisson/adjusted_kernel.hpp"

namespace kpoisson {

AdjustedKernelRep::AdjustedKernelRep(MercerKernelRep rep) : rep_(std::move(rep)) {}

AdjustedKernelRep::AdjustedKernelRep(NystromRep rep) : rep_(std::move(rep)) {
  if (!nystrom().regularized()) throw Error("nystrom representation needs (a, gamma) attached before use");
}

double AdjustedKernelRep::a() const {
  return std::visit([](const auto& r) { return r.a(); }, rep_);
}

double AdjustedKernelRep::gamma() const {
  return std::visit([](const auto& r) { return r.gamma(); }, rep_);
}

bool AdjustedKernelRep::gaussian_measure() const {
  return is_mercer() && mercer().basis().measure() == BaseMeasure::Gaussian;
}

double AdjustedKernelRep::operator()(Point x, Point y) const {
  return std::visit([&](const auto& r) { return r(x, y); }, rep_);
}

Eigen::MatrixXd AdjustedKernelRep::gram(const PointMatrix& X, const PointMatrix& Y) const {
  return std::visit([&](const auto& r) { return r.gram(X, Y); }, rep_);
}

Eigen::MatrixXd AdjustedKernelRep::gram(const PointMatrix& X) const {
  return std::visit([&](const auto& r) { return r.gram(X); }, rep_);
}

Eigen::MatrixXd AdjustedKernelRep::features(const PointMatrix& X) const {
  if (is_mercer()) return mercer().weighted_features(X);
  return nystrom().primal_feature_matrix(X);
}

}  // namespace kpoisson
