#include "kpoisson/mercer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace kpoisson {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

struct SeConstants {
  double a, b, c, A, B;
};

SeConstants se_constants(double sigma, double ell) {
  SeConstants k{};
  k.a = 1.0 / (4.0 * ell * ell);
  k.b = 1.0 / (2.0 * sigma * sigma);
  k.c = std::sqrt(k.a * k.a + 2.0 * k.a * k.b);
  k.A = k.a + k.b + k.c;
  k.B = k.b / k.A;
  return k;
}

void require_truncation(int m) {
  if (m < 1) throw Error("truncation level must be >= 1");
}

}  // namespace

std::size_t MercerFactor::size() const {
  switch (family) {
    case MercerFamily::Sobolev:
      return static_cast<std::size_t>(2 * truncation + 1);
    case MercerFamily::SquaredExponential:
    case MercerFamily::BrownianBridge:
      return static_cast<std::size_t>(truncation);
  }
  return 0;
}

Eigen::VectorXd MercerFactor::eigenvalues() const {
  Eigen::VectorXd eta(static_cast<Eigen::Index>(size()));
  switch (family) {
    case MercerFamily::Sobolev:
      eta(0) = 1.0;
      for (int m = 1; m <= truncation; ++m) {
        const double v = std::pow(2.0 * kPi * m, -2.0 * order);
        eta(2 * m - 1) = v;
        eta(2 * m) = v;
      }
      break;
    case MercerFamily::BrownianBridge:
      for (int m = 1; m <= truncation; ++m) eta(m - 1) = 1.0 / (kPi * kPi * m * m);
      break;
    case MercerFamily::SquaredExponential: {
      const auto k = se_constants(sigma, ell);
      const double lead = std::sqrt(2.0 * k.a / k.A);
      for (int i = 0; i < truncation; ++i) eta(i) = lead * std::pow(k.B, i);
      break;
    }
  }
  return eta;
}

void MercerFactor::evaluate(double t, double* out) const {
  switch (family) {
    case MercerFamily::Sobolev: {
      out[0] = 1.0;
      // Angle-addition recurrence for cos/sin(2 pi m t).
      const double c1 = std::cos(2.0 * kPi * t);
      const double s1 = std::sin(2.0 * kPi * t);
      double c = 1.0;
      double s = 0.0;
      for (int m = 1; m <= truncation; ++m) {
        const double cn = c * c1 - s * s1;
        const double sn = s * c1 + c * s1;
        c = cn;
        s = sn;
        if (m % 64 == 0) {  // re-anchor to bound accumulated rounding
          c = std::cos(2.0 * kPi * m * t);
          s = std::sin(2.0 * kPi * m * t);
        }
        out[2 * m - 1] = kSqrt2 * c;
        out[2 * m] = kSqrt2 * s;
      }
      break;
    }
    case MercerFamily::BrownianBridge: {
      for (int m = 1; m <= truncation; ++m) out[m - 1] = kSqrt2 * std::sin(kPi * m * t);
      break;
    }
    case MercerFamily::SquaredExponential: {
      // e_i(t) = (a/c)^(-1/4) exp(-(c-a) t^2) h_i(sqrt(2c) t) with the
      // normalized Hermite recurrence h_i = H_i / sqrt(2^i i!).
      const auto k = se_constants(sigma, ell);
      const double z = std::sqrt(2.0 * k.c) * t;
      const double envelope = std::pow(k.a / k.c, -0.25) * std::exp(-(k.c - k.a) * t * t);
      double prev = 0.0;
      double cur = 1.0;
      for (int i = 0; i < truncation; ++i) {
        out[i] = envelope * cur;
        const double next = std::sqrt(2.0 / (i + 1)) * z * cur - std::sqrt(static_cast<double>(i) / (i + 1)) * prev;
        prev = cur;
        cur = next;
      }
      break;
    }
  }
}

MercerBasis::MercerBasis(std::vector<MercerFactor> factors, std::size_t budget) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error("mercer basis needs at least one factor");
  std::size_t total = 1;
  for (const auto& f : factors_) {
    require_truncation(f.truncation);
    if (f.size() > 0 && total > budget / f.size()) {
      throw Error("tensor basis size exceeds budget of " + std::to_string(budget) + " eigenpairs");
    }
    total *= f.size();
  }
  if (total > budget) throw Error("tensor basis size exceeds budget of " + std::to_string(budget) + " eigenpairs");
  const BaseMeasure first = factors_.front().family == MercerFamily::SquaredExponential ? BaseMeasure::Gaussian
                                                                                           : BaseMeasure::Lebesgue;
  for (const auto& f : factors_) {
    const BaseMeasure m = f.family == MercerFamily::SquaredExponential ? BaseMeasure::Gaussian : BaseMeasure::Lebesgue;
    if (m != first) throw Error("tensor basis factors must share a base-measure family");
  }

  std::vector<Eigen::VectorXd> factor_eta;
  for (const auto& f : factors_) factor_eta.push_back(f.eigenvalues());

  // Enumerate index tuples lexicographically; that order is the tie-break.
  std::vector<std::vector<int>> tuples;
  std::vector<double> values;
  tuples.reserve(total);
  values.reserve(total);
  std::vector<int> idx(factors_.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    double v = 1.0;
    for (std::size_t k = 0; k < factors_.size(); ++k) v *= factor_eta[k](idx[k]);
    tuples.push_back(idx);
    values.push_back(v);
    for (std::size_t k = factors_.size(); k-- > 0;) {
      if (++idx[k] < static_cast<int>(factors_[k].size())) break;
      idx[k] = 0;
    }
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] > values[r]; });

  eigenvalues_.resize(static_cast<Eigen::Index>(total));
  terms_.reserve(total);
  for (std::size_t n = 0; n < total; ++n) {
    eigenvalues_(static_cast<Eigen::Index>(n)) = values[order[n]];
    terms_.push_back(tuples[order[n]]);
  }
}

BaseMeasure MercerBasis::measure() const {
  return factors_.front().family == MercerFamily::SquaredExponential ? BaseMeasure::Gaussian : BaseMeasure::Lebesgue;
}

int MercerBasis::dim() const {
  int d = 0;
  for (const auto& f : factors_) d = std::max(d, f.coord + 1);
  return std::max(d, 1);
}

double MercerBasis::coordinate(const MercerFactor& f, Point x) const {
  const std::size_t c = f.coord < 0 ? 0 : static_cast<std::size_t>(f.coord);
  if (c >= x.size()) throw DimensionError("point has no coordinate " + std::to_string(c));
  return x[c];
}

double MercerBasis::eigenfunction(std::size_t j, Point x) const {
  if (j >= size()) throw Error("eigenfunction index out of range");
  double v = 1.0;
  std::vector<double> buf;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    buf.resize(factors_[k].size());
    factors_[k].evaluate(coordinate(factors_[k], x), buf.data());
    v *= buf[static_cast<std::size_t>(terms_[j][k])];
  }
  return v;
}

Eigen::VectorXd MercerBasis::features(Point x) const {
  std::vector<std::vector<double>> per_factor(factors_.size());
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    per_factor[k].resize(factors_[k].size());
    factors_[k].evaluate(coordinate(factors_[k], x), per_factor[k].data());
  }
  Eigen::VectorXd out(eigenvalues_.size());
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    double v = 1.0;
    for (std::size_t k = 0; k < factors_.size(); ++k) v *= per_factor[k][static_cast<std::size_t>(terms_[j][k])];
    out(static_cast<Eigen::Index>(j)) = v;
  }
  return out;
}

Eigen::MatrixXd MercerBasis::feature_matrix(const PointMatrix& X) const {
  Eigen::MatrixXd F(X.rows(), eigenvalues_.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) F.row(i) = features(row_of(X, i)).transpose();
  return F;
}

MercerBasis sobolev_basis(int order, int truncation, int coord) {
  if (order < 1 || order > 3) throw Error("sobolev order must be 1, 2 or 3");
  require_truncation(truncation);
  MercerFactor f{MercerFamily::Sobolev};
  f.order = order;
  f.truncation = truncation;
  f.coord = coord;
  return MercerBasis({f}, kDefaultTensorBudget);
}

MercerBasis se_basis(double sigma, double ell, int truncation, int coord) {
  if (!(sigma > 0.0) || !(ell > 0.0)) throw Error("se basis needs sigma > 0 and ell > 0");
  require_truncation(truncation);
  MercerFactor f{MercerFamily::SquaredExponential};
  f.sigma = sigma;
  f.ell = ell;
  f.truncation = truncation;
  f.coord = coord;
  return MercerBasis({f}, kDefaultTensorBudget);
}

MercerBasis brownian_bridge_basis(int truncation, int coord) {
  require_truncation(truncation);
  MercerFactor f{MercerFamily::BrownianBridge};
  f.truncation = truncation;
  f.coord = coord;
  return MercerBasis({f}, kDefaultTensorBudget);
}

MercerBasis tensor_basis(const std::vector<MercerBasis>& bases, std::size_t budget) {
  if (bases.empty()) throw Error("tensor basis needs at least one factor");
  std::vector<MercerFactor> factors;
  for (const auto& b : bases) {
    for (auto f : b.factors()) {
      if (f.coord < 0) f.coord = static_cast<int>(factors.size());
      factors.push_back(f);
    }
  }
  std::vector<int> coords;
  for (const auto& f : factors) coords.push_back(f.coord);
  std::sort(coords.begin(), coords.end());
  if (std::adjacent_find(coords.begin(), coords.end()) != coords.end()) {
    throw Error("tensor basis factors must act on distinct coordinates");
  }
  return MercerBasis(std::move(factors), budget);
}

MercerBasis basis_for_kernel(const KernelSpec& spec, int truncation, double ell) {
  auto leaf_coord = [](const KernelSpec& s) -> int {
    if (s.coords().size() > 1) throw Error("explicit Mercer expansions are one-dimensional per factor");
    return s.coords().empty() ? -1 : s.coords().front();
  };
  switch (spec.kind()) {
    case KernelKind::SobolevPeriodic:
      return sobolev_basis(spec.order(), truncation, leaf_coord(spec));
    case KernelKind::BrownianBridge:
      return brownian_bridge_basis(truncation, leaf_coord(spec));
    case KernelKind::SquaredExponential:
      return se_basis(spec.parameter(), ell, truncation, leaf_coord(spec));
    case KernelKind::TensorProduct:
    case KernelKind::Product: {
      std::vector<MercerBasis> parts;
      for (const auto& child : spec.children()) parts.push_back(basis_for_kernel(child, truncation, ell));
      return tensor_basis(parts);
    }
    default:
      throw Error("no explicit Mercer expansion for kernel " + spec.to_string() + "; use the Nystrom representation");
  }
}

double adjust_spectrum(double eta, double a, double gamma) {
  if (eta < 0.0 || a < 0.0 || gamma < 0.0) throw Error("adjust_spectrum needs eta, a, gamma >= 0");
  if (a == 0.0 && gamma == 0.0) throw Error("adjust_spectrum needs a > 0 or gamma > 0");
  if (eta == 0.0) return 0.0;
  return eta / (a * eta + gamma);
}

MercerKernelRep::MercerKernelRep(MercerBasis basis, double a, double gamma)
    : basis_(std::move(basis)), a_(a), gamma_(gamma) {
  if (!(a > 0.0) || !(gamma > 0.0)) throw Error("adjusted kernel needs a > 0 and gamma > 0");
  adjusted_.resize(basis_.eigenvalues().size());
  for (Eigen::Index j = 0; j < adjusted_.size(); ++j) adjusted_(j) = adjust_spectrum(basis_.eigenvalues()(j), a, gamma);
  sqrt_adjusted_ = adjusted_.array().sqrt();
}

double MercerKernelRep::operator()(Point x, Point y) const {
  return basis_.features(x).cwiseProduct(adjusted_).dot(basis_.features(y));
}

Eigen::MatrixXd MercerKernelRep::weighted_features(const PointMatrix& X) const {
  return basis_.feature_matrix(X) * sqrt_adjusted_.asDiagonal();
}

Eigen::MatrixXd MercerKernelRep::gram(const PointMatrix& X, const PointMatrix& Y) const {
  const Eigen::MatrixXd FX = basis_.feature_matrix(X);
  const Eigen::MatrixXd FY = basis_.feature_matrix(Y);
  return FX * adjusted_.asDiagonal() * FY.transpose();
}

Eigen::MatrixXd MercerKernelRep::gram(const PointMatrix& X) const {
  const Eigen::MatrixXd F = weighted_features(X);
  Eigen::MatrixXd K(X.rows(), X.rows());
  K.setZero();
  K.selfadjointView<Eigen::Lower>().rankUpdate(F);
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  return K;
}

double ktilde_eval_mercer(const MercerKernelRep& rep, Point x, Point y) { return rep(x, y); }

double truncation_tail_bound(const MercerBasis& basis, int truncation, double a, double gamma) {
  require_truncation(truncation);
  if (!(gamma > 0.0) || a < 0.0) throw Error("tail bound needs gamma > 0 and a >= 0");
  if (basis.factors().size() != 1) {
    // Full trace product minus kept trace product, times prod sup|e|^2.
    double full = 1.0, kept = 1.0, sup2 = 1.0;
    for (MercerFactor f : basis.factors()) {
      switch (f.family) {
        case MercerFamily::Sobolev: {
          const double zeta[] = {kPi * kPi / 6.0, std::pow(kPi, 4) / 90.0, std::pow(kPi, 6) / 945.0};
          full *= 1.0 + 2.0 * zeta[f.order - 1] * std::pow(2.0 * kPi, -2.0 * f.order);
          sup2 *= 2.0;
          break;
        }
        case MercerFamily::BrownianBridge:
          full *= 1.0 / 6.0;
          sup2 *= 2.0;
          break;
        case MercerFamily::SquaredExponential: {
          const auto k = se_constants(f.sigma, f.ell);
          full *= std::sqrt(2.0 * k.a / k.A) / (1.0 - k.B);
          break;
        }
      }
      f.truncation = truncation;
      kept *= f.eigenvalues().sum();
    }
    return sup2 * std::max(full - kept, 0.0) / gamma;
  }
  const MercerFactor& f = basis.factors().front();
  const double M = truncation;
  switch (f.family) {
    case MercerFamily::Sobolev: {
      // Two eigenfunctions per frequency, each with sup|e|^2 = 2.
      const double p = 2.0 * f.order;
      const double power_tail = std::pow(M, 1.0 - p) / (p - 1.0);  // >= sum_{m>M} m^-p
      return (2.0 / gamma) * std::pow(2.0 * kPi, -p) * power_tail * 2.0;
    }
    case MercerFamily::BrownianBridge:
      return (2.0 / gamma) / (kPi * kPi) / M;
    case MercerFamily::SquaredExponential: {
      const auto k = se_constants(f.sigma, f.ell);
      return std::sqrt(2.0 * k.a / k.A) * std::pow(k.B, M) / (1.0 - k.B) / gamma;
    }
  }
  throw Error("unsupported basis family");
}

}  // namespace kpoisson
