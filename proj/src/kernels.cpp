#include "kpoisson/kernels.hpp"
#include "kpoisson/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kpoisson {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be positive and finite");
}

void check_coords(const std::vector<int>& coords) {
  std::set<int> seen;
  for (int c : coords) {
    if (c < 0) throw Error("coordinate indices must be nonnegative");
    if (!seen.insert(c).second) throw Error("duplicate coordinate index " + std::to_string(c));
  }
}

// Coordinate c of x, or x itself when the leaf acts on all coordinates.
double scalar_input(const std::vector<int>& coords, Point x, const char* name) {
  if (coords.empty()) {
    if (x.size() != 1) throw DimensionError(std::string(name) + " acts on one coordinate; give it @[i]");
    return x[0];
  }
  return x[coords.front()];
}

double squared_distance(const std::vector<int>& coords, Point x, Point y) {
  double d2 = 0.0;
  if (coords.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  } else {
    for (int c : coords) d2 += (x[c] - y[c]) * (x[c] - y[c]);
  }
  return d2;
}

void check_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("brownian bridge input " + format_double(t) + " outside [0,1]");
}

std::string coords_suffix(const std::vector<int>& coords) {
  if (coords.empty()) return {};
  std::string out = "@[";
  for (std::size_t i = 0; i < coords.size(); ++i) out += (i ? "," : "") + std::to_string(coords[i]);
  return out + "]";
}

}  // namespace

KernelSpec::KernelSpec(KernelKind kind, double param, std::vector<int> coords, std::vector<KernelSpec> children)
    : kind_(kind), param_(param), coords_(std::move(coords)), children_(std::move(children)) {
  check_coords(coords_);
}

KernelSpec KernelSpec::squared_exponential(double sigma, std::vector<int> coords) {
  require_positive(sigma, "squared exponential lengthscale");
  return KernelSpec(KernelKind::SquaredExponential, sigma, std::move(coords), {});
}

KernelSpec KernelSpec::sobolev(int order, std::vector<int> coords) {
  if (order < 1 || order > 3) throw Error("sobolev order must be 1, 2 or 3");
  if (coords.size() > 1) throw DimensionError("sobolev kernel acts on a single coordinate");
  return KernelSpec(KernelKind::SobolevPeriodic, order, std::move(coords), {});
}

KernelSpec KernelSpec::brownian_bridge(std::vector<int> coords) {
  if (coords.size() > 1) throw DimensionError("brownian bridge kernel acts on a single coordinate");
  return KernelSpec(KernelKind::BrownianBridge, 0.0, std::move(coords), {});
}

KernelSpec KernelSpec::periodic(double frequency, std::vector<int> coords) {
  require_positive(frequency, "periodic frequency");
  if (coords.size() > 1) throw DimensionError("periodic kernel acts on a single coordinate");
  return KernelSpec(KernelKind::PeriodicSE, frequency, std::move(coords), {});
}

KernelSpec KernelSpec::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw Error("constant kernel value must be >= 0");
  return KernelSpec(KernelKind::Const, value, {}, {});
}

KernelSpec KernelSpec::sum(std::vector<KernelSpec> children) {
  if (children.empty()) throw Error("sum kernel needs children");
  if (children.size() == 1) return children.front();
  return KernelSpec(KernelKind::Sum, 0.0, {}, std::move(children));
}

KernelSpec KernelSpec::product(std::vector<KernelSpec> children) {
  if (children.empty()) throw Error("product kernel needs children");
  if (children.size() == 1) return children.front();
  return KernelSpec(KernelKind::Product, 0.0, {}, std::move(children));
}

KernelSpec KernelSpec::tensor(std::vector<KernelSpec> children) {
  if (children.empty()) throw Error("tensor kernel needs children");
  std::set<int> seen;
  for (const auto& child : children) {
    const auto cs = child.coordinate_set();
    if (cs.empty()) throw Error("tensor product factors must declare their coordinates");
    for (int c : cs) {
      if (!seen.insert(c).second) throw Error("tensor product factors overlap on coordinate " + std::to_string(c));
    }
  }
  return KernelSpec(KernelKind::TensorProduct, 0.0, {}, std::move(children));
}

bool KernelSpec::is_leaf() const {
  return kind_ != KernelKind::Sum && kind_ != KernelKind::Product && kind_ != KernelKind::TensorProduct;
}

KernelSpec KernelSpec::with_coords(const std::vector<int>& coords) const {
  if (kind_ == KernelKind::Const) return *this;
  if (is_leaf()) {
    if (!coords_.empty()) return *this;
    if (coords.size() > 1 && kind_ != KernelKind::SquaredExponential) {
      throw DimensionError("one-dimensional kernel assigned " + std::to_string(coords.size()) + " coordinates");
    }
    KernelSpec out = *this;
    out.coords_ = coords;
    check_coords(out.coords_);
    return out;
  }
  std::vector<KernelSpec> kids;
  kids.reserve(children_.size());
  for (const auto& child : children_) kids.push_back(child.with_coords(coords));
  if (kind_ == KernelKind::TensorProduct) return tensor(std::move(kids));
  return KernelSpec(kind_, param_, {}, std::move(kids));
}

std::set<int> KernelSpec::coordinate_set() const {
  if (kind_ == KernelKind::Const) return {};
  if (is_leaf()) return {coords_.begin(), coords_.end()};
  std::set<int> out;
  for (const auto& child : children_) {
    if (child.kind() == KernelKind::Const) continue;
    const auto cs = child.coordinate_set();
    if (cs.empty()) return {};
    out.insert(cs.begin(), cs.end());
  }
  return out;
}

int KernelSpec::min_dim() const {
  if (kind_ == KernelKind::Const) return 0;
  if (is_leaf()) {
    if (coords_.empty()) return 1;
    return *std::max_element(coords_.begin(), coords_.end()) + 1;
  }
  int out = 0;
  for (const auto& child : children_) out = std::max(out, child.min_dim());
  return out;
}

void KernelSpec::check_dim(int dim) const {
  if (dim < min_dim()) {
    throw DimensionError("kernel " + to_string() + " needs points of dimension >= " + std::to_string(min_dim()) +
                         ", got " + std::to_string(dim));
  }
  if (is_leaf() && coords_.empty() && dim != 1 &&
      (kind_ == KernelKind::SobolevPeriodic || kind_ == KernelKind::BrownianBridge || kind_ == KernelKind::PeriodicSE)) {
    throw DimensionError("one-dimensional kernel applied to " + std::to_string(dim) + "-dimensional points");
  }
  for (const auto& child : children_) child.check_dim(dim);
}

double KernelSpec::operator()(Point x, Point y) const {
  switch (kind_) {
    case KernelKind::SquaredExponential:
      return std::exp(-squared_distance(coords_, x, y) / (2.0 * param_ * param_));
    case KernelKind::SobolevPeriodic: {
      const double t = fractional_part(scalar_input(coords_, x, "sobolev") - scalar_input(coords_, y, "sobolev"));
      const int s = order();
      const double sign = (s % 2 == 1) ? 1.0 : -1.0;  // (-1)^(s-1)
      double factorial = 1.0;
      for (int i = 2; i <= 2 * s; ++i) factorial *= i;
      return 1.0 + sign / factorial * bernoulli_polynomial(2 * s, t);
    }
    case KernelKind::BrownianBridge: {
      const double a = scalar_input(coords_, x, "brownian bridge");
      const double b = scalar_input(coords_, y, "brownian bridge");
      check_unit_interval(a);
      check_unit_interval(b);
      return std::min(a, b) - a * b;
    }
    case KernelKind::PeriodicSE: {
      const double t = scalar_input(coords_, x, "periodic") - scalar_input(coords_, y, "periodic");
      const double s = std::sin(t * std::numbers::pi * param_);
      return std::exp(-2.0 * s * s);
    }
    case KernelKind::Const:
      return param_;
    case KernelKind::Sum: {
      double acc = 0.0;
      for (const auto& child : children_) acc += child(x, y);
      return acc;
    }
    case KernelKind::Product:
    case KernelKind::TensorProduct: {
      double acc = 1.0;
      for (const auto& child : children_) acc *= child(x, y);
      return acc;
    }
  }
  return 0.0;
}

std::string KernelSpec::to_string() const {
  switch (kind_) {
    case KernelKind::SquaredExponential:
      return "se(sigma=" + format_double(param_) + ")" + coords_suffix(coords_);
    case KernelKind::SobolevPeriodic:
      return "sobolev(s=" + std::to_string(order()) + ")" + coords_suffix(coords_);
    case KernelKind::BrownianBridge:
      return "bb()" + coords_suffix(coords_);
    case KernelKind::PeriodicSE:
      return "periodic(p=" + format_double(param_) + ")" + coords_suffix(coords_);
    case KernelKind::Const:
      return "const(" + format_double(param_) + ")";
    case KernelKind::Sum:
    case KernelKind::Product: {
      const std::string op = kind_ == KernelKind::Sum ? " + " : " * ";
      std::string out = "(";
      for (std::size_t i = 0; i < children_.size(); ++i) out += (i ? op : "") + children_[i].to_string();
      return out + ")";
    }
    case KernelKind::TensorProduct: {
      std::string out = "tensor(";
      for (std::size_t i = 0; i < children_.size(); ++i) out += (i ? ", " : "") + children_[i].to_string();
      return out + ")";
    }
  }
  return {};
}

double eval_kernel(const KernelSpec& spec, Point x, Point y) {
  if (x.size() != y.size()) throw DimensionError("kernel arguments differ in dimension");
  spec.check_dim(static_cast<int>(x.size()));
  return spec(x, y);
}

namespace {

Eigen::MatrixXd se_gram(double sigma, const PointMatrix& X, const PointMatrix& Y) {
  const Eigen::VectorXd xn = X.rowwise().squaredNorm();
  const Eigen::VectorXd yn = Y.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (X * Y.transpose());
  d2.colwise() += xn;
  d2.rowwise() += yn.transpose();
  const double scale = -1.0 / (2.0 * sigma * sigma);
  return (d2.array().max(0.0) * scale).exp().matrix();
}

PointMatrix select_columns(const std::vector<int>& coords, const PointMatrix& X) {
  if (coords.empty()) return X;
  PointMatrix out(X.rows(), static_cast<Eigen::Index>(coords.size()));
  for (std::size_t c = 0; c < coords.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = X.col(coords[c]);
  return out;
}

Eigen::MatrixXd node_gram(const KernelSpec& spec, const PointMatrix& X, const PointMatrix& Y) {
  switch (spec.kind()) {
    case KernelKind::SquaredExponential:
      return se_gram(spec.parameter(), select_columns(spec.coords(), X), select_columns(spec.coords(), Y));
    case KernelKind::PeriodicSE: {
      if (spec.coords().empty() && X.cols() != 1) throw DimensionError("one-dimensional kernel needs @[i]");
      const Eigen::Index c = spec.coords().empty() ? 0 : spec.coords().front();
      const double w = std::numbers::pi * spec.parameter();
      const Eigen::ArrayXd tx = X.col(c).array() * w;
      const Eigen::ArrayXd ty = Y.col(c).array() * w;
      // sin(w(x - y)) = sin(wx) cos(wy) - cos(wx) sin(wy)
      const Eigen::MatrixXd S = tx.sin().matrix() * ty.cos().matrix().transpose() -
                                tx.cos().matrix() * ty.sin().matrix().transpose();
      return (-2.0 * S.array().square()).exp().matrix();
    }
    case KernelKind::Const:
      return Eigen::MatrixXd::Constant(X.rows(), Y.rows(), spec.parameter());
    case KernelKind::Sum: {
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(X.rows(), Y.rows());
      double offset = 0.0;
      for (const auto& child : spec.children()) {
        if (child.kind() == KernelKind::Const) {
          offset += child.parameter();
        } else {
          K += node_gram(child, X, Y);
        }
      }
      if (offset != 0.0) K.array() += offset;
      return K;
    }
    case KernelKind::Product:
    case KernelKind::TensorProduct: {
      const auto& kids = spec.children();
      Eigen::MatrixXd K = node_gram(kids.front(), X, Y);
      for (std::size_t i = 1; i < kids.size(); ++i) K.array() *= node_gram(kids[i], X, Y).array();
      return K;
    }
    default: {
      Eigen::MatrixXd K(X.rows(), Y.rows());
      for (Eigen::Index j = 0; j < Y.rows(); ++j) {
        const Point y = row_of(Y, j);
        for (Eigen::Index i = 0; i < X.rows(); ++i) K(i, j) = spec(row_of(X, i), y);
      }
      return K;
    }
  }
}

}  // namespace

Eigen::MatrixXd gram(const KernelSpec& spec, const PointMatrix& X, const PointMatrix& Y) {
  if (X.cols() != Y.cols()) throw DimensionError("gram arguments differ in dimension");
  spec.check_dim(static_cast<int>(X.cols()));
  return node_gram(spec, X, Y);
}

Eigen::MatrixXd gram(const KernelSpec& spec, const PointMatrix& X) {
  spec.check_dim(static_cast<int>(X.cols()));
  const Eigen::MatrixXd K = node_gram(spec, X, X);
  return (K + K.transpose()) * 0.5;
}

double fractional_part(double t) { return t - std::floor(t); }

double bernoulli_polynomial(int degree, double t) {
  const double t2 = t * t;
  switch (degree) {
    case 2:
      return t2 - t + 1.0 / 6.0;
    case 4:
      return t2 * t2 - 2.0 * t2 * t + t2 - 1.0 / 30.0;
    case 6:
      return t2 * t2 * t2 - 3.0 * t2 * t2 * t + 2.5 * t2 * t2 - 0.5 * t2 + 1.0 / 42.0;
    default:
      throw Error("Bernoulli polynomial of degree " + std::to_string(degree) + " not available");
  }
}

}  // namespace kpoisson
