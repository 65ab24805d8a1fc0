#include "kpoisson/nystrom.hpp"
#include "kpoisson/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kpoisson {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                           73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

Eigen::Index integer_root(Eigen::Index m, int dim) {
  auto k = static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(m), 1.0 / dim)));
  for (Eigen::Index c = std::max<Eigen::Index>(1, k - 1); c <= k + 1; ++c) {
    Eigen::Index p = 1;
    for (int d = 0; d < dim; ++d) p *= c;
    if (p == m) return c;
  }
  return -1;
}

// Top eigenpairs of a symmetric PSD matrix by randomized subspace iteration
// followed by Rayleigh-Ritz.
void randomized_eigs(const Eigen::MatrixXd& K, Eigen::Index rank, std::uint64_t seed, Eigen::VectorXd& values,
                     Eigen::MatrixXd& vectors) {
  const Eigen::Index m = K.rows();
  const Eigen::Index width = std::min(m, rank + 10);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd basis(m, width);
  for (Eigen::Index j = 0; j < width; ++j)
    for (Eigen::Index i = 0; i < m; ++i) basis(i, j) = normal(rng);
  constexpr int kPowerIterations = 4;
  for (int it = 0; it <= kPowerIterations; ++it) {
    Eigen::MatrixXd Y = K.selfadjointView<Eigen::Lower>() * basis;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    basis = qr.householderQ() * Eigen::MatrixXd::Identity(m, width);
  }
  const Eigen::MatrixXd small = basis.transpose() * (K.selfadjointView<Eigen::Lower>() * basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (small + small.transpose()));
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  values = es.eigenvalues();
  vectors = basis * es.eigenvectors();
}

}  // namespace

std::string to_string(LandmarkStrategy strategy) {
  switch (strategy) {
    case LandmarkStrategy::Grid:
      return "grid";
    case LandmarkStrategy::UniformMC:
      return "uniform-mc";
    case LandmarkStrategy::HaltonQMC:
      return "halton-qmc";
  }
  return {};
}

LandmarkStrategy parse_landmark_strategy(const std::string& text) {
  if (text == "grid") return LandmarkStrategy::Grid;
  if (text == "uniform-mc" || text == "mc") return LandmarkStrategy::UniformMC;
  if (text == "halton-qmc" || text == "halton") return LandmarkStrategy::HaltonQMC;
  throw ParseError("unknown landmark strategy '" + text + "'");
}

LandmarkSet make_landmarks(const Window& window, Eigen::Index m, LandmarkStrategy strategy, std::uint64_t seed) {
  if (m < 2) throw Error("landmark count must be >= 2");
  const int D = window.dim();
  PointMatrix pts(m, D);
  switch (strategy) {
    case LandmarkStrategy::Grid: {
      const Eigen::Index k = integer_root(m, D);
      if (k < 2) {
        throw Error("grid landmarks need m = k^" + std::to_string(D) + " with k >= 2, got m = " + std::to_string(m));
      }
      for (Eigen::Index n = 0; n < m; ++n) {
        Eigen::Index rest = n;
        for (int d = D - 1; d >= 0; --d) {
          const Eigen::Index i = rest % k;
          rest /= k;
          pts(n, d) = window.low(d) + (static_cast<double>(i) + 0.5) * window.side(d) / static_cast<double>(k);
        }
      }
      break;
    }
    case LandmarkStrategy::UniformMC: {
      Rng rng(seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (Eigen::Index n = 0; n < m; ++n)
        for (int d = 0; d < D; ++d) pts(n, d) = window.low(d) + unif(rng) * window.side(d);
      break;
    }
    case LandmarkStrategy::HaltonQMC: {
      if (D > static_cast<int>(std::size(kPrimes))) throw Error("halton landmarks support up to 36 dimensions");
      for (Eigen::Index n = 0; n < m; ++n)
        for (int d = 0; d < D; ++d)
          pts(n, d) = window.low(d) + radical_inverse(static_cast<std::uint64_t>(n + 1), kPrimes[d]) * window.side(d);
      break;
    }
  }
  return LandmarkSet{window, std::move(pts), strategy, seed};
}

LandmarkSet default_landmarks(const Window& window, std::uint64_t seed) {
  switch (window.dim()) {
    case 1:
      return make_landmarks(window, 100, LandmarkStrategy::Grid, seed);
    case 2:
      return make_landmarks(window, 400, LandmarkStrategy::Grid, seed);
    case 3:
      return make_landmarks(window, 1000, LandmarkStrategy::Grid, seed);
    default:
      return make_landmarks(window, 200, LandmarkStrategy::UniformMC, seed);
  }
}

NystromRep::NystromRep(LandmarkSet landmarks, KernelSpec kernel, Eigen::VectorXd eigenvalues,
                       Eigen::MatrixXd eigenvectors)
    : landmarks_(std::move(landmarks)), kernel_(std::move(kernel)), lambda_(std::move(eigenvalues)), Q_(std::move(eigenvectors)) {
  if (Q_.cols() != lambda_.size() || Q_.rows() != landmarks_.size()) throw DimensionError("nystrom eigensystem shape mismatch");
}

double NystromRep::a() const {
  require_regularized();
  return regularization_->a;
}

double NystromRep::gamma() const {
  require_regularized();
  return regularization_->gamma;
}

void NystromRep::require_regularized() const {
  if (!regularization_) throw Error("nystrom representation has no (a, gamma) attached");
}

Eigen::VectorXd NystromRep::operator_eigenvalues() const {
  return lambda_ * (volume() / static_cast<double>(landmarks_.size()));
}

Eigen::MatrixXd NystromRep::eigenfunctions(const PointMatrix& X) const {
  const double scale = std::sqrt(static_cast<double>(landmarks_.size()) / volume());
  const Eigen::MatrixXd Kxu = kpoisson::gram(kernel_, X, landmarks_.points);
  return (Kxu * Q_) * (scale * lambda_.cwiseInverse()).asDiagonal();
}

NystromRep NystromRep::with_regularization(double a, double gamma) const {
  if (!(a > 0.0) || !(gamma > 0.0) || !std::isfinite(a) || !std::isfinite(gamma)) {
    throw Error("nystrom regularization needs a > 0 and gamma > 0");
  }
  NystromRep out = *this;
  const double c = a * volume() / static_cast<double>(landmarks_.size());
  const Eigen::ArrayXd filter = c * lambda_.array().square() + gamma * lambda_.array();
  out.regularization_ = Regularization{a, gamma, filter.rsqrt().matrix()};
  return out;
}

Eigen::MatrixXd NystromRep::primal_feature_matrix(const PointMatrix& X) const {
  require_regularized();
  return primal_from_projected(projected(X));
}

Eigen::MatrixXd NystromRep::projected(const PointMatrix& X) const {
  return kpoisson::gram(kernel_, X, landmarks_.points) * Q_;
}

Eigen::MatrixXd NystromRep::primal_from_projected(const Eigen::MatrixXd& P) const {
  require_regularized();
  if (P.cols() != Q_.cols()) throw DimensionError("projected features have the wrong rank");
  return P * regularization_->inv_sqrt_filter.asDiagonal();
}

Eigen::VectorXd NystromRep::primal_features(Point x) const {
  PointMatrix X(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t d = 0; d < x.size(); ++d) X(0, static_cast<Eigen::Index>(d)) = x[d];
  return primal_feature_matrix(X).row(0).transpose();
}

Eigen::MatrixXd NystromRep::gram(const PointMatrix& X, const PointMatrix& Y) const {
  return primal_feature_matrix(X) * primal_feature_matrix(Y).transpose();
}

Eigen::MatrixXd NystromRep::gram(const PointMatrix& X) const {
  const Eigen::MatrixXd F = primal_feature_matrix(X);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(X.rows(), X.rows());
  K.selfadjointView<Eigen::Lower>().rankUpdate(F);
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  return K;
}

double NystromRep::operator()(Point x, Point y) const { return primal_features(x).dot(primal_features(y)); }

NystromRep nystrom_eigensystem(const KernelSpec& kernel, const LandmarkSet& landmarks, Eigen::Index rank) {
  const Eigen::Index m = landmarks.size();
  if (rank < 1) throw Error("nystrom rank must be >= 1");
  rank = std::min(rank, m);
  const Eigen::MatrixXd K = gram(kernel, landmarks.points);

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (m > 400 && rank * 5 <= m) {
    randomized_eigs(K, rank, derive_seed(landmarks.seed, 0x4e5953), values, vectors);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success) throw Error("eigendecomposition of landmark Gram matrix failed");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }
  // Eigen returns ascending order.
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return values(l) > values(r); });
  const double top = values(order.front());
  if (!(top > 0.0)) throw Error("all landmark Gram eigenvalues are non-positive");
  Eigen::Index keep = 0;
  while (keep < std::min(rank, n) && values(order[static_cast<std::size_t>(keep)]) > kEigenvalueFloor * top) ++keep;

  Eigen::VectorXd lambda(keep);
  Eigen::MatrixXd Q(m, keep);
  for (Eigen::Index i = 0; i < keep; ++i) {
    lambda(i) = values(order[static_cast<std::size_t>(i)]);
    Q.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  return NystromRep(landmarks, kernel, std::move(lambda), std::move(Q));
}

NystromRep attach_regularization(const NystromRep& rep, double a, double gamma) {
  return rep.with_regularization(a, gamma);
}

Eigen::MatrixXd ktilde_gram_nystrom(const NystromRep& rep, const PointMatrix& X, const PointMatrix& Y) {
  if (X.cols() != rep.landmarks().points.cols() || Y.cols() != X.cols()) {
    throw DimensionError("query points and landmarks differ in dimension");
  }
  return rep.gram(X, Y);
}

Eigen::VectorXd primal_features(const NystromRep& rep, Point x) {
  if (static_cast<Eigen::Index>(x.size()) != rep.landmarks().points.cols()) {
    throw DimensionError("query point and landmarks differ in dimension");
  }
  return rep.primal_features(x);
}

}  // namespace kpoisson
