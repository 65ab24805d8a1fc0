#pragma once

#include "kpoisson/types.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace kpoisson {

/// Closed axis-aligned box S; every integral of an intensity is taken over it.
class Window {
 public:
  explicit Window(std::vector<std::pair<double, double>> bounds);

  static Window unit(int dim);
  /// Parses "lo,hi[,lo,hi...]".
  static Window parse(const std::string& text);

  int dim() const { return static_cast<int>(bounds_.size()); }
  double low(int d) const { return bounds_[d].first; }
  double high(int d) const { return bounds_[d].second; }
  double side(int d) const { return bounds_[d].second - bounds_[d].first; }
  double volume() const { return volume_; }
  const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }

  bool contains(Point x) const;
  Eigen::VectorXd center() const;
  std::string to_string() const;

  bool operator==(const Window& other) const { return bounds_ == other.bounds_; }

 private:
  std::vector<std::pair<double, double>> bounds_;
  double volume_;
};

/// Observed realization x_1..x_N inside a window; immutable after construction.
class PointPattern {
 public:
  /// Throws if a row lies outside the window or the column count differs from window.dim().
  PointPattern(Window window, PointMatrix points);
  explicit PointPattern(Window window);

  const Window& window() const { return window_; }
  const PointMatrix& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }
  int dim() const { return window_.dim(); }
  Point point(Eigen::Index i) const { return row_of(points_, i); }

  /// Subset by row index, order preserved.
  PointPattern subset(const std::vector<Eigen::Index>& rows) const;
  /// Concatenation of two patterns on the same window.
  PointPattern merged(const PointPattern& other) const;

 private:
  Window window_;
  PointMatrix points_;
};

/// Reads a CSV with one point per row. Rows are counted from 1 in error messages,
/// excluding the optional header.
PointPattern load_pattern(const std::filesystem::path& path, const Window& window);
PointPattern parse_pattern(std::istream& in, const Window& window);

void save_pattern(const PointPattern& pattern, const std::filesystem::path& path);
void write_pattern(const PointPattern& pattern, std::ostream& out);

/// Reads a plain numeric CSV (optional header) without window validation.
PointMatrix read_points_csv(std::istream& in, int expected_cols = -1);

std::string format_double(double value);

}  // namespace kpoisson
