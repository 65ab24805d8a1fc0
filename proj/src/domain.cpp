#include "kpoisson/domain.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kpoisson {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_number(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Window::Window(std::vector<std::pair<double, double>> bounds) : bounds_(std::move(bounds)), volume_(1.0) {
  if (bounds_.empty()) throw DimensionError("window must have at least one dimension");
  for (std::size_t d = 0; d < bounds_.size(); ++d) {
    const auto [lo, hi] = bounds_[d];
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw Error("window dimension " + std::to_string(d) + " needs finite low < high");
    }
    volume_ *= hi - lo;
  }
}

Window Window::unit(int dim) {
  if (dim < 1) throw DimensionError("window dimension must be positive");
  return Window(std::vector<std::pair<double, double>>(dim, {0.0, 1.0}));
}

Window Window::parse(const std::string& text) {
  const auto fields = split_fields(text);
  if (fields.empty() || fields.size() % 2 != 0) {
    throw ParseError("window '" + text + "' must list lo,hi pairs");
  }
  std::vector<std::pair<double, double>> bounds;
  for (std::size_t i = 0; i < fields.size(); i += 2) {
    double lo = 0.0;
    double hi = 0.0;
    if (!parse_number(fields[i], lo) || !parse_number(fields[i + 1], hi)) {
      throw ParseError("window '" + text + "' has a non-numeric bound");
    }
    bounds.emplace_back(lo, hi);
  }
  return Window(std::move(bounds));
}

bool Window::contains(Point x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int d = 0; d < dim(); ++d) {
    if (!(x[d] >= bounds_[d].first && x[d] <= bounds_[d].second)) return false;
  }
  return true;
}

Eigen::VectorXd Window::center() const {
  Eigen::VectorXd c(dim());
  for (int d = 0; d < dim(); ++d) c(d) = 0.5 * (bounds_[d].first + bounds_[d].second);
  return c;
}

std::string Window::to_string() const {
  std::string out;
  for (const auto& [lo, hi] : bounds_) {
    if (!out.empty()) out += ',';
    out += format_double(lo) + ',' + format_double(hi);
  }
  return out;
}

PointPattern::PointPattern(Window window, PointMatrix points)
    : window_(std::move(window)), points_(std::move(points)) {
  if (points_.rows() > 0 && points_.cols() != window_.dim()) {
    throw DimensionError("points have " + std::to_string(points_.cols()) + " columns, window has " +
                         std::to_string(window_.dim()) + " dimensions");
  }
  if (points_.rows() == 0) points_.resize(0, window_.dim());
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (!window_.contains(row_of(points_, i))) {
      throw Error("point " + std::to_string(i) + " lies outside the window");
    }
  }
}

PointPattern::PointPattern(Window window) : window_(std::move(window)), points_(0, window_.dim()) {}

PointPattern PointPattern::subset(const std::vector<Eigen::Index>& rows) const {
  PointMatrix out(static_cast<Eigen::Index>(rows.size()), dim());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points_.row(rows[r]);
  return PointPattern(window_, std::move(out));
}

PointPattern PointPattern::merged(const PointPattern& other) const {
  if (!(other.window() == window_)) throw Error("cannot merge patterns on different windows");
  PointMatrix out(size() + other.size(), dim());
  out.topRows(size()) = points_;
  out.bottomRows(other.size()) = other.points();
  return PointPattern(window_, std::move(out));
}

PointMatrix read_points_csv(std::istream& in, int expected_cols) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first_content = true;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (first_content) {
      first_content = false;
      double probe = 0.0;
      if (!parse_number(fields.front(), probe)) continue;  // header
    }
    ++data_row;
    if (expected_cols > 0 && static_cast<int>(fields.size()) != expected_cols) {
      throw ParseError("row " + std::to_string(data_row) + ": expected " + std::to_string(expected_cols) +
                       " columns, found " + std::to_string(fields.size()));
    }
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw ParseError("row " + std::to_string(data_row) + ": inconsistent column count");
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_number(fields[c], values[c])) {
        throw ParseError("row " + std::to_string(data_row) + ": malformed number '" + trim(fields[c]) + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  const Eigen::Index cols = rows.empty() ? std::max(expected_cols, 0) : static_cast<Eigen::Index>(rows.front().size());
  PointMatrix out(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return out;
}

PointPattern parse_pattern(std::istream& in, const Window& window) {
  PointMatrix points = read_points_csv(in, window.dim());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (!window.contains(row_of(points, i))) {
      throw ParseError("row " + std::to_string(i + 1) + ": point lies outside the window");
    }
  }
  return PointPattern(window, std::move(points));
}

PointPattern load_pattern(const std::filesystem::path& path, const Window& window) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return parse_pattern(in, window);
}

std::string format_double(double value) {
  std::ostringstream ss;
  ss << std::setprecision(17) << value;
  return ss.str();
}

void write_pattern(const PointPattern& pattern, std::ostream& out) {
  for (int d = 0; d < pattern.dim(); ++d) out << (d ? ",x" : "x") << d;
  out << '\n';
  for (Eigen::Index i = 0; i < pattern.size(); ++i) {
    for (int d = 0; d < pattern.dim(); ++d) {
      if (d) out << ',';
      out << format_double(pattern.points()(i, d));
    }
    out << '\n';
  }
}

void save_pattern(const PointPattern& pattern, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_pattern(pattern, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace kpoisson
