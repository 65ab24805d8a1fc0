#include "kpoisson/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace kpoisson {

namespace {

constexpr const char* kMagic = "kpoisson-model";

void write_matrix(std::ostream& out, const char* tag, const Eigen::Ref<const Eigen::MatrixXd>& M) {
  out << tag << ' ' << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? "," : "") << format_double(M(i, j));
    out << '\n';
  }
}

void write_diagnostics(std::ostream& out, const FitDiagnostics& d) {
  out << "diagnostics objective=" << format_double(d.objective) << " iterations=" << d.iterations
      << " grad_norm=" << format_double(d.grad_norm) << " converged=" << d.converged
      << " line_search_failed=" << d.line_search_failed << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-empty line split into a keyword and the remainder.
  std::pair<std::string, std::string> line() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_no_;
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (text.find_first_not_of(" \t") == std::string::npos) continue;
      const auto space = text.find(' ');
      if (space == std::string::npos) return {text, ""};
      return {text.substr(0, space), text.substr(space + 1)};
    }
    fail("unexpected end of file");
  }

  std::string expect(const std::string& key) {
    auto [k, rest] = line();
    if (k != key) fail("expected '" + key + "', found '" + k + "'");
    return rest;
  }

  double number(const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail("bad number '" + text + "'");
    }
  }

  Eigen::MatrixXd matrix(const std::string& key) {
    std::istringstream head(expect(key));
    Eigen::Index rows = -1, cols = -1;
    if (!(head >> rows >> cols) || rows < 0 || cols < 0) fail("bad shape for " + key);
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::string text;
      if (!std::getline(in_, text)) fail("truncated " + key + " block");
      ++line_no_;
      std::istringstream fields(text);
      std::string field;
      Eigen::Index j = 0;
      while (std::getline(fields, field, ',')) {
        if (j >= cols) fail("too many values in " + key + " row");
        M(i, j++) = number(field);
      }
      if (j != cols) fail("too few values in " + key + " row");
    }
    return M;
  }

  std::map<std::string, std::string> fields(const std::string& key) {
    std::map<std::string, std::string> out;
    std::istringstream words(expect(key));
    std::string word;
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos) fail("expected name=value in " + key);
      out[word.substr(0, eq)] = word.substr(eq + 1);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

FitDiagnostics read_diagnostics(Reader& r) {
  auto f = r.fields("diagnostics");
  FitDiagnostics d;
  d.objective = r.number(f["objective"]);
  d.iterations = static_cast<int>(r.number(f["iterations"]));
  d.grad_norm = r.number(f["grad_norm"]);
  d.converged = f["converged"] == "1";
  d.line_search_failed = f["line_search_failed"] == "1";
  return d;
}

PointMatrix to_points(const Eigen::MatrixXd& M) { return PointMatrix(M); }

}  // namespace

void write_model(const IntensityPredictor& model, std::ostream& out) {
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  if (const auto* m = dynamic_cast<const IntensityModel*>(&model)) {
    out << "type rkhs\n";
    out << "window " << m->window().to_string() << '\n';
    out << "a " << format_double(m->a()) << '\n';
    out << "gamma " << format_double(m->gamma()) << '\n';
    const AdjustedKernelRep& rep = m->rep();
    if (rep.is_mercer()) {
      const MercerBasis& basis = rep.mercer().basis();
      out << "rep mercer\n";
      out << "factors " << basis.factors().size() << '\n';
      for (const auto& f : basis.factors()) {
        out << static_cast<int>(f.family) << ' ' << f.coord << ' ' << f.order << ' ' << format_double(f.sigma) << ' '
            << format_double(f.ell) << ' ' << f.truncation << '\n';
      }
      out << "budget " << basis.size() << '\n';
    } else {
      const NystromRep& ny = rep.nystrom();
      out << "rep nystrom\n";
      out << "kernel " << ny.kernel().to_string() << '\n';
      out << "landmarks strategy=" << to_string(ny.landmarks().strategy) << " seed=" << ny.landmarks().seed
          << " rank=" << ny.rank() << '\n';
      write_matrix(out, "landmark_points", ny.landmarks().points);
    }
    write_diagnostics(out, m->diagnostics());
    write_matrix(out, "points", m->training_points());
    write_matrix(out, "alpha", m->alpha());
  } else if (const auto* m = dynamic_cast<const NaiveModel*>(&model)) {
    out << "type naive\n";
    out << "window " << m->window().to_string() << '\n';
    out << "a " << format_double(m->a()) << '\n';
    out << "gamma " << format_double(m->gamma()) << '\n';
    out << "kernel " << m->kernel().to_string() << '\n';
    out << "landmarks strategy=" << to_string(m->landmarks().strategy) << " seed=" << m->landmarks().seed << '\n';
    write_matrix(out, "landmark_points", m->landmarks().points);
    write_diagnostics(out, m->diagnostics());
    write_matrix(out, "points", m->training_points());
    write_matrix(out, "alpha", m->alpha());
  } else if (const auto* m = dynamic_cast<const KIEModel*>(&model)) {
    out << "type kie\n";
    out << "window " << m->window().to_string() << '\n';
    out << "bandwidth " << format_double(m->bandwidth()) << '\n';
    out << "edge_correct " << m->edge_correct() << '\n';
    write_matrix(out, "points", m->training_points());
  } else {
    throw Error("model type cannot be serialized");
  }
  out << "end\n";
}

void save_model(const IntensityPredictor& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  write_model(model, out);
  if (!out) throw Error("failed writing model file " + path.string());
}

std::shared_ptr<const IntensityPredictor> read_model(std::istream& in) {
  Reader r(in);
  {
    auto [magic, version] = r.line();
    if (magic != kMagic) r.fail("not a kpoisson model file");
    if (version != std::to_string(kModelFormatVersion)) r.fail("unsupported model format version " + version);
  }
  const std::string type = r.expect("type");
  const Window window = Window::parse(r.expect("window"));
  std::shared_ptr<const IntensityPredictor> model;

  if (type == "rkhs") {
    const double a = r.number(r.expect("a"));
    const double gamma = r.number(r.expect("gamma"));
    const std::string kind = r.expect("rep");
    std::shared_ptr<const AdjustedKernelRep> rep;
    if (kind == "mercer") {
      const auto count = static_cast<std::size_t>(r.number(r.expect("factors")));
      std::vector<MercerFactor> factors;
      for (std::size_t i = 0; i < count; ++i) {
        auto [head, rest] = r.line();
        std::istringstream words(head + ' ' + rest);
        int family = 0;
        MercerFactor f{};
        if (!(words >> family >> f.coord >> f.order >> f.sigma >> f.ell >> f.truncation) || family < 0 || family > 2) {
          r.fail("bad mercer factor");
        }
        f.family = static_cast<MercerFamily>(family);
        factors.push_back(f);
      }
      const auto budget = static_cast<std::size_t>(r.number(r.expect("budget")));
      rep = std::make_shared<const AdjustedKernelRep>(MercerKernelRep(MercerBasis(std::move(factors), budget), a, gamma));
    } else if (kind == "nystrom") {
      const KernelSpec kernel = parse_kernel(r.expect("kernel"));
      auto f = r.fields("landmarks");
      const PointMatrix pts = to_points(r.matrix("landmark_points"));
      LandmarkSet landmarks{window, pts, parse_landmark_strategy(f["strategy"]),
                            static_cast<std::uint64_t>(std::stoull(f["seed"]))};
      const auto rank = static_cast<Eigen::Index>(r.number(f["rank"]));
      rep = std::make_shared<const AdjustedKernelRep>(
          nystrom_eigensystem(kernel, landmarks, rank).with_regularization(a, gamma));
    } else {
      r.fail("unknown rep '" + kind + "'");
    }
    const FitDiagnostics diag = read_diagnostics(r);
    const PointMatrix points = to_points(r.matrix("points"));
    const Eigen::MatrixXd alpha = r.matrix("alpha");
    if (alpha.cols() != 1 || alpha.rows() != points.rows()) r.fail("alpha does not match the training points");
    model = std::make_shared<IntensityModel>(window, points, Eigen::VectorXd(alpha.col(0)), rep, diag);
  } else if (type == "naive") {
    const double a = r.number(r.expect("a"));
    const double gamma = r.number(r.expect("gamma"));
    const KernelSpec kernel = parse_kernel(r.expect("kernel"));
    auto f = r.fields("landmarks");
    const PointMatrix pts = to_points(r.matrix("landmark_points"));
    LandmarkSet landmarks{window, pts, parse_landmark_strategy(f["strategy"]),
                          static_cast<std::uint64_t>(std::stoull(f["seed"]))};
    const FitDiagnostics diag = read_diagnostics(r);
    const PointMatrix points = to_points(r.matrix("points"));
    const Eigen::MatrixXd alpha = r.matrix("alpha");
    if (alpha.cols() != 1 || alpha.rows() != points.rows()) r.fail("alpha does not match the training points");
    model = std::make_shared<NaiveModel>(window, points, Eigen::VectorXd(alpha.col(0)), kernel, landmarks, a, gamma, diag);
  } else if (type == "kie") {
    const double h = r.number(r.expect("bandwidth"));
    const bool edge = r.expect("edge_correct") == "1";
    model = std::make_shared<KIEModel>(window, to_points(r.matrix("points")), h, edge);
  } else {
    r.fail("unknown model type '" + type + "'");
  }
  r.expect("end");
  return model;
}

std::shared_ptr<const IntensityPredictor> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace kpoisson
