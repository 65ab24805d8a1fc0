#include "kpoisson/kernels.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace kpoisson {

namespace {

// expr   := term ('+' term)*
// term   := factor ('*' factor)*
// factor := atom ('@' '[' int (',' int)* ']')?
// atom   := '(' expr ')' | 'tensor' '(' expr (',' expr)* ')' | name '(' args ')'
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  KernelSpec parse() {
    KernelSpec out = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("kernel expression '" + text_ + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a name");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || !std::isfinite(value)) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  KernelSpec expr() {
    std::vector<KernelSpec> terms{term()};
    while (accept('+')) terms.push_back(term());
    return KernelSpec::sum(std::move(terms));
  }

  KernelSpec term() {
    std::vector<KernelSpec> factors{factor()};
    while (accept('*')) factors.push_back(factor());
    return KernelSpec::product(std::move(factors));
  }

  KernelSpec factor() {
    KernelSpec out = atom();
    if (accept('@')) {
      expect('[');
      std::vector<int> coords;
      do {
        const double v = number();
        if (v < 0 || v != std::floor(v)) fail("coordinate indices must be nonnegative integers");
        coords.push_back(static_cast<int>(v));
      } while (accept(','));
      expect(']');
      try {
        out = out.with_coords(coords);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    return out;
  }

  std::map<std::string, double> arguments() {
    std::map<std::string, double> args;
    if (!accept('(')) return args;
    if (accept(')')) return args;
    do {
      skip_ws();
      std::string key = "value";
      if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
        key = identifier();
        expect('=');
      }
      args[key] = number();
    } while (accept(','));
    expect(')');
    return args;
  }

  static double take(std::map<std::string, double>& args, std::initializer_list<const char*> names) {
    for (const char* name : names) {
      if (auto it = args.find(name); it != args.end()) {
        const double v = it->second;
        args.erase(it);
        return v;
      }
    }
    return std::nan("");
  }

  KernelSpec atom() {
    if (accept('(')) {
      KernelSpec inner = expr();
      expect(')');
      return inner;
    }
    const std::string name = identifier();
    if (name == "tensor") {
      expect('(');
      std::vector<KernelSpec> kids{expr()};
      while (accept(',')) kids.push_back(expr());
      expect(')');
      try {
        return KernelSpec::tensor(std::move(kids));
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    auto args = arguments();
    try {
      KernelSpec out = leaf(name, args);
      if (!args.empty()) fail("unknown argument '" + args.begin()->first + "' for " + name);
      return out;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  KernelSpec leaf(const std::string& name, std::map<std::string, double>& args) {
    if (name == "se" || name == "rbf") {
      const double sigma = take(args, {"sigma", "value"});
      if (std::isnan(sigma)) fail("se needs sigma");
      return KernelSpec::squared_exponential(sigma);
    }
    if (name == "sobolev") {
      const double s = take(args, {"s", "value"});
      if (std::isnan(s) || s != std::floor(s)) fail("sobolev needs integer s");
      return KernelSpec::sobolev(static_cast<int>(s));
    }
    if (name == "bb" || name == "brownian_bridge") return KernelSpec::brownian_bridge();
    if (name == "periodic") {
      const double p = take(args, {"p", "value"});
      if (std::isnan(p)) fail("periodic needs p");
      return KernelSpec::periodic(p);
    }
    if (name == "const") {
      const double c = take(args, {"c", "value"});
      if (std::isnan(c)) fail("const needs a value");
      return KernelSpec::constant(c);
    }
    fail("unknown kernel '" + name + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

KernelSpec parse_kernel(const std::string& text) { return Parser(text).parse(); }

}  // namespace kpoisson
