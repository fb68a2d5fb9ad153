#include "sdreal/exprdsl.hpp"

#include <cctype>
#include <vector>

#include "sdreal/digitsys.hpp"

namespace sdreal {

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  FuncExpr parse_all() {
    FuncExpr e = func();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "' after expression");
    return e;
  }

 private:
  FuncExpr func() {
    FuncExpr acc = atom();
    for (;;) {
      skip_ws();
      std::size_t save = pos_;
      if (word() != "o") {
        pos_ = save;
        return acc;
      }
      acc = FuncExpr::comp(std::move(acc), atom());
    }
  }

  FuncExpr atom() {
    skip_ws();
    std::size_t start = pos_;
    if (peek() == '(') {
      ++pos_;
      FuncExpr e = func();
      expect(')');
      return e;
    }
    std::string name = word();
    if (name.empty()) fail(pos_ < src_.size() ? "expected a function, found '" + std::string(1, src_[pos_]) + "'"
                                              : "expected a function, found end of input");
    if (name == "pow") {
      expect('(');
      FuncExpr base = func();
      expect(',');
      std::size_t n = natural();
      expect(')');
      return FuncExpr::pow(std::move(base), n);
    }
    std::vector<Rational> args;
    std::size_t arity = name == "lin" ? 2 : name == "quad" ? 3 : name == "logistic" ? 1 : 0;
    if (arity == 0) fail_at(start, "unknown function '" + name + "'");
    expect('(');
    for (std::size_t i = 0; i < arity; ++i) {
      if (i > 0) expect(',');
      args.push_back(rational());
    }
    expect(')');
    try {
      if (name == "lin") return FuncExpr::lin(args[0], args[1]);
      if (name == "quad") return FuncExpr::quad(args[0], args[1], args[2]);
      return FuncExpr::logistic(args[0]);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at position " + std::to_string(start + 1));
    }
  }

  Rational rational() {
    skip_ws();
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    if (!digits()) fail_at(start, found("a rational"));
    if (peek() == '/') {
      ++pos_;
      std::size_t den = pos_;
      if (!digits()) fail_at(den, found("a denominator"));
    } else if (peek() == '.') {
      ++pos_;
      std::size_t frac = pos_;
      if (!digits()) fail_at(frac, found("decimal digits"));
    }
    try {
      return parse_rational(src_.substr(start, pos_ - start));
    } catch (const std::invalid_argument& e) {
      fail_at(start, e.what());
    }
  }

  std::size_t natural() {
    skip_ws();
    std::size_t start = pos_;
    if (!digits()) fail_at(start, found("a positive integer"));
    std::string_view text = src_.substr(start, pos_ - start);
    if (text.size() > 7 || std::stoul(std::string(text)) == 0 || std::stoul(std::string(text)) > kMaxPowExponent)
      fail_at(start, "exponent must be between 1 and " + std::to_string(kMaxPowExponent));
    return std::stoul(std::string(text));
  }

  bool digits() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return pos_ > start;
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(found("'" + std::string(1, c) + "'"));
    ++pos_;
  }

  std::string found(const std::string& wanted) const {
    if (pos_ >= src_.size()) return "expected " + wanted + ", found end of input";
    return "expected " + wanted + ", found '" + std::string(1, src_[pos_]) + "'";
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_ + 1, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const { throw ParseError(at + 1, msg); }

  std::string_view src_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

FuncExpr parse(std::string_view src) { return Parser(src).parse_all(); }

CTree to_tree(const FuncExpr& e) {
  return std::visit(Overloaded{
                        [](const expr::Lin& n) { return lin_tree({n.u}, n.v); },
                        [](const expr::Quad& n) { return quad_tree(n.u, n.v, n.w); },
                        [](const expr::Logistic& n) { return logistic_tree(n.a); },
                        [](const expr::Comp& n) { return compose(to_tree(*n.outer), {to_tree(*n.inner)}); },
                        [](const expr::Pow& n) { return iterate_tree(to_tree(*n.base), n.n); },
                    },
                    e.node());
}

}  // namespace sdreal
