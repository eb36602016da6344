#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ouq/common.hpp"

namespace ouq {

/// Syntax error with the byte offset of the failure and the tokens that
/// would have been accepted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& detail)
      : Error("parse error at offset " + std::to_string(offset) + ": " + detail +
              " (expected " + expected + ")"),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Parse tree for arithmetic expressions over variables x1..xm.
class ExpressionAst {
 public:
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

  struct Node {
    Kind kind;
    double value = 0.0;        // Number
    std::size_t var = 0;       // Variable (0-based axis index)
    std::string func;          // Call
    std::vector<Node> args;    // operands
  };

  /// Parses `text`; `arity` is the number of input variables m (variable
  /// indices beyond m are rejected).
  static ExpressionAst parse(std::string_view text, std::size_t arity);

  double evaluate(const std::vector<double>& x) const { return eval_node(root_, x); }

  /// Highest variable index referenced, plus one (0 for constant expressions).
  std::size_t max_variable() const { return max_var_plus1(root_); }

  /// True when the expression references at most the single axis `i`.
  bool depends_only_on(std::size_t i) const { return only_axis(root_, i); }

  std::string to_string() const { return print(root_, 0); }

  bool operator==(const ExpressionAst& other) const { return node_eq(root_, other.root_); }

  const Node& root() const { return root_; }

 private:
  explicit ExpressionAst(Node root) : root_(std::move(root)) {}

  static double eval_node(const Node& n, const std::vector<double>& x) {
    switch (n.kind) {
      case Kind::Number: return n.value;
      case Kind::Variable:
        if (n.var >= x.size()) throw EvalError("expression references x" + std::to_string(n.var + 1) + " beyond point dimension");
        return x[n.var];
      case Kind::Negate: return -eval_node(n.args[0], x);
      case Kind::Add: return eval_node(n.args[0], x) + eval_node(n.args[1], x);
      case Kind::Sub: return eval_node(n.args[0], x) - eval_node(n.args[1], x);
      case Kind::Mul: return eval_node(n.args[0], x) * eval_node(n.args[1], x);
      case Kind::Div: {
        double d = eval_node(n.args[1], x);
        if (d == 0.0) throw DomainError("division by zero");
        return eval_node(n.args[0], x) / d;
      }
      case Kind::Pow: {
        double r = std::pow(eval_node(n.args[0], x), eval_node(n.args[1], x));
        if (std::isnan(r)) throw DomainError("pow out of domain");
        return r;
      }
      case Kind::Call: {
        double a = eval_node(n.args[0], x);
        if (n.func == "cos") return std::cos(a);
        if (n.func == "sin") return std::sin(a);
        if (n.func == "tanh") return std::tanh(a);
        if (n.func == "exp") return std::exp(a);
        if (n.func == "abs") return std::abs(a);
        if (n.func == "pos") return pos(a);
        if (n.func == "log") {
          if (!(a > 0.0)) throw DomainError("log of non-positive value");
          return std::log(a);
        }
        double b = eval_node(n.args[1], x);
        if (n.func == "max") return std::max(a, b);
        return std::min(a, b);  // "min"
      }
    }
    throw EvalError("corrupt expression node");
  }

  static std::size_t max_var_plus1(const Node& n) {
    std::size_t m = n.kind == Kind::Variable ? n.var + 1 : 0;
    for (const auto& a : n.args) m = std::max(m, max_var_plus1(a));
    return m;
  }

  static bool only_axis(const Node& n, std::size_t i) {
    if (n.kind == Kind::Variable && n.var != i) return false;
    for (const auto& a : n.args)
      if (!only_axis(a, i)) return false;
    return true;
  }

  static bool node_eq(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == Kind::Number && a.value != b.value) return false;
    if (a.kind == Kind::Variable && a.var != b.var) return false;
    if (a.kind == Kind::Call && a.func != b.func) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!node_eq(a.args[i], b.args[i])) return false;
    return true;
  }

  // Precedence levels used when printing with minimal parentheses:
  // 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atoms.
  static std::string print(const Node& n, int parent_prec) {
    auto wrap = [&](int prec, std::string s) {
      return prec < parent_prec ? "(" + std::move(s) + ")" : std::move(s);
    };
    switch (n.kind) {
      case Kind::Number: {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", n.value);
        return std::string(buf);
      }
      case Kind::Variable: return "x" + std::to_string(n.var + 1);
      case Kind::Negate: return wrap(3, "-" + print(n.args[0], 4));
      case Kind::Add: return wrap(1, print(n.args[0], 1) + " + " + print(n.args[1], 2));
      case Kind::Sub: return wrap(1, print(n.args[0], 1) + " - " + print(n.args[1], 2));
      case Kind::Mul: return wrap(2, print(n.args[0], 2) + "*" + print(n.args[1], 3));
      case Kind::Div: return wrap(2, print(n.args[0], 2) + "/" + print(n.args[1], 3));
      case Kind::Pow: return wrap(4, print(n.args[0], 5) + "^" + print(n.args[1], 4));
      case Kind::Call: {
        std::string s = n.func + "(" + print(n.args[0], 0);
        if (n.args.size() > 1) s += ", " + print(n.args[1], 0);
        return s + ")";
      }
    }
    return "?";
  }

  Node root_;

  friend class ExprParser;
};

/// Recursive-descent parser with standard precedence
/// (^ right-assoc > unary - > * / > + -).
class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t arity) : text_(text), arity_(arity) {}

  ExpressionAst::Node parse_all() {
    if (text_.empty()) throw ParseError(0, "expression", "empty input");
    auto n = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(pos_, "operator or end of input",
                       "unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  using Node = ExpressionAst::Node;
  using Kind = ExpressionAst::Kind;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Node parse_sum() {
    Node lhs = parse_product();
    for (;;) {
      if (eat('+')) {
        lhs = Node{Kind::Add, 0, 0, "", {std::move(lhs), parse_product()}};
      } else if (eat('-')) {
        lhs = Node{Kind::Sub, 0, 0, "", {std::move(lhs), parse_product()}};
      } else {
        return lhs;
      }
    }
  }

  Node parse_product() {
    Node lhs = parse_unary();
    for (;;) {
      if (eat('*')) {
        lhs = Node{Kind::Mul, 0, 0, "", {std::move(lhs), parse_unary()}};
      } else if (eat('/')) {
        lhs = Node{Kind::Div, 0, 0, "", {std::move(lhs), parse_unary()}};
      } else {
        return lhs;
      }
    }
  }

  Node parse_unary() {
    if (eat('-')) return Node{Kind::Negate, 0, 0, "", {parse_unary()}};
    return parse_power();
  }

  Node parse_power() {
    Node base = parse_atom();
    if (eat('^')) {
      // right-associative; exponent may itself carry a unary minus
      Node exp = eat('-') ? Node{Kind::Negate, 0, 0, "", {parse_power()}} : parse_power();
      return Node{Kind::Pow, 0, 0, "", {std::move(base), std::move(exp)}};
    }
    return base;
  }

  Node parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError(pos_, "number, variable, function or '('", "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Node n = parse_sum();
      if (!eat(')')) throw ParseError(pos_, "')'", "unbalanced parenthesis");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw ParseError(pos_, "number, variable, function or '('",
                     std::string("unexpected '") + c + "'");
  }

  Node parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(pos_, "number", "malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return Node{Kind::Number, v, 0, "", {}};
  }

  Node parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name.size() >= 2 && name[0] == 'x' && std::isdigit(static_cast<unsigned char>(name[1]))) {
      std::size_t idx = 0;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
          throw ParseError(start, "variable of the form xN", "bad variable '" + name + "'");
        idx = idx * 10 + static_cast<std::size_t>(name[i] - '0');
      }
      if (idx == 0 || idx > arity_)
        throw ParseError(start, "variable index in 1.." + std::to_string(arity_),
                         "unknown variable '" + name + "'");
      return Node{Kind::Variable, 0, idx - 1, "", {}};
    }
    static constexpr std::array<const char*, 7> kUnary = {"cos", "sin", "tanh", "exp",
                                                          "log", "abs", "pos"};
    const bool unary = std::find(kUnary.begin(), kUnary.end(), name) != kUnary.end();
    const bool binary = name == "max" || name == "min";
    if (!unary && !binary)
      throw ParseError(start, "cos|sin|tanh|exp|log|abs|pos|max|min or variable",
                       "unknown identifier '" + name + "'");
    if (!eat('(')) throw ParseError(pos_, "'('", "function '" + name + "' needs arguments");
    Node first = parse_sum();
    std::vector<Node> args;
    args.push_back(std::move(first));
    if (binary) {
      if (!eat(',')) throw ParseError(pos_, "','", "'" + name + "' takes two arguments");
      args.push_back(parse_sum());
    } else if (eat(',')) {
      throw ParseError(pos_ - 1, "')'", "'" + name + "' takes one argument");
    }
    if (!eat(')')) throw ParseError(pos_, "')'", "unbalanced call");
    return Node{Kind::Call, 0, 0, std::move(name), std::move(args)};
  }

  std::string_view text_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

inline ExpressionAst ExpressionAst::parse(std::string_view text, std::size_t arity) {
  return ExpressionAst(ExprParser(text, arity).parse_all());
}

}  // namespace ouq
