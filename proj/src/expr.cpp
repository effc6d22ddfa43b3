#include "cmpp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>

#include "cmpp/errors.hpp"

namespace cmpp::expr {

namespace {

constexpr std::string_view kVarX = "x";
constexpr std::string_view kVarTheta = "theta";

std::optional<Func> lookup_func(std::string_view name) {
  if (name == "ln") return Func::Ln;
  if (name == "exp") return Func::Exp;
  if (name == "sqrt") return Func::Sqrt;
  return std::nullopt;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Ln: return "ln";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Recursive-descent parser.
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom  := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view src, const Bindings& params,
         const std::set<std::string, std::less<>>& declared)
      : src_(src), params_(params), declared_(declared) {}

  NodePtr parse() {
    NodePtr n = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) throw SyntaxError(pos_, "unexpected character '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, std::string("expected '") + c + "' but input ended");
    if (src_[pos_] != c) throw SyntaxError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Node::Kind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Node::Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Node::Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Node::Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return negate(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) return binary(Node::Kind::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError(pos_, "unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) throw SyntaxError(start, "malformed number");
    return number(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (auto f = lookup_func(name)) {
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != '(')
        throw SyntaxError(pos_, "expected '(' after function " + std::string(name));
      ++pos_;
      NodePtr arg = parse_expr();
      expect(')');
      return call(*f, arg);
    }
    if (name == kVarX || name == kVarTheta) {
      if (!var_.empty() && var_ != name) throw UnknownIdentifier(start, std::string(name));
      var_ = name;
      return variable(std::string(name));
    }
    if (params_.contains(name) || declared_.contains(name)) return parameter(std::string(name));
    throw UnknownIdentifier(start, std::string(name));
  }

  std::string_view src_;
  const Bindings& params_;
  const std::set<std::string, std::less<>>& declared_;
  std::size_t pos_ = 0;
  std::string_view var_;
};

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub: return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div: return 2;
    case Node::Kind::Neg: return 3;
    case Node::Kind::Pow: return 4;
    default: return 5;
  }
}

void print_into(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(child, out);
  if (parens) out += ')';
}

void print_into(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number: out += format_number(n.value); return;
    case Node::Kind::Var:
    case Node::Kind::Param: out += n.name; return;
    case Node::Kind::Neg:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case Node::Kind::Call:
      out += func_name(n.func);
      out += '(';
      print_into(*n.lhs, out);
      out += ')';
      return;
    case Node::Kind::Pow:
      print_child(*n.lhs, precedence(*n.lhs) <= 4, out);
      out += '^';
      print_child(*n.rhs, precedence(*n.rhs) < 3, out);
      return;
    default: break;
  }
  const int p = precedence(n);
  const char* op = n.kind == Node::Kind::Add   ? " + "
                   : n.kind == Node::Kind::Sub ? " - "
                   : n.kind == Node::Kind::Mul ? "*"
                                               : "/";
  print_child(*n.lhs, precedence(*n.lhs) < p, out);
  out += op;
  print_child(*n.rhs, precedence(*n.rhs) <= p, out);
}

double eval_node(const Node& n, const Bindings& params, double point) {
  switch (n.kind) {
    case Node::Kind::Number: return n.value;
    case Node::Kind::Var: return point;
    case Node::Kind::Param: {
      auto it = params.find(n.name);
      if (it == params.end()) throw UnboundParameter(n.name);
      return it->second;
    }
    case Node::Kind::Neg: return -eval_node(*n.lhs, params, point);
    case Node::Kind::Add: return eval_node(*n.lhs, params, point) + eval_node(*n.rhs, params, point);
    case Node::Kind::Sub: return eval_node(*n.lhs, params, point) - eval_node(*n.rhs, params, point);
    case Node::Kind::Mul: return eval_node(*n.lhs, params, point) * eval_node(*n.rhs, params, point);
    case Node::Kind::Div: {
      const double num = eval_node(*n.lhs, params, point);
      const double den = eval_node(*n.rhs, params, point);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Node::Kind::Pow: {
      const double b = eval_node(*n.lhs, params, point);
      const double e = eval_node(*n.rhs, params, point);
      if (b == 0.0 && e < 0.0) throw DomainError("zero raised to a negative power");
      const double r = std::pow(b, e);
      if (std::isnan(r)) throw DomainError("negative base raised to a non-integer power");
      return r;
    }
    case Node::Kind::Call: {
      const double a = eval_node(*n.lhs, params, point);
      switch (n.func) {
        case Func::Ln:
          if (!(a > 0.0)) throw DomainError("ln of a nonpositive value");
          return std::log(a);
        case Func::Exp: return std::exp(a);
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative value");
          return std::sqrt(a);
      }
    }
  }
  throw DomainError("malformed expression tree");
}

std::optional<std::string> find_variable(const Node& n) {
  if (n.kind == Node::Kind::Var) return n.name;
  if (n.lhs)
    if (auto v = find_variable(*n.lhs)) return v;
  if (n.rhs)
    if (auto v = find_variable(*n.rhs)) return v;
  return std::nullopt;
}

AffineLogForm scaled(AffineLogForm f, double k) {
  return {f.log_coef * k, f.linear_coef * k, f.constant * k};
}

AffineLogForm combined(const AffineLogForm& a, const AffineLogForm& b, double sign) {
  return {a.log_coef + sign * b.log_coef, a.linear_coef + sign * b.linear_coef,
          a.constant + sign * b.constant};
}

std::optional<AffineLogForm> log_form(const Node& n, const Bindings& params);

std::optional<AffineLogForm> affine_form(const Node& n, const Bindings& params) {
  if (!contains_variable(n)) return AffineLogForm{0.0, 0.0, eval_constant(n, params)};
  switch (n.kind) {
    case Node::Kind::Var: return AffineLogForm{0.0, 1.0, 0.0};
    case Node::Kind::Neg:
      if (auto f = affine_form(*n.lhs, params)) return scaled(*f, -1.0);
      return std::nullopt;
    case Node::Kind::Add:
    case Node::Kind::Sub: {
      auto a = affine_form(*n.lhs, params);
      auto b = affine_form(*n.rhs, params);
      if (!a || !b) return std::nullopt;
      return combined(*a, *b, n.kind == Node::Kind::Add ? 1.0 : -1.0);
    }
    case Node::Kind::Mul: {
      if (!contains_variable(*n.lhs)) {
        if (auto f = affine_form(*n.rhs, params)) return scaled(*f, eval_constant(*n.lhs, params));
      } else if (!contains_variable(*n.rhs)) {
        if (auto f = affine_form(*n.lhs, params)) return scaled(*f, eval_constant(*n.rhs, params));
      }
      return std::nullopt;
    }
    case Node::Kind::Div: {
      if (contains_variable(*n.rhs)) return std::nullopt;
      const double k = eval_constant(*n.rhs, params);
      if (k == 0.0) return std::nullopt;
      if (auto f = affine_form(*n.lhs, params)) return scaled(*f, 1.0 / k);
      return std::nullopt;
    }
    case Node::Kind::Call:
      if (n.func == Func::Ln) return log_form(*n.lhs, params);
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::optional<AffineLogForm> log_form(const Node& n, const Bindings& params) {
  if (!contains_variable(n)) {
    const double v = eval_constant(n, params);
    if (!(v > 0.0)) return std::nullopt;
    return AffineLogForm{0.0, 0.0, std::log(v)};
  }
  switch (n.kind) {
    case Node::Kind::Var: return AffineLogForm{1.0, 0.0, 0.0};
    case Node::Kind::Mul:
    case Node::Kind::Div: {
      auto a = log_form(*n.lhs, params);
      auto b = log_form(*n.rhs, params);
      if (!a || !b) return std::nullopt;
      return combined(*a, *b, n.kind == Node::Kind::Mul ? 1.0 : -1.0);
    }
    case Node::Kind::Pow: {
      if (contains_variable(*n.rhs)) return std::nullopt;
      if (auto f = log_form(*n.lhs, params)) return scaled(*f, eval_constant(*n.rhs, params));
      return std::nullopt;
    }
    case Node::Kind::Call:
      if (n.func == Func::Exp) return affine_form(*n.lhs, params);
      if (n.func == Func::Sqrt) {
        if (auto f = log_form(*n.lhs, params)) return scaled(*f, 0.5);
      }
      return std::nullopt;
    default: return std::nullopt;
  }
}

}  // namespace

NodePtr number(double v) {
  if (std::signbit(v) && v != 0.0) return negate(number(-v));
  return std::make_shared<const Node>(Node{Node::Kind::Number, v == 0.0 ? 0.0 : v, {}, Func::Ln, nullptr, nullptr});
}

NodePtr variable(std::string name) {
  return std::make_shared<const Node>(Node{Node::Kind::Var, 0.0, std::move(name), Func::Ln, nullptr, nullptr});
}

NodePtr parameter(std::string name) {
  return std::make_shared<const Node>(Node{Node::Kind::Param, 0.0, std::move(name), Func::Ln, nullptr, nullptr});
}

NodePtr negate(NodePtr operand) {
  return std::make_shared<const Node>(Node{Node::Kind::Neg, 0.0, {}, Func::Ln, std::move(operand), nullptr});
}

NodePtr binary(Node::Kind op, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(Node{op, 0.0, {}, Func::Ln, std::move(lhs), std::move(rhs)});
}

NodePtr call(Func f, NodePtr arg) {
  return std::make_shared<const Node>(Node{Node::Kind::Call, 0.0, {}, f, std::move(arg), nullptr});
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Number: return std::memcmp(&a.value, &b.value, sizeof(double)) == 0;
    case Node::Kind::Var:
    case Node::Kind::Param: return a.name == b.name;
    case Node::Kind::Call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

RealFn::RealFn() : root_(number(0.0)) {}

RealFn::RealFn(NodePtr root, Bindings params) : root_(std::move(root)), params_(std::move(params)) {}

RealFn RealFn::parse(std::string_view src, Bindings params,
                     const std::set<std::string, std::less<>>& declared) {
  Parser parser(src, params, declared);
  NodePtr root = parser.parse();
  return RealFn(std::move(root), std::move(params));
}

RealFn RealFn::constant(double v) { return RealFn(number(v), {}); }

RealFn RealFn::identity(std::string var) { return RealFn(expr::variable(std::move(var)), {}); }

double RealFn::eval(double point) const { return eval_node(*root_, params_, point); }

std::optional<std::string> RealFn::variable() const { return find_variable(*root_); }

std::string RealFn::print() const { return expr::print(*root_); }

RealFn RealFn::bind(const std::string& name, double value) const {
  Bindings p = params_;
  p[name] = value;
  return RealFn(root_, std::move(p));
}

std::string print(const Node& n) {
  std::string out;
  print_into(n, out);
  return out;
}

double eval_constant(const Node& n, const Bindings& params) {
  return eval_node(n, params, std::numeric_limits<double>::quiet_NaN());
}

bool contains_variable(const Node& n) { return find_variable(n).has_value(); }

std::optional<AffineLogForm> affine_log_form(const RealFn& f) {
  return affine_form(*f.root(), f.params());
}

std::optional<AffineLogForm> log_of_affine_log_form(const RealFn& f) {
  return log_form(*f.root(), f.params());
}

}  // namespace cmpp::expr
