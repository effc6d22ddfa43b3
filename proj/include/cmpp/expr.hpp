#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace cmpp::expr {

using Bindings = std::map<std::string, double, std::less<>>;

enum class Func { Ln, Exp, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Var, Param, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind;
  double value = 0.0;  // Number
  std::string name;    // Var / Param
  Func func = Func::Ln;
  NodePtr lhs;  // unary operand, left operand, call argument
  NodePtr rhs;
};

// Node factories. number() never produces a negative literal: negative values
// become Neg(Number) so that printing and reparsing gives the same tree.
NodePtr number(double v);
NodePtr variable(std::string name);
NodePtr parameter(std::string name);
NodePtr negate(NodePtr operand);
NodePtr binary(Node::Kind op, NodePtr lhs, NodePtr rhs);
NodePtr call(Func f, NodePtr arg);

bool structurally_equal(const Node& a, const Node& b);

// A real function of at most one free variable (`x` or `theta`) with named
// parameter bindings. Immutable; evaluation is pure.
class RealFn {
 public:
  RealFn();  // the constant 0
  RealFn(NodePtr root, Bindings params);

  // Parses `src`. Identifiers other than x, theta, ln, exp, sqrt must be keys
  // of `params` or members of `declared`; declared-but-unbound parameters
  // raise UnboundParameter at evaluation time.
  static RealFn parse(std::string_view src, Bindings params = {},
                      const std::set<std::string, std::less<>>& declared = {});

  static RealFn constant(double v);
  static RealFn identity(std::string var);

  double operator()(double point) const { return eval(point); }
  double eval(double point) const;

  // Free variable name, or nullopt for a constant expression.
  std::optional<std::string> variable() const;
  bool is_constant() const { return !variable().has_value(); }

  std::string print() const;
  const NodePtr& root() const noexcept { return root_; }
  const Bindings& params() const noexcept { return params_; }
  RealFn bind(const std::string& name, double value) const;

  friend bool operator==(const RealFn& a, const RealFn& b) {
    return structurally_equal(*a.root_, *b.root_) && a.params_ == b.params_;
  }

 private:
  NodePtr root_;
  Bindings params_;
};

std::string print(const Node& n);

// Evaluates a subtree that contains no free variable.
double eval_constant(const Node& n, const Bindings& params);
bool contains_variable(const Node& n);

// The function as  a*ln(v) + b*v + c  in its free variable v, when the tree
// has that shape (sums, constant multiples, ln of products/powers/exp of such
// terms). Used to recognise closed-form tilts and to simplify g.
struct AffineLogForm {
  double log_coef = 0.0;     // a
  double linear_coef = 0.0;  // b
  double constant = 0.0;     // c
};

std::optional<AffineLogForm> affine_log_form(const RealFn& f);

// Same shape, for ln(f) instead of f.
std::optional<AffineLogForm> log_of_affine_log_form(const RealFn& f);

}  // namespace cmpp::expr
