#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geomint/autodiff.hpp"
#include "geomint/errors.hpp"

namespace geomint {

/// Parsed arithmetic expression over named configuration variables.
///
/// Grammar (tightest first): integer powers `^` (right-assoc, literal
/// non-negative exponents only), unary minus, `*` `/`, `+` `-`, parentheses.
/// Evaluation is templated on the scalar so dual numbers flow through the
/// tree; derivatives are exact, never finite differences.
class Expr {
public:
  Expr() = default;

  /// Parses `text` against the variable names; throws ParseError with the
  /// byte offset of the offending token, or ValidationError for an empty /
  /// duplicated variable list.
  static Expr parse(std::string_view text, const std::vector<std::string>& varnames);

  /// Same, against an explicit name -> index table (several names may map to
  /// one index; the CLI uses this for the q1..qn / x,y,z aliases).
  static Expr parse(std::string_view text,
                    const std::vector<std::pair<std::string, int>>& vars);

  /// Convenience: an expression that is identically `value`.
  static Expr constant(double value);

  bool empty() const { return nodes_.empty(); }
  int max_var_index() const { return max_var_; }

  double eval(std::span<const double> q) const { return eval_t<double>(q); }

  /// Exact partial derivative with respect to variable `var`.
  double diff(std::span<const double> q, int var) const;

  template <class T>
  T eval_t(std::span<const T> q) const;

  /// Fully parenthesized round-trippable rendering.
  std::string to_string(const std::vector<std::string>& varnames) const;

  bool structurally_equal(const Expr& other) const;

private:
  enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Pow };

  struct Node {
    Op op;
    double value = 0.0;  // Const
    int var = -1;        // Var
    int lhs = -1;
    int rhs = -1;
    int exponent = 0;  // Pow
  };

  template <class T>
  T eval_node(int idx, std::span<const T> q) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int max_var_ = -1;

  friend class ExprParser;
};

template <class T>
T Expr::eval_node(int idx, std::span<const T> q) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::Const:
      return T(n.value);
    case Op::Var:
      return q[static_cast<std::size_t>(n.var)];
    case Op::Neg:
      return -eval_node<T>(n.lhs, q);
    case Op::Add:
      return eval_node<T>(n.lhs, q) + eval_node<T>(n.rhs, q);
    case Op::Sub:
      return eval_node<T>(n.lhs, q) - eval_node<T>(n.rhs, q);
    case Op::Mul:
      return eval_node<T>(n.lhs, q) * eval_node<T>(n.rhs, q);
    case Op::Div: {
      T num = eval_node<T>(n.lhs, q);
      T den = eval_node<T>(n.rhs, q);
      if (primal(den) == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case Op::Pow:
      return ipow(eval_node<T>(n.lhs, q), n.exponent);
  }
  throw Error("corrupt expression tree");
}

template <class T>
T Expr::eval_t(std::span<const T> q) const {
  if (root_ < 0) throw Error("evaluating empty expression");
  if (max_var_ >= static_cast<int>(q.size()))
    throw ValidationError("expression references variable index " +
                          std::to_string(max_var_) + " but only " +
                          std::to_string(q.size()) + " values supplied");
  return eval_node<T>(root_, q);
}

}  // namespace geomint
