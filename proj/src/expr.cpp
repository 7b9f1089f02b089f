#include "geomint/expr.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace geomint {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

class ExprParser {
public:
  ExprParser(std::string_view text, const std::vector<std::pair<std::string, int>>& vars,
             Expr& out)
      : text_(text), vars_(vars), out_(out) {}

  void run() {
    out_.root_ = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  int push(Expr::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  // sum := product (('+'|'-') product)*
  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = push({Expr::Op::Add, 0, -1, lhs, parse_product(), 0});
      else if (accept('-'))
        lhs = push({Expr::Op::Sub, 0, -1, lhs, parse_product(), 0});
      else
        return lhs;
    }
  }

  // product := unary (('*'|'/') unary)*
  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = push({Expr::Op::Mul, 0, -1, lhs, parse_unary(), 0});
      else if (accept('/'))
        lhs = push({Expr::Op::Div, 0, -1, lhs, parse_unary(), 0});
      else
        return lhs;
    }
  }

  // unary := '-' unary | power     (so -x^2 parses as -(x^2))
  int parse_unary() {
    if (accept('-')) return push({Expr::Op::Neg, 0, -1, parse_unary(), -1, 0});
    return parse_power();
  }

  // power := atom ['^' exponent]; exponent chains are right-associative and
  // collapse to a single literal, e.g. x^2^3 == x^(2^3) == x^8.
  int parse_power() {
    int base = parse_atom();
    if (accept('^')) {
      long e = parse_exponent();
      return push({Expr::Op::Pow, 0, -1, base, -1, static_cast<int>(e)});
    }
    return base;
  }

  long parse_exponent() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected non-negative integer exponent");
    long v = parse_integer();
    if (accept('^')) {
      long rhs = parse_exponent();
      long r = 1;
      for (long i = 0; i < rhs; ++i) {
        r *= v;
        if (r > 64) fail("exponent too large (limit 64)");
      }
      v = r;
    }
    if (v > 64) fail("exponent too large (limit 64)");
    return v;
  }

  long parse_integer() {
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) fail("integer literal too large");
      ++pos_;
    }
    return v;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_sum();
      skip_ws();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (ident_start(c)) return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to an identifier, not this literal
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    try {
      return push({Expr::Op::Const, std::stod(token), -1, -1, -1, 0});
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed numeric literal '" + token + "'");
    }
  }

  int parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    int idx = -1;
    for (const auto& [n, i] : vars_) {
      if (n == name) {
        idx = i;
        break;
      }
    }
    if (idx < 0) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    out_.max_var_ = std::max(out_.max_var_, idx);
    return push({Expr::Op::Var, 0, idx, -1, -1, 0});
  }

  std::string_view text_;
  const std::vector<std::pair<std::string, int>>& vars_;
  Expr& out_;
  std::size_t pos_ = 0;
};

Expr Expr::parse(std::string_view text, const std::vector<std::string>& varnames) {
  if (varnames.empty()) throw ValidationError("expression variable list is empty");
  std::set<std::string> seen(varnames.begin(), varnames.end());
  if (seen.size() != varnames.size())
    throw ValidationError("expression variable names are not distinct");
  std::vector<std::pair<std::string, int>> vars;
  for (std::size_t i = 0; i < varnames.size(); ++i)
    vars.emplace_back(varnames[i], static_cast<int>(i));
  return parse(text, vars);
}

Expr Expr::parse(std::string_view text, const std::vector<std::pair<std::string, int>>& vars) {
  if (vars.empty()) throw ValidationError("expression variable list is empty");
  std::set<std::string> seen;
  for (const auto& [n, i] : vars) {
    (void)i;
    if (!seen.insert(n).second)
      throw ValidationError("expression variable names are not distinct");
  }
  Expr e;
  ExprParser(text, vars, e).run();
  return e;
}

Expr Expr::constant(double value) {
  Expr e;
  e.nodes_.push_back({Op::Const, value, -1, -1, -1, 0});
  e.root_ = 0;
  return e;
}

double Expr::diff(std::span<const double> q, int var) const {
  std::vector<D1> dq(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) dq[i] = D1(q[i]);
  if (var >= 0 && var < static_cast<int>(q.size())) dq[static_cast<std::size_t>(var)].b = 1.0;
  return eval_t<D1>(dq).b;
}

std::string Expr::to_string(const std::vector<std::string>& varnames) const {
  if (root_ < 0) return "";
  std::string out;
  auto render = [&](auto&& self, int idx) -> void {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
      case Op::Const: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        out += buf;
        return;
      }
      case Op::Var:
        out += varnames.at(static_cast<std::size_t>(n.var));
        return;
      case Op::Neg:
        out += "(-";
        self(self, n.lhs);
        out += ')';
        return;
      case Op::Pow:
        out += '(';
        self(self, n.lhs);
        out += '^';
        out += std::to_string(n.exponent);
        out += ')';
        return;
      default: {
        const char* sym = n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : "/";
        out += '(';
        self(self, n.lhs);
        out += sym;
        self(self, n.rhs);
        out += ')';
        return;
      }
    }
  };
  render(render, root_);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const {
  auto eq = [&](auto&& self, int a, int b) -> bool {
    if (a < 0 || b < 0) return a == b;
    const Node& x = nodes_[static_cast<std::size_t>(a)];
    const Node& y = other.nodes_[static_cast<std::size_t>(b)];
    if (x.op != y.op) return false;
    switch (x.op) {
      case Op::Const:
        return x.value == y.value;
      case Op::Var:
        return x.var == y.var;
      case Op::Neg:
        return self(self, x.lhs, y.lhs);
      case Op::Pow:
        return x.exponent == y.exponent && self(self, x.lhs, y.lhs);
      default:
        return self(self, x.lhs, y.lhs) && self(self, x.rhs, y.rhs);
    }
  };
  return eq(eq, root_, other.root_);
}

}  // namespace geomint
