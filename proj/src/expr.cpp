#include "charpt/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "charpt/errors.hpp"
#include "charpt/gauss_kronrod.hpp"

namespace charpt {

namespace expr {

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

} // namespace

Expr constant(double v) {
  Node n;
  n.kind = NodeKind::constant;
  n.value = v;
  return make(std::move(n));
}

Expr var_x() {
  static const Expr x = [] {
    Node n;
    n.kind = NodeKind::var_x;
    return make(std::move(n));
  }();
  return x;
}

Expr var_y() {
  static const Expr y = [] {
    Node n;
    n.kind = NodeKind::var_y;
    return make(std::move(n));
  }();
  return y;
}

Expr var_z() {
  static const Expr z = [] {
    Node n;
    n.kind = NodeKind::var_z;
    return make(std::move(n));
  }();
  return z;
}

namespace {

Expr binary(NodeKind k, Expr a, Expr b) {
  Node n;
  n.kind = k;
  n.children = {std::move(a), std::move(b)};
  return make(std::move(n));
}

} // namespace

Expr add(Expr a, Expr b) { return binary(NodeKind::add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return binary(NodeKind::sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return binary(NodeKind::mul, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return binary(NodeKind::div, std::move(a), std::move(b)); }

Expr pow(Expr base, int exponent) {
  Node n;
  n.kind = NodeKind::pow;
  n.exponent = exponent;
  n.children = {std::move(base)};
  return make(std::move(n));
}

Expr neg(Expr a) {
  Node n;
  n.kind = NodeKind::neg;
  n.children = {std::move(a)};
  return make(std::move(n));
}

Expr call(Builtin fn, Expr arg) {
  Node n;
  n.kind = NodeKind::call;
  n.fn = fn;
  n.children = {std::move(arg)};
  return make(std::move(n));
}

Expr antider_x(Expr integrand) {
  Node n;
  n.kind = NodeKind::antider_x;
  n.children = {std::move(integrand)};
  return make(std::move(n));
}

const char* builtin_name(Builtin fn) {
  switch (fn) {
  case Builtin::sin: return "sin";
  case Builtin::cos: return "cos";
  case Builtin::exp: return "exp";
  case Builtin::log: return "log";
  case Builtin::sqrt: return "sqrt";
  case Builtin::atan: return "atan";
  case Builtin::flat: return "flat";
  }
  return "?";
}

} // namespace expr

namespace {

class Parser {
public:
  Parser(std::string_view text, ParseOptions opt) : s_(text), opt_(opt) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "', found end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  Expr parse_sum() {
    Expr lhs = parse_term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        lhs = expr::add(lhs, parse_term());
      } else if (peek('-')) {
        ++pos_;
        lhs = expr::sub(lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        lhs = expr::mul(lhs, parse_factor());
      } else if (peek('/')) {
        ++pos_;
        lhs = expr::div(lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (peek('-')) {
      ++pos_;
      skip_ws();
      // A minus sign directly on a numeric literal is part of the constant, so
      // printed negative constants read back as themselves.
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        const Expr lit = parse_number();
        if (peek('^')) {
          ++pos_;
          return expr::neg(expr::pow(lit, parse_integer_exponent()));
        }
        return expr::constant(-lit->value);
      }
      return expr::neg(parse_factor());
    }
    Expr base = parse_atom();
    if (peek('^')) {
      ++pos_;
      return expr::pow(base, parse_integer_exponent());
    }
    return base;
  }

  int parse_integer_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      negative = s_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) {
      if (pos_ >= s_.size()) throw ParseError("expected integer exponent, found end of input", pos_);
      throw ParseError("expected integer exponent", start);
    }
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      throw ParseError("non-integer exponent", start);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + digits, s_.data() + pos_, value);
    if (ec != std::errc()) throw ParseError("exponent out of range", start);
    return negative ? -value : value;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "x") return expr::var_x();
      if (id == "y") return expr::var_y();
      if (id == "z") {
        if (!opt_.allow_z) throw ParseError("unknown identifier 'z' (surfaces are graphs over x,y)", start);
        return expr::var_z();
      }
      if (id == "antider_x") {
        expect('(');
        Expr arg = parse_sum();
        expect(')');
        return expr::antider_x(arg);
      }
      static constexpr std::pair<std::string_view, Builtin> builtins[] = {
          {"sin", Builtin::sin},   {"cos", Builtin::cos},   {"exp", Builtin::exp}, {"log", Builtin::log},
          {"sqrt", Builtin::sqrt}, {"atan", Builtin::atan}, {"flat", Builtin::flat}};
      for (const auto& [name, fn] : builtins) {
        if (id == name) {
          expect('(');
          Expr arg = parse_sum();
          expect(')');
          return expr::call(fn, arg);
        }
      }
      throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) throw ParseError("malformed number", start);
    return expr::constant(v);
  }

  std::string_view s_;
  ParseOptions opt_;
  std::size_t pos_ = 0;
};

void print_into(const Expr& e, std::string& out) {
  switch (e->kind) {
  case NodeKind::constant: {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", e->value);
    out += buf;
    return;
  }
  case NodeKind::var_x: out += 'x'; return;
  case NodeKind::var_y: out += 'y'; return;
  case NodeKind::var_z: out += 'z'; return;
  case NodeKind::add:
  case NodeKind::sub:
  case NodeKind::mul:
  case NodeKind::div: {
    static constexpr char ops[] = {'+', '-', '*', '/'};
    out += '(';
    print_into(e->children[0], out);
    out += ' ';
    out += ops[static_cast<int>(e->kind) - static_cast<int>(NodeKind::add)];
    out += ' ';
    print_into(e->children[1], out);
    out += ')';
    return;
  }
  case NodeKind::pow:
    out += '(';
    print_into(e->children[0], out);
    out += ")^";
    out += std::to_string(e->exponent);
    return;
  case NodeKind::neg:
    out += "(-";
    print_into(e->children[0], out);
    out += ')';
    return;
  case NodeKind::call:
    out += expr::builtin_name(e->fn);
    out += '(';
    print_into(e->children[0], out);
    out += ')';
    return;
  case NodeKind::antider_x:
    out += "antider_x(";
    print_into(e->children[0], out);
    out += ')';
    return;
  }
}

template <class Pred>
bool any_node(const Expr& e, Pred pred) {
  if (pred(*e)) return true;
  for (const auto& c : e->children)
    if (any_node(c, pred)) return true;
  return false;
}

// ---- Point evaluation -------------------------------------------------------

double flat_value(double s) {
  if (s == 0.0) return 0.0;
  return std::exp(-1.0 / (s * s));
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite value in ") + what);
  return v;
}

double eval_node(const Node& n, double x, double y, double z);

double antider_value(const Node& n, double x, double y, double z) {
  if (x == 0.0) return 0.0;
  const Node& integrand = *n.children[0];
  auto f = [&](double t) { return eval_node(integrand, t, y, z); };
  gk::Options opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;
  const double a = std::min(0.0, x);
  const double b = std::max(0.0, x);
  auto r = gk::integrate<double>(f, a, b, opt);
  if (!r.converged) throw QuadratureError("antider_x: tolerance 1e-12 not met (error estimate " + std::to_string(r.error) + ")");
  return x > 0.0 ? r.value : -r.value;
}

double eval_node(const Node& n, double x, double y, double z) {
  switch (n.kind) {
  case NodeKind::constant: return n.value;
  case NodeKind::var_x: return x;
  case NodeKind::var_y: return y;
  case NodeKind::var_z: return z;
  case NodeKind::add: return eval_node(*n.children[0], x, y, z) + eval_node(*n.children[1], x, y, z);
  case NodeKind::sub: return eval_node(*n.children[0], x, y, z) - eval_node(*n.children[1], x, y, z);
  case NodeKind::mul: return eval_node(*n.children[0], x, y, z) * eval_node(*n.children[1], x, y, z);
  case NodeKind::div: {
    const double d = eval_node(*n.children[1], x, y, z);
    if (d == 0.0) throw DomainError("division by zero");
    return checked(eval_node(*n.children[0], x, y, z) / d, "division");
  }
  case NodeKind::pow: {
    const double b = eval_node(*n.children[0], x, y, z);
    if (n.exponent < 0 && b == 0.0) throw DomainError("negative power of zero");
    double r = 1.0;
    double base = n.exponent < 0 ? 1.0 / b : b;
    unsigned e = static_cast<unsigned>(n.exponent < 0 ? -n.exponent : n.exponent);
    while (e) {
      if (e & 1u) r *= base;
      e >>= 1u;
      if (e) base *= base;
    }
    return checked(r, "power");
  }
  case NodeKind::neg: return -eval_node(*n.children[0], x, y, z);
  case NodeKind::call: {
    const double a = eval_node(*n.children[0], x, y, z);
    switch (n.fn) {
    case Builtin::sin: return std::sin(a);
    case Builtin::cos: return std::cos(a);
    case Builtin::exp: return checked(std::exp(a), "exp");
    case Builtin::log:
      if (a <= 0.0) throw DomainError("log of non-positive value");
      return std::log(a);
    case Builtin::sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(a);
    case Builtin::atan: return std::atan(a);
    case Builtin::flat: return flat_value(a);
    }
    return 0.0;
  }
  case NodeKind::antider_x: return antider_value(n, x, y, z);
  }
  return 0.0;
}

void collect_summands(const Expr& e, bool negate, std::vector<Expr>& out) {
  if (e->kind == NodeKind::add || e->kind == NodeKind::sub) {
    collect_summands(e->children[0], negate, out);
    collect_summands(e->children[1], e->kind == NodeKind::sub ? !negate : negate, out);
    return;
  }
  if (e->kind == NodeKind::neg) {
    collect_summands(e->children[0], !negate, out);
    return;
  }
  out.push_back(negate ? expr::neg(e) : e);
}

} // namespace

Expr parse_expr(std::string_view text, ParseOptions options) { return Parser(text, options).parse(); }

std::string print_expr(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a->kind != b->kind || a->children.size() != b->children.size()) return false;
  switch (a->kind) {
  case NodeKind::constant:
    if (a->value != b->value) return false;
    break;
  case NodeKind::pow:
    if (a->exponent != b->exponent) return false;
    break;
  case NodeKind::call:
    if (a->fn != b->fn) return false;
    break;
  default: break;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  return true;
}

bool depends_on_x(const Expr& e) {
  return any_node(e, [](const Node& n) { return n.kind == NodeKind::var_x || n.kind == NodeKind::antider_x; });
}
bool depends_on_y(const Expr& e) {
  return any_node(e, [](const Node& n) { return n.kind == NodeKind::var_y; });
}
bool depends_on_z(const Expr& e) {
  return any_node(e, [](const Node& n) { return n.kind == NodeKind::var_z; });
}
bool contains_builtin(const Expr& e, Builtin fn) {
  return any_node(e, [fn](const Node& n) { return n.kind == NodeKind::call && n.fn == fn; });
}
bool contains_antider(const Expr& e) {
  return any_node(e, [](const Node& n) { return n.kind == NodeKind::antider_x; });
}

double eval_point(const Expr& e, Point2 p) { return checked(eval_node(*e, p.x, p.y, 0.0), "expression"); }

double eval_point(const Expr& e, Point3 p) { return checked(eval_node(*e, p.x, p.y, p.z), "expression"); }

std::vector<Expr> summands(const Expr& e) {
  std::vector<Expr> out;
  collect_summands(e, false, out);
  return out;
}

} // namespace charpt
