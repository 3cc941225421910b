#pragma once

// Expression trees for surface-defining functions g(x,y) and, for frame
// coefficients and implicit defining functions, u(x,y,z).

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charpt/types.hpp"

namespace charpt {

enum class NodeKind { constant, var_x, var_y, var_z, add, sub, mul, div, pow, neg, call, antider_x };

// flat(s) = exp(-1/s^2) for s != 0, and flat(0) = 0 with every derivative 0.
enum class Builtin { sin, cos, exp, log, sqrt, atan, flat };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0; // constant
  int exponent = 0;   // pow
  Builtin fn = Builtin::sin;
  std::vector<Expr> children;
};

namespace expr {

Expr constant(double v);
Expr var_x();
Expr var_y();
Expr var_z();
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr base, int exponent);
Expr neg(Expr a);
Expr call(Builtin fn, Expr arg);
Expr antider_x(Expr integrand);

const char* builtin_name(Builtin fn);

} // namespace expr

struct ParseOptions {
  // Space expressions (frame coefficients, implicit u) may use z; surfaces may not.
  bool allow_z = false;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ['^' integer] | '-' factor
//   atom   := number | 'x' | 'y' | ident '(' expr ')' | '(' expr ')'
// Throws ParseError with the byte offset of the first bad token.
Expr parse_expr(std::string_view text, ParseOptions options = {});

// Fully parenthesised; parse_expr(print_expr(e)) is structurally equal to e.
std::string print_expr(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

bool depends_on_x(const Expr& e);
bool depends_on_y(const Expr& e);
bool depends_on_z(const Expr& e);
bool contains_builtin(const Expr& e, Builtin fn);
bool contains_antider(const Expr& e);

// Value of g at p. antider_x nodes are integrated from 0 to x by adaptive
// Gauss-Kronrod at absolute/relative tolerance 1e-12; failure to meet it throws
// QuadratureError. Domain violations throw DomainError.
double eval_point(const Expr& e, Point2 p);
double eval_point(const Expr& e, Point3 p);

// Splits a top-level sum into signed summands: a - (b + c) -> {a, -b, -c}.
std::vector<Expr> summands(const Expr& e);

} // namespace charpt
