#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aepn/color.hpp"

namespace aepn {

enum class ExprOp {
  Literal,
  Var,
  Field,   // args[0].name
  Time,    // time(name)
  Now,
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Min,
  Max,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  If,      // args: condition, then, else
  Record,  // field_names()[i] = args[i]
  Ratio,
};

// Immutable expression tree used for guards, output arcs and rewards.
// Copies share structure.
class Expr {
 public:
  Expr() = default;

  static Expr literal(ColorValue v);
  static Expr var(std::string name);
  static Expr field(Expr record, std::string name);
  static Expr time_of(std::string var);
  static Expr now();
  static Expr unary(ExprOp op, Expr arg);
  static Expr binary(ExprOp op, Expr lhs, Expr rhs);
  static Expr if_then_else(Expr cond, Expr then_branch, Expr else_branch);
  static Expr record(std::vector<std::string> names, std::vector<Expr> values);

  bool empty() const noexcept { return node_ == nullptr; }
  ExprOp op() const { return node().op; }
  const ColorValue& literal_value() const { return node().literal; }
  // Variable name for Var/Time, field name for Field.
  const std::string& name() const { return node().name; }
  const std::vector<std::string>& field_names() const { return node().field_names; }
  const std::vector<Expr>& args() const { return node().args; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    ExprOp op = ExprOp::Literal;
    ColorValue literal;
    std::string name;
    std::vector<std::string> field_names;
    std::vector<Expr> args;
  };
  const Node& node() const;
  static Expr make(Node n);

  std::shared_ptr<const Node> node_;
};

// Symbols known to the parser; literal symbols outside the set are rejected.
using SymbolTable = std::set<std::string>;

// Throws ParseError (with byte position) on bad syntax or undeclared symbols.
Expr parse_expr(std::string_view text, const SymbolTable* symbols = nullptr);
// Canonical concrete syntax; parse_expr(unparse(e)) == e.
std::string unparse(const Expr& e);

// Variables referenced directly or through time(v).
std::set<std::string> free_vars(const Expr& e);
bool uses_now(const Expr& e);
bool uses_time(const Expr& e);

// --- evaluation --------------------------------------------------------------

// A variable bound to a color, with the timestamp of the token it came from.
struct VarBinding {
  std::string name;
  ColorValue value;
  Tick time = 0;

  friend bool operator==(const VarBinding&, const VarBinding&) = default;
};
using VarEnv = std::span<const VarBinding>;

// Colors, or a real produced by ratio() and arithmetic over it.
using ExprValue = std::variant<ColorValue, double>;

// Throws EvalError on unbound variables, kind mismatches and division by zero.
ExprValue eval(const Expr& e, VarEnv env, Tick clock);
ColorValue eval_color(const Expr& e, VarEnv env, Tick clock);
bool eval_bool(const Expr& e, VarEnv env, Tick clock);
// Integers are promoted.
double eval_real(const Expr& e, VarEnv env, Tick clock);

std::string to_string(const ExprValue& v);

// --- static typing -----------------------------------------------------------

struct ExprType {
  enum class Kind { Int, Bool, Symbol, Record, Real };

  Kind kind = Kind::Int;
  std::vector<std::pair<std::string, ExprType>> fields;

  static ExprType of(const ColorSet& cs);
  static ExprType scalar(Kind k) { return ExprType{k, {}}; }
  // Structural compatibility with a colorset (membership is checked at run time).
  bool fits(const ColorSet& cs) const;
  std::string to_string() const;
};

struct TypeRules {
  bool allow_now = false;
  bool allow_time = false;
};

// Throws TypeError describing the first problem found.
ExprType infer_type(const Expr& e, const std::map<std::string, ExprType>& vars, TypeRules rules);

}  // namespace aepn
