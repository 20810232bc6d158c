#include "aepn/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "aepn/error.hpp"

namespace aepn {

// --- construction ------------------------------------------------------------

const Expr::Node& Expr::node() const {
  if (!node_) throw Error("empty expression");
  return *node_;
}

Expr Expr::make(Node n) {
  Expr e;
  e.node_ = std::make_shared<const Node>(std::move(n));
  return e;
}

Expr Expr::literal(ColorValue v) {
  Node n;
  n.op = ExprOp::Literal;
  n.literal = std::move(v);
  return make(std::move(n));
}

Expr Expr::var(std::string name) {
  Node n;
  n.op = ExprOp::Var;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr Expr::field(Expr record, std::string name) {
  Node n;
  n.op = ExprOp::Field;
  n.name = std::move(name);
  n.args.push_back(std::move(record));
  return make(std::move(n));
}

Expr Expr::time_of(std::string var) {
  Node n;
  n.op = ExprOp::Time;
  n.name = std::move(var);
  return make(std::move(n));
}

Expr Expr::now() {
  Node n;
  n.op = ExprOp::Now;
  return make(std::move(n));
}

Expr Expr::unary(ExprOp op, Expr arg) {
  Node n;
  n.op = op;
  n.args.push_back(std::move(arg));
  return make(std::move(n));
}

Expr Expr::binary(ExprOp op, Expr lhs, Expr rhs) {
  Node n;
  n.op = op;
  n.args.push_back(std::move(lhs));
  n.args.push_back(std::move(rhs));
  return make(std::move(n));
}

Expr Expr::if_then_else(Expr cond, Expr then_branch, Expr else_branch) {
  Node n;
  n.op = ExprOp::If;
  n.args = {std::move(cond), std::move(then_branch), std::move(else_branch)};
  return make(std::move(n));
}

Expr Expr::record(std::vector<std::string> names, std::vector<Expr> values) {
  if (names.size() != values.size() || names.empty()) throw Error("malformed record expression");
  Node n;
  n.op = ExprOp::Record;
  n.field_names = std::move(names);
  n.args = std::move(values);
  return make(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.op == y.op && x.literal == y.literal && x.name == y.name &&
         x.field_names == y.field_names && x.args == y.args;
}

// --- lexer -------------------------------------------------------------------

namespace {

enum class Tok { End, Int, Ident, Symbol, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(s.substr(i, j - i));
      try {
        t.number = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range", i);
      }
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '\'') {
      std::size_t j = i + 1;
      while (j < s.size() && ident_char(s[j])) ++j;
      if (j == i + 1) throw ParseError("empty symbol literal", i);
      t.kind = Tok::Symbol;
      t.text = std::string(s.substr(i + 1, j - i - 1));
      i = j;
    } else {
      static const char* two[] = {"!=", "<=", ">="};
      t.kind = Tok::Punct;
      bool matched = false;
      for (const char* op : two) {
        if (s.substr(i, 2) == op) {
          t.text = op;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(){},:.+-*=<>").find(c) == std::string_view::npos) {
          throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        t.text = std::string(1, c);
        ++i;
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"div",  "mod", "and",  "or",   "not",   "if",
                                           "then", "else", "min", "max",  "true",  "false",
                                           "now",  "time", "ratio"};
  return kw.contains(s);
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable* symbols) : toks_(lex(text)), symbols_(symbols) {}

  Expr parse_all() {
    Expr e = parse_expr();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }

  bool at_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool accept_punct(const char* p) {
    if (!at_punct(p)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(const char* w) {
    if (!at_word(w)) return false;
    ++pos_;
    return true;
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
  }
  void expect_word(const char* w) {
    if (!accept_word(w)) fail(std::string("expected '") + w + "'");
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected identifier");
    return next().text;
  }

  Expr parse_expr() {
    if (accept_word("if")) {
      Expr c = parse_expr();
      expect_word("then");
      Expr a = parse_expr();
      expect_word("else");
      Expr b = parse_expr();
      return Expr::if_then_else(std::move(c), std::move(a), std::move(b));
    }
    return parse_or();
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (accept_word("or")) lhs = Expr::binary(ExprOp::Or, std::move(lhs), parse_and());
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (accept_word("and")) lhs = Expr::binary(ExprOp::And, std::move(lhs), parse_not());
    return lhs;
  }

  Expr parse_not() {
    if (accept_word("not")) return Expr::unary(ExprOp::Not, parse_not());
    return parse_cmp();
  }

  Expr parse_cmp() {
    Expr lhs = parse_minmax();
    static const std::pair<const char*, ExprOp> ops[] = {{"=", ExprOp::Eq},  {"!=", ExprOp::Ne},
                                                         {"<=", ExprOp::Le}, {">=", ExprOp::Ge},
                                                         {"<", ExprOp::Lt},  {">", ExprOp::Gt}};
    for (const auto& [text, op] : ops) {
      if (accept_punct(text)) return Expr::binary(op, std::move(lhs), parse_minmax());
    }
    return lhs;
  }

  Expr parse_minmax() {
    Expr lhs = parse_add();
    while (true) {
      if (accept_word("min")) {
        lhs = Expr::binary(ExprOp::Min, std::move(lhs), parse_add());
      } else if (accept_word("max")) {
        lhs = Expr::binary(ExprOp::Max, std::move(lhs), parse_add());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_add() {
    Expr lhs = parse_mul();
    while (true) {
      if (accept_punct("+")) {
        lhs = Expr::binary(ExprOp::Add, std::move(lhs), parse_mul());
      } else if (accept_punct("-")) {
        lhs = Expr::binary(ExprOp::Sub, std::move(lhs), parse_mul());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_mul() {
    Expr lhs = parse_unary();
    while (true) {
      if (accept_punct("*")) {
        lhs = Expr::binary(ExprOp::Mul, std::move(lhs), parse_unary());
      } else if (accept_word("div")) {
        lhs = Expr::binary(ExprOp::Div, std::move(lhs), parse_unary());
      } else if (accept_word("mod")) {
        lhs = Expr::binary(ExprOp::Mod, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept_punct("-")) {
      if (peek().kind == Tok::Int) {
        return Expr::literal(ColorValue(-next().number));
      }
      return Expr::unary(ExprOp::Neg, parse_unary());
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    while (accept_punct(".")) e = Expr::field(std::move(e), expect_ident());
    return e;
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        return Expr::literal(ColorValue(next().number));
      case Tok::Symbol: {
        if (symbols_ && !symbols_->contains(t.text)) fail("reference to undeclared symbol '" + t.text + "'");
        return Expr::literal(ColorValue::symbol(next().text));
      }
      case Tok::Ident:
        break;
      case Tok::Punct:
        if (accept_punct("(")) {
          Expr e = parse_expr();
          expect_punct(")");
          return e;
        }
        if (accept_punct("{")) return parse_record();
        fail("unexpected '" + t.text + "'");
      case Tok::End:
        fail("unexpected end of expression");
    }
    if (accept_word("true")) return Expr::literal(ColorValue(true));
    if (accept_word("false")) return Expr::literal(ColorValue(false));
    if (accept_word("now")) return Expr::now();
    if (at_word("if")) return parse_expr();
    if (accept_word("time")) {
      expect_punct("(");
      std::string v = expect_ident();
      expect_punct(")");
      return Expr::time_of(std::move(v));
    }
    if (accept_word("ratio")) {
      expect_punct("(");
      Expr a = parse_expr();
      expect_punct(",");
      Expr b = parse_expr();
      expect_punct(")");
      return Expr::binary(ExprOp::Ratio, std::move(a), std::move(b));
    }
    return Expr::var(expect_ident());
  }

  Expr parse_record() {
    std::vector<std::string> names;
    std::vector<Expr> values;
    std::set<std::string> seen;
    do {
      const std::size_t at = peek().pos;
      std::string name = expect_ident();
      if (!seen.insert(name).second) throw ParseError("duplicate field '" + name + "'", at);
      expect_punct(":");
      names.push_back(std::move(name));
      values.push_back(parse_expr());
    } while (accept_punct(","));
    expect_punct("}");
    return Expr::record(std::move(names), std::move(values));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const SymbolTable* symbols_;
};

const char* binop_text(ExprOp op) {
  switch (op) {
    case ExprOp::Add: return "+";
    case ExprOp::Sub: return "-";
    case ExprOp::Mul: return "*";
    case ExprOp::Div: return "div";
    case ExprOp::Mod: return "mod";
    case ExprOp::Min: return "min";
    case ExprOp::Max: return "max";
    case ExprOp::Eq: return "=";
    case ExprOp::Ne: return "!=";
    case ExprOp::Lt: return "<";
    case ExprOp::Le: return "<=";
    case ExprOp::Gt: return ">";
    case ExprOp::Ge: return ">=";
    case ExprOp::And: return "and";
    case ExprOp::Or: return "or";
    default: return nullptr;
  }
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.op() == ExprOp::Var || e.op() == ExprOp::Time) out.insert(e.name());
  for (const auto& a : e.args()) collect_vars(a, out);
}

bool any_node(const Expr& e, ExprOp op) {
  if (e.op() == op) return true;
  for (const auto& a : e.args()) {
    if (any_node(a, op)) return true;
  }
  return false;
}

}  // namespace

Expr parse_expr(std::string_view text, const SymbolTable* symbols) {
  return Parser(text, symbols).parse_all();
}

std::string unparse(const Expr& e) {
  switch (e.op()) {
    case ExprOp::Literal:
      return e.literal_value().to_string();
    case ExprOp::Var:
      return e.name();
    case ExprOp::Field:
      return unparse(e.args()[0]) + "." + e.name();
    case ExprOp::Time:
      return "time(" + e.name() + ")";
    case ExprOp::Now:
      return "now";
    case ExprOp::Neg:
      // "-3" would reparse as a literal.
      if (e.args()[0].op() == ExprOp::Literal) return "(-(" + unparse(e.args()[0]) + "))";
      return "(-" + unparse(e.args()[0]) + ")";
    case ExprOp::Not:
      return "(not " + unparse(e.args()[0]) + ")";
    case ExprOp::If:
      return "(if " + unparse(e.args()[0]) + " then " + unparse(e.args()[1]) + " else " +
             unparse(e.args()[2]) + ")";
    case ExprOp::Record: {
      std::string out = "{";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) out += ", ";
        out += e.field_names()[i] + ": " + unparse(e.args()[i]);
      }
      return out + "}";
    }
    case ExprOp::Ratio:
      return "ratio(" + unparse(e.args()[0]) + ", " + unparse(e.args()[1]) + ")";
    default:
      return "(" + unparse(e.args()[0]) + " " + binop_text(e.op()) + " " + unparse(e.args()[1]) + ")";
  }
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

bool uses_now(const Expr& e) { return any_node(e, ExprOp::Now); }
bool uses_time(const Expr& e) { return any_node(e, ExprOp::Time); }

// --- evaluation --------------------------------------------------------------

namespace {

const VarBinding& lookup(VarEnv env, const std::string& name) {
  for (const auto& b : env) {
    if (b.name == name) return b;
  }
  throw EvalError("unbound variable '" + name + "'");
}

bool is_real(const ExprValue& v) { return std::holds_alternative<double>(v); }

double numeric(const ExprValue& v) {
  if (is_real(v)) return std::get<double>(v);
  return static_cast<double>(std::get<ColorValue>(v).as_int());
}

const ColorValue& color(const ExprValue& v) {
  if (is_real(v)) throw EvalError("expected a color, got real " + to_string(v));
  return std::get<ColorValue>(v);
}

ExprValue arith(ExprOp op, const ExprValue& a, const ExprValue& b) {
  if (is_real(a) || is_real(b)) {
    const double x = numeric(a);
    const double y = numeric(b);
    switch (op) {
      case ExprOp::Add: return x + y;
      case ExprOp::Sub: return x - y;
      case ExprOp::Mul: return x * y;
      case ExprOp::Min: return std::min(x, y);
      case ExprOp::Max: return std::max(x, y);
      default: throw EvalError(std::string("'") + binop_text(op) + "' requires integers");
    }
  }
  const std::int64_t x = color(a).as_int();
  const std::int64_t y = color(b).as_int();
  switch (op) {
    case ExprOp::Add: return ColorValue(x + y);
    case ExprOp::Sub: return ColorValue(x - y);
    case ExprOp::Mul: return ColorValue(x * y);
    case ExprOp::Min: return ColorValue(std::min(x, y));
    case ExprOp::Max: return ColorValue(std::max(x, y));
    case ExprOp::Div:
      if (y == 0) throw EvalError("division by zero");
      return ColorValue(x / y);
    case ExprOp::Mod:
      if (y == 0) throw EvalError("division by zero");
      return ColorValue(x % y);
    default: break;
  }
  throw EvalError("bad arithmetic operator");
}

bool compare(ExprOp op, const ExprValue& a, const ExprValue& b) {
  std::partial_ordering c = std::partial_ordering::equivalent;
  if (is_real(a) || is_real(b)) {
    c = numeric(a) <=> numeric(b);
  } else {
    const auto& x = std::get<ColorValue>(a);
    const auto& y = std::get<ColorValue>(b);
    if (op != ExprOp::Eq && op != ExprOp::Ne && (!x.is_int() || !y.is_int())) {
      throw EvalError("ordering comparison requires numbers");
    }
    c = x <=> y;
  }
  switch (op) {
    case ExprOp::Eq: return c == 0;
    case ExprOp::Ne: return c != 0;
    case ExprOp::Lt: return c < 0;
    case ExprOp::Le: return c <= 0;
    case ExprOp::Gt: return c > 0;
    case ExprOp::Ge: return c >= 0;
    default: break;
  }
  throw EvalError("bad comparison operator");
}

}  // namespace

ExprValue eval(const Expr& e, VarEnv env, Tick clock) {
  switch (e.op()) {
    case ExprOp::Literal:
      return e.literal_value();
    case ExprOp::Var:
      return lookup(env, e.name()).value;
    case ExprOp::Field:
      return color(eval(e.args()[0], env, clock)).field(e.name());
    case ExprOp::Time:
      return ColorValue(static_cast<std::int64_t>(lookup(env, e.name()).time));
    case ExprOp::Now:
      return ColorValue(static_cast<std::int64_t>(clock));
    case ExprOp::Neg: {
      ExprValue v = eval(e.args()[0], env, clock);
      if (is_real(v)) return -std::get<double>(v);
      return ColorValue(-color(v).as_int());
    }
    case ExprOp::Not:
      return ColorValue(!color(eval(e.args()[0], env, clock)).as_bool());
    case ExprOp::And:
      if (!color(eval(e.args()[0], env, clock)).as_bool()) return ColorValue(false);
      return ColorValue(color(eval(e.args()[1], env, clock)).as_bool());
    case ExprOp::Or:
      if (color(eval(e.args()[0], env, clock)).as_bool()) return ColorValue(true);
      return ColorValue(color(eval(e.args()[1], env, clock)).as_bool());
    case ExprOp::If:
      return color(eval(e.args()[0], env, clock)).as_bool() ? eval(e.args()[1], env, clock)
                                                              : eval(e.args()[2], env, clock);
    case ExprOp::Record: {
      RecordFields fields;
      fields.reserve(e.args().size());
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        fields.emplace_back(e.field_names()[i], color(eval(e.args()[i], env, clock)));
      }
      return ColorValue::record(std::move(fields));
    }
    case ExprOp::Ratio: {
      const double num = numeric(eval(e.args()[0], env, clock));
      const double den = numeric(eval(e.args()[1], env, clock));
      if (den == 0.0) throw EvalError("division by zero in ratio");
      return num / den;
    }
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge:
      return ColorValue(compare(e.op(), eval(e.args()[0], env, clock), eval(e.args()[1], env, clock)));
    default:
      return arith(e.op(), eval(e.args()[0], env, clock), eval(e.args()[1], env, clock));
  }
}

ColorValue eval_color(const Expr& e, VarEnv env, Tick clock) { return color(eval(e, env, clock)); }

bool eval_bool(const Expr& e, VarEnv env, Tick clock) { return eval_color(e, env, clock).as_bool(); }

double eval_real(const Expr& e, VarEnv env, Tick clock) { return numeric(eval(e, env, clock)); }

std::string to_string(const ExprValue& v) {
  if (is_real(v)) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << std::get<double>(v);
    return os.str();
  }
  return std::get<ColorValue>(v).to_string();
}

// --- typing ------------------------------------------------------------------

ExprType ExprType::of(const ColorSet& cs) {
  const ColorSet& s = cs.structural();
  switch (s.kind()) {
    case ColorSet::Kind::Range: return scalar(Kind::Int);
    case ColorSet::Kind::Bool: return scalar(Kind::Bool);
    case ColorSet::Kind::Enum: return scalar(Kind::Symbol);
    case ColorSet::Kind::Record: {
      ExprType t{Kind::Record, {}};
      for (const auto& [name, f] : s.fields()) t.fields.emplace_back(name, of(*f));
      return t;
    }
    case ColorSet::Kind::Subset: break;
  }
  return scalar(Kind::Int);
}

bool ExprType::fits(const ColorSet& cs) const {
  const ExprType want = of(cs);
  if (kind != want.kind) return false;
  if (kind != Kind::Record) return true;
  if (fields.size() != want.fields.size()) return false;
  const ColorSet& s = cs.structural();
  for (const auto& [name, t] : fields) {
    ColorSetPtr f = s.field_colorset(name);
    if (!f || !t.fits(*f)) return false;
  }
  return true;
}

std::string ExprType::to_string() const {
  switch (kind) {
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Symbol: return "symbol";
    case Kind::Real: return "real";
    case Kind::Record: {
      std::string out = "{";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ", ";
        out += fields[i].first + ": " + fields[i].second.to_string();
      }
      return out + "}";
    }
  }
  return "?";
}

namespace {

using K = ExprType::Kind;

bool numeric_kind(K k) { return k == K::Int || k == K::Real; }

bool same_shape(const ExprType& a, const ExprType& b) {
  if (numeric_kind(a.kind) && numeric_kind(b.kind)) return true;
  if (a.kind != b.kind) return false;
  if (a.kind != K::Record) return true;
  if (a.fields.size() != b.fields.size()) return false;
  for (const auto& [name, t] : a.fields) {
    bool found = false;
    for (const auto& [n2, t2] : b.fields) {
      if (n2 == name) {
        found = same_shape(t, t2);
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

ExprType literal_type(const ColorValue& v) {
  switch (v.kind()) {
    case ColorValue::Kind::Int: return ExprType::scalar(K::Int);
    case ColorValue::Kind::Bool: return ExprType::scalar(K::Bool);
    case ColorValue::Kind::Symbol: return ExprType::scalar(K::Symbol);
    case ColorValue::Kind::Record: {
      ExprType t{K::Record, {}};
      for (const auto& [n, f] : v.fields()) t.fields.emplace_back(n, literal_type(f));
      return t;
    }
  }
  return ExprType::scalar(K::Int);
}

}  // namespace

ExprType infer_type(const Expr& e, const std::map<std::string, ExprType>& vars, TypeRules rules) {
  auto sub = [&](std::size_t i) { return infer_type(e.args()[i], vars, rules); };
  auto need = [&](const ExprType& t, K k, const char* what) {
    if (t.kind != k) {
      throw TypeError(std::string(what) + " expects " + ExprType::scalar(k).to_string() + ", got " +
                      t.to_string() + " in " + unparse(e));
    }
  };
  auto need_num = [&](const ExprType& t, const char* what) {
    if (!numeric_kind(t.kind)) {
      throw TypeError(std::string(what) + " expects a number, got " + t.to_string() + " in " + unparse(e));
    }
  };
  switch (e.op()) {
    case ExprOp::Literal:
      return literal_type(e.literal_value());
    case ExprOp::Var: {
      auto it = vars.find(e.name());
      if (it == vars.end()) throw TypeError("unbound variable " + e.name());
      return it->second;
    }
    case ExprOp::Time:
      if (!rules.allow_time) throw TypeError("time(" + e.name() + ") is not allowed here");
      if (!vars.contains(e.name())) throw TypeError("unbound variable " + e.name());
      return ExprType::scalar(K::Int);
    case ExprOp::Now:
      if (!rules.allow_now) throw TypeError("'now' is not allowed here");
      return ExprType::scalar(K::Int);
    case ExprOp::Field: {
      ExprType r = sub(0);
      if (r.kind != K::Record) throw TypeError("field access on non-record in " + unparse(e));
      for (const auto& [n, t] : r.fields) {
        if (n == e.name()) return t;
      }
      throw TypeError("no field '" + e.name() + "' in " + r.to_string());
    }
    case ExprOp::Neg: {
      ExprType t = sub(0);
      need_num(t, "negation");
      return t;
    }
    case ExprOp::Not:
      need(sub(0), K::Bool, "not");
      return ExprType::scalar(K::Bool);
    case ExprOp::And:
    case ExprOp::Or:
      need(sub(0), K::Bool, binop_text(e.op()));
      need(sub(1), K::Bool, binop_text(e.op()));
      return ExprType::scalar(K::Bool);
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Min:
    case ExprOp::Max: {
      ExprType a = sub(0);
      ExprType b = sub(1);
      need_num(a, binop_text(e.op()));
      need_num(b, binop_text(e.op()));
      return ExprType::scalar(a.kind == K::Real || b.kind == K::Real ? K::Real : K::Int);
    }
    case ExprOp::Div:
    case ExprOp::Mod:
      need(sub(0), K::Int, binop_text(e.op()));
      need(sub(1), K::Int, binop_text(e.op()));
      return ExprType::scalar(K::Int);
    case ExprOp::Eq:
    case ExprOp::Ne: {
      ExprType a = sub(0);
      ExprType b = sub(1);
      if (!same_shape(a, b)) {
        throw TypeError("cannot compare " + a.to_string() + " with " + b.to_string() + " in " + unparse(e));
      }
      return ExprType::scalar(K::Bool);
    }
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge:
      need_num(sub(0), binop_text(e.op()));
      need_num(sub(1), binop_text(e.op()));
      return ExprType::scalar(K::Bool);
    case ExprOp::If: {
      need(sub(0), K::Bool, "if");
      ExprType a = sub(1);
      ExprType b = sub(2);
      if (!same_shape(a, b)) {
        throw TypeError("if branches differ: " + a.to_string() + " vs " + b.to_string());
      }
      if (numeric_kind(a.kind) && (a.kind == K::Real || b.kind == K::Real)) return ExprType::scalar(K::Real);
      return a;
    }
    case ExprOp::Record: {
      ExprType t{K::Record, {}};
      for (std::size_t i = 0; i < e.args().size(); ++i) t.fields.emplace_back(e.field_names()[i], sub(i));
      return t;
    }
    case ExprOp::Ratio:
      need_num(sub(0), "ratio");
      need_num(sub(1), "ratio");
      return ExprType::scalar(K::Real);
  }
  throw TypeError("unknown expression");
}

}  // namespace aepn
