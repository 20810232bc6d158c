#include "aepn/net.hpp"

#include <algorithm>
#include <set>

#include "aepn/error.hpp"

namespace aepn {

// --- patterns ----------------------------------------------------------------

namespace {

Pattern pattern_from(const Expr& e) {
  Pattern p;
  switch (e.op()) {
    case ExprOp::Var:
      p.kind = Pattern::Kind::Var;
      p.var = e.name();
      return p;
    case ExprOp::Literal:
      p.kind = Pattern::Kind::Literal;
      p.literal = e.literal_value();
      return p;
    case ExprOp::Record:
      p.kind = Pattern::Kind::Record;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        p.fields.emplace_back(e.field_names()[i], pattern_from(e.args()[i]));
      }
      return p;
    default:
      throw ParseError("pattern must be a variable, a literal or a record of patterns, got " + unparse(e), 0);
  }
}

}  // namespace

Pattern Pattern::parse(std::string_view text, const SymbolTable* symbols) {
  return pattern_from(parse_expr(text, symbols));
}

std::string Pattern::to_string() const {
  switch (kind) {
    case Kind::Var: return var;
    case Kind::Literal: return literal.to_string();
    case Kind::Record: {
      std::string out = "{";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ", ";
        out += fields[i].first + ": " + fields[i].second.to_string();
      }
      return out + "}";
    }
  }
  return {};
}

void Pattern::collect_vars(std::vector<std::string>& out) const {
  switch (kind) {
    case Kind::Var: out.push_back(var); break;
    case Kind::Literal: break;
    case Kind::Record:
      for (const auto& [_, f] : fields) f.collect_vars(out);
      break;
  }
}

// --- net ---------------------------------------------------------------------

ColorSetPtr AEPNet::find_colorset(std::string_view name) const {
  for (const auto& cs : colorsets) {
    if (cs->name() == name) return cs;
  }
  return nullptr;
}

std::optional<std::size_t> AEPNet::place_index(std::string_view name) const {
  for (std::size_t i = 0; i < places.size(); ++i) {
    if (places[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> AEPNet::transition_index(std::string_view name) const {
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (transitions[i].name == name) return i;
  }
  return std::nullopt;
}

SymbolTable AEPNet::symbols() const {
  SymbolTable out;
  for (const auto& cs : colorsets) {
    for (const auto& s : cs->symbols()) out.insert(s);
  }
  return out;
}

bool operator==(const AEPNet& a, const AEPNet& b) {
  if (a.colorsets.size() != b.colorsets.size()) return false;
  for (std::size_t i = 0; i < a.colorsets.size(); ++i) {
    if (!(*a.colorsets[i] == *b.colorsets[i])) return false;
  }
  return a.name == b.name && a.places == b.places && a.transitions == b.transitions &&
         a.initial_marking == b.initial_marking && a.initial_tag == b.initial_tag &&
         a.initial_reward == b.initial_reward && a.horizon == b.horizon && a.single_phase == b.single_phase;
}

void finalize(AEPNet& net) {
  std::stable_sort(net.places.begin(), net.places.end(),
                   [](const Place& a, const Place& b) { return a.name < b.name; });
  std::stable_sort(net.transitions.begin(), net.transitions.end(),
                   [](const Transition& a, const Transition& b) { return a.name < b.name; });
  std::stable_sort(net.initial_marking.begin(), net.initial_marking.end(),
                   [](const InitialTokens& a, const InitialTokens& b) { return a.place < b.place; });
  for (auto& p : net.places) p.colorset = net.find_colorset(p.colorset_name);
  for (auto& t : net.transitions) {
    t.variables.clear();
    std::vector<std::string> all;
    for (auto& in : t.inputs) {
      in.place_index = net.place_index(in.place).value_or(npos);
      in.pattern.collect_vars(all);
    }
    for (auto& out : t.outputs) out.place_index = net.place_index(out.place).value_or(npos);
    for (const auto& v : all) {
      if (std::find(t.variables.begin(), t.variables.end(), v) == t.variables.end()) t.variables.push_back(v);
    }
  }
}

namespace {

void pattern_domains(const Pattern& p, const ColorSetPtr& cs, std::map<std::string, ColorSetPtr>& out) {
  if (!cs) return;
  switch (p.kind) {
    case Pattern::Kind::Var:
      out.emplace(p.var, cs);
      break;
    case Pattern::Kind::Literal:
      break;
    case Pattern::Kind::Record:
      for (const auto& [name, sub] : p.fields) pattern_domains(sub, cs->field_colorset(name), out);
      break;
  }
}

}  // namespace

std::map<std::string, ColorSetPtr> variable_domains(const AEPNet& net, const Transition& t) {
  std::map<std::string, ColorSetPtr> out;
  for (const auto& in : t.inputs) {
    if (in.place_index == npos) continue;
    pattern_domains(in.pattern, net.places[in.place_index].colorset, out);
  }
  return out;
}

// --- validation --------------------------------------------------------------

namespace {

class Validator {
 public:
  explicit Validator(const AEPNet& net) : net_(net) {}

  std::vector<Diagnostic> run() {
    check_names();
    for (const auto& p : net_.places) {
      if (!p.colorset) error("place " + p.name + ": unknown colorset " + p.colorset_name);
    }
    for (const auto& t : net_.transitions) check_transition(t);
    check_initial_marking();
    if (net_.horizon < 1) error("net: horizon must be at least 1");
    if (!net_.single_phase) {
      bool has_a = false;
      bool has_e = false;
      for (const auto& t : net_.transitions) (t.tag == Tag::A ? has_a : has_e) = true;
      if (!has_a || !has_e) {
        warning("net: transitions of only one tag; declare the net single-phase if intended");
      }
    }
    return std::move(out_);
  }

 private:
  void error(std::string msg) { out_.push_back({Diagnostic::Severity::Error, std::move(msg)}); }
  void warning(std::string msg) { out_.push_back({Diagnostic::Severity::Warning, std::move(msg)}); }

  void check_names() {
    std::set<std::string> seen;
    for (const auto& cs : net_.colorsets) {
      if (!seen.insert(cs->name()).second) error("colorset " + cs->name() + ": declared twice");
    }
    std::set<std::string> places;
    for (const auto& p : net_.places) {
      if (!places.insert(p.name).second) error("place " + p.name + ": declared twice");
    }
    std::set<std::string> transitions;
    for (const auto& t : net_.transitions) {
      if (!transitions.insert(t.name).second) error("transition " + t.name + ": declared twice");
      if (places.contains(t.name)) error("transition " + t.name + ": name clashes with a place");
    }
  }

  void check_pattern(const std::string& where, const Pattern& p, const ColorSetPtr& cs) {
    switch (p.kind) {
      case Pattern::Kind::Var:
        return;
      case Pattern::Kind::Literal:
        if (!cs->contains(p.literal)) {
          error(where + ": literal " + p.literal.to_string() + " is not in colorset " + cs->name());
        }
        return;
      case Pattern::Kind::Record: {
        const ColorSet& s = cs->structural();
        if (s.kind() != ColorSet::Kind::Record) {
          error(where + ": record pattern on non-record colorset " + cs->name());
          return;
        }
        for (const auto& [name, sub] : p.fields) {
          ColorSetPtr f = cs->field_colorset(name);
          if (!f) {
            error(where + ": colorset " + cs->name() + " has no field " + name);
            continue;
          }
          check_pattern(where, sub, f);
        }
        return;
      }
    }
  }

  // Reports unbound variables; returns false when any were found.
  bool check_bound(const std::string& where, const Expr& e, const std::set<std::string>& bound) {
    bool ok = true;
    for (const auto& v : free_vars(e)) {
      if (!bound.contains(v)) {
        error(where + ": unbound variable " + v);
        ok = false;
      }
    }
    return ok;
  }

  void check_transition(const Transition& t) {
    const std::string where = "transition " + t.name;
    const std::size_t before = out_.size();
    std::set<std::string> bound;
    for (std::size_t i = 0; i < t.inputs.size(); ++i) {
      const auto& in = t.inputs[i];
      if (in.place_index == npos) {
        error(where + ": input arc from unknown place " + in.place);
        continue;
      }
      if (in.multiplicity < 1) error(where + ": input arc from " + in.place + " has multiplicity 0");
      std::vector<std::string> vars;
      in.pattern.collect_vars(vars);
      std::set<std::string> once;
      for (const auto& v : vars) {
        if (!once.insert(v).second) error(where + ": variable " + v + " repeated in pattern " + in.pattern.to_string());
      }
      bound.insert(vars.begin(), vars.end());
      const auto& cs = net_.places[in.place_index].colorset;
      if (cs) check_pattern(where, in.pattern, cs);
    }

    std::map<std::string, ExprType> types;
    for (const auto& [v, cs] : variable_domains(net_, t)) types.emplace(v, ExprType::of(*cs));

    if (uses_now(t.guard) || uses_time(t.guard)) {
      error(where + ": guard may not depend on the clock or token times");
    } else if (check_bound(where, t.guard, bound)) {
      typed(where + " guard", t.guard, types, {}, [&](const ExprType& ty) {
        if (ty.kind != ExprType::Kind::Bool) error(where + ": guard must be boolean, got " + ty.to_string());
      });
    }
    if (check_bound(where, t.reward, bound)) {
      typed(where + " reward", t.reward, types, {true, true}, [&](const ExprType& ty) {
        if (ty.kind != ExprType::Kind::Int && ty.kind != ExprType::Kind::Real) {
          error(where + ": reward must be numeric, got " + ty.to_string());
        }
      });
    }
    for (const auto& out : t.outputs) {
      if (out.place_index == npos) {
        error(where + ": output arc to unknown place " + out.place);
        continue;
      }
      const auto& cs = net_.places[out.place_index].colorset;
      const bool v_ok = check_bound(where, out.value, bound);
      const bool d_ok = check_bound(where, out.delay, bound);
      if (uses_now(out.value) || uses_time(out.value) || uses_now(out.delay) || uses_time(out.delay)) {
        error(where + ": output arc to " + out.place + " may not depend on the clock or token times");
        continue;
      }
      if (v_ok && cs) {
        typed(where + " output to " + out.place, out.value, types, {}, [&](const ExprType& ty) {
          if (!ty.fits(*cs)) {
            error(where + ": output to " + out.place + " yields " + ty.to_string() + ", not colorset " + cs->name());
          }
        });
      }
      if (d_ok) {
        typed(where + " delay to " + out.place, out.delay, types, {}, [&](const ExprType& ty) {
          if (ty.kind != ExprType::Kind::Int) error(where + ": delay to " + out.place + " must be an integer");
        });
      }
    }
    if (out_.size() == before) check_ranges(t, where);
  }

  template <typename F>
  void typed(const std::string& where, const Expr& e, const std::map<std::string, ExprType>& types,
             TypeRules rules, F&& check) {
    try {
      check(infer_type(e, types, rules));
    } catch (const TypeError& ex) {
      error(where + ": " + ex.what());
    }
  }

  // Outputs of every guard-satisfying assignment over the variable domains
  // must land in their colorsets with non-negative delays. Skipped when the
  // product is too large to enumerate.
  void check_ranges(const Transition& t, const std::string& where) {
    constexpr std::size_t kLimit = std::size_t{1} << 16;
    const auto domains = variable_domains(net_, t);
    std::vector<const std::vector<ColorValue>*> values;
    std::size_t combos = 1;
    for (const auto& v : t.variables) {
      auto it = domains.find(v);
      if (it == domains.end()) return;
      values.push_back(&it->second->enumerate());
      combos *= values.back()->size();
      if (combos > kLimit) return;
    }
    std::vector<VarBinding> env;
    for (const auto& v : t.variables) env.push_back({v, ColorValue(), 0});
    std::set<std::string> reported;
    auto report = [&](std::string msg) {
      if (reported.insert(msg).second) error(std::move(msg));
    };
    for (std::size_t k = 0; k < combos; ++k) {
      std::size_t rest = k;
      for (std::size_t i = env.size(); i-- > 0;) {
        env[i].value = (*values[i])[rest % values[i]->size()];
        rest /= values[i]->size();
      }
      try {
        if (!eval_bool(t.guard, env, 0)) continue;
      } catch (const EvalError& e) {
        report(where + ": guard fails: " + e.what());
        continue;
      }
      for (const auto& out : t.outputs) {
        const auto& cs = net_.places[out.place_index].colorset;
        try {
          const ColorValue v = eval_color(out.value, env, 0);
          if (!cs->contains(v)) {
            report(where + ": output to " + out.place + " may yield " + v.to_string() + ", not in colorset " +
                   cs->name());
          }
          if (eval_color(out.delay, env, 0).as_int() < 0) report(where + ": delay to " + out.place + " may be negative");
        } catch (const EvalError& e) {
          report(where + ": output to " + out.place + " fails: " + e.what());
        }
      }
    }
  }

  void check_initial_marking() {
    for (const auto& it : net_.initial_marking) {
      auto idx = net_.place_index(it.place);
      if (!idx) {
        error("initial marking " + it.place + ": unknown place");
        continue;
      }
      const auto& cs = net_.places[*idx].colorset;
      if (cs && !cs->contains(it.token.value)) {
        error("initial marking " + it.place + ": value " + it.token.value.to_string() + " is not in colorset " +
              cs->name());
      }
      if (it.count == 0) error("initial marking " + it.place + ": zero count");
    }
  }

  const AEPNet& net_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate_net(const AEPNet& net) { return Validator(net).run(); }

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

TaggedMarking initial_state(const AEPNet& net) {
  TaggedMarking s;
  s.marking.resize(net.places.size());
  for (const auto& it : net.initial_marking) {
    auto idx = net.place_index(it.place);
    if (!idx) throw Error("initial marking refers to unknown place " + it.place);
    TimedToken token = it.token;
    if (const auto& cs = net.places[*idx].colorset) {
      if (auto canon = cs->normalize(token.value)) token.value = std::move(*canon);
    }
    s.marking[*idx].add(token, it.count);
  }
  s.tag = net.initial_tag;
  s.clock = 0;
  s.reward = net.initial_reward;
  return s;
}

// --- builder -----------------------------------------------------------------

NetBuilder::NetBuilder(std::string name) : name_(std::move(name)) {}

NetBuilder& NetBuilder::colorset(ColorSetPtr cs) {
  colorsets_.push_back(std::move(cs));
  return *this;
}

NetBuilder& NetBuilder::place(std::string name, std::string colorset) {
  places_.emplace_back(std::move(name), std::move(colorset));
  return *this;
}

NetBuilder& NetBuilder::transition(std::string name, Tag tag, std::string guard, std::string reward) {
  transitions_.push_back({std::move(name), tag, std::move(guard), std::move(reward), {}, {}});
  return *this;
}

NetBuilder::TransitionSpec& NetBuilder::find(const std::string& transition) {
  for (auto& t : transitions_) {
    if (t.name == transition) return t;
  }
  throw Error("builder: unknown transition " + transition);
}

NetBuilder& NetBuilder::input(const std::string& transition, std::string place, std::string pattern,
                              std::size_t multiplicity) {
  find(transition).inputs.push_back({std::move(place), std::move(pattern), multiplicity});
  return *this;
}

NetBuilder& NetBuilder::output(const std::string& transition, std::string place, std::string value,
                               std::string delay) {
  find(transition).outputs.push_back({std::move(place), std::move(value), std::move(delay)});
  return *this;
}

NetBuilder& NetBuilder::token(std::string place, std::string value, Tick time, std::size_t count) {
  tokens_.push_back({std::move(place), std::move(value), time, count});
  return *this;
}

NetBuilder& NetBuilder::initial_tag(Tag tag) {
  initial_tag_ = tag;
  return *this;
}

NetBuilder& NetBuilder::initial_reward(double reward) {
  initial_reward_ = reward;
  return *this;
}

NetBuilder& NetBuilder::horizon(Tick horizon) {
  horizon_ = horizon;
  return *this;
}

NetBuilder& NetBuilder::single_phase(bool on) {
  single_phase_ = on;
  return *this;
}

AEPNet NetBuilder::build() const {
  AEPNet net;
  net.name = name_;
  net.colorsets = colorsets_;
  net.initial_tag = initial_tag_;
  net.initial_reward = initial_reward_;
  net.horizon = horizon_;
  net.single_phase = single_phase_;
  const SymbolTable symbols = net.symbols();
  for (const auto& [name, cs] : places_) net.places.push_back({name, cs, nullptr});
  for (const auto& spec : transitions_) {
    Transition t;
    t.name = spec.name;
    t.tag = spec.tag;
    const std::string where = "transition " + spec.name;
    try {
      t.guard = parse_expr(spec.guard, &symbols);
      t.reward = parse_expr(spec.reward, &symbols);
      for (const auto& in : spec.inputs) {
        t.inputs.push_back({in.place, npos, Pattern::parse(in.pattern, &symbols), in.multiplicity});
      }
      for (const auto& out : spec.outputs) {
        t.outputs.push_back({out.place, npos, parse_expr(out.value, &symbols), parse_expr(out.delay, &symbols)});
      }
    } catch (const ParseError& e) {
      throw e.in(where);
    }
    net.transitions.push_back(std::move(t));
  }
  for (const auto& tok : tokens_) {
    ColorValue v;
    try {
      v = eval_color(parse_expr(tok.value, &symbols), {}, 0);
    } catch (const ParseError& e) {
      throw e.in("initial marking " + tok.place);
    }
    net.initial_marking.push_back({tok.place, {std::move(v), tok.time}, tok.count});
  }
  finalize(net);
  return net;
}

}  // namespace aepn
