#include "aepn/engine.hpp"

#include <algorithm>
#include <cstdio>

#include "aepn/error.hpp"

namespace aepn {

std::string BindingChoice::assignment_text() const {
  if (assignment.empty()) return "-";
  std::string out;
  for (const auto& v : assignment) {
    if (!out.empty()) out += ", ";
    out += v.name + "=" + v.value.to_string() + "@" + std::to_string(v.time);
  }
  return out;
}

std::string BindingChoice::to_string(const AEPNet& net) const {
  std::string name = transition < net.transitions.size() ? net.transitions[transition].name : "?";
  return name + "(" + (assignment.empty() ? std::string() : assignment_text()) + ")";
}

namespace {

const VarBinding* find_var(const std::vector<VarBinding>& env, const std::string& name) {
  for (const auto& v : env) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

bool match(const Pattern& p, const ColorValue& value, Tick time, std::vector<VarBinding>& env) {
  switch (p.kind) {
    case Pattern::Kind::Var:
      if (const auto* bound = find_var(env, p.var)) return bound->value == value;
      env.push_back({p.var, value, time});
      return true;
    case Pattern::Kind::Literal:
      return value == p.literal;
    case Pattern::Kind::Record:
      for (const auto& [name, sub] : p.fields) {
        const ColorValue* f = value.find_field(name);
        if (!f || !match(sub, *f, time, env)) return false;
      }
      return true;
  }
  return false;
}

class Enumerator {
 public:
  Enumerator(const AEPNet& net, const TaggedMarking& s, std::size_t t)
      : s_(s), t_(net.transitions.at(t)), index_(t) {}

  std::vector<BindingChoice> run() {
    for (const auto& in : t_.inputs) {
      if (in.place_index == npos || in.place_index >= s_.marking.size()) return {};
    }
    recurse(0);
    return std::move(out_);
  }

 private:
  std::size_t used(std::size_t place, const TimedToken& tok) const {
    std::size_t n = 0;
    for (const auto& c : consumed_) {
      if (c.place == place && c.token == tok) n += c.count;
    }
    return n;
  }

  void recurse(std::size_t arc) {
    if (arc == t_.inputs.size()) {
      emit();
      return;
    }
    const InputArc& in = t_.inputs[arc];
    for (const auto& [tok, n] : s_.marking[in.place_index]) {
      if (n < used(in.place_index, tok) + in.multiplicity) continue;
      const std::size_t mark = env_.size();
      if (match(in.pattern, tok.value, tok.time, env_)) {
        consumed_.push_back({in.place_index, tok, in.multiplicity});
        recurse(arc + 1);
        consumed_.pop_back();
      }
      env_.resize(mark);
    }
  }

  void emit() {
    if (!eval_bool(t_.guard, env_, s_.clock)) return;
    BindingChoice b;
    b.transition = index_;
    b.consumed = consumed_;
    for (const auto& name : t_.variables) {
      if (const auto* v = find_var(env_, name)) b.assignment.push_back(*v);
    }
    for (const auto& c : consumed_) b.enabling_time = std::max(b.enabling_time, c.token.time);
    out_.push_back(std::move(b));
  }

  const TaggedMarking& s_;
  const Transition& t_;
  std::size_t index_;
  std::vector<VarBinding> env_;
  std::vector<ConsumedToken> consumed_;
  std::vector<BindingChoice> out_;
};

// Applies b and returns the reward it adds.
double apply(const AEPNet& net, TaggedMarking& s, const BindingChoice& b) {
  const Transition& t = net.transitions.at(b.transition);
  for (const auto& c : b.consumed) s.marking.at(c.place).remove(c.token, c.count);
  const Tick base = std::max(s.clock, b.enabling_time);
  for (const auto& out : t.outputs) {
    const auto& place = net.places.at(out.place_index);
    ColorValue v = eval_color(out.value, b.assignment, s.clock);
    auto canon = place.colorset->normalize(v);
    if (!canon) {
      throw EvalError(t.name + ": value " + v.to_string() + " is not in colorset " + place.colorset->name() +
                      " of place " + place.name);
    }
    const std::int64_t delay = eval_color(out.delay, b.assignment, s.clock).as_int();
    if (delay < 0) throw EvalError(t.name + ": negative delay " + std::to_string(delay) + " to " + place.name);
    s.marking[out.place_index].add({std::move(*canon), base + static_cast<Tick>(delay)});
  }
  const double r = binding_reward(net, b, s.clock);
  s.reward += r;
  return r;
}

void emit(const RunOptions& options, TraceEvent e) {
  if (options.on_event) options.on_event(e);
}

}  // namespace

std::vector<BindingChoice> enumerate_enabled(const AEPNet& net, const TaggedMarking& s, std::size_t t) {
  return Enumerator(net, s, t).run();
}

std::vector<BindingChoice> tag_time_enabled(const AEPNet& net, const TaggedMarking& s) {
  std::vector<BindingChoice> all;
  std::optional<Tick> earliest;
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    if (net.transitions[t].tag != s.tag) continue;
    for (auto& b : enumerate_enabled(net, s, t)) {
      if (!earliest || b.enabling_time < *earliest) earliest = b.enabling_time;
      all.push_back(std::move(b));
    }
  }
  if (!earliest || *earliest > s.clock) return {};
  std::erase_if(all, [&](const BindingChoice& b) { return b.enabling_time != *earliest; });
  return all;
}

double binding_reward(const AEPNet& net, const BindingChoice& b, Tick clock) {
  return eval_real(net.transitions.at(b.transition).reward, b.assignment, clock);
}

TaggedMarking fire_unchecked(const AEPNet& net, const TaggedMarking& s, const BindingChoice& b) {
  TaggedMarking out = s;
  apply(net, out, b);
  return out;
}

TaggedMarking fire(const AEPNet& net, const TaggedMarking& s, const BindingChoice& b) {
  const auto enabled = tag_time_enabled(net, s);
  if (std::find(enabled.begin(), enabled.end(), b) == enabled.end()) {
    throw NotFireable("not fireable: " + b.to_string(net) + " at clock " + std::to_string(s.clock) + ", tag " +
                      to_string(s.tag));
  }
  return fire_unchecked(net, s, b);
}

const char* to_string(Terminal::Reason r) noexcept {
  return r == Terminal::Reason::Horizon ? "horizon" : "deadlock";
}

AdvanceResult advance(const AEPNet& net, const TaggedMarking& s) {
  std::optional<Tick> current;
  std::optional<Tick> next;
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    auto& slot = net.transitions[t].tag == s.tag ? current : next;
    for (const auto& b : enumerate_enabled(net, s, t)) {
      if (!slot || b.enabling_time < *slot) slot = b.enabling_time;
    }
  }
  if (!current && !next) return Terminal{Terminal::Reason::Deadlock, s.clock};
  TaggedMarking out = s;
  if (current && (!next || *current <= *next)) {
    out.clock = std::max(s.clock, *current);
  } else {
    out.clock = std::max(s.clock, *next);
    out.tag = flip(s.tag);
  }
  if (out.clock > net.horizon) return Terminal{Terminal::Reason::Horizon, s.clock};
  return out;
}

std::string TraceEvent::to_line() const {
  const char* kinds[] = {"FIRE", "ADVANCE", "TERMINAL"};
  char nums[64];
  std::snprintf(nums, sizeof nums, "%.3f\t%.3f", delta, reward);
  return std::string(kinds[static_cast<int>(kind)]) + "\t" + std::to_string(clock) + "\t" + aepn::to_string(tag) +
         "\t" + transition + "\t" + assignment + "\t" + nums;
}

TraceEvent fire_event(const AEPNet& net, const TaggedMarking& after, const BindingChoice& b, double delta) {
  return {TraceEvent::Kind::Fire, after.clock,  after.tag, net.transitions.at(b.transition).name,
          b.assignment_text(),    delta,        after.reward};
}

RunResult run_to_decision_point(const AEPNet& net, TaggedMarking s, const RunOptions& options) {
  RunResult r;
  const Tick start = s.clock;
  std::size_t fired_at_clock = 0;
  for (;;) {
    auto enabled = tag_time_enabled(net, s);
    if (!enabled.empty()) {
      if (s.tag == Tag::A) {
        if (s.clock >= net.horizon) r.terminal = Terminal::Reason::Horizon;
        break;
      }
      std::size_t pick = 0;
      if (options.chooser) {
        pick = options.chooser(enabled.size());
        if (pick >= enabled.size()) throw ContractViolation("evolution chooser returned an out-of-range index");
      }
      const double delta = apply(net, s, enabled[pick]);
      r.evolution_reward += delta;
      emit(options, fire_event(net, s, enabled[pick], delta));
      if (++fired_at_clock > options.livelock_bound) {
        throw LivelockError("evolution livelock: more than " + std::to_string(options.livelock_bound) +
                            " evolution firings at clock " + std::to_string(s.clock));
      }
      continue;
    }
    auto next = advance(net, s);
    if (auto* term = std::get_if<Terminal>(&next)) {
      r.terminal = term->reason;
      break;
    }
    auto& moved = std::get<TaggedMarking>(next);
    if (moved.clock > s.clock) fired_at_clock = 0;
    s = std::move(moved);
    emit(options, {TraceEvent::Kind::Advance, s.clock, s.tag, "-", "-", 0.0, s.reward});
  }
  if (r.terminal) emit(options, {TraceEvent::Kind::Terminal, s.clock, s.tag, "-", to_string(*r.terminal), 0.0, s.reward});
  r.elapsed = s.clock - start;
  r.state = std::move(s);
  return r;
}

}  // namespace aepn
