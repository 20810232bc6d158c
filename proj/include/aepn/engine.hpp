#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aepn/net.hpp"

namespace aepn {

struct ConsumedToken {
  std::size_t place = npos;
  TimedToken token;
  std::size_t count = 1;

  friend bool operator==(const ConsumedToken&, const ConsumedToken&) = default;
};

// A transition together with an assignment of its variables. Each variable
// carries the time of the token it was read from.
struct BindingChoice {
  std::size_t transition = npos;
  std::vector<VarBinding> assignment;  // Transition::variables order
  std::vector<ConsumedToken> consumed;  // one entry per input arc
  Tick enabling_time = 0;

  // "x='a@0, r='a@0"; "-" for an empty assignment.
  std::string assignment_text() const;
  // "Start(t='a@0, r='a@0)"
  std::string to_string(const AEPNet& net) const;

  friend bool operator==(const BindingChoice&, const BindingChoice&) = default;
};

// Every binding of t in s that satisfies the guard and the multiplicities,
// ignoring time. Order: input arcs left to right, tokens ascending.
std::vector<BindingChoice> enumerate_enabled(const AEPNet& net, const TaggedMarking& s, std::size_t t);

// Bindings of current-tag transitions that may fire now: enabling time at
// most the clock and no strictly earlier current-tag binding. Sorted by
// transition name, then enumeration order.
std::vector<BindingChoice> tag_time_enabled(const AEPNet& net, const TaggedMarking& s);

// Throws NotFireable unless b is in tag_time_enabled(net, s).
TaggedMarking fire(const AEPNet& net, const TaggedMarking& s, const BindingChoice& b);
// Fires without the enabledness check. Throws InsufficientTokens or
// EvalError if b does not fit s.
TaggedMarking fire_unchecked(const AEPNet& net, const TaggedMarking& s, const BindingChoice& b);
// Reward the firing of b would add at the given clock.
double binding_reward(const AEPNet& net, const BindingChoice& b, Tick clock);

struct Terminal {
  enum class Reason { Horizon, Deadlock };
  Reason reason = Reason::Deadlock;
  Tick clock = 0;
};

const char* to_string(Terminal::Reason r) noexcept;

using AdvanceResult = std::variant<TaggedMarking, Terminal>;

// Next-event progression when nothing can fire now.
AdvanceResult advance(const AEPNet& net, const TaggedMarking& s);

struct TraceEvent {
  enum class Kind { Fire, Advance, Terminal };
  Kind kind = Kind::Fire;
  Tick clock = 0;
  Tag tag = Tag::E;
  std::string transition;  // "-" unless Fire
  std::string assignment;  // terminal reason for Terminal
  double delta = 0.0;
  double reward = 0.0;

  // Tab-separated line without the trailing newline.
  std::string to_line() const;
};

TraceEvent fire_event(const AEPNet& net, const TaggedMarking& after, const BindingChoice& b, double delta);

struct RunOptions {
  std::size_t livelock_bound = 10000;
  // Picks among simultaneously enabled evolution bindings; first when unset.
  std::function<std::size_t(std::size_t)> chooser;
  std::function<void(const TraceEvent&)> on_event;
};

struct RunResult {
  TaggedMarking state;
  std::optional<Terminal::Reason> terminal;
  double evolution_reward = 0.0;
  Tick elapsed = 0;
};

// Fires evolutions and advances the clock until a decision point (tag A
// with something to choose, before the horizon) or termination.
// Throws LivelockError past options.livelock_bound firings at one clock value.
RunResult run_to_decision_point(const AEPNet& net, TaggedMarking s, const RunOptions& options = {});

}  // namespace aepn
