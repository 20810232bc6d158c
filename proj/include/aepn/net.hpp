#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aepn/color.hpp"
#include "aepn/expr.hpp"
#include "aepn/multiset.hpp"

namespace aepn {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class Tag { A, E };

inline Tag flip(Tag t) noexcept { return t == Tag::A ? Tag::E : Tag::A; }
inline const char* to_string(Tag t) noexcept { return t == Tag::A ? "A" : "E"; }

// Input-arc inscription: a variable, a literal, or a record whose fields are
// themselves patterns. Matching binds each variable to the matched color.
struct Pattern {
  enum class Kind { Var, Literal, Record };

  Kind kind = Kind::Var;
  std::string var;
  ColorValue literal;
  std::vector<std::pair<std::string, Pattern>> fields;

  // Accepts "x", "'r1", "{x: px, y: 1}". Throws ParseError.
  static Pattern parse(std::string_view text, const SymbolTable* symbols = nullptr);
  std::string to_string() const;
  // Variables in left-to-right order, duplicates kept.
  void collect_vars(std::vector<std::string>& out) const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct Place {
  std::string name;
  std::string colorset_name;
  ColorSetPtr colorset;  // null when the name does not resolve

  friend bool operator==(const Place& a, const Place& b) {
    return a.name == b.name && a.colorset_name == b.colorset_name;
  }
};

struct InputArc {
  std::string place;
  std::size_t place_index = npos;
  Pattern pattern;
  std::size_t multiplicity = 1;

  friend bool operator==(const InputArc&, const InputArc&) = default;
};

struct OutputArc {
  std::string place;
  std::size_t place_index = npos;
  Expr value;
  Expr delay;

  friend bool operator==(const OutputArc&, const OutputArc&) = default;
};

struct Transition {
  std::string name;
  Tag tag = Tag::E;
  Expr guard;
  Expr reward;
  std::vector<InputArc> inputs;
  std::vector<OutputArc> outputs;
  // Distinct pattern variables in order of first appearance across inputs.
  std::vector<std::string> variables;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct InitialTokens {
  std::string place;
  TimedToken token;
  std::size_t count = 1;

  friend bool operator==(const InitialTokens&, const InitialTokens&) = default;
};

// Static structure of an action-evolution net. Places and transitions are
// kept sorted by name; that order fixes observation layouts and tie-breaking.
struct AEPNet {
  std::string name;
  std::vector<ColorSetPtr> colorsets;  // declaration order
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<InitialTokens> initial_marking;
  Tag initial_tag = Tag::E;
  double initial_reward = 0.0;
  Tick horizon = 100;
  // Suppresses the warning for nets that only use one tag.
  bool single_phase = false;

  ColorSetPtr find_colorset(std::string_view name) const;
  std::optional<std::size_t> place_index(std::string_view name) const;
  std::optional<std::size_t> transition_index(std::string_view name) const;
  SymbolTable symbols() const;

  // Structural equality; colorsets compare by content.
  friend bool operator==(const AEPNet& a, const AEPNet& b);
};

// Colorset of every variable of t, taken from its first binding occurrence.
// Variables whose position cannot be resolved are omitted.
std::map<std::string, ColorSetPtr> variable_domains(const AEPNet& net, const Transition& t);

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Empty iff the net is well formed.
std::vector<Diagnostic> validate_net(const AEPNet& net);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Dynamic state (M, l, tau, rho).
struct TaggedMarking {
  std::vector<Multiset> marking;  // indexed like AEPNet::places
  Tag tag = Tag::E;
  Tick clock = 0;
  double reward = 0.0;

  friend bool operator==(const TaggedMarking&, const TaggedMarking&) = default;
};

TaggedMarking initial_state(const AEPNet& net);

// Programmatic construction from expression text. build() throws ParseError
// for unparsable inscriptions; every other problem is left to validate_net.
class NetBuilder {
 public:
  explicit NetBuilder(std::string name = {});

  NetBuilder& colorset(ColorSetPtr cs);
  NetBuilder& place(std::string name, std::string colorset);
  NetBuilder& transition(std::string name, Tag tag, std::string guard = "true", std::string reward = "0");
  NetBuilder& input(const std::string& transition, std::string place, std::string pattern,
                    std::size_t multiplicity = 1);
  NetBuilder& output(const std::string& transition, std::string place, std::string value,
                     std::string delay = "0");
  NetBuilder& token(std::string place, std::string value, Tick time = 0, std::size_t count = 1);
  NetBuilder& initial_tag(Tag tag);
  NetBuilder& initial_reward(double reward);
  NetBuilder& horizon(Tick horizon);
  NetBuilder& single_phase(bool on);

  AEPNet build() const;

 private:
  struct InputSpec {
    std::string place, pattern;
    std::size_t multiplicity;
  };
  struct OutputSpec {
    std::string place, value, delay;
  };
  struct TransitionSpec {
    std::string name;
    Tag tag;
    std::string guard, reward;
    std::vector<InputSpec> inputs;
    std::vector<OutputSpec> outputs;
  };
  struct TokenSpec {
    std::string place, value;
    Tick time;
    std::size_t count;
  };
  TransitionSpec& find(const std::string& transition);

  std::string name_;
  std::vector<ColorSetPtr> colorsets_;
  std::vector<std::pair<std::string, std::string>> places_;
  std::vector<TransitionSpec> transitions_;
  std::vector<TokenSpec> tokens_;
  Tag initial_tag_ = Tag::E;
  double initial_reward_ = 0.0;
  Tick horizon_ = 100;
  bool single_phase_ = false;
};

// Resolves names to indices, sorts places/transitions and fills
// Transition::variables. Used by the builder and the loader.
void finalize(AEPNet& net);

}  // namespace aepn
