#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aepn/engine.hpp"

namespace aepn {

struct EnvConfig {
  // Count only tokens whose time has been reached.
  bool observe_available_only = false;
  // Append clock / horizon as a final feature.
  bool observe_clock = false;
  std::size_t livelock_bound = 10000;
};

// One slot per (place, color): places in name order, colors in canonical order.
struct ObservationLayout {
  std::vector<std::pair<std::size_t, ColorValue>> slots;
  std::vector<std::size_t> offsets;  // first slot of each place
  bool clock_feature = false;

  std::size_t dimension() const noexcept { return slots.size() + (clock_feature ? 1 : 0); }
};

struct CatalogEntry {
  std::size_t transition = npos;
  std::vector<ColorValue> values;  // Transition::variables order

  std::string to_string(const AEPNet& net) const;
};

// Every guard-satisfying assignment of every action transition over the
// variables' colorsets: transitions in name order, then the product of the
// domains with the last variable fastest.
struct ActionCatalog {
  std::vector<CatalogEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::optional<std::size_t> index_of(const BindingChoice& b) const;

  std::map<std::pair<std::size_t, std::vector<ColorValue>>, std::size_t> index;
};

ObservationLayout build_observation_layout(const AEPNet& net, const EnvConfig& config = {});
ActionCatalog build_action_catalog(const AEPNet& net);

std::vector<double> observe(const AEPNet& net, const ObservationLayout& layout, const TaggedMarking& s,
                            bool available_only = false);

// Catalog index -> position in enabled of its first binding.
std::vector<std::optional<std::size_t>> catalog_bindings(const ActionCatalog& catalog,
                                                         const std::vector<BindingChoice>& enabled);
// True for catalog entries with a tag-time-enabled binding at a decision
// point; all false otherwise.
std::vector<bool> action_mask(const AEPNet& net, const ActionCatalog& catalog, const TaggedMarking& s);

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;  // normalized by 1 + elapsed ticks
  std::vector<bool> mask;
  // Number of tag-time-enabled bindings behind each catalog entry.
  std::vector<std::size_t> bindings;
  bool terminal = false;
  Tick clock = 0;
  double raw_reward = 0.0;  // network reward so far
  Tick elapsed = 0;
  std::optional<Terminal::Reason> reason;
};

// Step/reset interface over one net. Single owner; not thread-safe.
class Environment {
 public:
  explicit Environment(std::shared_ptr<const AEPNet> net, EnvConfig config = {});

  StepResult reset(std::uint64_t seed = 0);
  // Throws ContractViolation for masked or out-of-range actions and after
  // the episode has ended.
  StepResult step(std::size_t action);

  const AEPNet& net() const noexcept { return *net_; }
  const ObservationLayout& layout() const noexcept { return layout_; }
  const ActionCatalog& catalog() const noexcept { return catalog_; }
  const TaggedMarking& state() const noexcept { return state_; }
  const std::vector<bool>& mask() const noexcept { return mask_; }
  bool terminal() const noexcept { return terminal_; }
  std::uint64_t seed() const noexcept { return seed_; }
  // Binding that step(action) would fire.
  const BindingChoice& binding_for(std::size_t action) const;

  void set_observer(std::function<void(const TraceEvent&)> observer) { observer_ = std::move(observer); }

 private:
  StepResult settle(const RunResult& run, double pending);
  StepResult result(double reward, Tick elapsed) const;

  std::shared_ptr<const AEPNet> net_;
  EnvConfig config_;
  ObservationLayout layout_;
  ActionCatalog catalog_;
  TaggedMarking state_;
  std::vector<BindingChoice> enabled_;
  std::vector<std::optional<std::size_t>> slots_;
  std::vector<bool> mask_;
  std::vector<std::size_t> counts_;
  bool terminal_ = true;
  std::optional<Terminal::Reason> reason_;
  Tick last_clock_ = 0;
  double pending_ = 0.0;
  std::uint64_t seed_ = 0;
  std::function<void(const TraceEvent&)> observer_;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double raw_reward = 0.0;
  double normalized_return = 0.0;
  Tick ticks = 0;
  std::vector<std::size_t> actions;

  // Single-line JSON object.
  std::string to_json() const;
};

}  // namespace aepn
