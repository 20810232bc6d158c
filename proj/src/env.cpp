#include "aepn/env.hpp"

#include <json.hpp>

#include "aepn/error.hpp"

namespace aepn {

std::string CatalogEntry::to_string(const AEPNet& net) const {
  const Transition& t = net.transitions.at(transition);
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += t.variables.at(i) + "=" + values[i].to_string();
  }
  return out + ")";
}

std::optional<std::size_t> ActionCatalog::index_of(const BindingChoice& b) const {
  std::vector<ColorValue> values;
  values.reserve(b.assignment.size());
  for (const auto& v : b.assignment) values.push_back(v.value);
  auto it = index.find({b.transition, values});
  if (it == index.end()) return std::nullopt;
  return it->second;
}

ObservationLayout build_observation_layout(const AEPNet& net, const EnvConfig& config) {
  ObservationLayout layout;
  layout.clock_feature = config.observe_clock;
  for (std::size_t p = 0; p < net.places.size(); ++p) {
    layout.offsets.push_back(layout.slots.size());
    if (!net.places[p].colorset) continue;
    for (const auto& v : net.places[p].colorset->enumerate()) layout.slots.emplace_back(p, v);
  }
  return layout;
}

ActionCatalog build_action_catalog(const AEPNet& net) {
  ActionCatalog catalog;
  for (std::size_t ti = 0; ti < net.transitions.size(); ++ti) {
    const Transition& t = net.transitions[ti];
    if (t.tag != Tag::A) continue;
    const auto domains = variable_domains(net, t);
    std::vector<const std::vector<ColorValue>*> axes;
    for (const auto& v : t.variables) {
      auto it = domains.find(v);
      if (it == domains.end()) break;
      axes.push_back(&it->second->enumerate());
    }
    if (axes.size() != t.variables.size()) continue;

    std::vector<std::size_t> digit(axes.size(), 0);
    std::vector<VarBinding> env(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) env[i].name = t.variables[i];
    bool more = true;
    while (more) {
      std::vector<ColorValue> values;
      for (std::size_t i = 0; i < axes.size(); ++i) {
        env[i].value = (*axes[i])[digit[i]];
        values.push_back(env[i].value);
      }
      bool ok = false;
      try {
        ok = eval_bool(t.guard, env, 0);
      } catch (const EvalError&) {
        ok = false;
      }
      if (ok) {
        catalog.index.emplace(std::make_pair(ti, values), catalog.entries.size());
        catalog.entries.push_back({ti, std::move(values)});
      }
      more = false;
      for (std::size_t i = axes.size(); i-- > 0;) {
        if (++digit[i] < axes[i]->size()) {
          more = true;
          break;
        }
        digit[i] = 0;
      }
    }
  }
  return catalog;
}

std::vector<double> observe(const AEPNet& net, const ObservationLayout& layout, const TaggedMarking& s,
                            bool available_only) {
  std::vector<double> obs(layout.dimension(), 0.0);
  for (std::size_t p = 0; p < s.marking.size() && p < net.places.size(); ++p) {
    const auto& cs = net.places[p].colorset;
    if (!cs) continue;
    for (const auto& [tok, n] : s.marking[p]) {
      if (available_only && tok.time > s.clock) continue;
      if (auto i = cs->index_of(tok.value)) obs[layout.offsets[p] + *i] += static_cast<double>(n);
    }
  }
  if (layout.clock_feature) obs.back() = static_cast<double>(s.clock) / static_cast<double>(net.horizon);
  return obs;
}

std::vector<std::optional<std::size_t>> catalog_bindings(const ActionCatalog& catalog,
                                                         const std::vector<BindingChoice>& enabled) {
  std::vector<std::optional<std::size_t>> out(catalog.size());
  for (std::size_t i = 0; i < enabled.size(); ++i) {
    auto idx = catalog.index_of(enabled[i]);
    if (idx && !out[*idx]) out[*idx] = i;
  }
  return out;
}

std::vector<bool> action_mask(const AEPNet& net, const ActionCatalog& catalog, const TaggedMarking& s) {
  std::vector<bool> mask(catalog.size(), false);
  if (s.tag != Tag::A || s.clock >= net.horizon) return mask;
  for (const auto& b : tag_time_enabled(net, s)) {
    if (auto idx = catalog.index_of(b)) mask[*idx] = true;
  }
  return mask;
}

// ---------------------------------------------------------------------------

Environment::Environment(std::shared_ptr<const AEPNet> net, EnvConfig config)
    : net_(std::move(net)),
      config_(config),
      layout_(build_observation_layout(*net_, config_)),
      catalog_(build_action_catalog(*net_)) {}

StepResult Environment::result(double reward, Tick elapsed) const {
  StepResult r;
  r.observation = observe(*net_, layout_, state_, config_.observe_available_only);
  r.reward = reward;
  r.mask = mask_;
  r.bindings = counts_;
  r.terminal = terminal_;
  r.clock = state_.clock;
  r.raw_reward = state_.reward;
  r.elapsed = elapsed;
  r.reason = reason_;
  return r;
}

StepResult Environment::settle(const RunResult& run, double pending) {
  state_ = run.state;
  reason_ = run.terminal;
  terminal_ = run.terminal.has_value();
  enabled_.clear();
  slots_.assign(catalog_.size(), std::nullopt);
  mask_.assign(catalog_.size(), false);
  counts_.assign(catalog_.size(), 0);
  if (!terminal_) {
    enabled_ = tag_time_enabled(*net_, state_);
    slots_ = catalog_bindings(catalog_, enabled_);
    for (const auto& b : enabled_) {
      if (auto idx = catalog_.index_of(b)) ++counts_[*idx];
    }
    for (std::size_t i = 0; i < slots_.size(); ++i) mask_[i] = slots_[i].has_value();
  }
  const Tick elapsed = state_.clock - last_clock_;
  const double reward = pending / (1.0 + static_cast<double>(elapsed));
  last_clock_ = state_.clock;
  return result(reward, elapsed);
}

StepResult Environment::reset(std::uint64_t seed) {
  seed_ = seed;
  last_clock_ = 0;
  RunOptions options;
  options.livelock_bound = config_.livelock_bound;
  options.on_event = observer_;
  RunResult run = run_to_decision_point(*net_, initial_state(*net_), options);
  if (!run.terminal) {
    // Rewards collected before the first decision are credited to the first step.
    const double pending = run.state.reward - net_->initial_reward;
    StepResult r = settle(run, 0.0);
    last_clock_ = 0;
    pending_ = pending;
    return r;
  }
  pending_ = 0.0;
  return settle(run, run.state.reward - net_->initial_reward);
}

const BindingChoice& Environment::binding_for(std::size_t action) const {
  if (terminal_) throw ContractViolation("episode has ended");
  if (action >= slots_.size() || !slots_[action]) {
    throw ContractViolation("action " + std::to_string(action) + " is masked");
  }
  return enabled_[*slots_[action]];
}

StepResult Environment::step(std::size_t action) {
  const BindingChoice b = binding_for(action);
  const double before = state_.reward;
  TaggedMarking next = fire_unchecked(*net_, state_, b);
  if (observer_) observer_(fire_event(*net_, next, b, next.reward - before));
  RunOptions options;
  options.livelock_bound = config_.livelock_bound;
  options.on_event = observer_;
  RunResult run = run_to_decision_point(*net_, std::move(next), options);
  const double pending = pending_ + (run.state.reward - before);
  pending_ = 0.0;
  return settle(run, pending);
}

std::string EpisodeRecord::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["steps"] = steps;
  j["raw_reward"] = raw_reward;
  j["normalized_return"] = normalized_return;
  j["ticks"] = ticks;
  j["actions"] = actions;
  return j.dump();
}

}  // namespace aepn
