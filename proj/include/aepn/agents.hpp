#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "aepn/env.hpp"

namespace aepn {

using Rng = std::mt19937_64;

// Per-episode stream derived from (seed, episode).
Rng episode_rng(std::uint64_t seed, std::uint64_t episode);

// What a policy sees at a decision point.
struct Decision {
  const std::vector<double>& observation;
  const std::vector<bool>& mask;
  const std::vector<std::size_t>& bindings;  // enabled bindings per catalog entry
};

inline Decision decision_of(const StepResult& r) { return {r.observation, r.mask, r.bindings}; }

class Policy {
 public:
  virtual ~Policy() = default;
  // Returns an index whose mask entry is true.
  virtual std::size_t act(const Decision& d, Rng& rng) const = 0;
  virtual std::string name() const = 0;
};

// Uniform over the true entries. Throws ContractViolation on an all-false mask.
std::size_t act_random(const std::vector<bool>& mask, Rng& rng);
// Entry i with probability bindings[i] / sum, i.e. uniform over enabled bindings.
std::size_t act_random_binding(const std::vector<std::size_t>& bindings, Rng& rng);

// Baseline: uniform over the enabled bindings.
class RandomPolicy final : public Policy {
 public:
  std::size_t act(const Decision& d, Rng& rng) const override { return act_random_binding(d.bindings, rng); }
  std::string name() const override { return "random"; }
};

// Uniform over catalog entries, ignoring how many bindings stand behind each.
class RandomMaskPolicy final : public Policy {
 public:
  std::size_t act(const Decision& d, Rng& rng) const override { return act_random(d.mask, rng); }
  std::string name() const override { return "random-mask"; }
};

// First valid index of a fixed priority list, else the lowest valid index.
class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<std::size_t> priority) : priority_(std::move(priority)) {}

  std::size_t act(const Decision& d, Rng& rng) const override;
  std::string name() const override { return "scripted"; }
  const std::vector<std::size_t>& priority() const noexcept { return priority_; }

 private:
  std::vector<std::size_t> priority_;
};

// Action values keyed by the observation vector; unseen states are all zero.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t actions, std::size_t dimension) : actions_(actions), dimension_(dimension) {}

  std::size_t actions() const noexcept { return actions_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t states() const noexcept { return values_.size(); }

  // Zeros for unseen states.
  std::vector<double> values(const std::vector<double>& observation) const;
  std::vector<double>& row(const std::vector<double>& observation);
  // Highest value among valid actions; lowest index on ties. 0 for an all-false mask.
  double max_valid(const std::vector<double>& observation, const std::vector<bool>& mask) const;
  std::size_t argmax_valid(const std::vector<double>& observation, const std::vector<bool>& mask) const;

  // Text format with a versioned header; values printed exactly.
  std::string save() const;
  // Throws SchemaError on malformed input.
  static QTable load(const std::string& text);
  static QTable load_file(const std::string& path);

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t actions_ = 0;
  std::size_t dimension_ = 0;
  std::map<std::vector<double>, std::vector<double>> values_;
};

class GreedyQPolicy final : public Policy {
 public:
  explicit GreedyQPolicy(std::shared_ptr<const QTable> table) : table_(std::move(table)) {}

  std::size_t act(const Decision& d, Rng& rng) const override;
  std::string name() const override { return "qtable"; }

 private:
  std::shared_ptr<const QTable> table_;
};

struct QHyperParams {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  // Share of training over which epsilon decays linearly.
  double decay_fraction = 0.5;
  std::uint64_t seed = 0;
};

double epsilon_at(const QHyperParams& hp, std::size_t episode, std::size_t episodes);

struct QTrainResult {
  QTable table;
  std::vector<double> episode_rewards;  // raw network reward per episode
};

// Throws ContractViolation for zero episodes.
QTrainResult q_train(std::shared_ptr<const AEPNet> net, std::size_t episodes, const QHyperParams& hp,
                     const EnvConfig& config = {});

// Plays one episode to the end.
EpisodeRecord run_episode(Environment& env, const Policy& policy, Rng& rng, std::uint64_t seed);

struct EvalStats {
  std::size_t episodes = 0;
  double mean = 0.0;
  double std = 0.0;  // sample, n - 1
  double min = 0.0;
  double max = 0.0;
  std::vector<EpisodeRecord> records;
};

// Episode i runs on its own environment with episode_rng(seed, i); results
// are reduced by episode index, so the thread count never changes them.
// Throws ContractViolation("empty evaluation") for zero episodes.
EvalStats evaluate_policy(std::shared_ptr<const AEPNet> net, const Policy& policy, std::size_t episodes,
                          std::uint64_t seed, const EnvConfig& config = {}, unsigned threads = 0);

}  // namespace aepn
