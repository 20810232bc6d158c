#include "aepn/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "aepn/error.hpp"

namespace aepn {

Rng episode_rng(std::uint64_t seed, std::uint64_t episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32)};
  return Rng(seq);
}

std::size_t act_random(const std::vector<bool>& mask, Rng& rng) {
  const auto valid = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (valid == 0) throw ContractViolation("no valid action: mask is all false");
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, valid - 1)(rng);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && k-- == 0) return i;
  }
  return mask.size();
}

std::size_t act_random_binding(const std::vector<std::size_t>& bindings, Rng& rng) {
  std::size_t total = 0;
  for (std::size_t n : bindings) total += n;
  if (total == 0) throw ContractViolation("no valid action: no enabled binding");
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    if (k < bindings[i]) return i;
    k -= bindings[i];
  }
  return bindings.size();
}

std::size_t ScriptedPolicy::act(const Decision& d, Rng&) const {
  const auto& mask = d.mask;
  for (std::size_t i : priority_) {
    if (i < mask.size() && mask[i]) return i;
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) return i;
  }
  throw ContractViolation("no valid action: mask is all false");
}

// --- Q table -----------------------------------------------------------------

std::vector<double> QTable::values(const std::vector<double>& observation) const {
  auto it = values_.find(observation);
  if (it == values_.end()) return std::vector<double>(actions_, 0.0);
  return it->second;
}

std::vector<double>& QTable::row(const std::vector<double>& observation) {
  auto [it, _] = values_.try_emplace(observation, actions_, 0.0);
  return it->second;
}

std::size_t QTable::argmax_valid(const std::vector<double>& observation, const std::vector<bool>& mask) const {
  auto it = values_.find(observation);
  std::size_t best = mask.size();
  for (std::size_t i = 0; i < mask.size() && i < actions_; ++i) {
    if (!mask[i]) continue;
    const double q = it == values_.end() ? 0.0 : it->second[i];
    if (best == mask.size() || q > (it == values_.end() ? 0.0 : it->second[best])) best = i;
  }
  return best;
}

double QTable::max_valid(const std::vector<double>& observation, const std::vector<bool>& mask) const {
  const std::size_t best = argmax_valid(observation, mask);
  if (best == mask.size()) return 0.0;
  auto it = values_.find(observation);
  return it == values_.end() ? 0.0 : it->second[best];
}

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string QTable::save() const {
  std::string out = "aepn-qtable v1\n";
  out += "actions " + std::to_string(actions_) + "\n";
  out += "dimension " + std::to_string(dimension_) + "\n";
  out += "states " + std::to_string(values_.size()) + "\n";
  for (const auto& [obs, q] : values_) {
    for (std::size_t i = 0; i < obs.size(); ++i) out += (i ? " " : "") + exact(obs[i]);
    out += " |";
    for (double v : q) out += " " + exact(v);
    out += "\n";
  }
  return out;
}

QTable QTable::load(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto header = [&](const char* key) {
    std::string k;
    std::size_t n = 0;
    if (!std::getline(in, line)) throw SchemaError("qtable: missing '" + std::string(key) + "' line");
    std::istringstream ls(line);
    if (!(ls >> k >> n) || k != key) throw SchemaError("qtable: expected '" + std::string(key) + " N', got '" + line + "'");
    return n;
  };
  if (!std::getline(in, line) || line != "aepn-qtable v1") throw SchemaError("qtable: unsupported header");
  const std::size_t actions = header("actions");
  const std::size_t dimension = header("dimension");
  QTable t(actions, dimension);
  const std::size_t states = header("states");
  for (std::size_t s = 0; s < states; ++s) {
    if (!std::getline(in, line)) throw SchemaError("qtable: expected " + std::to_string(states) + " rows");
    const auto bar = line.find('|');
    if (bar == std::string::npos) throw SchemaError("qtable: row " + std::to_string(s) + " lacks '|'");
    std::vector<double> obs;
    std::vector<double> q;
    std::istringstream lhs(line.substr(0, bar));
    std::istringstream rhs(line.substr(bar + 1));
    for (double v; lhs >> v;) obs.push_back(v);
    for (double v; rhs >> v;) q.push_back(v);
    if (obs.size() != t.dimension_ || q.size() != t.actions_) {
      throw SchemaError("qtable: row " + std::to_string(s) + " has the wrong width");
    }
    for (double v : q) {
      if (!std::isfinite(v)) throw SchemaError("qtable: row " + std::to_string(s) + " has a non-finite value");
    }
    t.values_.emplace(std::move(obs), std::move(q));
  }
  return t;
}

QTable QTable::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

std::size_t GreedyQPolicy::act(const Decision& d, Rng&) const {
  const std::size_t a = table_->argmax_valid(d.observation, d.mask);
  if (a == d.mask.size()) throw ContractViolation("no valid action: mask is all false");
  return a;
}

// --- training ----------------------------------------------------------------

double epsilon_at(const QHyperParams& hp, std::size_t episode, std::size_t episodes) {
  const double span = hp.decay_fraction * static_cast<double>(episodes);
  if (span <= 0.0 || static_cast<double>(episode) >= span) return hp.epsilon_end;
  const double f = static_cast<double>(episode) / span;
  return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * f;
}

QTrainResult q_train(std::shared_ptr<const AEPNet> net, std::size_t episodes, const QHyperParams& hp,
                     const EnvConfig& config) {
  if (episodes == 0) throw ContractViolation("empty training");
  Environment env(std::move(net), config);
  QTrainResult out{QTable(env.catalog().size(), env.layout().dimension()), {}};
  out.episode_rewards.reserve(episodes);
  Rng rng = episode_rng(hp.seed, 0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    const double eps = epsilon_at(hp, ep, episodes);
    StepResult cur = env.reset(hp.seed + ep);
    while (!cur.terminal) {
      const std::size_t a =
          coin(rng) < eps ? act_random(cur.mask, rng) : out.table.argmax_valid(cur.observation, cur.mask);
      StepResult next = env.step(a);
      const double target =
          next.reward + (next.terminal ? 0.0 : hp.gamma * out.table.max_valid(next.observation, next.mask));
      double& q = out.table.row(cur.observation)[a];
      q += hp.alpha * (target - q);
      cur = std::move(next);
    }
    out.episode_rewards.push_back(cur.raw_reward);
  }
  return out;
}

// --- evaluation --------------------------------------------------------------

EpisodeRecord run_episode(Environment& env, const Policy& policy, Rng& rng, std::uint64_t seed) {
  EpisodeRecord rec;
  rec.seed = seed;
  StepResult r = env.reset(seed);
  rec.normalized_return += r.reward;
  while (!r.terminal) {
    const std::size_t a = policy.act(decision_of(r), rng);
    if (a >= r.mask.size() || !r.mask[a]) {
      throw ContractViolation(policy.name() + " policy chose masked action " + std::to_string(a));
    }
    rec.actions.push_back(a);
    r = env.step(a);
    rec.normalized_return += r.reward;
  }
  rec.steps = rec.actions.size();
  rec.raw_reward = r.raw_reward;
  rec.ticks = r.clock;
  return rec;
}

EvalStats evaluate_policy(std::shared_ptr<const AEPNet> net, const Policy& policy, std::size_t episodes,
                          std::uint64_t seed, const EnvConfig& config, unsigned threads) {
  if (episodes == 0) throw ContractViolation("empty evaluation");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, episodes));

  EvalStats stats;
  stats.episodes = episodes;
  stats.records.resize(episodes);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned w) {
    try {
      Environment env(net, config);
      for (std::size_t i = w; i < episodes; i += threads) {
        Rng rng = episode_rng(seed, i);
        stats.records[i] = run_episode(env, policy, rng, seed + i);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0.0;
  stats.min = stats.max = stats.records[0].raw_reward;
  for (const auto& r : stats.records) {
    sum += r.raw_reward;
    stats.min = std::min(stats.min, r.raw_reward);
    stats.max = std::max(stats.max, r.raw_reward);
  }
  stats.mean = sum / static_cast<double>(episodes);
  if (episodes > 1) {
    double ss = 0.0;
    for (const auto& r : stats.records) ss += (r.raw_reward - stats.mean) * (r.raw_reward - stats.mean);
    stats.std = std::sqrt(ss / static_cast<double>(episodes - 1));
  }
  return stats;
}

}  // namespace aepn
