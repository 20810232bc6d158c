#include <gtest/gtest.h>

#include <array>

#include "aepn/agents.hpp"
#include "aepn/error.hpp"
#include "aepn/models.hpp"

using namespace aepn;

namespace {

std::shared_ptr<const AEPNet> shared(AEPNet net) { return std::make_shared<const AEPNet>(std::move(net)); }

// A single decision between arms paying 1 and 3; the horizon ends it a tick later.
AEPNet bandit_net() {
  auto arm = ColorSet::enumeration("Arm", {"low", "high"});
  auto u = ColorSet::range("U", 0, 0);
  return NetBuilder("bandit")
      .colorset(arm)
      .colorset(u)
      .place("Ready", "U")
      .place("Arms", "Arm")
      .transition("Pull", Tag::A, "true", "if a = 'high then 3 else 1")
      .input("Pull", "Ready", "r")
      .input("Pull", "Arms", "a")
      .output("Pull", "Ready", "r", "1")
      .output("Pull", "Arms", "a")
      .token("Ready", "0")
      .token("Arms", "'low")
      .token("Arms", "'high")
      .horizon(1)
      .single_phase(true)
      .build();
}

}  // namespace

TEST(ActRandom, ChiSquareOverTwoOptions) {
  const std::vector<bool> mask{true, false, true};
  Rng rng(2024);
  std::array<int, 3> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[act_random(mask, rng)];
  EXPECT_EQ(counts[1], 0);
  const double expected = draws / 2.0;
  const double chi2 = (counts[0] - expected) * (counts[0] - expected) / expected +
                      (counts[2] - expected) * (counts[2] - expected) / expected;
  // One degree of freedom, p = 0.01.
  EXPECT_LT(chi2, 6.635);
}

TEST(ActRandom, SingleOptionAndDeterminism) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(act_random({false, true, false}, rng), 1u);
  Rng a(99), b(99);
  const std::vector<bool> mask{true, true, true, false, true};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(act_random(mask, a), act_random(mask, b));
  EXPECT_THROW(act_random({false, false}, rng), ContractViolation);
}

TEST(ActRandomBinding, WeightsByBindingCount) {
  const std::vector<std::size_t> bindings{1, 0, 3};
  Rng rng(5);
  std::array<int, 3> counts{};
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) ++counts[act_random_binding(bindings, rng)];
  EXPECT_EQ(counts[1], 0);
  const double e0 = draws / 4.0, e2 = draws * 3.0 / 4.0;
  const double chi2 = (counts[0] - e0) * (counts[0] - e0) / e0 + (counts[2] - e2) * (counts[2] - e2) / e2;
  EXPECT_LT(chi2, 6.635);
  EXPECT_THROW(act_random_binding({0, 0}, rng), ContractViolation);
}

TEST(EpisodeRng, StreamsDiffer) {
  EXPECT_EQ(episode_rng(1, 2)(), episode_rng(1, 2)());
  EXPECT_NE(episode_rng(1, 2)(), episode_rng(1, 3)());
  EXPECT_NE(episode_rng(1, 2)(), episode_rng(2, 2)());
}

TEST(ScriptedPolicy, PriorityThenLowest) {
  const ScriptedPolicy p({3, 1});
  Rng rng(0);
  const std::vector<double> obs;
  const std::vector<bool> m1{true, true, false, true};
  const std::vector<std::size_t> b1{1, 1, 0, 1};
  EXPECT_EQ(p.act({obs, m1, b1}, rng), 3u);
  const std::vector<bool> m2{true, false, true, false};
  const std::vector<std::size_t> b2{1, 0, 1, 0};
  EXPECT_EQ(p.act({obs, m2, b2}, rng), 0u);
}

TEST(QTable, UnseenStatesAreZero) {
  QTable q(3, 2);
  EXPECT_EQ(q.values({1, 2}), (std::vector<double>{0, 0, 0}));
  q.row({1, 2}) = {1.0, 5.0, 5.0};
  EXPECT_EQ(q.argmax_valid({1, 2}, {true, true, true}), 1u);
  EXPECT_EQ(q.argmax_valid({1, 2}, {true, false, true}), 2u);
  EXPECT_EQ(q.max_valid({1, 2}, {true, false, false}), 1.0);
  EXPECT_EQ(q.max_valid({1, 2}, {false, false, false}), 0.0);
}

TEST(QTable, SaveLoadRoundTrip) {
  QTable q(2, 3);
  q.row({0, 1, 2}) = {0.1, -1.0 / 3.0};
  q.row({2, 0, 0}) = {1e-300, 12345.678901234567};
  const std::string text = q.save();
  EXPECT_EQ(text.rfind("aepn-qtable v1\n", 0), 0u);
  const QTable back = QTable::load(text);
  EXPECT_EQ(back, q);
  EXPECT_EQ(back.save(), text);
  EXPECT_THROW(QTable::load("nonsense"), SchemaError);
  EXPECT_THROW(QTable::load("aepn-qtable v1\nactions 2\ndimension 3\nstates 1\n0 1 | 0.5\n"), SchemaError);
  EXPECT_THROW(QTable::load_file("/nonexistent/table"), IoError);
}

TEST(QTrain, BanditWithFullLearningRateStoresLastReward) {
  auto net = shared(bandit_net());
  QHyperParams hp;
  hp.alpha = 1.0;
  hp.gamma = 0.0;
  hp.seed = 3;
  const QTrainResult res = q_train(net, 200, hp);
  Environment env(net);
  const StepResult first = env.reset(0);
  const auto q = res.table.values(first.observation);
  const auto& cat = env.catalog();
  // Each pull is the only step of its episode: immediate reward over a one-tick gap.
  EXPECT_DOUBLE_EQ(q[catalog_entry(*net, cat, "Pull", {"0", "'low"})], 1.0 / 2.0);
  EXPECT_DOUBLE_EQ(q[catalog_entry(*net, cat, "Pull", {"0", "'high"})], 3.0 / 2.0);
  ASSERT_EQ(res.episode_rewards.size(), 200u);
}

TEST(QTrain, EmptyTraining) { EXPECT_THROW(q_train(shared(bandit_net()), 0, {}), ContractViolation); }

TEST(QTrain, Deterministic) {
  auto net = shared(build_task_assignment());
  QHyperParams hp;
  hp.seed = 11;
  const QTrainResult a = q_train(net, 30, hp);
  const QTrainResult b = q_train(net, 30, hp);
  EXPECT_EQ(a.table, b.table);
  EXPECT_EQ(a.episode_rewards, b.episode_rewards);
}

TEST(QTrain, EpsilonSchedule) {
  QHyperParams hp;
  EXPECT_DOUBLE_EQ(epsilon_at(hp, 0, 100), 1.0);
  EXPECT_NEAR(epsilon_at(hp, 25, 100), 0.525, 1e-12);
  EXPECT_DOUBLE_EQ(epsilon_at(hp, 50, 100), 0.05);
  EXPECT_DOUBLE_EQ(epsilon_at(hp, 99, 100), 0.05);
}

TEST(Evaluate, ScriptedTaskAssignment) {
  auto net = shared(build_task_assignment());
  const auto policy = scripted_optimal("task_assignment", *net);
  for (std::size_t n : {1u, 7u}) {
    const EvalStats s = evaluate_policy(net, *policy, n, 5);
    EXPECT_EQ(s.mean, 200.0);
    EXPECT_EQ(s.std, 0.0);
    EXPECT_EQ(s.min, 200.0);
    EXPECT_EQ(s.max, 200.0);
    EXPECT_EQ(s.records.size(), n);
  }
}

TEST(Evaluate, EmptyEvaluation) {
  auto net = shared(build_task_assignment());
  try {
    evaluate_policy(net, RandomPolicy(), 0, 0);
    FAIL();
  } catch (const ContractViolation& e) {
    EXPECT_STREQ(e.what(), "empty evaluation");
  }
}

TEST(Evaluate, ThreadCountDoesNotChangeResults) {
  auto net = shared(build_order_picking());
  const RandomPolicy policy;
  const EvalStats one = evaluate_policy(net, policy, 40, 9, {}, 1);
  const EvalStats four = evaluate_policy(net, policy, 40, 9, {}, 4);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std, four.std);
  ASSERT_EQ(one.records.size(), four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) EXPECT_EQ(one.records[i].to_json(), four.records[i].to_json());
}

TEST(Evaluate, SampleStatistics) {
  auto net = shared(build_order_picking());
  const EvalStats s = evaluate_policy(net, RandomPolicy(), 25, 1);
  double sum = 0, lo = 1e9, hi = -1e9;
  for (const auto& r : s.records) {
    sum += r.raw_reward;
    lo = std::min(lo, r.raw_reward);
    hi = std::max(hi, r.raw_reward);
  }
  const double mean = sum / 25;
  double ss = 0;
  for (const auto& r : s.records) ss += (r.raw_reward - mean) * (r.raw_reward - mean);
  EXPECT_NEAR(s.mean, mean, 1e-12);
  EXPECT_NEAR(s.std, std::sqrt(ss / 24), 1e-12);
  EXPECT_EQ(s.min, lo);
  EXPECT_EQ(s.max, hi);
}

TEST(Evaluate, PoliciesRespectTheMask) {
  auto net = shared(build_bin_packing());
  for (const auto& rec : evaluate_policy(net, RandomMaskPolicy(), 5, 2).records) EXPECT_GT(rec.steps, 0u);
  // run_episode steps through env, which rejects masked actions.
  const ScriptedPolicy bad({0});
  EXPECT_NO_THROW(evaluate_policy(net, bad, 2, 0));
}
