#include <gtest/gtest.h>

#include <numeric>

#include "aepn/env.hpp"
#include "aepn/error.hpp"
#include "aepn/models.hpp"

using namespace aepn;

namespace {

std::shared_ptr<const AEPNet> shared(AEPNet net) { return std::make_shared<const AEPNet>(std::move(net)); }

std::size_t count_true(const std::vector<bool>& m) { return static_cast<std::size_t>(std::count(m.begin(), m.end(), true)); }

// Observation slice of one place.
std::vector<double> slice(const Environment& env, const std::vector<double>& obs, const char* place) {
  const auto p = *env.net().place_index(place);
  const auto begin = env.layout().offsets[p];
  const auto size = env.net().places[p].colorset->size();
  return {obs.begin() + static_cast<std::ptrdiff_t>(begin), obs.begin() + static_cast<std::ptrdiff_t>(begin + size)};
}

}  // namespace

TEST(Layout, SinglePlaceDimension) {
  auto task = ColorSet::enumeration("Task", {"r1", "r2"});
  const AEPNet net = NetBuilder("one")
                         .colorset(task)
                         .place("Waiting", "Task")
                         .transition("Take", Tag::A)
                         .input("Take", "Waiting", "t")
                         .single_phase(true)
                         .build();
  const auto layout = build_observation_layout(net);
  EXPECT_EQ(layout.dimension(), 2u);
  EXPECT_EQ(build_observation_layout(net, {false, true}).dimension(), 3u);
  EXPECT_EQ(build_action_catalog(net).size(), 2u);
}

TEST(Layout, BuiltinDimensions) {
  EXPECT_EQ(build_observation_layout(build_fig1_example()).dimension(), 10u);
  EXPECT_EQ(build_observation_layout(build_task_assignment()).dimension(), 9u);
  EXPECT_EQ(build_observation_layout(build_bin_packing()).dimension(), 13u);
  EXPECT_EQ(build_observation_layout(build_order_picking()).dimension(), 15u);
}

TEST(Catalog, TaskAssignmentStart) {
  const AEPNet net = build_task_assignment();
  const ActionCatalog cat = build_action_catalog(net);
  ASSERT_EQ(cat.size(), 3u);
  // Brute force over Task x Resource, keeping guard-satisfying pairs in product order.
  const auto& start = net.transitions[*net.transition_index("Start")];
  std::vector<std::string> oracle;
  for (const auto& t : net.find_colorset("Task")->enumerate()) {
    for (const auto& r : net.find_colorset("Resource")->enumerate()) {
      const std::vector<VarBinding> env{{"t", t, 0}, {"r", r, 0}};
      if (eval_bool(start.guard, env, 0)) oracle.push_back("Start(t=" + t.to_string() + ", r=" + r.to_string() + ")");
    }
  }
  std::vector<std::string> got;
  for (const auto& e : cat.entries) got.push_back(e.to_string(net));
  EXPECT_EQ(got, oracle);
}

TEST(Catalog, BinPackingMatchesGuardCount) {
  const AEPNet net = build_bin_packing();
  std::size_t oracle = 0;
  for (int w = 1; w <= 2; ++w) {
    for (int curr = 0; curr <= 3; ++curr) {
      for (int tot = 2; tot <= 3; ++tot) oracle += curr + w <= tot;
    }
  }
  EXPECT_EQ(build_action_catalog(net).size(), oracle);
  EXPECT_EQ(oracle, 8u);
}

TEST(Catalog, OrderPickingMovesAndPicks) {
  const AEPNet net = build_order_picking();
  const ActionCatalog cat = build_action_catalog(net);
  EXPECT_EQ(cat.size(), 16u + 4u);
  std::size_t picks = 0;
  for (const auto& e : cat.entries) picks += net.transitions[e.transition].name == "Pick";
  EXPECT_EQ(picks, 4u);
  EXPECT_EQ(cat.entries.front().to_string(net), "MoveD(a={x: 0, y: 0})");
}

TEST(Reset, TaskAssignmentFirstDecision) {
  Environment env(shared(build_task_assignment()));
  const StepResult r = env.reset(0);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(r.clock, 0u);
  EXPECT_EQ(count_true(r.mask), 3u);
  const auto waiting = slice(env, r.observation, "Waiting");
  EXPECT_EQ(std::accumulate(waiting.begin(), waiting.end(), 0.0), 2.0);
  const auto res = slice(env, r.observation, "Resources");
  EXPECT_EQ(std::accumulate(res.begin(), res.end(), 0.0), 2.0);
  EXPECT_EQ(r.observation.size(), env.layout().dimension());
}

TEST(Reset, Fig1Observation) {
  Environment env(shared(build_fig1_example()));
  const StepResult r = env.reset(0);
  EXPECT_EQ(slice(env, r.observation, "Waiting"), (std::vector<double>{1, 1}));
  EXPECT_EQ(slice(env, r.observation, "Resources"), (std::vector<double>{1, 1}));
  EXPECT_EQ(slice(env, r.observation, "Busy"), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(slice(env, r.observation, "Arrival"), (std::vector<double>{1, 1}));
  // Arrivals are due at 1; counted only without the availability filter.
  EXPECT_EQ(observe(env.net(), env.layout(), env.state(), true)[0], 0.0);
}

TEST(Reset, SameSeedSameResult) {
  Environment env(shared(build_order_picking()));
  const StepResult a = env.reset(42);
  const StepResult b = env.reset(42);
  EXPECT_EQ(a.observation, b.observation);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.bindings, b.bindings);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_EQ(a.clock, b.clock);
}

TEST(Reset, ImmediateTerminal) {
  auto u = ColorSet::range("U", 0, 0);
  const AEPNet net = NetBuilder("idle")
                         .colorset(u)
                         .place("P", "U")
                         .transition("Take", Tag::A)
                         .input("Take", "P", "x")
                         .single_phase(true)
                         .build();
  Environment env(shared(net));
  const StepResult r = env.reset(0);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.reason, Terminal::Reason::Deadlock);
  EXPECT_EQ(count_true(r.mask), 0u);
  EXPECT_THROW(env.step(0), ContractViolation);
}

TEST(Step, NormalizedReward) {
  Environment env(shared(build_fig1_example()));
  StepResult r = env.reset(0);
  ASSERT_EQ(count_true(r.mask), 2u);
  r = env.step(0);
  // Same tick: divisor 1, nothing earned yet.
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_EQ(r.elapsed, 0u);
  r = env.step(static_cast<std::size_t>(std::find(r.mask.begin(), r.mask.end(), true) - r.mask.begin()));
  // Two completions a tick later: (0 + 2) / (1 + 1).
  EXPECT_EQ(r.elapsed, 1u);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_EQ(r.raw_reward, 2.0);
}

TEST(Step, MaskedActionIsContractViolation) {
  Environment env(shared(build_order_picking()));
  StepResult r = env.reset(0);
  const auto masked = std::find(r.mask.begin(), r.mask.end(), false);
  ASSERT_NE(masked, r.mask.end());
  try {
    env.step(static_cast<std::size_t>(masked - r.mask.begin()));
    FAIL();
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("is masked"), std::string::npos);
  }
  EXPECT_THROW(env.step(r.mask.size()), ContractViolation);
}

TEST(Step, TerminalMaskIsAllFalse) {
  auto net = build_fig1_example();
  net.horizon = 2;
  Environment env(shared(net));
  StepResult r = env.reset(0);
  while (!r.terminal) r = env.step(static_cast<std::size_t>(std::find(r.mask.begin(), r.mask.end(), true) - r.mask.begin()));
  EXPECT_EQ(count_true(r.mask), 0u);
  EXPECT_EQ(r.reason, Terminal::Reason::Horizon);
  EXPECT_EQ(r.raw_reward, 4.0);
  EXPECT_TRUE(env.terminal());
  EXPECT_THROW(env.step(0), ContractViolation);
}

TEST(Mask, OrderPickingStart) {
  const AEPNet net = build_order_picking();
  Environment env(shared(net));
  const StepResult r = env.reset(0);
  for (std::size_t i = 0; i < env.catalog().size(); ++i) {
    const auto& e = env.catalog().entries[i];
    const std::string& name = net.transitions[e.transition].name;
    if (name == "Pick") {
      EXPECT_FALSE(r.mask[i]) << e.to_string(net);
    } else {
      EXPECT_EQ(r.mask[i], e.values[0] == ColorValue::record({{"x", 0}, {"y", 0}})) << e.to_string(net);
    }
  }
  EXPECT_EQ(count_true(r.mask), 4u);
  EXPECT_EQ(action_mask(net, env.catalog(), env.state()), r.mask);
}

TEST(Mask, PickNeedsAnOrder) {
  const AEPNet net = build_order_picking();
  Environment env(shared(net));
  StepResult r = env.reset(0);
  const auto cat = env.catalog();
  r = env.step(catalog_entry(net, cat, "MoveR", {"{x: 0, y: 0}"}));
  r = env.step(catalog_entry(net, cat, "MoveU", {"{x: 1, y: 0}"}));
  // At (1, 1) with the order from tick 1 already expired.
  const auto pick = catalog_entry(net, cat, "Pick", {"1", "1"});
  EXPECT_EQ(r.clock, 2u);
  EXPECT_TRUE(r.mask[pick]);
  r = env.step(pick);
  EXPECT_EQ(r.clock, 3u);
  EXPECT_TRUE(r.mask[pick]);
  TaggedMarking no_order = env.state();
  no_order.marking[*net.place_index("Orders")] = Multiset{};
  EXPECT_FALSE(action_mask(net, cat, no_order)[pick]);
}

TEST(Env, ScriptedTaskAssignmentReaches200) {
  const AEPNet net = build_task_assignment();
  Environment env(shared(net));
  auto policy = scripted_optimal("task_assignment", net);
  StepResult r = env.reset(0);
  Rng rng(0);
  while (!r.terminal) r = env.step(policy->act(decision_of(r), rng));
  EXPECT_EQ(r.raw_reward, 200.0);
  EXPECT_EQ(r.clock, 100u);
}

TEST(Env, GreedyMistakeDelaysR2) {
  const AEPNet net = build_task_assignment();
  Environment env(shared(net));
  const auto& cat = env.catalog();
  StepResult r = env.reset(0);
  r = env.step(catalog_entry(net, cat, "Start", {"'r1", "{can_r1: true, can_r2: true}"}));
  // res1 cannot take r2: no further action this tick.
  EXPECT_EQ(r.clock, 1u);
  EXPECT_EQ(r.raw_reward, 1.0);
  EXPECT_LE(r.reward * (1 + r.elapsed), 1.0);
}

TEST(EpisodeRecord, Json) {
  EpisodeRecord rec{7, 3, 2.0, 1.5, 4, {1, 0, 2}};
  EXPECT_EQ(rec.to_json(),
            R"({"seed":7,"steps":3,"raw_reward":2.0,"normalized_return":1.5,"ticks":4,"actions":[1,0,2]})");
}
