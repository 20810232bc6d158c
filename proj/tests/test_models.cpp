#include <gtest/gtest.h>

#include "aepn/error.hpp"
#include "aepn/models.hpp"

using namespace aepn;

namespace {

std::shared_ptr<const AEPNet> shared(AEPNet net) { return std::make_shared<const AEPNet>(std::move(net)); }

}  // namespace

TEST(Models, BuildersValidate) {
  for (const auto& spec : benchmarks()) {
    const AEPNet net = spec.build();
    EXPECT_TRUE(validate_net(net).empty()) << spec.id;
    EXPECT_EQ(net.name, spec.id);
    EXPECT_EQ(net.horizon, 100u);
    EXPECT_EQ(net.initial_tag, Tag::E);
  }
  EXPECT_EQ(find_benchmark("nope"), nullptr);
  EXPECT_EQ(find_benchmark("order_picking")->maximum, 98.0);
}

TEST(Models, ScriptedOptimaAreExact) {
  for (const auto& spec : benchmarks()) {
    auto net = shared(spec.build());
    const auto policy = scripted_optimal(spec.id, *net);
    const EvalStats s = evaluate_policy(net, *policy, 5, 31);
    EXPECT_EQ(s.mean, spec.maximum) << spec.id;
    EXPECT_EQ(s.std, 0.0) << spec.id;
  }
  EXPECT_THROW(scripted_optimal("unknown", build_fig1_example()), Error);
}

TEST(Models, TaskAssignmentShape) {
  const AEPNet net = build_task_assignment();
  EXPECT_EQ(net.places.size(), 4u);
  EXPECT_EQ(net.transitions.size(), 3u);
  EXPECT_EQ(net.transitions[*net.transition_index("Start")].tag, Tag::A);
  EXPECT_EQ(net.transitions[*net.transition_index("Arrive")].tag, Tag::E);
  EXPECT_EQ(net.transitions[*net.transition_index("Complete")].tag, Tag::E);
}

TEST(Models, FullBinEmptiesToOne) {
  const AEPNet net = build_bin_packing();
  TaggedMarking s = initial_state(net);
  const auto bins = *net.place_index("Bins");
  const auto timers = *net.place_index("Timers");
  const auto full = ColorValue::record({{"curr", 2}, {"tot", 2}});
  s.marking[bins] = Multiset{{{full, 0}, 1}};
  s.marking[timers] = Multiset{{{ColorValue(2), 0}, 1}};
  s.marking[*net.place_index("Generator")] = Multiset{};
  const auto en = tag_time_enabled(net, s);
  ASSERT_EQ(en.size(), 1u);
  EXPECT_EQ(net.transitions[en[0].transition].name, "Empty");
  const TaggedMarking after = fire(net, s, en[0]);
  EXPECT_DOUBLE_EQ(after.reward, 1.0);
  EXPECT_EQ(after.marking[bins].count({ColorValue::record({{"curr", 0}, {"tot", 2}}), 0}), 1u);
  EXPECT_EQ(after.marking[timers].count({ColorValue(2), 1}), 1u);
}

TEST(Models, BinPackingOptimalTickPaysTwo) {
  const AEPNet net = build_bin_packing();
  Environment env(shared(net));
  auto policy = scripted_optimal("bin_packing", net);
  Rng rng(0);
  StepResult r = env.reset(0);
  double last = 0;
  while (!r.terminal) {
    r = env.step(policy->act(decision_of(r), rng));
    if (r.elapsed > 0 && r.clock >= 2) {
      EXPECT_DOUBLE_EQ(r.raw_reward - last, 2.0) << "tick " << r.clock;
    }
    if (r.elapsed > 0) last = r.raw_reward;
  }
  EXPECT_DOUBLE_EQ(r.raw_reward, 200.0);
}

TEST(Models, OrderPickingOrdersLiveOneTick) {
  const AEPNet net = build_order_picking();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Environment env(shared(net));
    std::size_t arrivals = 0, picks = 0, expiries = 0;
    std::vector<Tick> expire_clocks;
    env.set_observer([&](const TraceEvent& e) {
      if (e.kind != TraceEvent::Kind::Fire) return;
      arrivals += e.transition == "Arrive";
      picks += e.transition == "Pick";
      if (e.transition == "Expire") {
        ++expiries;
        expire_clocks.push_back(e.clock);
      }
    });
    Rng rng = episode_rng(seed, 0);
    const RandomPolicy policy;
    StepResult r = env.reset(seed);
    while (!r.terminal) {
      // At a decision point the only order on the grid arrived this tick.
      const auto& orders = env.state().marking[*net.place_index("Orders")];
      EXPECT_LE(orders.size(), 1u);
      for (const auto& [tok, n] : orders) EXPECT_EQ(tok.time, env.state().clock);
      r = env.step(policy.act(decision_of(r), rng));
    }
    const auto& left = env.state().marking[*net.place_index("Orders")];
    EXPECT_EQ(arrivals, picks + expiries + left.size()) << seed;
    for (const auto& [tok, n] : left) EXPECT_EQ(tok.time, r.clock);
    // Orders expire from tick 1 on, one tick after they arrived.
    for (Tick c : expire_clocks) EXPECT_GE(c, 1u);
  }
}

TEST(Models, LoadModelByNameOrPath) {
  EXPECT_EQ(*load_model("bin_packing"), build_bin_packing());
  EXPECT_EQ(*load_model(std::string(AEPN_MODELS_DIR) + "/order_picking.json"), build_order_picking());
  EXPECT_THROW(load_model("/no/such/model.json"), IoError);
}

TEST(Models, CatalogEntryLookup) {
  const AEPNet net = build_task_assignment();
  const ActionCatalog cat = build_action_catalog(net);
  const auto i = catalog_entry(net, cat, "Start", {"'r2", "{can_r1: true, can_r2: true}"});
  EXPECT_EQ(cat.entries[i].to_string(net), "Start(t='r2, r={can_r1: true, can_r2: true})");
  EXPECT_THROW(catalog_entry(net, cat, "Start", {"'r2", "{can_r1: true, can_r2: false}"}), Error);
  EXPECT_THROW(catalog_entry(net, cat, "Nope", {}), Error);
}
