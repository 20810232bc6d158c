#include <gtest/gtest.h>

#include "aepn/engine.hpp"
#include "aepn/error.hpp"
#include "aepn/models.hpp"

using namespace aepn;

namespace {

TimedToken sym(const char* s, Tick t) { return {ColorValue::symbol(s), t}; }

TimedToken pair(const char* task, const char* res, Tick t) {
  return {ColorValue::record({{"task", ColorValue::symbol(task)}, {"res", ColorValue::symbol(res)}}), t};
}

const Multiset& at(const AEPNet& net, const TaggedMarking& s, const char* place) {
  return s.marking[*net.place_index(place)];
}

TaggedMarking fire_all(const AEPNet& net, TaggedMarking s) {
  for (auto en = tag_time_enabled(net, s); !en.empty(); en = tag_time_enabled(net, s)) s = fire(net, s, en.front());
  return s;
}

TaggedMarking advanced(const AEPNet& net, const TaggedMarking& s) {
  auto r = advance(net, s);
  EXPECT_TRUE(std::holds_alternative<TaggedMarking>(r));
  return std::get<TaggedMarking>(r);
}

// Three single-token places feeding one E transition.
AEPNet join_net(Tick t1, Tick t2, Tick t3) {
  auto u = ColorSet::range("U", 0, 0);
  return NetBuilder("join")
      .colorset(u)
      .place("P1", "U")
      .place("P2", "U")
      .place("P3", "U")
      .place("Out", "U")
      .transition("Join", Tag::E)
      .input("Join", "P1", "a")
      .input("Join", "P2", "b")
      .input("Join", "P3", "c")
      .output("Join", "Out", "0")
      .token("P1", "0", t1)
      .token("P2", "0", t2)
      .token("P3", "0", t3)
      .single_phase(true)
      .build();
}

struct Fig1 : ::testing::Test {
  AEPNet net = build_fig1_example();
  TaggedMarking a = initial_state(net);
  TaggedMarking b = advanced(net, fire_all(net, a));
  TaggedMarking c = advanced(net, fire_all(net, b));
  TaggedMarking d = fire_all(net, c);
};

}  // namespace

TEST_F(Fig1, StateB) {
  EXPECT_EQ(b.tag, Tag::A);
  EXPECT_EQ(b.clock, 0u);
  EXPECT_EQ(b.reward, 0.0);
  EXPECT_EQ(at(net, b, "Arrival"), (Multiset{{sym("a", 1), 1}, {sym("b", 1), 1}}));
  EXPECT_EQ(at(net, b, "Waiting"), (Multiset{{sym("a", 0), 1}, {sym("b", 0), 1}}));
  EXPECT_EQ(at(net, b, "Resources"), (Multiset{{sym("a", 0), 1}, {sym("b", 0), 1}}));
  EXPECT_TRUE(at(net, b, "Busy").empty());
}

TEST_F(Fig1, StateC) {
  EXPECT_EQ(c.tag, Tag::E);
  EXPECT_EQ(c.clock, 1u);
  EXPECT_EQ(c.reward, 0.0);
  EXPECT_EQ(at(net, c, "Busy"), (Multiset{{pair("a", "a", 1), 1}, {pair("b", "b", 1), 1}}));
  EXPECT_TRUE(at(net, c, "Waiting").empty());
  EXPECT_TRUE(at(net, c, "Resources").empty());
}

TEST_F(Fig1, StateD) {
  EXPECT_EQ(d.tag, Tag::E);
  EXPECT_EQ(d.clock, 1u);
  EXPECT_EQ(d.reward, 2.0);
  EXPECT_EQ(at(net, d, "Arrival"), (Multiset{{sym("a", 2), 1}, {sym("b", 2), 1}}));
  EXPECT_EQ(at(net, d, "Waiting"), (Multiset{{sym("a", 1), 1}, {sym("b", 1), 1}}));
  EXPECT_EQ(at(net, d, "Resources"), (Multiset{{sym("a", 1), 1}, {sym("b", 1), 1}}));
  EXPECT_TRUE(at(net, d, "Busy").empty());
}

TEST_F(Fig1, EnumerateStartInStateB) {
  const auto en = enumerate_enabled(net, b, *net.transition_index("Start"));
  ASSERT_EQ(en.size(), 2u);
  EXPECT_EQ(en[0].to_string(net), "Start(t='a@0, r='a@0)");
  EXPECT_EQ(en[1].to_string(net), "Start(t='b@0, r='b@0)");
}

TEST_F(Fig1, TagTimeEnabled) {
  const auto in_a = tag_time_enabled(net, a);
  ASSERT_EQ(in_a.size(), 2u);
  for (const auto& x : in_a) EXPECT_EQ(net.transitions[x.transition].name, "Arrive");
  // Start has tokens in state a but the wrong tag.
  const auto in_b = tag_time_enabled(net, b);
  ASSERT_EQ(in_b.size(), 2u);
  for (const auto& x : in_b) EXPECT_EQ(net.transitions[x.transition].name, "Start");
  // In state c Arrive and Complete are due at 1; only the tag filter holds back the future.
  TaggedMarking early = c;
  early.clock = 0;
  EXPECT_TRUE(tag_time_enabled(net, early).empty());
}

TEST_F(Fig1, EnablingTimeOfComplete) {
  const auto en = enumerate_enabled(net, c, *net.transition_index("Complete"));
  ASSERT_EQ(en.size(), 2u);
  EXPECT_EQ(en[0].enabling_time, 1u);
  EXPECT_EQ(enumerate_enabled(net, b, *net.transition_index("Start"))[0].enabling_time, 0u);
}

TEST_F(Fig1, CompleteTwiceAddsTwo) {
  TaggedMarking s = c;
  const auto complete = *net.transition_index("Complete");
  for (int i = 0; i < 2; ++i) {
    const auto en = enumerate_enabled(net, s, complete);
    s = fire(net, s, en.front());
  }
  EXPECT_EQ(s.reward, 2.0);
  EXPECT_EQ(at(net, s, "Resources"), (Multiset{{sym("a", 1), 1}, {sym("b", 1), 1}}));
  EXPECT_EQ(s.clock, c.clock);
  EXPECT_EQ(s.tag, c.tag);
}

TEST_F(Fig1, FireWithoutRewardAndWithDelay) {
  const auto en = tag_time_enabled(net, a);
  const TaggedMarking s = fire(net, a, en.front());
  EXPECT_EQ(s.reward, 0.0);
  EXPECT_EQ(at(net, s, "Arrival").count(sym("a", 1)), 1u);
  EXPECT_EQ(at(net, s, "Waiting").count(sym("a", 0)), 1u);
}

TEST_F(Fig1, FireRejectsDisabledBindings) {
  const auto start = enumerate_enabled(net, b, *net.transition_index("Start"));
  EXPECT_THROW(fire(net, a, start.front()), NotFireable);
  try {
    fire(net, a, start.front());
  } catch (const NotFireable& e) {
    EXPECT_EQ(std::string(e.what()).rfind("not fireable", 0), 0u);
  }
}

TEST_F(Fig1, AdvanceFlipsWithoutClockUpdate) {
  const TaggedMarking e = fire_all(net, a);
  EXPECT_EQ(e.tag, Tag::E);
  const TaggedMarking next = advanced(net, e);
  EXPECT_EQ(next.tag, Tag::A);
  EXPECT_EQ(next.clock, 0u);
  EXPECT_EQ(next.marking, e.marking);
}

TEST_F(Fig1, AdvanceAfterActionsMovesClock) {
  const TaggedMarking started = fire_all(net, b);
  const TaggedMarking next = advanced(net, started);
  EXPECT_EQ(next.tag, Tag::E);
  EXPECT_EQ(next.clock, 1u);
}

TEST_F(Fig1, AdvancePastHorizon) {
  AEPNet shortnet = net;
  shortnet.horizon = 1;
  const TaggedMarking after_d = advanced(shortnet, d);
  EXPECT_EQ(after_d.tag, Tag::A);
  EXPECT_EQ(after_d.clock, 1u);
  // After both starts every binding is due at 2, past the horizon.
  const auto r = advance(shortnet, fire_all(shortnet, after_d));
  ASSERT_TRUE(std::holds_alternative<Terminal>(r));
  EXPECT_EQ(std::get<Terminal>(r).reason, Terminal::Reason::Horizon);
  EXPECT_EQ(std::get<Terminal>(r).clock, 1u);
}

TEST_F(Fig1, RunToDecisionPoint) {
  const RunResult first = run_to_decision_point(net, a);
  EXPECT_EQ(first.state, b);
  EXPECT_EQ(first.evolution_reward, 0.0);
  EXPECT_EQ(first.elapsed, 0u);
  EXPECT_FALSE(first.terminal);

  const RunResult second = run_to_decision_point(net, c);
  EXPECT_EQ(second.evolution_reward, 2.0);
  EXPECT_EQ(second.elapsed, 0u);
  EXPECT_EQ(second.state, advanced(net, d));

  const RunResult noop = run_to_decision_point(net, b);
  EXPECT_EQ(noop.state, b);
  EXPECT_EQ(noop.evolution_reward, 0.0);
  EXPECT_EQ(noop.elapsed, 0u);
}

TEST_F(Fig1, EvolutionOrdersConverge) {
  const auto arrivals = tag_time_enabled(net, a);
  ASSERT_EQ(arrivals.size(), 2u);
  const TaggedMarking ab = fire(net, fire(net, a, arrivals[0]), arrivals[1]);
  const TaggedMarking ba = fire(net, fire(net, a, arrivals[1]), arrivals[0]);
  EXPECT_EQ(ab, ba);
  EXPECT_EQ(advanced(net, ab), b);
}

TEST(Engine, EnablingTimeIsMaxOfConsumed) {
  for (auto [t1, t2, t3, want] : {std::tuple<Tick, Tick, Tick, Tick>{0, 0, 0, 0}, {2, 5, 3, 5}, {7, 1, 1, 7}}) {
    const AEPNet net = join_net(t1, t2, t3);
    const auto en = enumerate_enabled(net, initial_state(net), 0);
    ASSERT_EQ(en.size(), 1u);
    EXPECT_EQ(en[0].enabling_time, want);
  }
}

TEST(Engine, EmptyMarkingHasNoBindings) {
  const AEPNet net = build_fig1_example();
  TaggedMarking s = initial_state(net);
  for (auto& m : s.marking) m = Multiset{};
  for (std::size_t t = 0; t < net.transitions.size(); ++t) EXPECT_TRUE(enumerate_enabled(net, s, t).empty());
  const auto r = advance(net, s);
  ASSERT_TRUE(std::holds_alternative<Terminal>(r));
  EXPECT_EQ(std::get<Terminal>(r).reason, Terminal::Reason::Deadlock);
}

TEST(Engine, TaskAssignmentStartBindings) {
  const AEPNet net = build_task_assignment();
  const RunResult r = run_to_decision_point(net, initial_state(net));
  const auto en = enumerate_enabled(net, r.state, *net.transition_index("Start"));
  EXPECT_EQ(en.size(), 3u);
  for (const auto& b : en) {
    // res1 never takes r2.
    const bool r2 = b.assignment[0].value == ColorValue::symbol("r2");
    EXPECT_FALSE(r2 && !b.assignment[1].value.field("can_r2").as_bool());
  }
}

TEST(Engine, FutureBindingsAreNotEnabled) {
  const AEPNet net = join_net(0, 3, 0);
  const TaggedMarking s = initial_state(net);
  EXPECT_TRUE(tag_time_enabled(net, s).empty());
  const TaggedMarking moved = advanced(net, s);
  EXPECT_EQ(moved.clock, 3u);
  EXPECT_EQ(moved.tag, Tag::E);
  EXPECT_EQ(tag_time_enabled(net, moved).size(), 1u);
}

TEST(Engine, LivelockIsReported) {
  auto u = ColorSet::range("U", 0, 0);
  const AEPNet net = NetBuilder("spin")
                         .colorset(u)
                         .place("P", "U")
                         .transition("Spin", Tag::E)
                         .input("Spin", "P", "x")
                         .output("Spin", "P", "x")
                         .token("P", "0")
                         .single_phase(true)
                         .build();
  RunOptions opts;
  opts.livelock_bound = 50;
  try {
    run_to_decision_point(net, initial_state(net), opts);
    FAIL();
  } catch (const LivelockError& e) {
    EXPECT_NE(std::string(e.what()).find("evolution livelock"), std::string::npos);
  }
}

TEST(Engine, TraceLines) {
  TraceEvent e;
  e.kind = TraceEvent::Kind::Fire;
  e.clock = 1;
  e.tag = Tag::E;
  e.transition = "Complete";
  e.assignment = "b={task: 'a, res: 'a}@1";
  e.delta = 1;
  e.reward = 2;
  EXPECT_EQ(e.to_line(), "FIRE\t1\tE\tComplete\tb={task: 'a, res: 'a}@1\t1.000\t2.000");
}
