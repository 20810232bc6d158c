#include "aepn/models.hpp"

#include "aepn/error.hpp"
#include "aepn/net_io.hpp"

namespace aepn {

AEPNet build_fig1_example() {
  auto type = ColorSet::enumeration("Type", {"a", "b"});
  auto pair = ColorSet::record("Pair", {{"task", type}, {"res", type}});
  return NetBuilder("fig1")
      .colorset(type)
      .colorset(pair)
      .place("Arrival", "Type")
      .place("Waiting", "Type")
      .place("Resources", "Type")
      .place("Busy", "Pair")
      .transition("Arrive", Tag::E)
      .input("Arrive", "Arrival", "x")
      .output("Arrive", "Arrival", "x", "1")
      .output("Arrive", "Waiting", "x")
      .transition("Start", Tag::A, "t = r")
      .input("Start", "Waiting", "t")
      .input("Start", "Resources", "r")
      .output("Start", "Busy", "{task: t, res: r}", "1")
      .transition("Complete", Tag::E, "true", "1")
      .input("Complete", "Busy", "b")
      .output("Complete", "Resources", "b.res")
      .token("Arrival", "'a")
      .token("Arrival", "'b")
      .token("Resources", "'a")
      .token("Resources", "'b")
      .build();
}

AEPNet build_task_assignment() {
  auto gen = ColorSet::range("Gen", 0, 0);
  auto task = ColorSet::enumeration("Task", {"r1", "r2"});
  auto flag = ColorSet::boolean("Flag");
  auto caps = ColorSet::record("Caps", {{"can_r1", flag}, {"can_r2", flag}});
  auto resource = ColorSet::subset("Resource", caps,
                                   {ColorValue::record({{"can_r1", true}, {"can_r2", false}}),
                                    ColorValue::record({{"can_r1", true}, {"can_r2", true}})});
  auto busy = ColorSet::record("Assignment", {{"task", task}, {"res", resource}});
  return NetBuilder("task_assignment")
      .colorset(gen)
      .colorset(task)
      .colorset(flag)
      .colorset(caps)
      .colorset(resource)
      .colorset(busy)
      .place("Arrival", "Gen")
      .place("Waiting", "Task")
      .place("Resources", "Resource")
      .place("Busy", "Assignment")
      .transition("Arrive", Tag::E)
      .input("Arrive", "Arrival", "g")
      .output("Arrive", "Arrival", "g", "1")
      .output("Arrive", "Waiting", "'r1")
      .output("Arrive", "Waiting", "'r2")
      .transition("Start", Tag::A, "(t = 'r1 and r.can_r1) or (t = 'r2 and r.can_r2)")
      .input("Start", "Waiting", "t")
      .input("Start", "Resources", "r")
      .output("Start", "Busy", "{task: t, res: r}", "1")
      .transition("Complete", Tag::E, "true", "1")
      .input("Complete", "Busy", "b")
      .output("Complete", "Resources", "b.res")
      .token("Arrival", "0")
      .token("Resources", "{can_r1: true, can_r2: false}")
      .token("Resources", "{can_r1: true, can_r2: true}")
      .build();
}

AEPNet build_bin_packing() {
  auto unit = ColorSet::range("Unit", 0, 0);
  auto weight = ColorSet::range("Weight", 1, 2);
  auto load = ColorSet::range("Load", 0, 3);
  auto cap = ColorSet::range("Cap", 2, 3);
  auto bin = ColorSet::record("Bin", {{"curr", load}, {"tot", cap}});
  return NetBuilder("bin_packing")
      .colorset(unit)
      .colorset(weight)
      .colorset(load)
      .colorset(cap)
      .colorset(bin)
      .place("Generator", "Unit")
      .place("Items", "Weight")
      .place("Bins", "Bin")
      .place("Timers", "Cap")
      .transition("Arrive", Tag::E)
      .input("Arrive", "Generator", "g")
      .output("Arrive", "Generator", "g", "1")
      .output("Arrive", "Items", "1")
      .output("Arrive", "Items", "2")
      .output("Arrive", "Items", "2")
      .transition("Assign", Tag::A, "b.curr + w <= b.tot")
      .input("Assign", "Items", "w")
      .input("Assign", "Bins", "b")
      .output("Assign", "Bins", "{curr: b.curr + w, tot: b.tot}")
      .transition("Empty", Tag::E, "true", "ratio(c, k)")
      .input("Empty", "Bins", "{curr: c, tot: k}")
      .input("Empty", "Timers", "k")
      .output("Empty", "Bins", "{curr: 0, tot: k}")
      .output("Empty", "Timers", "k", "1")
      .token("Generator", "0")
      .token("Bins", "{curr: 0, tot: 2}")
      .token("Bins", "{curr: 0, tot: 3}")
      .token("Timers", "2", 1)
      .token("Timers", "3", 1)
      .build();
}

AEPNet build_order_picking() {
  auto unit = ColorSet::range("Unit", 0, 0);
  auto coord = ColorSet::range("Coord", 0, 1);
  auto pos = ColorSet::record("Pos", {{"x", coord}, {"y", coord}});
  NetBuilder b("order_picking");
  b.colorset(unit)
      .colorset(coord)
      .colorset(pos)
      .place("Agent", "Pos")
      .place("Moving", "Pos")
      .place("Orders", "Pos")
      .place("Timers", "Unit")
      .place("Picked", "Unit")
      .place("Slot", "Unit");
  const std::pair<const char*, const char*> moves[] = {
      {"MoveL", "{x: a.x - 1 max 0, y: a.y}"},
      {"MoveR", "{x: a.x + 1 min 1, y: a.y}"},
      {"MoveD", "{x: a.x, y: a.y - 1 max 0}"},
      {"MoveU", "{x: a.x, y: a.y + 1 min 1}"},
  };
  for (const auto& [name, target] : moves) {
    b.transition(name, Tag::A).input(name, "Agent", "a").output(name, "Moving", target, "1");
  }
  return b.transition("Pick", Tag::A, "true", "1")
      .input("Pick", "Agent", "{x: px, y: py}")
      .input("Pick", "Orders", "{x: px, y: py}")
      .output("Pick", "Moving", "{x: px, y: py}", "1")
      .output("Pick", "Picked", "0")
      .transition("Settle", Tag::E)
      .input("Settle", "Moving", "m")
      .output("Settle", "Agent", "m")
      .transition("Arrive", Tag::E)
      .input("Arrive", "Slot", "s")
      .output("Arrive", "Orders", "{x: 1, y: 1}")
      .output("Arrive", "Timers", "s", "1")
      .transition("Expire", Tag::E)
      .input("Expire", "Orders", "o")
      .input("Expire", "Timers", "u")
      .output("Expire", "Slot", "u")
      .transition("Clear", Tag::E)
      .input("Clear", "Picked", "p")
      .input("Clear", "Timers", "u")
      .output("Clear", "Slot", "u")
      .token("Agent", "{x: 0, y: 0}")
      .token("Slot", "0")
      .build();
}

const std::vector<BenchmarkSpec>& benchmarks() {
  static const std::vector<BenchmarkSpec> specs = {
      {"fig1", build_fig1_example, 200.0},
      {"task_assignment", build_task_assignment, 200.0},
      {"bin_packing", build_bin_packing, 200.0},
      {"order_picking", build_order_picking, 98.0},
  };
  return specs;
}

const BenchmarkSpec* find_benchmark(const std::string& id) {
  for (const auto& s : benchmarks()) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::shared_ptr<const AEPNet> load_model(const std::string& name_or_path) {
  if (const auto* spec = find_benchmark(name_or_path)) return std::make_shared<const AEPNet>(spec->build());
  return std::make_shared<const AEPNet>(load_net_file(name_or_path));
}

std::size_t catalog_entry(const AEPNet& net, const ActionCatalog& catalog, const std::string& transition,
                          const std::vector<std::string>& values) {
  const auto t = net.transition_index(transition);
  if (!t) throw Error("no transition " + transition);
  const auto& domains = variable_domains(net, net.transitions[*t]);
  const auto& vars = net.transitions[*t].variables;
  if (values.size() != vars.size()) throw Error(transition + ": expected " + std::to_string(vars.size()) + " values");
  const SymbolTable symbols = net.symbols();
  std::vector<ColorValue> key;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ColorValue v = eval_color(parse_expr(values[i], &symbols), {}, 0);
    auto canon = domains.at(vars[i])->normalize(v);
    if (!canon) throw Error(transition + ": " + values[i] + " is outside the domain of " + vars[i]);
    key.push_back(std::move(*canon));
  }
  auto it = catalog.index.find({*t, key});
  if (it == catalog.index.end()) throw Error("no catalog entry for " + transition);
  return it->second;
}

std::unique_ptr<ScriptedPolicy> scripted_optimal(const std::string& id, const AEPNet& net) {
  const ActionCatalog catalog = build_action_catalog(net);
  auto at = [&](const std::string& t, const std::vector<std::string>& v) { return catalog_entry(net, catalog, t, v); };
  std::vector<std::size_t> priority;
  if (id == "fig1") {
    // Any valid choice is optimal.
  } else if (id == "task_assignment") {
    priority = {at("Start", {"'r2", "{can_r1: true, can_r2: true}"}),
                at("Start", {"'r1", "{can_r1: true, can_r2: false}"})};
  } else if (id == "bin_packing") {
    priority = {at("Assign", {"2", "{curr: 0, tot: 2}"}), at("Assign", {"1", "{curr: 0, tot: 3}"}),
                at("Assign", {"2", "{curr: 1, tot: 3}"})};
  } else if (id == "order_picking") {
    priority = {at("Pick", {"0", "0"}), at("Pick", {"0", "1"}), at("Pick", {"1", "0"}), at("Pick", {"1", "1"}),
                at("MoveR", {"{x: 0, y: 0}"}), at("MoveR", {"{x: 0, y: 1}"}), at("MoveU", {"{x: 1, y: 0}"})};
  } else {
    throw Error("no scripted policy for model " + id);
  }
  return std::make_unique<ScriptedPolicy>(std::move(priority));
}

}  // namespace aepn
