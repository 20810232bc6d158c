#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aepn/agents.hpp"
#include "aepn/net.hpp"

namespace aepn {

// Two task types, two matching resources; reward 1 per completed assignment.
AEPNet build_fig1_example();
// Resource res1 serves r1 only, res2 serves r1 and r2.
AEPNet build_task_assignment();
// Items of weight 1, 2, 2 per tick into bins of capacity 2 and 3, emptied
// every tick for curr / tot.
AEPNet build_bin_packing();
// One agent on a 2x2 grid; an order appears at (1, 1) every tick and
// expires after one tick.
AEPNet build_order_picking();

struct BenchmarkSpec {
  std::string id;
  std::function<AEPNet()> build;
  double maximum = 0.0;  // raw reward over one horizon
};

const std::vector<BenchmarkSpec>& benchmarks();
// Null when id is not a built-in model.
const BenchmarkSpec* find_benchmark(const std::string& id);

// Built-in name or path to a net document.
std::shared_ptr<const AEPNet> load_model(const std::string& name_or_path);

// Catalog index of transition(values...), values given as constant
// expressions. Throws Error when absent.
std::size_t catalog_entry(const AEPNet& net, const ActionCatalog& catalog, const std::string& transition,
                          const std::vector<std::string>& values);

// Throws Error for ids other than the four built-in models.
std::unique_ptr<ScriptedPolicy> scripted_optimal(const std::string& id, const AEPNet& net);

}  // namespace aepn
