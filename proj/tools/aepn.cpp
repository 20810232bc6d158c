// aepn: validate, trace, evaluate and train on action-evolution nets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aepn/agents.hpp"
#include "aepn/error.hpp"
#include "aepn/models.hpp"
#include "aepn/net_io.hpp"

namespace {

using namespace aepn;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUnreadable = 2;

struct Common {
  std::string model;
  std::string policy = "random";
  std::optional<std::uint64_t> seed;
  std::optional<Tick> horizon;
};

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

std::shared_ptr<const AEPNet> open_model(const Common& c) {
  auto net = load_model(c.model);
  const auto diags = validate_net(*net);
  if (has_errors(diags)) {
    std::string msg = "model " + c.model + " is not valid:";
    for (const auto& d : diags) msg += "\n  " + d.message;
    throw Error(msg);
  }
  if (!c.horizon) return net;
  AEPNet copy = *net;
  copy.horizon = *c.horizon;
  return std::make_shared<const AEPNet>(std::move(copy));
}

std::unique_ptr<Policy> make_policy(const std::string& spec, const AEPNet& net) {
  if (spec == "random") return std::make_unique<RandomPolicy>();
  if (spec == "random-mask") return std::make_unique<RandomMaskPolicy>();
  if (spec == "scripted") return scripted_optimal(net.name, net);
  if (spec.rfind("qtable:", 0) == 0) {
    auto table = std::make_shared<const QTable>(QTable::load_file(spec.substr(7)));
    if (table->actions() != build_action_catalog(net).size()) {
      throw Error("q-table " + spec.substr(7) + " does not match the model's action catalog");
    }
    return std::make_unique<GreedyQPolicy>(std::move(table));
  }
  throw Error("unknown policy '" + spec + "' (random, random-mask, scripted, qtable:PATH)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

int cmd_validate(const std::string& path) {
  std::shared_ptr<const AEPNet> net;
  try {
    net = load_model(path);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    std::cout << "error: " << e.what() << "\n";
    return kFailed;
  }
  const auto diags = validate_net(*net);
  for (const auto& d : diags) {
    std::cout << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ") << d.message << "\n";
  }
  return diags.empty() ? kOk : kFailed;
}

int cmd_trace(const Common& c, const std::string& out_path) {
  auto net = open_model(c);
  auto policy = make_policy(c.policy, *net);
  const std::uint64_t seed = resolve_seed(c);
  std::string log;
  Environment env(net);
  env.set_observer([&](const TraceEvent& e) { log += e.to_line() + "\n"; });
  Rng rng = episode_rng(seed, 0);
  StepResult r = env.reset(seed);
  while (!r.terminal) r = env.step(policy->act(decision_of(r), rng));
  write_text(out_path, log);
  return kOk;
}

int cmd_eval(const Common& c, std::size_t episodes, const std::string& format, const std::string& out_path,
             const std::string& episodes_path, unsigned threads) {
  if (episodes == 0) throw Error("empty evaluation");
  auto net = open_model(c);
  auto policy = make_policy(c.policy, *net);
  const std::uint64_t seed = resolve_seed(c);
  const EvalStats s = evaluate_policy(net, *policy, episodes, seed, {}, threads);
  std::string text;
  if (format == "csv") {
    text = "model,policy,episodes,mean,std,min,max,seed\n";
    text += c.model + "," + c.policy + "," + std::to_string(episodes) + "," + fixed3(s.mean) + "," + fixed3(s.std) +
            "," + fixed3(s.min) + "," + fixed3(s.max) + "," + std::to_string(seed) + "\n";
  } else {
    nlohmann::ordered_json names{{"model", c.model}, {"policy", c.policy}};
    const std::string model = names["model"].dump();
    const std::string pol = names["policy"].dump();
    text = "{\"model\":" + model + ",\"policy\":" + pol + ",\"episodes\":" + std::to_string(episodes) +
           ",\"mean\":" + fixed3(s.mean) + ",\"std\":" + fixed3(s.std) + ",\"min\":" + fixed3(s.min) +
           ",\"max\":" + fixed3(s.max) + ",\"seed\":" + std::to_string(seed) + "}\n";
  }
  write_text(out_path, text);
  if (!episodes_path.empty()) {
    std::string lines;
    for (const auto& rec : s.records) lines += rec.to_json() + "\n";
    write_text(episodes_path, lines);
  }
  return kOk;
}

int cmd_train(const Common& c, std::size_t episodes, QHyperParams hp, const std::string& epsilon,
              const std::string& out_path, std::string curve_path) {
  if (episodes == 0) {
    std::cerr << "error: empty training\n";
    return kFailed;
  }
  if (out_path.empty()) throw Error("--out is required");
  const auto colon = epsilon.find(':');
  if (colon == std::string::npos) throw Error("--epsilon expects START:END, got " + epsilon);
  try {
    hp.epsilon_start = std::stod(epsilon.substr(0, colon));
    hp.epsilon_end = std::stod(epsilon.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error("--epsilon expects START:END, got " + epsilon);
  }
  auto net = open_model(c);
  hp.seed = resolve_seed(c);
  const QTrainResult res = q_train(net, episodes, hp);
  write_text(out_path, res.table.save());
  if (curve_path.empty()) curve_path = out_path + ".curve.csv";
  std::string curve = "episode,raw_reward\n";
  for (std::size_t i = 0; i < res.episode_rewards.size(); ++i) {
    curve += std::to_string(i) + "," + fixed3(res.episode_rewards[i]) + "\n";
  }
  write_text(curve_path, curve);
  std::cerr << "trained " << episodes << " episodes, " << res.table.states() << " states\n";
  return kOk;
}

void add_common(CLI::App* cmd, Common& c, bool with_policy) {
  cmd->add_option("model", c.model, "Built-in model name or net document path")->required();
  if (with_policy) cmd->add_option("--policy", c.policy, "random | random-mask | scripted | qtable:PATH");
  cmd->add_option("--seed", c.seed, "Random seed; generated and printed when omitted");
  cmd->add_option("--horizon", c.horizon, "Override the net's horizon")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action-evolution Petri net engine"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a net document");
  validate->add_option("net", validate_path, "Net document path or built-in model name")->required();

  Common trace_opts;
  std::string trace_out;
  auto* trace = app.add_subcommand("trace", "Print the event log of one episode");
  add_common(trace, trace_opts, true);
  trace->add_option("--out", trace_out, "Output file (default: stdout)");

  Common eval_opts;
  std::size_t eval_episodes = 1000;
  std::string eval_format = "csv";
  std::string eval_out;
  std::string eval_records;
  unsigned eval_threads = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a policy");
  add_common(eval, eval_opts, true);
  eval->add_option("--episodes", eval_episodes, "Number of episodes");
  eval->add_option("--format", eval_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  eval->add_option("--out", eval_out, "Output file (default: stdout)");
  eval->add_option("--episodes-out", eval_records, "Per-episode JSON-lines file");
  eval->add_option("--threads", eval_threads, "Worker threads (0: hardware concurrency)");

  Common train_opts;
  std::size_t train_episodes = 5000;
  QHyperParams hp;
  std::string epsilon = "1.0:0.05";
  std::string train_out;
  std::string train_curve;
  auto* train = app.add_subcommand("train", "Train a tabular Q-learning policy");
  add_common(train, train_opts, false);
  train->add_option("--episodes", train_episodes, "Training episodes");
  train->add_option("--alpha", hp.alpha, "Learning rate");
  train->add_option("--gamma", hp.gamma, "Discount factor");
  train->add_option("--epsilon", epsilon, "Exploration START:END, decayed linearly");
  train->add_option("--decay-fraction", hp.decay_fraction, "Share of training spent decaying epsilon");
  train->add_option("--out", train_out, "Q-table file")->required();
  train->add_option("--curve", train_curve, "Training curve CSV (default: OUT.curve.csv)");

  std::string export_model;
  std::string export_out;
  auto* exp = app.add_subcommand("export", "Write a built-in model as a net document");
  exp->add_option("model", export_model, "Built-in model name")->required();
  exp->add_option("--out", export_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailed;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*trace) return cmd_trace(trace_opts, trace_out);
    if (*eval) return cmd_eval(eval_opts, eval_episodes, eval_format, eval_out, eval_records, eval_threads);
    if (*train) return cmd_train(train_opts, train_episodes, hp, epsilon, train_out, train_curve);
    if (*exp) {
      const auto* spec = find_benchmark(export_model);
      if (!spec) throw Error("unknown model " + export_model);
      write_text(export_out, save_net(spec->build()));
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnreadable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
