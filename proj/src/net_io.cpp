#include "aepn/net_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aepn/error.hpp"

namespace aepn {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw SchemaError(path + ": " + msg); }

void allow_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) fail(path, "unknown key '" + k + "'");
  }
}

const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

std::string get_string(const Json& obj, const char* key, const std::string& path, const char* fallback = nullptr) {
  if (!obj.contains(key)) {
    if (fallback) return fallback;
    fail(path, std::string("missing key '") + key + "'");
  }
  const Json& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::uint64_t get_natural(const Json& obj, const char* key, const std::string& path, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(path + "." + key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

// Inscriptions may be written as expression strings or plain JSON scalars.
std::string inscription(const Json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  fail(path, "expected an expression string");
}

Expr parse_at(const std::string& text, const SymbolTable& symbols, const std::string& path) {
  try {
    return parse_expr(text, &symbols);
  } catch (const ParseError& e) {
    throw e.in(path);
  }
}

ColorValue constant_at(const std::string& text, const SymbolTable& symbols, const std::string& path) {
  Expr e = parse_at(text, symbols, path);
  if (!free_vars(e).empty() || uses_now(e)) fail(path, "expected a constant value, got '" + text + "'");
  try {
    return eval_color(e, {}, 0);
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

ColorSetPtr load_colorset(const AEPNet& net, const std::string& name, const Json& spec, const std::string& path) {
  auto lookup = [&](const Json& ref, const std::string& at) {
    if (!ref.is_string()) fail(at, "expected a colorset name");
    auto cs = net.find_colorset(ref.get<std::string>());
    if (!cs) fail(at, "unknown colorset " + ref.get<std::string>());
    return cs;
  };
  try {
    if (spec.is_string()) {
      if (spec.get<std::string>() == "bool") return ColorSet::boolean(name);
      fail(path, "unknown colorset kind '" + spec.get<std::string>() + "'");
    }
    require_object(spec, path);
    if (spec.contains("range")) {
      allow_keys(spec, path, {"range"});
      const Json& r = spec.at("range");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
        fail(path + ".range", "expected [lo, hi]");
      }
      return ColorSet::range(name, r[0].get<std::int64_t>(), r[1].get<std::int64_t>());
    }
    if (spec.contains("enum")) {
      allow_keys(spec, path, {"enum"});
      const Json& e = spec.at("enum");
      if (!e.is_array()) fail(path + ".enum", "expected a list of symbols");
      std::vector<std::string> symbols;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (!e[i].is_string()) fail(path + ".enum[" + std::to_string(i) + "]", "expected a symbol name");
        symbols.push_back(e[i].get<std::string>());
      }
      return ColorSet::enumeration(name, std::move(symbols));
    }
    if (spec.contains("record")) {
      allow_keys(spec, path, {"record"});
      const Json& r = require_object(spec.at("record"), path + ".record");
      std::vector<std::pair<std::string, ColorSetPtr>> fields;
      for (const auto& [f, ref] : r.items()) fields.emplace_back(f, lookup(ref, path + ".record." + f));
      return ColorSet::record(name, std::move(fields));
    }
    if (spec.contains("subset")) {
      allow_keys(spec, path, {"subset", "values"});
      ColorSetPtr base = lookup(spec.at("subset"), path + ".subset");
      if (!spec.contains("values") || !spec.at("values").is_array()) fail(path + ".values", "expected a list");
      const SymbolTable symbols = net.symbols();
      std::vector<ColorValue> members;
      const Json& vals = spec.at("values");
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const std::string at = path + ".values[" + std::to_string(i) + "]";
        members.push_back(constant_at(inscription(vals[i], at), symbols, at));
      }
      return ColorSet::subset(name, std::move(base), std::move(members));
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path, "expected one of range, enum, record, subset or \"bool\"");
}

Json save_colorset(const ColorSet& cs) {
  switch (cs.kind()) {
    case ColorSet::Kind::Range:
      return Json{{"range", {cs.lo(), cs.hi()}}};
    case ColorSet::Kind::Bool:
      return "bool";
    case ColorSet::Kind::Enum:
      return Json{{"enum", cs.symbols()}};
    case ColorSet::Kind::Record: {
      Json fields = Json::object();
      for (const auto& [f, sub] : cs.fields()) fields[f] = sub->name();
      return Json{{"record", fields}};
    }
    case ColorSet::Kind::Subset: {
      Json values = Json::array();
      for (const auto& v : cs.enumerate()) values.push_back(v.to_string());
      return Json{{"subset", cs.base()->name()}, {"values", values}};
    }
  }
  return nullptr;
}

Tag load_tag(const Json& obj, const char* key, const std::string& path) {
  const std::string t = get_string(obj, key, path, "E");
  if (t == "A") return Tag::A;
  if (t == "E") return Tag::E;
  fail(path + "." + key, "tag must be \"A\" or \"E\"");
}

}  // namespace

AEPNet load_net(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("document: invalid JSON: ") + e.what());
  }
  require_object(doc, "document");
  allow_keys(doc, "document",
             {"name", "colorsets", "places", "transitions", "initial_marking", "initial_tag", "initial_reward",
              "horizon", "single_phase"});

  AEPNet net;
  net.name = get_string(doc, "name", "document", "");
  if (doc.contains("colorsets")) {
    for (const auto& [name, spec] : require_object(doc.at("colorsets"), "colorsets").items()) {
      const std::string path = "colorsets." + name;
      if (net.find_colorset(name)) fail(path, "declared twice");
      net.colorsets.push_back(load_colorset(net, name, spec, path));
    }
  }
  const SymbolTable symbols = net.symbols();

  if (doc.contains("places")) {
    for (const auto& [name, cs] : require_object(doc.at("places"), "places").items()) {
      if (!cs.is_string()) fail("places." + name, "expected a colorset name");
      net.places.push_back({name, cs.get<std::string>(), nullptr});
    }
  }

  if (doc.contains("transitions")) {
    for (const auto& [name, spec] : require_object(doc.at("transitions"), "transitions").items()) {
      const std::string path = "transitions." + name;
      require_object(spec, path);
      allow_keys(spec, path, {"tag", "guard", "reward", "inputs", "outputs"});
      Transition t;
      t.name = name;
      if (!spec.contains("tag")) fail(path, "missing key 'tag'");
      t.tag = load_tag(spec, "tag", path);
      t.guard = parse_at(spec.contains("guard") ? inscription(spec.at("guard"), path + ".guard") : "true", symbols,
                         path + ".guard");
      t.reward = parse_at(spec.contains("reward") ? inscription(spec.at("reward"), path + ".reward") : "0", symbols,
                          path + ".reward");
      if (spec.contains("inputs")) {
        const Json& arr = spec.at("inputs");
        if (!arr.is_array()) fail(path + ".inputs", "expected a list of arcs");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const std::string at = path + ".inputs[" + std::to_string(i) + "]";
          require_object(arr[i], at);
          allow_keys(arr[i], at, {"place", "pattern", "multiplicity"});
          InputArc in;
          in.place = get_string(arr[i], "place", at);
          const std::string pattern = get_string(arr[i], "pattern", at);
          try {
            in.pattern = Pattern::parse(pattern, &symbols);
          } catch (const ParseError& e) {
            throw e.in(at + ".pattern");
          }
          in.multiplicity = get_natural(arr[i], "multiplicity", at, 1);
          if (in.multiplicity == 0) fail(at + ".multiplicity", "must be at least 1");
          t.inputs.push_back(std::move(in));
        }
      }
      if (spec.contains("outputs")) {
        const Json& arr = spec.at("outputs");
        if (!arr.is_array()) fail(path + ".outputs", "expected a list of arcs");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const std::string at = path + ".outputs[" + std::to_string(i) + "]";
          require_object(arr[i], at);
          allow_keys(arr[i], at, {"place", "value", "delay"});
          OutputArc out;
          out.place = get_string(arr[i], "place", at);
          if (!arr[i].contains("value")) fail(at, "missing key 'value'");
          out.value = parse_at(inscription(arr[i].at("value"), at + ".value"), symbols, at + ".value");
          out.delay = parse_at(arr[i].contains("delay") ? inscription(arr[i].at("delay"), at + ".delay") : "0",
                               symbols, at + ".delay");
          t.outputs.push_back(std::move(out));
        }
      }
      net.transitions.push_back(std::move(t));
    }
  }

  if (doc.contains("initial_marking")) {
    for (const auto& [place, list] : require_object(doc.at("initial_marking"), "initial_marking").items()) {
      const std::string path = "initial_marking." + place;
      if (!list.is_array()) fail(path, "expected a list of tokens");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        require_object(list[i], at);
        allow_keys(list[i], at, {"value", "time", "count"});
        if (!list[i].contains("value")) fail(at, "missing key 'value'");
        InitialTokens tok;
        tok.place = place;
        tok.token.value = constant_at(inscription(list[i].at("value"), at + ".value"), symbols, at + ".value");
        tok.token.time = get_natural(list[i], "time", at, 0);
        tok.count = get_natural(list[i], "count", at, 1);
        net.initial_marking.push_back(std::move(tok));
      }
    }
  }

  net.initial_tag = load_tag(doc, "initial_tag", "document");
  if (doc.contains("initial_reward")) {
    if (!doc.at("initial_reward").is_number()) fail("initial_reward", "expected a number");
    net.initial_reward = doc.at("initial_reward").get<double>();
  }
  net.horizon = get_natural(doc, "horizon", "document", 100);
  if (doc.contains("single_phase")) {
    if (!doc.at("single_phase").is_boolean()) fail("single_phase", "expected true or false");
    net.single_phase = doc.at("single_phase").get<bool>();
  }
  finalize(net);
  return net;
}

AEPNet load_net_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return load_net(buf.str());
}

std::string save_net(const AEPNet& net) {
  Json doc = Json::object();
  doc["name"] = net.name;
  Json colorsets = Json::object();
  for (const auto& cs : net.colorsets) colorsets[cs->name()] = save_colorset(*cs);
  doc["colorsets"] = colorsets;
  Json places = Json::object();
  for (const auto& p : net.places) places[p.name] = p.colorset_name;
  doc["places"] = places;
  Json transitions = Json::object();
  for (const auto& t : net.transitions) {
    Json spec = Json::object();
    spec["tag"] = to_string(t.tag);
    spec["guard"] = unparse(t.guard);
    spec["reward"] = unparse(t.reward);
    Json inputs = Json::array();
    for (const auto& in : t.inputs) {
      inputs.push_back({{"place", in.place}, {"pattern", in.pattern.to_string()}, {"multiplicity", in.multiplicity}});
    }
    spec["inputs"] = inputs;
    Json outputs = Json::array();
    for (const auto& out : t.outputs) {
      outputs.push_back({{"place", out.place}, {"value", unparse(out.value)}, {"delay", unparse(out.delay)}});
    }
    spec["outputs"] = outputs;
    transitions[t.name] = spec;
  }
  doc["transitions"] = transitions;
  Json marking = Json::object();
  for (const auto& tok : net.initial_marking) {
    if (!marking.contains(tok.place)) marking[tok.place] = Json::array();
    marking[tok.place].push_back(
        {{"value", tok.token.value.to_string()}, {"time", tok.token.time}, {"count", tok.count}});
  }
  doc["initial_marking"] = marking;
  doc["initial_tag"] = to_string(net.initial_tag);
  doc["initial_reward"] = net.initial_reward;
  doc["horizon"] = net.horizon;
  doc["single_phase"] = net.single_phase;
  return doc.dump(2) + "\n";
}

}  // namespace aepn
