#include "aepn/color.hpp"

#include <algorithm>
#include <set>

#include "aepn/error.hpp"

namespace aepn {

ColorValue ColorValue::record(RecordFields fields) {
  if (fields.empty()) throw Error("record value must have at least one field");
  std::set<std::string> seen;
  for (const auto& [name, _] : fields) {
    if (!seen.insert(name).second) throw Error("duplicate record field '" + name + "'");
  }
  ColorValue v;
  v.data_ = std::make_shared<const RecordBox>(RecordBox{std::move(fields)});
  return v;
}

std::int64_t ColorValue::as_int() const {
  if (!is_int()) throw EvalError("expected integer, got " + to_string());
  return std::get<std::int64_t>(data_);
}

bool ColorValue::as_bool() const {
  if (!is_bool()) throw EvalError("expected boolean, got " + to_string());
  return std::get<bool>(data_);
}

const std::string& ColorValue::as_symbol() const {
  if (!is_symbol()) throw EvalError("expected symbol, got " + to_string());
  return std::get<Symbol>(data_).name;
}

const RecordFields& ColorValue::fields() const {
  if (!is_record()) throw EvalError("expected record, got " + to_string());
  return std::get<std::shared_ptr<const RecordBox>>(data_)->fields;
}

const ColorValue* ColorValue::find_field(const std::string& name) const noexcept {
  if (!is_record()) return nullptr;
  for (const auto& [n, v] : std::get<std::shared_ptr<const RecordBox>>(data_)->fields) {
    if (n == name) return &v;
  }
  return nullptr;
}

const ColorValue& ColorValue::field(const std::string& name) const {
  if (const auto* v = find_field(name)) return *v;
  throw EvalError("value " + to_string() + " has no field '" + name + "'");
}

std::string ColorValue::to_string() const {
  switch (kind()) {
    case Kind::Int:
      return std::to_string(std::get<std::int64_t>(data_));
    case Kind::Bool:
      return std::get<bool>(data_) ? "true" : "false";
    case Kind::Symbol:
      return "'" + std::get<Symbol>(data_).name;
    case Kind::Record: {
      std::string out = "{";
      bool first = true;
      for (const auto& [n, v] : fields()) {
        if (!first) out += ", ";
        first = false;
        out += n + ": " + v.to_string();
      }
      return out + "}";
    }
  }
  return {};
}

std::strong_ordering operator<=>(const ColorValue& a, const ColorValue& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case ColorValue::Kind::Int:
      return std::get<std::int64_t>(a.data_) <=> std::get<std::int64_t>(b.data_);
    case ColorValue::Kind::Bool:
      return std::get<bool>(a.data_) <=> std::get<bool>(b.data_);
    case ColorValue::Kind::Symbol:
      return std::get<Symbol>(a.data_) <=> std::get<Symbol>(b.data_);
    case ColorValue::Kind::Record: {
      const auto& pa = std::get<std::shared_ptr<const ColorValue::RecordBox>>(a.data_);
      const auto& pb = std::get<std::shared_ptr<const ColorValue::RecordBox>>(b.data_);
      if (pa == pb) return std::strong_ordering::equal;
      const auto& fa = pa->fields;
      const auto& fb = pb->fields;
      const std::size_t n = std::min(fa.size(), fb.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (auto c = fa[i].first <=> fb[i].first; c != 0) return c;
        if (auto c = fa[i].second <=> fb[i].second; c != 0) return c;
      }
      return fa.size() <=> fb.size();
    }
  }
  return std::strong_ordering::equal;
}

bool operator==(const ColorValue& a, const ColorValue& b) { return (a <=> b) == 0; }

std::string TimedToken::to_string() const { return value.to_string() + "@" + std::to_string(time); }

// ---------------------------------------------------------------------------

ColorSetPtr ColorSet::range(std::string name, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw Error("colorset " + name + ": empty range");
  std::shared_ptr<ColorSet> cs(new ColorSet());
  cs->name_ = std::move(name);
  cs->kind_ = Kind::Range;
  cs->lo_ = lo;
  cs->hi_ = hi;
  cs->finish();
  return cs;
}

ColorSetPtr ColorSet::boolean(std::string name) {
  std::shared_ptr<ColorSet> cs(new ColorSet());
  cs->name_ = std::move(name);
  cs->kind_ = Kind::Bool;
  cs->finish();
  return cs;
}

ColorSetPtr ColorSet::enumeration(std::string name, std::vector<std::string> symbols) {
  if (symbols.empty()) throw Error("colorset " + name + ": empty enumeration");
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    if (!seen.insert(s).second) throw Error("colorset " + name + ": duplicate symbol '" + s + "'");
  }
  std::shared_ptr<ColorSet> cs(new ColorSet());
  cs->name_ = std::move(name);
  cs->kind_ = Kind::Enum;
  cs->symbols_ = std::move(symbols);
  cs->finish();
  return cs;
}

ColorSetPtr ColorSet::record(std::string name,
                             std::vector<std::pair<std::string, ColorSetPtr>> fields) {
  if (fields.empty()) throw Error("colorset " + name + ": record without fields");
  std::set<std::string> seen;
  for (const auto& [f, cs] : fields) {
    if (!cs) throw Error("colorset " + name + ": field '" + f + "' has no colorset");
    if (!seen.insert(f).second) throw Error("colorset " + name + ": duplicate field '" + f + "'");
  }
  std::shared_ptr<ColorSet> cs(new ColorSet());
  cs->name_ = std::move(name);
  cs->kind_ = Kind::Record;
  cs->fields_ = std::move(fields);
  cs->finish();
  return cs;
}

ColorSetPtr ColorSet::subset(std::string name, ColorSetPtr base, std::vector<ColorValue> members) {
  if (!base) throw Error("colorset " + name + ": subset without base");
  if (members.empty()) throw Error("colorset " + name + ": empty subset");
  std::shared_ptr<ColorSet> cs(new ColorSet());
  cs->name_ = std::move(name);
  cs->kind_ = Kind::Subset;
  std::set<ColorValue> seen;
  for (const auto& m : members) {
    auto canon = base->normalize(m);
    if (!canon) throw Error("colorset " + cs->name_ + ": " + m.to_string() + " is not in " + base->name());
    if (!seen.insert(*canon).second) throw Error("colorset " + cs->name_ + ": duplicate member " + m.to_string());
    cs->values_.push_back(*canon);
  }
  cs->base_ = std::move(base);
  cs->finish();
  return cs;
}

void ColorSet::finish() {
  switch (kind_) {
    case Kind::Range:
      for (std::int64_t v = lo_; v <= hi_; ++v) values_.emplace_back(v);
      break;
    case Kind::Bool:
      values_ = {ColorValue(false), ColorValue(true)};
      break;
    case Kind::Enum:
      for (const auto& s : symbols_) values_.push_back(ColorValue::symbol(s));
      break;
    case Kind::Record: {
      // Odometer over the field domains, last field fastest.
      std::vector<std::size_t> digit(fields_.size(), 0);
      bool more = true;
      while (more) {
        RecordFields rec;
        rec.reserve(fields_.size());
        for (std::size_t i = 0; i < fields_.size(); ++i) {
          rec.emplace_back(fields_[i].first, fields_[i].second->enumerate()[digit[i]]);
        }
        values_.push_back(ColorValue::record(std::move(rec)));
        more = false;
        for (std::size_t i = fields_.size(); i-- > 0;) {
          if (++digit[i] < fields_[i].second->size()) {
            more = true;
            break;
          }
          digit[i] = 0;
        }
      }
      break;
    }
    case Kind::Subset:
      break;
  }
  for (std::size_t i = 0; i < values_.size(); ++i) index_.emplace(values_[i], i);
}

std::optional<ColorValue> ColorSet::normalize(const ColorValue& v) const {
  switch (kind_) {
    case Kind::Range:
      if (v.is_int() && v.as_int() >= lo_ && v.as_int() <= hi_) return v;
      return std::nullopt;
    case Kind::Bool:
      if (v.is_bool()) return v;
      return std::nullopt;
    case Kind::Enum:
      if (v.is_symbol() && std::find(symbols_.begin(), symbols_.end(), v.as_symbol()) != symbols_.end()) {
        return v;
      }
      return std::nullopt;
    case Kind::Record: {
      if (!v.is_record() || v.fields().size() != fields_.size()) return std::nullopt;
      RecordFields out;
      out.reserve(fields_.size());
      for (const auto& [name, cs] : fields_) {
        const ColorValue* f = v.find_field(name);
        if (!f) return std::nullopt;
        auto canon = cs->normalize(*f);
        if (!canon) return std::nullopt;
        out.emplace_back(name, std::move(*canon));
      }
      return ColorValue::record(std::move(out));
    }
    case Kind::Subset: {
      auto canon = base_->normalize(v);
      if (!canon || !index_.contains(*canon)) return std::nullopt;
      return canon;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> ColorSet::index_of(const ColorValue& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ColorSetPtr ColorSet::field_colorset(const std::string& field) const {
  const ColorSet& s = structural();
  for (const auto& [name, cs] : s.fields_) {
    if (name == field) return cs;
  }
  return nullptr;
}

bool operator==(const ColorSet& a, const ColorSet& b) {
  if (a.name_ != b.name_ || a.kind_ != b.kind_ || a.values_ != b.values_) return false;
  if (a.fields_.size() != b.fields_.size()) return false;
  for (std::size_t i = 0; i < a.fields_.size(); ++i) {
    if (a.fields_[i].first != b.fields_[i].first || a.fields_[i].second->name() != b.fields_[i].second->name()) {
      return false;
    }
  }
  return (a.base_ == nullptr) == (b.base_ == nullptr) && (!a.base_ || a.base_->name() == b.base_->name());
}

}  // namespace aepn
