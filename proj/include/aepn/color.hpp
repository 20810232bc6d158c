#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace aepn {

// Simulation time in whole clock ticks.
using Tick = std::uint64_t;

struct Symbol {
  std::string name;

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

class ColorValue;
using RecordFields = std::vector<std::pair<std::string, ColorValue>>;

// An immutable token color: integer, boolean, symbol or record of named
// colors. Values of different kinds order by kind first, so any two values
// are comparable.
class ColorValue {
 public:
  enum class Kind { Int, Bool, Symbol, Record };

  ColorValue() : data_(std::int64_t{0}) {}
  ColorValue(std::int64_t v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  ColorValue(int v) : data_(std::int64_t{v}) {}  // NOLINT(google-explicit-constructor)
  ColorValue(bool v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  ColorValue(Symbol s) : data_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
  ColorValue(const char*) = delete;

  static ColorValue symbol(std::string name) { return ColorValue(Symbol{std::move(name)}); }
  // Throws Error if fields is empty or has duplicate names.
  static ColorValue record(RecordFields fields);

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_int() const noexcept { return kind() == Kind::Int; }
  bool is_bool() const noexcept { return kind() == Kind::Bool; }
  bool is_symbol() const noexcept { return kind() == Kind::Symbol; }
  bool is_record() const noexcept { return kind() == Kind::Record; }

  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_symbol() const;
  const RecordFields& fields() const;
  // Throws EvalError when this is not a record or lacks the field.
  const ColorValue& field(const std::string& name) const;
  const ColorValue* find_field(const std::string& name) const noexcept;

  // Literal syntax accepted by the expression parser: 3, true, 'r1, {x: 0, y: 1}.
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const ColorValue& a, const ColorValue& b);
  friend bool operator==(const ColorValue& a, const ColorValue& b);

 private:
  struct RecordBox {
    RecordFields fields;
  };
  std::variant<std::int64_t, bool, Symbol, std::shared_ptr<const RecordBox>> data_;
};

struct TimedToken {
  ColorValue value;
  Tick time = 0;

  std::string to_string() const;

  friend std::strong_ordering operator<=>(const TimedToken& a, const TimedToken& b) {
    if (auto c = a.value <=> b.value; c != 0) return c;
    return a.time <=> b.time;
  }
  friend bool operator==(const TimedToken& a, const TimedToken& b) = default;
};

class ColorSet;
using ColorSetPtr = std::shared_ptr<const ColorSet>;

// A finite, non-empty domain of colors with a fixed canonical enumeration:
// ranges ascend, symbols and subset members keep declaration order, records
// enumerate the lexicographic product of their fields (first field slowest).
class ColorSet {
 public:
  enum class Kind { Range, Bool, Enum, Record, Subset };

  static ColorSetPtr range(std::string name, std::int64_t lo, std::int64_t hi);
  static ColorSetPtr boolean(std::string name);
  static ColorSetPtr enumeration(std::string name, std::vector<std::string> symbols);
  static ColorSetPtr record(std::string name,
                            std::vector<std::pair<std::string, ColorSetPtr>> fields);
  // An explicit list of members drawn from base.
  static ColorSetPtr subset(std::string name, ColorSetPtr base, std::vector<ColorValue> members);

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<ColorValue>& enumerate() const noexcept { return values_; }

  // Returns v in canonical form (record fields reordered to declaration
  // order) when it belongs to this set.
  std::optional<ColorValue> normalize(const ColorValue& v) const;
  bool contains(const ColorValue& v) const { return normalize(v).has_value(); }
  // Position of a canonical value in enumerate().
  std::optional<std::size_t> index_of(const ColorValue& v) const;

  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<std::pair<std::string, ColorSetPtr>>& fields() const noexcept { return fields_; }
  const ColorSetPtr& base() const noexcept { return base_; }
  // Colorset of a record field, looking through subsets; null if absent.
  ColorSetPtr field_colorset(const std::string& field) const;
  // The non-subset colorset this one draws values from.
  const ColorSet& structural() const noexcept { return base_ ? base_->structural() : *this; }

  // Same name, kind, members and (by name) component colorsets.
  friend bool operator==(const ColorSet& a, const ColorSet& b);

 private:
  ColorSet() = default;
  void finish();

  std::string name_;
  Kind kind_ = Kind::Range;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::vector<std::string> symbols_;
  std::vector<std::pair<std::string, ColorSetPtr>> fields_;
  ColorSetPtr base_;
  std::vector<ColorValue> values_;
  std::map<ColorValue, std::size_t> index_;
};

}  // namespace aepn
