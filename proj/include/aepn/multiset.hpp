#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "aepn/color.hpp"

namespace aepn {

// Counted bag of timed tokens. Entries never hold a zero multiplicity.
class Multiset {
 public:
  using Entries = std::map<TimedToken, std::size_t>;
  using const_iterator = Entries::const_iterator;

  Multiset() = default;
  Multiset(std::initializer_list<std::pair<const TimedToken, std::size_t>> init);

  void add(const TimedToken& token, std::size_t count = 1);
  // Throws InsufficientTokens naming the token when fewer than count are held.
  void remove(const TimedToken& token, std::size_t count = 1);

  std::size_t count(const TimedToken& token) const;
  // Sum of multiplicities.
  std::size_t size() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::size_t distinct() const noexcept { return entries_.size(); }

  const Entries& entries() const noexcept { return entries_; }
  const_iterator begin() const noexcept { return entries_.begin(); }
  const_iterator end() const noexcept { return entries_.end(); }

  // {v@t:n, ...} in token order.
  std::string to_string() const;

  friend bool operator==(const Multiset&, const Multiset&) = default;

 private:
  Entries entries_;
  std::size_t total_ = 0;
};

Multiset operator+(const Multiset& a, const Multiset& b);
// Requires leq(b, a); throws InsufficientTokens otherwise.
Multiset operator-(const Multiset& a, const Multiset& b);
// True iff every multiplicity in a is at most the one in b.
bool leq(const Multiset& a, const Multiset& b);

}  // namespace aepn
