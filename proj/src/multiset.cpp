#include "aepn/multiset.hpp"

#include "aepn/error.hpp"

namespace aepn {

Multiset::Multiset(std::initializer_list<std::pair<const TimedToken, std::size_t>> init) {
  for (const auto& [token, n] : init) add(token, n);
}

void Multiset::add(const TimedToken& token, std::size_t count) {
  if (count == 0) return;
  entries_[token] += count;
  total_ += count;
}

void Multiset::remove(const TimedToken& token, std::size_t count) {
  if (count == 0) return;
  auto it = entries_.find(token);
  const std::size_t held = it == entries_.end() ? 0 : it->second;
  if (held < count) {
    throw InsufficientTokens("insufficient tokens: need " + std::to_string(count) + " of " +
                             token.to_string() + ", have " + std::to_string(held));
  }
  if (held == count) {
    entries_.erase(it);
  } else {
    it->second -= count;
  }
  total_ -= count;
}

std::size_t Multiset::count(const TimedToken& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? 0 : it->second;
}

std::string Multiset::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [token, n] : entries_) {
    if (!first) out += ", ";
    first = false;
    out += token.to_string() + ":" + std::to_string(n);
  }
  return out + "}";
}

Multiset operator+(const Multiset& a, const Multiset& b) {
  Multiset out = a;
  for (const auto& [token, n] : b) out.add(token, n);
  return out;
}

Multiset operator-(const Multiset& a, const Multiset& b) {
  Multiset out = a;
  for (const auto& [token, n] : b) out.remove(token, n);
  return out;
}

bool leq(const Multiset& a, const Multiset& b) {
  for (const auto& [token, n] : a) {
    if (b.count(token) < n) return false;
  }
  return true;
}

}  // namespace aepn
