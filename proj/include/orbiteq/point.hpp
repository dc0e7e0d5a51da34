#pragma once

#include <compare>
#include <stdexcept>
#include <string>

#include "matrix.hpp"

namespace orbiteq {

/// An eventually periodic point preperiod · cycle^∞, always held in canonical
/// form: the cycle is primitive and the preperiod is as short as possible.
/// Two points are equal as sequences iff their canonical forms coincide.
class UltimatelyPeriodicPoint {
public:
  UltimatelyPeriodicPoint(Word preperiod, Word cycle) : pre_(std::move(preperiod)), cyc_(std::move(cycle)) {
    if (cyc_.empty()) throw std::invalid_argument("ultimately periodic point needs a nonempty cycle");
    canonicalize();
  }

  static UltimatelyPeriodicPoint periodic(Word cycle) { return {{}, std::move(cycle)}; }

  Word const &preperiod() const { return pre_; }
  Word const &cycle() const { return cyc_; }

  Symbol at(std::size_t i) const {
    if (i < pre_.size()) return pre_[i];
    return cyc_[(i - pre_.size()) % cyc_.size()];
  }

  Word prefix(std::size_t len) const {
    Word out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) out.push_back(at(i));
    return out;
  }

  /// σ^k applied to this point.
  UltimatelyPeriodicPoint shifted(std::size_t k = 1) const {
    if (k <= pre_.size()) return {Word(pre_.begin() + static_cast<std::ptrdiff_t>(k), pre_.end()), cyc_};
    std::size_t r = (k - pre_.size()) % cyc_.size();
    Word rot(cyc_.begin() + static_cast<std::ptrdiff_t>(r), cyc_.end());
    rot.insert(rot.end(), cyc_.begin(), cyc_.begin() + static_cast<std::ptrdiff_t>(r));
    return {{}, std::move(rot)};
  }

  UltimatelyPeriodicPoint prepended(Word const &w) const { return {concat(w, pre_), cyc_}; }

  bool admissible_in(TransitionMatrix const &a) const {
    return is_admissible(a, concat(concat(pre_, cyc_), cyc_));
  }

  /// "pre(cycle)" with the word formatting of the given alphabet size.
  std::string to_string(int alphabet) const {
    return (pre_.empty() ? std::string() : format_word(pre_, alphabet)) + "(" + format_word(cyc_, alphabet) + ")";
  }

  friend bool operator==(UltimatelyPeriodicPoint const &, UltimatelyPeriodicPoint const &) = default;
  friend auto operator<=>(UltimatelyPeriodicPoint const &, UltimatelyPeriodicPoint const &) = default;

private:
  void canonicalize() {
    std::size_t const n = cyc_.size();
    for (std::size_t p = 1; p < n; ++p) {
      if (n % p != 0) continue;
      bool periodic = true;
      for (std::size_t i = p; i < n && periodic; ++i) periodic = cyc_[i] == cyc_[i - p];
      if (periodic) {
        cyc_.resize(p);
        break;
      }
    }
    while (!pre_.empty() && pre_.back() == cyc_.back()) {
      pre_.pop_back();
      Symbol last = cyc_.back();
      cyc_.pop_back();
      cyc_.insert(cyc_.begin(), last);
    }
  }

  Word pre_;
  Word cyc_;
};

using Point = UltimatelyPeriodicPoint;

inline Point shift(Point const &p) { return p.shifted(1); }

/// Parses "pre(cycle)" as produced by Point::to_string.
inline Point parse_point(std::string const &s, int alphabet) {
  auto open = s.find('(');
  if (open == std::string::npos || s.empty() || s.back() != ')')
    throw std::invalid_argument("point must look like pre(cycle): '" + s + "'");
  return {parse_word(s.substr(0, open), alphabet), parse_word(s.substr(open + 1, s.size() - open - 2), alphabet)};
}

/// Shortest-return extension of an admissible word into a point starting
/// with it: u·a becomes u·(a·r)^∞ with r a shortest path from a back to a.
inline Point complete_to_point(TransitionMatrix const &a, Word const &w) {
  if (w.empty()) return complete_to_point(a, Word{1});
  Symbol const last = w.back();
  // BFS from `last` back to itself.
  std::vector<Symbol> parent(static_cast<std::size_t>(a.size() + 1), 0);
  std::vector<bool> seen(static_cast<std::size_t>(a.size() + 1), false);
  std::vector<Symbol> queue;
  Symbol closing = 0;
  for (Symbol s : a.followers(last)) {
    if (s == last) {
      closing = last;
      break;
    }
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = true;
      parent[static_cast<std::size_t>(s)] = last;
      queue.push_back(s);
    }
  }
  Word loop{last};
  if (closing == 0) {
    Symbol end = 0;
    for (std::size_t head = 0; head < queue.size() && end == 0; ++head) {
      Symbol u = queue[head];
      for (Symbol v : a.followers(u)) {
        if (v == last) {
          end = u;
          break;
        }
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          parent[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
      }
    }
    Word back;
    for (Symbol v = end; v != last; v = parent[static_cast<std::size_t>(v)]) back.push_back(v);
    loop.insert(loop.end(), back.rbegin(), back.rend());
  }
  return {Word(w.begin(), w.end() - 1), loop};
}

} // namespace orbiteq
