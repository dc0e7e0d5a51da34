#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "function.hpp"
#include "matrix.hpp"
#include "point.hpp"

namespace orbiteq {

enum class TableauViolation { Malformed, InadmissibleWord, SourceNotComplete, TargetNotComplete, FollowerRowMismatch, EmptyWord };

inline char const *to_string(TableauViolation v) {
  switch (v) {
  case TableauViolation::Malformed: return "Malformed";
  case TableauViolation::InadmissibleWord: return "InadmissibleWord";
  case TableauViolation::SourceNotComplete: return "SourceNotComplete";
  case TableauViolation::TargetNotComplete: return "TargetNotComplete";
  case TableauViolation::FollowerRowMismatch: return "FollowerRowMismatch";
  case TableauViolation::EmptyWord: return "EmptyWord";
  }
  return "?";
}

class TableauError : public std::runtime_error {
public:
  TableauError(TableauViolation v, std::string const &detail)
      : std::runtime_error(std::string(to_string(v)) + ": " + detail), violation_(v) {}
  TableauViolation violation() const { return violation_; }

private:
  TableauViolation violation_;
};

/// Is `code` a complete prefix code of X_A: every admissible word of length
/// max|code| has exactly one member of `code` as a prefix?
inline bool is_complete_prefix_code(TransitionMatrix const &a, std::vector<Word> const &code) {
  std::size_t len = 0;
  for (auto const &w : code) len = std::max(len, w.size());
  for (auto const &w : admissible_words(a, static_cast<int>(len))) {
    int hits = 0;
    for (auto const &c : code) hits += is_prefix(c, w) ? 1 : 0;
    if (hits != 1) return false;
  }
  return true;
}

struct TableauPair {
  Word source;
  Word target;
  friend bool operator==(TableauPair const &, TableauPair const &) = default;
  friend auto operator<=>(TableauPair const &, TableauPair const &) = default;
};

/// An element of the continuous full group Γ_A given as a prefix exchange:
/// on U_source it maps source·x' to target·x'.
class TableauElement {
public:
  TableauElement(TransitionMatrix const &a, std::vector<TableauPair> pairs) : a_(a), pairs_(std::move(pairs)) {
    validate();
    std::sort(pairs_.begin(), pairs_.end());
  }

  static TableauElement identity(TransitionMatrix const &a) { return {a, {{Word{}, Word{}}}}; }

  TransitionMatrix const &matrix() const { return a_; }
  std::vector<TableauPair> const &pairs() const { return pairs_; }

  std::size_t max_source_length() const {
    std::size_t len = 0;
    for (auto const &p : pairs_) len = std::max(len, p.source.size());
    return len;
  }

  /// The pair whose source is a prefix of w (w at least max_source_length long).
  TableauPair const &pair_for(Word const &w) const {
    for (auto const &p : pairs_)
      if (is_prefix(p.source, w)) return p;
    throw std::logic_error("complete prefix code has no match");
  }

  /// Refines every pair to source length exactly `len`: (s,t) becomes
  /// (s·u, t·u) for all admissible continuations u.
  TableauElement refined_to(std::size_t len) const {
    std::vector<TableauPair> out;
    for (auto const &p : pairs_) {
      if (p.source.size() >= len) {
        out.push_back(p);
        continue;
      }
      int extra = static_cast<int>(len - p.source.size());
      for (auto const &ext : extensions(a_, p.source, extra)) {
        Word tail(ext.begin() + static_cast<std::ptrdiff_t>(p.source.size()), ext.end());
        out.push_back({ext, concat(p.target, tail)});
      }
    }
    return TableauElement(a_, std::move(out), trusted{});
  }

  /// Maximally merged form: sibling pairs (w·a, v·a) over all followers a
  /// collapse to (w, v). Unique for a given map.
  TableauElement canonical() const {
    std::set<TableauPair> cur;
    for (auto const &p : refined_to(max_source_length()).pairs_) cur.insert(p);
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto const &p : cur) {
        if (p.source.empty() || p.target.empty()) continue;
        Symbol last = p.source.back();
        if (p.target.back() != last) continue;
        Word w(p.source.begin(), p.source.end() - 1), v(p.target.begin(), p.target.end() - 1);
        if (w.empty() != v.empty()) continue;
        std::vector<Symbol> followers;
        if (w.empty()) {
          for (Symbol s = 1; s <= a_.size(); ++s) followers.push_back(s);
        } else {
          if (!a_.same_row(w.back(), v.back())) continue;
          followers = a_.followers(w.back());
        }
        bool all = true;
        for (Symbol s : followers)
          if (!cur.count({concat(w, {s}), concat(v, {s})})) {
            all = false;
            break;
          }
        if (!all) continue;
        for (Symbol s : followers) cur.erase({concat(w, {s}), concat(v, {s})});
        cur.insert({w, v});
        changed = true;
        break;
      }
    }
    return TableauElement(a_, std::vector<TableauPair>(cur.begin(), cur.end()), trusted{});
  }

  friend bool operator==(TableauElement const &, TableauElement const &) = default;

private:
  struct trusted {};
  TableauElement(TransitionMatrix const &a, std::vector<TableauPair> pairs, trusted) : a_(a), pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
  }

  void validate() const {
    if (pairs_.empty()) throw TableauError(TableauViolation::SourceNotComplete, "no pairs");
    std::vector<Word> sources, targets;
    for (auto const &p : pairs_) {
      if (!is_admissible(a_, p.source) || !is_admissible(a_, p.target))
        throw TableauError(TableauViolation::InadmissibleWord,
                           format_word(p.source, a_.size()) + " -> " + format_word(p.target, a_.size()));
      if (p.source.empty() || p.target.empty()) {
        if (pairs_.size() != 1 || !p.source.empty() || !p.target.empty())
          throw TableauError(TableauViolation::EmptyWord, "empty words only allowed as the identity pair (-, -)");
        continue;
      }
      if (!a_.same_row(p.source.back(), p.target.back()))
        throw TableauError(TableauViolation::FollowerRowMismatch,
                           format_word(p.source, a_.size()) + " -> " + format_word(p.target, a_.size()));
      sources.push_back(p.source);
      targets.push_back(p.target);
    }
    if (pairs_.size() == 1 && pairs_[0].source.empty()) return;
    if (!is_complete_prefix_code(a_, sources))
      throw TableauError(TableauViolation::SourceNotComplete, "sources do not form a complete prefix code");
    if (!is_complete_prefix_code(a_, targets))
      throw TableauError(TableauViolation::TargetNotComplete, "targets do not form a complete prefix code");
  }

  TransitionMatrix a_;
  std::vector<TableauPair> pairs_;
};

inline Point apply(TableauElement const &tau, Point const &p) {
  Word head = p.prefix(tau.max_source_length());
  auto const &pair = tau.pair_for(head);
  return p.shifted(pair.source.size()).prepended(pair.target);
}

/// tau1 ∘ tau2 (tau2 applied first).
inline TableauElement compose(TableauElement const &tau1, TableauElement const &tau2) {
  if (!(tau1.matrix() == tau2.matrix())) throw std::invalid_argument("tableaux over different matrices");
  TransitionMatrix const &a = tau1.matrix();
  std::vector<TableauPair> out;
  std::vector<TableauPair> work(tau2.pairs().rbegin(), tau2.pairs().rend());
  while (!work.empty()) {
    TableauPair p = work.back();
    work.pop_back();
    std::optional<TableauPair> hit;
    for (auto const &q : tau1.pairs())
      if (is_prefix(q.source, p.target)) {
        hit = q;
        break;
      }
    if (hit) {
      Word rest(p.target.begin() + static_cast<std::ptrdiff_t>(hit->source.size()), p.target.end());
      out.push_back({p.source, concat(hit->target, rest)});
      continue;
    }
    // p.target is a proper prefix of some tau1 source: split one level.
    std::vector<Symbol> next;
    if (p.target.empty()) {
      for (Symbol s = 1; s <= a.size(); ++s) next.push_back(s);
    } else {
      next = a.followers(p.target.back());
    }
    for (auto it = next.rbegin(); it != next.rend(); ++it)
      work.push_back({concat(p.source, {*it}), concat(p.target, {*it})});
  }
  if (out.size() > 1)
    for (auto &pr : out)
      if (pr.source.empty() || pr.target.empty()) throw std::logic_error("composition produced an empty word");
  return TableauElement(a, std::move(out));
}

inline TableauElement invert(TableauElement const &tau) {
  std::vector<TableauPair> out;
  for (auto const &p : tau.pairs()) out.push_back({p.target, p.source});
  return TableauElement(tau.matrix(), std::move(out));
}

/// Pointwise equality, decided after refining both to a common source depth.
inline bool equal(TableauElement const &tau1, TableauElement const &tau2) {
  if (!(tau1.matrix() == tau2.matrix())) return false;
  std::size_t len = std::max(tau1.max_source_length(), tau2.max_source_length());
  return tau1.refined_to(len).pairs() == tau2.refined_to(len).pairs();
}

/// c = l - k: on U_source the value |source| - |target|.
inline LCFunction cocycle(TableauElement const &tau) {
  int depth = static_cast<int>(tau.max_source_length());
  return LCFunction::tabulate(tau.matrix(), depth, [&](Word const &w) {
    auto const &p = tau.pair_for(w);
    return static_cast<Int>(p.source.size()) - static_cast<Int>(p.target.size());
  });
}

struct AfResult {
  bool af = false;
  /// Least K with σ^K∘τ = σ^K (only meaningful when af).
  int k = 0;
};

/// Γ_A^AF membership: all canonical pairs length-preserving. K is the least
/// synchronisation time, i.e. one past the last position where some source
/// and its target differ.
inline AfResult is_af(TableauElement const &tau) {
  AfResult r;
  TableauElement canon = tau.canonical();
  for (auto const &p : canon.pairs())
    if (p.source.size() != p.target.size()) return r;
  r.af = true;
  for (auto const &p : canon.pairs())
    for (std::size_t i = p.source.size(); i-- > 0;)
      if (p.source[i] != p.target[i]) {
        r.k = std::max(r.k, static_cast<int>(i + 1));
        break;
      }
  return r;
}

/// Transpositions of two distinct d-cylinders whose last symbols have equal
/// follower rows (identity elsewhere), in lexicographic order of the pair.
inline std::vector<TableauElement> af_transpositions(TransitionMatrix const &a, int d) {
  std::vector<TableauElement> out;
  auto words = admissible_words(a, d);
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      if (!a.same_row(words[i].back(), words[j].back())) continue;
      std::vector<TableauPair> pairs;
      for (std::size_t k = 0; k < words.size(); ++k) {
        Word const &tgt = k == i ? words[j] : (k == j ? words[i] : words[k]);
        pairs.push_back({words[k], tgt});
      }
      out.emplace_back(a, std::move(pairs));
    }
  return out;
}

/// (f∘τ)(x) = f(τ(x)) as a locally constant function.
inline LCFunction pullback(LCFunction const &f, TableauElement const &tau) {
  int depth = 0;
  for (auto const &p : tau.pairs())
    depth = std::max(depth, static_cast<int>(p.source.size()) + std::max(0, f.depth() - static_cast<int>(p.target.size())));
  depth = std::max(depth, static_cast<int>(tau.max_source_length()));
  return LCFunction::tabulate(tau.matrix(), depth, [&](Word const &w) {
    auto const &p = tau.pair_for(w);
    Word image = concat(p.target, Word(w.begin() + static_cast<std::ptrdiff_t>(p.source.size()), w.end()));
    return f.at(image);
  });
}

/// c(τ1∘τ2) = c(τ1)∘τ2 + c(τ2) as functions.
inline bool cocycle_composition_identity_check(TableauElement const &tau1, TableauElement const &tau2) {
  LCFunction lhs = cocycle(compose(tau1, tau2));
  LCFunction rhs = pullback(cocycle(tau1), tau2) + cocycle(tau2);
  return lhs.same_function(rhs);
}

// ---------------------------------------------------------------------------
// Tableau text format: "tableau n=<N>" then "source -> target" per line.

inline std::string format_tableau(TableauElement const &tau) {
  int n = tau.matrix().size();
  std::string out = "tableau n=" + std::to_string(n) + "\n";
  for (auto const &p : tau.pairs()) out += format_word(p.source, n) + " -> " + format_word(p.target, n) + "\n";
  return out;
}

inline TableauElement parse_tableau(TransitionMatrix const &a, std::string const &text) {
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<TableauPair> pairs;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!header) {
      std::string kw, nfield;
      ls >> kw >> nfield;
      if (kw != "tableau" || nfield.rfind("n=", 0) != 0)
        throw TableauError(TableauViolation::Malformed, "expected header 'tableau n=<N>'");
      int n = 0;
      try {
        n = std::stoi(nfield.substr(2));
      } catch (std::exception const &) {
        throw TableauError(TableauViolation::Malformed, "bad alphabet size in header");
      }
      if (n != a.size()) throw TableauError(TableauViolation::Malformed, "header alphabet size differs from matrix");
      header = true;
      continue;
    }
    std::string src, arrow, tgt, extra;
    ls >> src >> arrow >> tgt;
    if (arrow != "->" || tgt.empty() || (ls >> extra))
      throw TableauError(TableauViolation::Malformed, "expected 'source -> target': '" + line + "'");
    try {
      pairs.push_back({parse_word(src, a.size()), parse_word(tgt, a.size())});
    } catch (std::invalid_argument const &e) {
      throw TableauError(TableauViolation::Malformed, e.what());
    }
  }
  if (!header) throw TableauError(TableauViolation::Malformed, "missing header");
  return TableauElement(a, std::move(pairs));
}

} // namespace orbiteq
