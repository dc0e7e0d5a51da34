#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "checked.hpp"
#include "matrix.hpp"
#include "point.hpp"

namespace orbiteq {

/// Integer-valued locally constant function on X_A, given by its values on
/// the cylinders of a fixed depth. Depth 0 is a single constant.
class LocallyConstantZFunction {
public:
  using Table = std::map<Word, Int>;

  static LocallyConstantZFunction constant(TransitionMatrix const &a, Int value) {
    return LocallyConstantZFunction(a, 0, value, {});
  }

  /// Table keys must be exactly the admissible words of length `depth`.
  static LocallyConstantZFunction from_table(TransitionMatrix const &a, int depth, Table table) {
    if (depth < 0) throw std::invalid_argument("negative depth");
    if (depth == 0) {
      if (table.size() != 1 || !table.begin()->first.empty())
        throw std::invalid_argument("depth-0 table must hold exactly the empty word");
      return constant(a, table.begin()->second);
    }
    auto words = admissible_words(a, depth);
    if (words.size() != table.size()) throw std::invalid_argument("table key set differs from B_d(X_A)");
    for (auto const &w : words)
      if (!table.count(w)) throw std::invalid_argument("table misses word " + format_word(w, a.size()));
    return LocallyConstantZFunction(a, depth, 0, std::move(table));
  }

  /// Indicator of the cylinder U_w.
  static LocallyConstantZFunction indicator(TransitionMatrix const &a, Word const &w) {
    if (!is_admissible(a, w)) throw std::invalid_argument("indicator of an inadmissible word");
    if (w.empty()) return constant(a, 1);
    Table t;
    for (auto const &u : admissible_words(a, static_cast<int>(w.size()))) t[u] = (u == w) ? 1 : 0;
    return LocallyConstantZFunction(a, static_cast<int>(w.size()), 0, std::move(t));
  }

  /// Builds a depth-d function from a rule on admissible d-words.
  template <class F> static LocallyConstantZFunction tabulate(TransitionMatrix const &a, int depth, F &&rule) {
    if (depth == 0) return constant(a, rule(Word{}));
    Table t;
    for (auto const &w : admissible_words(a, depth)) t[w] = rule(w);
    return LocallyConstantZFunction(a, depth, 0, std::move(t));
  }

  TransitionMatrix const &matrix() const { return a_; }
  int depth() const { return depth_; }
  Table const &table() const { return table_; }

  /// Value on the cylinder of an admissible word of length >= depth.
  Int at(Word const &w) const {
    if (depth_ == 0) return constant_;
    if (static_cast<int>(w.size()) < depth_) throw std::invalid_argument("word shorter than function depth");
    Word key(w.begin(), w.begin() + depth_);
    auto it = table_.find(key);
    if (it == table_.end()) throw std::invalid_argument("inadmissible word " + format_word(key, a_.size()));
    return it->second;
  }

  Int evaluate(Point const &p) const { return at(p.prefix(static_cast<std::size_t>(depth_))); }

  std::optional<Int> constant_value() const {
    if (depth_ == 0) return constant_;
    Int first = table_.begin()->second;
    for (auto const &[w, v] : table_)
      if (v != first) return std::nullopt;
    return first;
  }

  LocallyConstantZFunction refine(int new_depth) const {
    if (new_depth < depth_) throw std::invalid_argument("refine to a smaller depth");
    if (new_depth == depth_) return *this;
    return tabulate(a_, new_depth, [&](Word const &w) { return at(w); });
  }

  /// Same function at its minimal depth.
  LocallyConstantZFunction coarsen() const {
    LocallyConstantZFunction cur = *this;
    while (cur.depth_ > 0) {
      Table shorter;
      bool ok = true;
      for (auto const &[w, v] : cur.table_) {
        Word key(w.begin(), w.end() - 1);
        auto [it, inserted] = shorter.emplace(key, v);
        if (!inserted && it->second != v) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      if (cur.depth_ == 1)
        cur = constant(a_, shorter.begin()->second);
      else
        cur = LocallyConstantZFunction(a_, cur.depth_ - 1, 0, std::move(shorter));
    }
    return cur;
  }

  template <class Op> friend LocallyConstantZFunction combine(LocallyConstantZFunction const &f,
                                                             LocallyConstantZFunction const &g, Op op) {
    if (!(f.a_ == g.a_)) throw std::invalid_argument("functions over different matrices");
    int d = std::max(f.depth_, g.depth_);
    return tabulate(f.a_, d, [&](Word const &w) { return op(f.at(w), g.at(w)); });
  }

  friend LocallyConstantZFunction operator+(LocallyConstantZFunction const &f, LocallyConstantZFunction const &g) {
    return combine(f, g, add_checked);
  }
  friend LocallyConstantZFunction operator-(LocallyConstantZFunction const &f, LocallyConstantZFunction const &g) {
    return combine(f, g, sub_checked);
  }
  LocallyConstantZFunction operator-() const {
    return tabulate(a_, depth_, [&](Word const &w) { return sub_checked(0, at(w)); });
  }
  LocallyConstantZFunction scaled(Int c) const {
    return tabulate(a_, depth_, [&](Word const &w) { return mul_checked(c, at(w)); });
  }

  /// Pointwise equality, decided on the common refinement.
  bool same_function(LocallyConstantZFunction const &g) const {
    if (!(a_ == g.a_)) return false;
    int d = std::max(depth_, g.depth_);
    if (d == 0) return constant_ == g.constant_;
    for (auto const &w : admissible_words(a_, d))
      if (at(w) != g.at(w)) return false;
    return true;
  }

  /// Table equality (same depth, same entries).
  friend bool operator==(LocallyConstantZFunction const &f, LocallyConstantZFunction const &g) {
    return f.a_ == g.a_ && f.depth_ == g.depth_ && f.constant_ == g.constant_ && f.table_ == g.table_;
  }

private:
  LocallyConstantZFunction(TransitionMatrix const &a, int depth, Int constant, Table table)
      : a_(a), depth_(depth), constant_(constant), table_(std::move(table)) {}

  TransitionMatrix a_;
  int depth_;
  Int constant_;
  Table table_;
};

using LCFunction = LocallyConstantZFunction;

/// f∘σ_A: depth d+1 with table[a·w] = f[w]; constants stay constant.
inline LCFunction compose_with_shift(LCFunction const &f) {
  if (f.depth() == 0) return f;
  return LCFunction::tabulate(f.matrix(), f.depth() + 1, [&](Word const &w) { return f.at(Word(w.begin() + 1, w.end())); });
}

/// f^k(p) = Σ_{i<k} f(σ^i p).
inline Int cocycle_sum(LCFunction const &f, int k, Point const &p) {
  if (k <= 0) return 0;
  Word x = p.prefix(static_cast<std::size_t>(k + f.depth()));
  Int total = 0;
  for (int i = 0; i < k; ++i) total = add_checked(total, f.at(Word(x.begin() + i, x.begin() + i + f.depth())));
  return total;
}

/// Primitive admissible cycles of length <= max_len up to rotation, each
/// represented by its lexicographically least rotation; ordered by length,
/// then lexicographically.
inline std::vector<Word> periodic_orbits(TransitionMatrix const &a, int max_len) {
  std::vector<Word> out;
  auto is_lyndon = [](Word const &w) {
    // strictly smaller than every proper rotation <=> primitive and least
    std::size_t n = w.size();
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        Symbol x = w[(i + r) % n], y = w[i];
        if (x < y) return false;
        if (x > y) break;
        if (i + 1 == n) return false;
      }
    }
    return true;
  };
  for (int len = 1; len <= max_len; ++len) {
    Word cur;
    auto rec = [&](auto &&self) -> void {
      if (static_cast<int>(cur.size()) == len) {
        if (a(cur.back(), cur.front()) && is_lyndon(cur)) out.push_back(cur);
        return;
      }
      for (Symbol s = cur.empty() ? 1 : cur.front(); s <= a.size(); ++s) {
        if (!cur.empty() && !a(cur.back(), s)) continue;
        cur.push_back(s);
        self(self);
        cur.pop_back();
      }
    };
    rec(rec);
  }
  return out;
}

/// Sum of f over one period of the periodic point cycle^∞.
inline Int orbit_sum(LCFunction const &f, Word const &cycle) {
  return cocycle_sum(f, static_cast<int>(cycle.size()), Point::periodic(cycle));
}

enum class Verdict { Yes, No, Unknown };

inline char const *to_string(Verdict v) {
  switch (v) {
  case Verdict::Yes: return "Yes";
  case Verdict::No: return "No";
  case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

struct CoboundaryResult {
  Verdict verdict = Verdict::Unknown;
  /// For Yes: w with f - g = w - w∘σ_A.
  std::optional<LCFunction> witness;
  /// For No: a primitive cycle whose orbit sums of f and g differ.
  std::optional<Word> orbit;
  Int orbit_sum_f = 0;
  Int orbit_sum_g = 0;
};

namespace detail {

/// Solves w(u) - w(v) = h(u·last(v)) on the graph of admissible D-words
/// (edge u→v for each admissible (D+1)-word). h must have depth <= D+1.
inline std::optional<LCFunction> solve_transfer(LCFunction const &h, int depth) {
  TransitionMatrix const &a = h.matrix();
  LCFunction hr = h.refine(depth + 1);
  auto nodes = admissible_words(a, depth);
  std::map<Word, Int> potential;
  std::vector<Word> queue{nodes.front()};
  potential[nodes.front()] = 0;
  // Undirected BFS over edges; strongly connected so everything is reached.
  std::map<Word, std::vector<std::pair<Word, Int>>> adjacency;
  for (auto const &e : admissible_words(a, depth + 1)) {
    Word u(e.begin(), e.end() - 1), v(e.begin() + 1, e.end());
    Int label = hr.at(e);
    adjacency[u].emplace_back(v, label);  // w(v) = w(u) - label
    adjacency[v].emplace_back(u, -label); // w(u) = w(v) + label
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Word u = queue[head];
    for (auto const &[v, label] : adjacency[u]) {
      Int value = sub_checked(potential[u], label);
      auto [it, inserted] = potential.emplace(v, value);
      if (inserted) queue.push_back(v);
    }
  }
  for (auto const &e : admissible_words(a, depth + 1)) {
    Word u(e.begin(), e.end() - 1), v(e.begin() + 1, e.end());
    if (sub_checked(potential.at(u), potential.at(v)) != hr.at(e)) return std::nullopt;
  }
  Int lowest = potential.begin()->second;
  for (auto const &[w, v] : potential) lowest = std::min(lowest, v);
  return LCFunction::tabulate(a, depth, [&](Word const &w) { return sub_checked(potential.at(w), lowest); });
}

} // namespace detail

/// Bounded semi-decision of [f] = [g] in C(X_A,Z)/{w - w∘σ_A}. Yes carries a
/// table witness of depth <= max_depth; No carries a periodic orbit of
/// length <= max_depth whose sums differ.
inline CoboundaryResult is_coboundary_equivalent(LCFunction const &f, LCFunction const &g, int max_depth = 8) {
  if (!(f.matrix() == g.matrix())) throw std::invalid_argument("functions over different matrices");
  CoboundaryResult result;
  LCFunction h = (f - g).coarsen();
  int const lowest = std::max(0, h.depth() - 1);
  // A transfer function exists at depth D >= h.depth()-1 iff it exists at the
  // lowest such depth, so one solve decides the bounded question.
  if (lowest <= max_depth) {
    if (auto w = detail::solve_transfer(h, lowest)) {
      if ((*w - compose_with_shift(*w)).same_function(h)) {
        result.verdict = Verdict::Yes;
        result.witness = std::move(w);
        return result;
      }
    }
  }
  for (auto const &cycle : periodic_orbits(f.matrix(), max_depth)) {
    Int sf = orbit_sum(f, cycle), sg = orbit_sum(g, cycle);
    if (sf != sg) {
      result.verdict = Verdict::No;
      result.orbit = cycle;
      result.orbit_sum_f = sf;
      result.orbit_sum_g = sg;
      return result;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Function text format: "depth d" then one "word value" line per admissible
// d-word ("-" stands for the empty word at depth 0).

inline std::string format_function(LCFunction const &f) {
  std::string out = "depth " + std::to_string(f.depth()) + "\n";
  int n = f.matrix().size();
  if (f.depth() == 0) return out + "- " + std::to_string(*f.constant_value()) + "\n";
  for (auto const &[w, v] : f.table()) out += format_word(w, n) + " " + std::to_string(v) + "\n";
  return out;
}

inline LCFunction parse_function(TransitionMatrix const &a, std::string const &text) {
  std::istringstream in(text);
  std::string line;
  int depth = -1;
  LCFunction::Table table;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string first, second;
    ls >> first >> second;
    if (depth < 0) {
      if (first != "depth") throw std::invalid_argument("function file must start with 'depth d'");
      depth = std::stoi(second);
      continue;
    }
    table[parse_word(first, a.size())] = std::stoll(second);
  }
  if (depth < 0) throw std::invalid_argument("missing depth header");
  return LCFunction::from_table(a, depth, std::move(table));
}

} // namespace orbiteq
