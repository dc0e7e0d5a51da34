#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "point.hpp"
#include "tableau.hpp"

namespace orbiteq {

enum class TransducerViolation { Malformed, MatrixMismatch, MissingTransition, DeadTransition, InadmissibleOutput, NotLive, Diverges };

inline char const *to_string(TransducerViolation v) {
  switch (v) {
  case TransducerViolation::Malformed: return "Malformed";
  case TransducerViolation::MatrixMismatch: return "MatrixMismatch";
  case TransducerViolation::MissingTransition: return "MissingTransition";
  case TransducerViolation::DeadTransition: return "DeadTransition";
  case TransducerViolation::InadmissibleOutput: return "InadmissibleOutput";
  case TransducerViolation::NotLive: return "NotLive";
  case TransducerViolation::Diverges: return "Diverges";
  }
  return "?";
}

class TransducerError : public std::runtime_error {
public:
  TransducerError(TransducerViolation v, std::string const &detail)
      : std::runtime_error(std::string(to_string(v)) + ": " + detail), violation_(v) {}
  TransducerViolation violation() const { return violation_; }

private:
  TransducerViolation violation_;
};

struct TransducerEdge {
  int next = 0;
  Word output;
};

/// Deterministic sequential transducer from X_A to X_B. Transitions are
/// defined exactly for input symbols admissible after the consumed history;
/// every reachable cycle emits output, and the concatenated output is
/// B-admissible.
class SequentialTransducer {
public:
  using Row = std::map<Symbol, TransducerEdge>;

  /// `strict` additionally rejects transitions no admissible history can use.
  SequentialTransducer(TransitionMatrix source, TransitionMatrix target, int initial, std::vector<Row> delta,
                       bool strict = false)
      : source_(std::move(source)), target_(std::move(target)), initial_(initial), delta_(std::move(delta)) {
    validate(strict);
  }

  TransitionMatrix const &source() const { return source_; }
  TransitionMatrix const &target() const { return target_; }
  int initial() const { return initial_; }
  int num_states() const { return static_cast<int>(delta_.size()); }
  std::vector<Row> const &transitions() const { return delta_; }

  TransducerEdge const *step(int q, Symbol a) const {
    auto const &row = delta_[static_cast<std::size_t>(q)];
    auto it = row.find(a);
    return it == row.end() ? nullptr : &it->second;
  }

  std::size_t max_output_length() const {
    std::size_t m = 0;
    for (auto const &row : delta_)
      for (auto const &[a, e] : row) m = std::max(m, e.output.size());
    return m;
  }

  /// Runs a finite admissible input word from the initial state.
  std::pair<int, Word> feed(Word const &input) const { return feed_from(initial_, input); }

  std::pair<int, Word> feed_from(int q, Word const &input) const {
    Word out;
    for (Symbol a : input) {
      auto const *e = step(q, a);
      if (!e) throw TransducerError(TransducerViolation::MissingTransition, "no transition on " + std::to_string(a));
      out.insert(out.end(), e->output.begin(), e->output.end());
      q = e->next;
    }
    return {q, out};
  }

private:
  void validate(bool strict) const {
    int const k = num_states();
    if (k <= 0 || initial_ < 0 || initial_ >= k)
      throw TransducerError(TransducerViolation::Malformed, "initial state out of range");
    for (auto const &row : delta_)
      for (auto const &[a, e] : row) {
        if (a < 1 || a > source_.size())
          throw TransducerError(TransducerViolation::Malformed, "input symbol out of range");
        if (e.next < 0 || e.next >= k) throw TransducerError(TransducerViolation::Malformed, "next state out of range");
      }

    // Reachable configurations (state, last input, last output); 0 = none.
    using Triple = std::tuple<int, Symbol, Symbol>;
    std::map<Triple, int> index;
    std::vector<Triple> nodes;
    std::vector<std::vector<int>> silent; // edges with empty output
    std::set<std::pair<int, Symbol>> used;
    auto intern = [&](Triple t) {
      auto [it, inserted] = index.emplace(t, static_cast<int>(nodes.size()));
      if (inserted) {
        nodes.push_back(t);
        silent.emplace_back();
      }
      return it->second;
    };
    intern({initial_, 0, 0});
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      auto [q, last_in, last_out] = nodes[head];
      for (Symbol a = 1; a <= source_.size(); ++a) {
        if (!may_follow(source_, last_in, a)) continue;
        auto const *e = step(q, a);
        if (!e)
          throw TransducerError(TransducerViolation::MissingTransition,
                                "state " + std::to_string(q) + " lacks admissible input " + std::to_string(a));
        used.insert({q, a});
        Word const &w = e->output;
        if (!is_admissible(target_, w) || (!w.empty() && last_out != 0 && !target_(last_out, w.front())))
          throw TransducerError(TransducerViolation::InadmissibleOutput,
                                "state " + std::to_string(q) + " input " + std::to_string(a) + " emits " +
                                    format_word(w, target_.size()));
        int id = intern({e->next, a, w.empty() ? last_out : w.back()});
        if (w.empty()) silent[head].push_back(id);
      }
    }
    if (strict) {
      std::set<int> reachable;
      for (auto const &[q, li, lo] : nodes) reachable.insert(q);
      for (int q : reachable)
        for (auto const &[a, e] : delta_[static_cast<std::size_t>(q)])
          if (!used.count({q, a}))
            throw TransducerError(TransducerViolation::DeadTransition,
                                  "state " + std::to_string(q) + " has a transition on inadmissible input " +
                                      std::to_string(a));
    }
    // No cycle of silent edges.
    std::vector<int> colour(nodes.size(), 0);
    std::function<void(int)> dfs = [&](int u) {
      colour[static_cast<std::size_t>(u)] = 1;
      for (int v : silent[static_cast<std::size_t>(u)]) {
        if (colour[static_cast<std::size_t>(v)] == 1)
          throw TransducerError(TransducerViolation::NotLive, "reachable cycle with empty output");
        if (colour[static_cast<std::size_t>(v)] == 0) dfs(v);
      }
      colour[static_cast<std::size_t>(u)] = 2;
    };
    for (std::size_t u = 0; u < nodes.size(); ++u)
      if (colour[u] == 0) dfs(static_cast<int>(u));
  }

  TransitionMatrix source_;
  TransitionMatrix target_;
  int initial_;
  std::vector<Row> delta_;
};

using Transducer = SequentialTransducer;

// ---------------------------------------------------------------------------
// Basic machines

inline Transducer identity_transducer(TransitionMatrix const &a) {
  Transducer::Row row;
  for (Symbol s = 1; s <= a.size(); ++s) row[s] = {0, {s}};
  return {a, a, 0, {row}};
}

/// Symbol relabelling a ↦ perm[a-1]; perm must carry A onto B.
inline Transducer relabel_transducer(TransitionMatrix const &a, TransitionMatrix const &b, std::vector<Symbol> const &perm) {
  if (static_cast<int>(perm.size()) != a.size() || a.size() != b.size())
    throw std::invalid_argument("relabelling size mismatch");
  for (Symbol i = 1; i <= a.size(); ++i)
    for (Symbol j = 1; j <= a.size(); ++j)
      if (a(i, j) != b(perm[static_cast<std::size_t>(i - 1)], perm[static_cast<std::size_t>(j - 1)]))
        throw std::invalid_argument("relabelling is not a graph isomorphism");
  Transducer::Row row;
  for (Symbol s = 1; s <= a.size(); ++s) row[s] = {0, {perm[static_cast<std::size_t>(s - 1)]}};
  return {a, b, 0, {row}};
}

/// T∘σ_A: discards the first input symbol, then behaves as T.
inline Transducer shift_precompose(Transducer const &t) {
  std::vector<Transducer::Row> delta = t.transitions();
  int skip = static_cast<int>(delta.size());
  Transducer::Row row;
  for (Symbol s = 1; s <= t.source().size(); ++s) row[s] = {t.initial(), {}};
  delta.push_back(row);
  return {t.source(), t.target(), skip, std::move(delta)};
}

/// Prefix exchange τ as a transducer: read a source word along the prefix
/// tree of sources, emit its target, then echo.
inline Transducer tableau_transducer(TableauElement const &tau) {
  TransitionMatrix const &a = tau.matrix();
  if (tau.pairs().size() == 1 && tau.pairs()[0].source.empty()) return identity_transducer(a);
  std::map<Word, int> node;
  std::vector<Transducer::Row> delta;
  auto intern = [&](Word const &w) {
    auto [it, inserted] = node.emplace(w, static_cast<int>(delta.size()));
    if (inserted) delta.emplace_back();
    return it->second;
  };
  intern({});
  int const echo = -1;
  std::vector<std::tuple<int, Symbol, int, Word>> pending; // from, symbol, to (-1 = echo), output
  for (auto const &p : tau.pairs()) {
    for (std::size_t i = 0; i < p.source.size(); ++i) {
      Word prefix(p.source.begin(), p.source.begin() + static_cast<std::ptrdiff_t>(i));
      int from = intern(prefix);
      Symbol s = p.source[i];
      if (i + 1 == p.source.size())
        pending.emplace_back(from, s, echo, p.target);
      else
        pending.emplace_back(from, s, intern(concat(prefix, {s})), Word{});
    }
  }
  int echo_state = static_cast<int>(delta.size());
  delta.emplace_back();
  for (Symbol s = 1; s <= a.size(); ++s) delta.back()[s] = {echo_state, {s}};
  for (auto const &[from, s, to, out] : pending)
    delta[static_cast<std::size_t>(from)][s] = {to == echo ? echo_state : to, out};
  return {a, a, 0, std::move(delta)};
}

/// T2∘T1 (T1 first) by the product construction over reachable state pairs.
inline Transducer compose(Transducer const &t2, Transducer const &t1) {
  if (!(t1.target() == t2.source())) throw std::invalid_argument("compose: T1 target differs from T2 source");
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> states;
  std::vector<Transducer::Row> delta;
  auto intern = [&](std::pair<int, int> s) {
    auto [it, inserted] = index.emplace(s, static_cast<int>(states.size()));
    if (inserted) {
      states.push_back(s);
      delta.emplace_back();
    }
    return it->second;
  };
  intern({t1.initial(), t2.initial()});
  for (std::size_t head = 0; head < states.size(); ++head) {
    auto [q1, q2] = states[head];
    for (auto const &[a, e1] : t1.transitions()[static_cast<std::size_t>(q1)]) {
      int r2 = q2;
      Word out;
      bool defined = true;
      for (Symbol b : e1.output) {
        auto const *e2 = t2.step(r2, b);
        if (!e2) {
          defined = false; // unrealisable pairing of histories
          break;
        }
        out.insert(out.end(), e2->output.begin(), e2->output.end());
        r2 = e2->next;
      }
      if (!defined) continue;
      int id = intern({e1.next, r2});
      delta[head][a] = {id, std::move(out)};
    }
  }
  return {t1.source(), t2.target(), 0, std::move(delta)};
}

/// The image of an eventually periodic point, exactly.
inline Point run(Transducer const &t, Point const &p) {
  auto [q, out] = t.feed(p.preperiod());
  std::map<int, std::size_t> seen;
  while (true) {
    auto [it, inserted] = seen.emplace(q, out.size());
    if (!inserted) {
      Word prefix(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(it->second));
      Word loop(out.begin() + static_cast<std::ptrdiff_t>(it->second), out.end());
      if (loop.empty()) throw TransducerError(TransducerViolation::Diverges, "finite output on " + p.to_string(t.source().size()));
      return {prefix, loop};
    }
    auto [next, chunk] = t.feed_from(q, p.cycle());
    out.insert(out.end(), chunk.begin(), chunk.end());
    q = next;
  }
}

// ---------------------------------------------------------------------------
// Exact infinite-output equality

struct OutputEquality {
  bool equal = false;
  /// A point on which the two dropped outputs provably differ.
  std::optional<Point> witness;
  /// Set when inequality was concluded from the lag bound without a
  /// distinguishing point (only possible for maps constant on a cylinder).
  bool lag_exceeded = false;
};

/// Do σ^{drop1}∘T1(x) and σ^{drop2}∘T2(x) differ at an explicit point?
inline bool differs_at(Transducer const &t1, Transducer const &t2, int drop1, int drop2, Point const &x) {
  return !(run(t1, x).shifted(static_cast<std::size_t>(drop1)) == run(t2, x).shifted(static_cast<std::size_t>(drop2)));
}

/// Decides σ^{drop1}∘T1 = σ^{drop2}∘T2 on the cylinder of `prefix` (all of
/// X_A when empty). Lag-bounded bisimulation on the product machine: every
/// reachable configuration's two pending outputs must be comparable.
inline OutputEquality outputs_equal(Transducer const &t1, Transducer const &t2, int drop1, int drop2,
                                    Word const &prefix = {}) {
  if (!(t1.source() == t2.source()) || !(t1.target() == t2.target()))
    throw std::invalid_argument("outputs_equal: machines over different matrices");
  TransitionMatrix const &a = t1.source();
  if (!is_admissible(a, prefix)) throw std::invalid_argument("outputs_equal: inadmissible prefix");

  struct Config {
    int q1, q2;
    Symbol last;
    int d1, d2;
    Word p1, p2;
    auto operator<=>(Config const &) const = default;
  };
  std::size_t const span = static_cast<std::size_t>(t1.num_states()) * static_cast<std::size_t>(t2.num_states()) *
                           static_cast<std::size_t>(a.size() + 1);
  std::size_t const lag_bound = span * static_cast<std::size_t>(1 + drop1 + drop2) *
                                    std::max<std::size_t>(1, std::max(t1.max_output_length(), t2.max_output_length())) +
                                static_cast<std::size_t>(drop1 + drop2);

  // Advances c by one input symbol; false on a mismatch.
  auto advance = [&](Config &c, Symbol s) {
    auto const *e1 = t1.step(c.q1, s);
    auto const *e2 = t2.step(c.q2, s);
    if (!e1 || !e2) throw std::logic_error("outputs_equal: transition missing on admissible input");
    auto push = [](Word &pend, int &drop, Word const &out) {
      for (Symbol b : out) {
        if (drop > 0)
          --drop;
        else
          pend.push_back(b);
      }
    };
    push(c.p1, c.d1, e1->output);
    push(c.p2, c.d2, e2->output);
    std::size_t common = std::min(c.p1.size(), c.p2.size());
    if (!std::equal(c.p1.begin(), c.p1.begin() + static_cast<std::ptrdiff_t>(common), c.p2.begin())) return false;
    c.p1.erase(c.p1.begin(), c.p1.begin() + static_cast<std::ptrdiff_t>(common));
    c.p2.erase(c.p2.begin(), c.p2.begin() + static_cast<std::ptrdiff_t>(common));
    c.q1 = e1->next;
    c.q2 = e2->next;
    c.last = s;
    return true;
  };

  OutputEquality result;
  Config start{t1.initial(), t2.initial(), 0, drop1, drop2, {}, {}};
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!advance(start, prefix[i])) {
      result.witness = complete_to_point(a, Word(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(i + 1)));
      return result;
    }
  }

  std::map<Config, int> index;
  std::vector<Config> configs;
  std::vector<std::pair<int, Symbol>> parent;
  auto path_to = [&](int id) {
    Word w;
    std::vector<int> trail;
    for (int cur = id; cur > 0; cur = parent[static_cast<std::size_t>(cur)].first) {
      w.push_back(parent[static_cast<std::size_t>(cur)].second);
      trail.push_back(cur);
    }
    trail.push_back(0);
    std::reverse(w.begin(), w.end());
    std::reverse(trail.begin(), trail.end());
    return std::make_pair(concat(prefix, w), trail);
  };
  index.emplace(start, 0);
  configs.push_back(start);
  parent.emplace_back(-1, 0);

  for (std::size_t head = 0; head < configs.size(); ++head) {
    for (Symbol s = 1; s <= a.size(); ++s) {
      Config c = configs[head];
      if (!may_follow(a, c.last, s)) continue;
      bool ok = advance(c, s);
      if (!ok) {
        auto [input, trail] = path_to(static_cast<int>(head));
        result.witness = complete_to_point(a, concat(input, {s}));
        return result;
      }
      if (c.p1.size() + c.p2.size() > lag_bound) {
        // Look for a distinguishing point among the pumped loops on this path.
        auto [input, trail] = path_to(static_cast<int>(head));
        input.push_back(s);
        std::vector<std::tuple<int, int, Symbol>> keys;
        keys.emplace_back(start.q1, start.q2, start.last);
        for (std::size_t i = 1; i < trail.size(); ++i) {
          auto const &cc = configs[static_cast<std::size_t>(trail[i])];
          keys.emplace_back(cc.q1, cc.q2, cc.last);
        }
        keys.emplace_back(c.q1, c.q2, c.last);
        std::size_t const base = prefix.size();
        std::vector<Point> candidates{complete_to_point(a, input)};
        for (std::size_t i = 0; i < keys.size(); ++i)
          for (std::size_t j = i + 1; j < keys.size(); ++j)
            if (keys[i] == keys[j] && std::get<2>(keys[i]) != 0) {
              Word pre(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(base + i));
              Word loop(input.begin() + static_cast<std::ptrdiff_t>(base + i),
                        input.begin() + static_cast<std::ptrdiff_t>(base + j));
              candidates.emplace_back(pre, loop);
            }
        for (auto const &x : candidates)
          if (differs_at(t1, t2, drop1, drop2, x)) {
            result.witness = x;
            return result;
          }
        result.lag_exceeded = true;
        return result;
      }
      auto [it, inserted] = index.emplace(c, static_cast<int>(configs.size()));
      if (inserted) {
        configs.push_back(std::move(c));
        parent.emplace_back(static_cast<int>(head), s);
        if (configs.size() > 4'000'000) throw std::runtime_error("outputs_equal: exploration limit reached");
      }
    }
  }
  result.equal = true;
  return result;
}

// ---------------------------------------------------------------------------
// Transducer text format:
//   transducer A=<file> B=<file> states=<k> initial=<q0>
//   q symbol -> q' output_word        ("-" for the empty output)

inline std::string format_transducer(Transducer const &t, std::string const &a_name, std::string const &b_name) {
  std::string out = "transducer A=" + a_name + " B=" + b_name + " states=" + std::to_string(t.num_states()) +
                    " initial=" + std::to_string(t.initial()) + "\n";
  for (int q = 0; q < t.num_states(); ++q)
    for (auto const &[a, e] : t.transitions()[static_cast<std::size_t>(q)])
      out += std::to_string(q) + " " + format_word({a}, t.source().size()) + " -> " + std::to_string(e.next) + " " +
             format_word(e.output, t.target().size()) + "\n";
  return out;
}

struct TransducerHeader {
  std::string a_file, b_file;
  int states = 0;
  int initial = 0;
};

/// Parses a transducer; `resolve` maps the header's matrix file names to
/// matrices. Parsing is strict: inadmissible-input transitions are rejected.
inline Transducer parse_transducer(std::string const &text,
                                   std::function<TransitionMatrix(std::string const &)> const &resolve) {
  std::istringstream in(text);
  std::string line;
  std::optional<TransducerHeader> header;
  std::optional<TransitionMatrix> a, b;
  std::vector<Transducer::Row> delta;
  auto fail = [](std::string const &why) { throw TransducerError(TransducerViolation::Malformed, why); };
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!header) {
      std::string kw;
      ls >> kw;
      if (kw != "transducer") fail("expected header 'transducer A=<file> B=<file> states=<k> initial=<q0>'");
      TransducerHeader h;
      std::string field;
      int seen = 0;
      while (ls >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) fail("bad header field '" + field + "'");
        std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        try {
          if (key == "A") h.a_file = value;
          else if (key == "B") h.b_file = value;
          else if (key == "states") h.states = std::stoi(value);
          else if (key == "initial") h.initial = std::stoi(value);
          else fail("unknown header field '" + key + "'");
        } catch (std::logic_error const &) {
          fail("bad header value '" + field + "'");
        }
        ++seen;
      }
      if (seen != 4 || h.a_file.empty() || h.b_file.empty() || h.states <= 0) fail("incomplete header");
      a = resolve(h.a_file);
      b = resolve(h.b_file);
      delta.assign(static_cast<std::size_t>(h.states), {});
      header = h;
      continue;
    }
    std::string qs, sym, arrow, ns, outw, extra;
    ls >> qs >> sym >> arrow >> ns >> outw;
    if (arrow != "->" || outw.empty() || (ls >> extra)) fail("expected 'q symbol -> q' output_word': '" + line + "'");
    int q = 0, next = 0;
    Word s, o;
    try {
      q = std::stoi(qs);
      next = std::stoi(ns);
      s = parse_word(sym, a->size());
      o = parse_word(outw, b->size());
    } catch (std::logic_error const &e) {
      fail(std::string("bad transition line: ") + e.what());
    }
    if (s.size() != 1) fail("input must be a single symbol: '" + line + "'");
    if (q < 0 || q >= header->states) fail("state out of range: '" + line + "'");
    auto &row = delta[static_cast<std::size_t>(q)];
    if (row.count(s[0])) fail("duplicate transition: '" + line + "'");
    row[s[0]] = {next, o};
  }
  if (!header) fail("missing header");
  return Transducer(*a, *b, header->initial, std::move(delta), true);
}

/// Loads a transducer file; matrix names in the header are resolved relative
/// to the transducer file's directory.
inline Transducer load_transducer(std::string const &path) {
  std::ifstream in(path);
  if (!in) throw TransducerError(TransducerViolation::Malformed, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path();
  return parse_transducer(ss.str(), [&](std::string const &name) {
    std::filesystem::path p(name);
    return load_matrix((p.is_absolute() ? p : dir / p).string());
  });
}

} // namespace orbiteq
