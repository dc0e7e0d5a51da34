#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "function.hpp"
#include "transducer.hpp"

namespace orbiteq {

/// h: X_A → X_B and its claimed inverse, both as sequential transducers.
struct HomeoCertificate {
  Transducer forward;  // A → B
  Transducer backward; // B → A

  HomeoCertificate(Transducer fwd, Transducer bwd) : forward(std::move(fwd)), backward(std::move(bwd)) {
    if (!(forward.source() == backward.target()) || !(forward.target() == backward.source()))
      throw TransducerError(TransducerViolation::MatrixMismatch, "backward transducer does not run B → A");
  }

  TransitionMatrix const &a() const { return forward.source(); }
  TransitionMatrix const &b() const { return forward.target(); }

  HomeoCertificate inverse() const { return {backward, forward}; }
};

/// Certificate of h2∘h1 from certificates of h1: A→B and h2: B→C.
inline HomeoCertificate compose(HomeoCertificate const &h2, HomeoCertificate const &h1) {
  return {compose(h2.forward, h1.forward), compose(h1.backward, h2.backward)};
}

inline HomeoCertificate tableau_certificate(TableauElement const &tau) {
  return {tableau_transducer(tau), tableau_transducer(invert(tau))};
}

inline HomeoCertificate identity_certificate(TransitionMatrix const &a) {
  return {identity_transducer(a), identity_transducer(a)};
}

struct HomeoVerdict {
  bool verified = false;
  /// Point of the failing side's domain where the round trip is not the identity.
  std::optional<Point> witness;
  /// "A" when backward∘forward fails on X_A, "B" for forward∘backward on X_B.
  std::string failing_side;
  std::string detail;
};

/// Two-sided inverse check: backward∘forward = id on X_A and
/// forward∘backward = id on X_B, each decided exactly.
inline HomeoVerdict verify_homeomorphism(HomeoCertificate const &c) {
  HomeoVerdict v;
  try {
    auto left = outputs_equal(compose(c.backward, c.forward), identity_transducer(c.a()), 0, 0);
    if (!left.equal) {
      v.witness = left.witness;
      v.failing_side = "A";
      v.detail = "backward∘forward is not the identity on X_A";
      return v;
    }
    auto right = outputs_equal(compose(c.forward, c.backward), identity_transducer(c.b()), 0, 0);
    if (!right.equal) {
      v.witness = right.witness;
      v.failing_side = "B";
      v.detail = "forward∘backward is not the identity on X_B";
      return v;
    }
  } catch (TransducerError const &e) {
    v.detail = e.what();
    return v;
  }
  v.verified = true;
  return v;
}

/// Continuous orbit equivalence data: k1, l1 on X_A and k2, l2 on X_B with
/// σ_B^{k1}(h(σ_A x)) = σ_B^{l1}(h x) and σ_A^{k2}(h⁻¹(σ_B y)) = σ_A^{l2}(h⁻¹ y).
struct CoeData {
  LCFunction k1, l1, k2, l2;

  LCFunction c1() const { return l1 - k1; }
  LCFunction c2() const { return l2 - k2; }
};

struct CoeSearchOptions {
  int search_bound = 8; // max value of k and l
  int max_depth = 8;    // max cylinder depth
};

namespace detail {

/// Minimal (k, l) per cylinder, in (k+l, k) order, with
/// σ^k∘t∘σ = σ^l∘t on the cylinder. Returns (k, l) functions or nothing.
inline std::optional<std::pair<LCFunction, LCFunction>> orbit_times(Transducer const &t, CoeSearchOptions const &opt) {
  TransitionMatrix const &a = t.source();
  Transducer shifted = shift_precompose(t);
  std::map<Word, std::pair<int, int>> found;
  std::vector<Word> open = admissible_words(a, 1);
  int depth = 1;
  while (!open.empty()) {
    if (depth > opt.max_depth) return std::nullopt;
    std::vector<Word> next;
    for (auto const &mu : open) {
      std::optional<std::pair<int, int>> hit;
      for (int total = 0; total <= 2 * opt.search_bound && !hit; ++total)
        for (int k = std::max(0, total - opt.search_bound); k <= std::min(total, opt.search_bound) && !hit; ++k)
          if (outputs_equal(shifted, t, k, total - k, mu).equal) hit = std::make_pair(k, total - k);
      if (hit)
        found[mu] = *hit;
      else
        for (auto const &child : extensions(a, mu, 1)) next.push_back(child);
    }
    open = std::move(next);
    ++depth;
  }
  int d = 1;
  for (auto const &[w, kl] : found) d = std::max(d, static_cast<int>(w.size()));
  auto lookup = [&](Word const &w) {
    for (std::size_t len = 1; len <= w.size(); ++len) {
      auto it = found.find(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(len)));
      if (it != found.end()) return it->second;
    }
    throw std::logic_error("orbit_times: uncovered cylinder");
  };
  auto k = LCFunction::tabulate(a, d, [&](Word const &w) { return static_cast<Int>(lookup(w).first); }).coarsen();
  auto l = LCFunction::tabulate(a, d, [&](Word const &w) { return static_cast<Int>(lookup(w).second); }).coarsen();
  return std::make_pair(k, l);
}

} // namespace detail

/// Per-cylinder exact search for the orbit-time functions of h and h⁻¹.
/// Nothing when some cylinder exhausts the bounds.
inline std::optional<CoeData> extract_coe_data(HomeoCertificate const &c, CoeSearchOptions const &opt = {}) {
  auto forward = detail::orbit_times(c.forward, opt);
  if (!forward) return std::nullopt;
  auto backward = detail::orbit_times(c.backward, opt);
  if (!backward) return std::nullopt;
  return CoeData{forward->first, forward->second, backward->first, backward->second};
}

/// Re-decides σ^{k}∘t∘σ = σ^{l}∘t on every cylinder of the tables.
inline bool verify_orbit_times(Transducer const &t, LCFunction const &k, LCFunction const &l) {
  Transducer shifted = shift_precompose(t);
  int d = std::max({1, k.depth(), l.depth()});
  for (auto const &mu : admissible_words(t.source(), d))
    if (!outputs_equal(shifted, t, static_cast<int>(k.at(mu)), static_cast<int>(l.at(mu)), mu).equal) return false;
  return true;
}

inline bool verify_coe_data(HomeoCertificate const &c, CoeData const &data) {
  return verify_orbit_times(c.forward, data.k1, data.l1) && verify_orbit_times(c.backward, data.k2, data.l2);
}

/// Ψ_h(g)(x) = Σ_{i<l1(x)} g(σ_B^i h(x)) − Σ_{j<k1(x)} g(σ_B^j h(σ_A x)).
/// The result's depth is the least at which every needed output prefix of
/// h(x) and h(σ_A x) is already emitted on each cylinder.
inline LCFunction psi_h(HomeoCertificate const &c, CoeData const &data, LCFunction const &g) {
  TransitionMatrix const &a = c.a();
  if (!(g.matrix() == c.b())) throw std::invalid_argument("psi_h: g must live on X_B");
  int const gd = g.depth();
  std::map<Word, Int> values;
  std::vector<Word> open = admissible_words(a, std::max({1, data.k1.depth(), data.l1.depth()}));
  while (!open.empty()) {
    std::vector<Word> next;
    for (auto const &mu : open) {
      Int l1 = data.l1.at(mu), k1 = data.k1.at(mu);
      Word hx = c.forward.feed(mu).second;
      Word hsx = c.forward.feed(Word(mu.begin() + 1, mu.end())).second;
      bool enough = static_cast<Int>(hx.size()) >= (l1 > 0 ? l1 - 1 + gd : 0) &&
                    static_cast<Int>(hsx.size()) >= (k1 > 0 ? k1 - 1 + gd : 0);
      if (!enough) {
        for (auto const &child : extensions(a, mu, 1)) next.push_back(child);
        continue;
      }
      Int total = 0;
      for (Int i = 0; i < l1; ++i)
        total = add_checked(total, g.at(Word(hx.begin() + i, hx.begin() + i + gd)));
      for (Int j = 0; j < k1; ++j)
        total = sub_checked(total, g.at(Word(hsx.begin() + j, hsx.begin() + j + gd)));
      values[mu] = total;
    }
    open = std::move(next);
  }
  int d = 1;
  for (auto const &[w, v] : values) d = std::max(d, static_cast<int>(w.size()));
  return LCFunction::tabulate(a, d, [&](Word const &w) {
    for (std::size_t len = 1; len <= w.size(); ++len) {
      auto it = values.find(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(len)));
      if (it != values.end()) return it->second;
    }
    throw std::logic_error("psi_h: uncovered cylinder");
  });
}

/// Forward images of the samples, and backward images of those, are valid
/// eventually periodic points of the respective shifts.
inline bool preserves_eventually_periodic(HomeoCertificate const &c, std::vector<Point> const &sample) {
  for (auto const &x : sample) {
    Point y = run(c.forward, x);
    if (!y.admissible_in(c.b())) return false;
    Point back = run(c.backward, y);
    if (!back.admissible_in(c.a())) return false;
  }
  return true;
}

} // namespace orbiteq
