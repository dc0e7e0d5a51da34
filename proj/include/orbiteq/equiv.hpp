#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "certificate.hpp"
#include "invariants.hpp"
#include "tableau.hpp"

namespace orbiteq {

// ---------------------------------------------------------------------------
// Certificate-level checks

struct EventualConjugacyResult {
  bool verified = false;
  int k1 = -1, k2 = -1;
  /// Side whose search exhausted the bound ("A" for h, "B" for h⁻¹).
  std::string failing_side;
};

namespace detail {

/// Least K <= bound with σ^K∘t∘σ = σ^{K+1}∘t.
inline std::optional<int> eventual_constant(Transducer const &t, int k_bound) {
  Transducer shifted = shift_precompose(t);
  for (int k = 0; k <= k_bound; ++k)
    if (outputs_equal(shifted, t, k, k + 1).equal) return k;
  return std::nullopt;
}

} // namespace detail

/// σ_B^{K1}∘h∘σ_A = σ_B^{K1+1}∘h and σ_A^{K2}∘h⁻¹∘σ_B = σ_A^{K2+1}∘h⁻¹ with
/// minimal constants.
inline EventualConjugacyResult verify_eventual_conjugacy(HomeoCertificate const &c, int k_bound = 16) {
  EventualConjugacyResult r;
  auto k1 = detail::eventual_constant(c.forward, k_bound);
  if (!k1) {
    r.failing_side = "A";
    return r;
  }
  auto k2 = detail::eventual_constant(c.backward, k_bound);
  if (!k2) {
    r.failing_side = "B";
    return r;
  }
  r.verified = true;
  r.k1 = *k1;
  r.k2 = *k2;
  return r;
}

struct UcoeResult {
  bool verified = false;
  /// Number of generators checked (both sides).
  int tested = 0;
  /// First AF transposition whose conjugate is not AF within the bound.
  std::optional<TableauElement> witness;
  std::string witness_side;
};

namespace detail {

/// Least K <= bound with σ^K∘m = σ^K, m an endomorphism machine of one shift.
inline std::optional<int> af_constant(Transducer const &m, int k_bound) {
  Transducer id = identity_transducer(m.source());
  for (int k = 0; k <= k_bound; ++k)
    if (outputs_equal(m, id, k, k).equal) return k;
  return std::nullopt;
}

inline bool conjugates_af(Transducer const &h, Transducer const &h_inv, TransitionMatrix const &a, int depth, int k_bound,
                          UcoeResult &r, std::string const &side) {
  for (int d = 1; d <= depth; ++d)
    for (auto const &tau : af_transpositions(a, d)) {
      ++r.tested;
      Transducer conj = compose(h, compose(tableau_transducer(tau), h_inv));
      if (!af_constant(conj, k_bound)) {
        r.witness = tau;
        r.witness_side = side;
        return false;
      }
    }
  return true;
}

} // namespace detail

/// Generator-level uniform check: for every AF transposition τ of depth <=
/// depth on X_A, h∘τ∘h⁻¹ satisfies σ_B^K∘(h∘τ∘h⁻¹) = σ_B^K for some K <=
/// k_bound; and symmetrically on X_B with h⁻¹.
inline UcoeResult verify_ucoe(HomeoCertificate const &c, int depth, int k_bound = 16) {
  UcoeResult r;
  if (!detail::conjugates_af(c.forward, c.backward, c.a(), depth, k_bound, r, "A")) return r;
  if (!detail::conjugates_af(c.backward, c.forward, c.b(), depth, k_bound, r, "B")) return r;
  r.verified = true;
  return r;
}

/// Both sides of
///   k1^{l2(y)}(h⁻¹y) + l1^{k2(y)}(h⁻¹σy) + 1 = k1^{k2(y)}(h⁻¹σy) + l1^{l2(y)}(h⁻¹y)
/// at one point y of X_B.
inline std::pair<Int, Int> lemma_identity_sides(HomeoCertificate const &c, CoeData const &data, Point const &y) {
  Point x = run(c.backward, y);
  Point xs = run(c.backward, shift(y));
  int const l2 = static_cast<int>(data.l2.evaluate(y));
  int const k2 = static_cast<int>(data.k2.evaluate(y));
  Int lhs = add_checked(add_checked(cocycle_sum(data.k1, l2, x), cocycle_sum(data.l1, k2, xs)), 1);
  Int rhs = add_checked(cocycle_sum(data.k1, k2, xs), cocycle_sum(data.l1, l2, x));
  return {lhs, rhs};
}

/// The identity above at every sample; and if c1 is constant, c1 = c2 = 1.
inline bool check_lemma_useful(HomeoCertificate const &c, CoeData const &data, std::vector<Point> const &samples) {
  for (auto const &y : samples) {
    auto [lhs, rhs] = lemma_identity_sides(c, data, y);
    if (lhs != rhs) return false;
  }
  if (auto c1 = data.c1().coarsen().constant_value()) {
    auto c2 = data.c2().coarsen().constant_value();
    if (*c1 != 1 || !c2 || *c2 != 1) return false;
  }
  return true;
}

/// Σ c1 over each periodic orbit of length <= max_len is positive.
inline std::optional<Word> positivity_violation(LCFunction const &c1, int max_len) {
  for (auto const &cycle : periodic_orbits(c1.matrix(), max_len))
    if (orbit_sum(c1, cycle) <= 0) return cycle;
  return std::nullopt;
}

struct ScoeResult {
  Verdict verdict = Verdict::Unknown; // Yes = established, No = refuted
  CoboundaryResult side_a, side_b;
};

inline ScoeResult scoe_check(HomeoCertificate const &c, CoeData const &data, int max_depth = 8) {
  ScoeResult r;
  r.side_a = is_coboundary_equivalent(data.c1(), LCFunction::constant(c.a(), 1), max_depth);
  r.side_b = is_coboundary_equivalent(data.c2(), LCFunction::constant(c.b(), 1), max_depth);
  if (r.side_a.verdict == Verdict::No || r.side_b.verdict == Verdict::No)
    r.verdict = Verdict::No;
  else if (r.side_a.verdict == Verdict::Yes && r.side_b.verdict == Verdict::Yes)
    r.verdict = Verdict::Yes;
  return r;
}

// ---------------------------------------------------------------------------
// Relation report

enum class Relation { COE, SCOE, UCOE, UOE, TwoSided };
inline constexpr std::array<Relation, 5> all_relations{Relation::COE, Relation::SCOE, Relation::UCOE, Relation::UOE,
                                                       Relation::TwoSided};

inline char const *to_string(Relation r) {
  switch (r) {
  case Relation::COE: return "COE";
  case Relation::SCOE: return "SCOE";
  case Relation::UCOE: return "UCOE";
  case Relation::UOE: return "UOE";
  case Relation::TwoSided: return "two-sided";
  }
  return "?";
}

inline std::optional<Relation> relation_from_string(std::string const &s) {
  for (Relation r : all_relations)
    if (s == to_string(r)) return r;
  return std::nullopt;
}

enum class Status { Established, Refuted, Unknown };

inline char const *to_string(Status s) {
  switch (s) {
  case Status::Established: return "Established";
  case Status::Refuted: return "Refuted";
  case Status::Unknown: return "Unknown";
  }
  return "?";
}

inline std::optional<Status> status_from_string(std::string const &s) {
  for (Status st : {Status::Established, Status::Refuted, Status::Unknown})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

struct Evidence {
  std::string name;
  std::map<std::string, std::string> values;
  friend bool operator==(Evidence const &, Evidence const &) = default;
};

struct RelationStatus {
  Status status = Status::Unknown;
  std::vector<Evidence> evidence;
  friend bool operator==(RelationStatus const &, RelationStatus const &) = default;
};

class ContradictoryEvidence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RelationReport {
  std::string a_name, b_name;
  std::array<RelationStatus, 5> relations;
  std::vector<std::string> notes;

  RelationStatus const &operator[](Relation r) const { return relations[static_cast<std::size_t>(r)]; }
  RelationStatus &operator[](Relation r) { return relations[static_cast<std::size_t>(r)]; }

  /// Records evidence; fails loudly when it contradicts the current status.
  bool record(Relation r, Status s, Evidence e) {
    RelationStatus &rs = (*this)[r];
    if (rs.status != Status::Unknown && rs.status != s)
      throw ContradictoryEvidence(std::string(to_string(r)) + " is both Established and Refuted (new evidence: " + e.name + ")");
    bool changed = rs.status != s;
    rs.status = s;
    rs.evidence.push_back(std::move(e));
    return changed;
  }

  friend bool operator==(RelationReport const &, RelationReport const &) = default;
};

namespace detail {

/// Closes the report under UCOE ⇒ UOE, UCOE ⇒ SCOE ⇒ COE, SCOE ⇒ two-sided
/// and the contrapositives.
inline void propagate(RelationReport &rep) {
  struct Rule {
    Relation from, to;
  };
  static constexpr Rule forward[] = {{Relation::UCOE, Relation::UOE},
                                     {Relation::UCOE, Relation::SCOE},
                                     {Relation::SCOE, Relation::COE},
                                     {Relation::SCOE, Relation::TwoSided}};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto const &rule : forward) {
      std::string label = std::string(to_string(rule.from)) + " => " + to_string(rule.to);
      if (rep[rule.from].status == Status::Established && rep[rule.to].status != Status::Established)
        changed |= rep.record(rule.to, Status::Established, {"implied by " + label, {}});
      if (rep[rule.to].status == Status::Refuted && rep[rule.from].status != Status::Refuted)
        changed |= rep.record(rule.from, Status::Refuted, {"contrapositive of " + label, {}});
    }
  }
}

inline std::string format_factors(std::vector<Int> const &v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

} // namespace detail

/// Order of the distinguished element of a finite presentation (0 when a
/// free coordinate is nonzero).
inline Int unit_order(FiniteAbelianPresentation const &p) {
  Int order = 1;
  for (std::size_t i = 0; i < p.invariant_factors.size(); ++i) {
    Int d = p.invariant_factors[i];
    Int o = d / gcd_abs(d, p.unit_class[i]);
    order = mul_checked(order / gcd_abs(order, o), o);
  }
  for (std::size_t i = p.invariant_factors.size(); i < p.unit_class.size(); ++i)
    if (p.unit_class[i] != 0) return 0;
  return order;
}

struct ClassifyOptions {
  int search_bound = 8;
  int max_depth = 8;
  int k_bound = 16;
  int inner_dim = 4;
  int ucoe_depth = 2;
};

struct NamedCertificate {
  std::string id;
  HomeoCertificate cert;
};

inline RelationReport classify(TransitionMatrix const &a, TransitionMatrix const &b, std::vector<NamedCertificate> const &certs = {},
                               ClassifyOptions const &opt = {}, std::string a_name = "A", std::string b_name = "B") {
  RelationReport rep;
  rep.a_name = std::move(a_name);
  rep.b_name = std::move(b_name);
  using detail::format_factors;

  // COE via det(I−A) and (K0, [1], K1), using the classification theorem.
  Int det_a = det_id_minus(a), det_b = det_id_minus(b);
  KGroups ka = k_groups(a), kb = k_groups(b);
  auto k_values = [&] {
    return std::map<std::string, std::string>{{"det_A", std::to_string(det_a)},
                                              {"det_B", std::to_string(det_b)},
                                              {"k0_factors_A", format_factors(ka.k0.invariant_factors)},
                                              {"k0_factors_B", format_factors(kb.k0.invariant_factors)},
                                              {"k0_unit_order_A", std::to_string(unit_order(ka.k0))},
                                              {"k0_unit_order_B", std::to_string(unit_order(kb.k0))},
                                              {"k1_rank_A", std::to_string(ka.k1_rank)},
                                              {"k1_rank_B", std::to_string(kb.k1_rank)}};
  };
  if (det_a != det_b) rep.record(Relation::COE, Status::Refuted, {"det(I-A) differs", k_values()});
  auto pointed = pointed_isomorphic(ka.k0, kb.k0);
  if (pointed && !*pointed)
    rep.record(Relation::COE, Status::Refuted, {"K0 with unit class differs (via classification theorem)", k_values()});
  if (pointed && *pointed && det_a == det_b)
    rep.record(Relation::COE, Status::Established, {"K-theory and det(I-A) agree (via classification theorem)", k_values()});

  // UOE via the stationary dimension groups with order unit.
  auto ga = dimension_group(a), gb = dimension_group(b);
  auto dim_values = [&] {
    std::map<std::string, std::string> v;
    auto put = [&](std::string const &side, StationaryDimensionGroup const &g) {
      v["eventual_rank_" + side] = std::to_string(g.eventual_rank);
      if (g.status == DimensionGroupStatus::Ok) {
        v["lambda_" + side] = std::to_string(g.lambda);
        v["unit_" + side] = std::to_string(g.unit_value);
      }
    };
    put("A", ga);
    put("B", gb);
    return v;
  };
  auto dims = dimension_groups_isomorphic(ga, gb);
  if (dims && *dims) rep.record(Relation::UOE, Status::Established, {"dimension groups with order unit isomorphic", dim_values()});
  if (dims && !*dims) {
    rep.record(Relation::UOE, Status::Refuted, {"dimension groups with order unit not isomorphic", dim_values()});
    rep.record(Relation::UCOE, Status::Refuted, {"dimension groups with order unit not isomorphic", dim_values()});
  }
  if (!dims) rep.notes.push_back("dimension group comparison unsupported (eventual rank " + std::to_string(ga.eventual_rank) + " vs " +
                                 std::to_string(gb.eventual_rank) + ")");

  // Two-sided conjugacy.
  Polynomial pa = char_poly(a), pb = char_poly(b);
  if (nonzero_spectrum(pa) != nonzero_spectrum(pb))
    rep.record(Relation::TwoSided, Status::Refuted,
               {"nonzero spectrum differs", {{"charpoly_A", format_polynomial(pa)}, {"charpoly_B", format_polynomial(pb)}}});
  auto bfa = bowen_franks(a), bfb = bowen_franks(b);
  if (!bfa.same_group(bfb))
    rep.record(Relation::TwoSided, Status::Refuted,
               {"Bowen-Franks group differs",
                {{"bf_A", format_factors(bfa.invariant_factors) + " rank " + std::to_string(bfa.free_rank)},
                 {"bf_B", format_factors(bfb.invariant_factors) + " rank " + std::to_string(bfb.free_rank)}}});
  if (rep[Relation::TwoSided].status == Status::Unknown) {
    if (auto rs = elementary_sse_search(a, b, opt.inner_dim))
      rep.record(Relation::TwoSided, Status::Established,
                 {"elementary strong shift equivalence", {{"R", rs->first.to_string()}, {"S", rs->second.to_string()}}});
    else
      rep.notes.push_back("no elementary strong shift equivalence with inner dimension <= " + std::to_string(opt.inner_dim));
  }

  // Certificates.
  for (auto const &[id, given] : certs) {
    std::optional<HomeoCertificate> cert;
    if (given.a() == a && given.b() == b)
      cert = given;
    else if (given.a() == b && given.b() == a)
      cert = given.inverse();
    else
      throw std::invalid_argument("certificate " + id + " does not connect the two matrices");
    auto hv = verify_homeomorphism(*cert);
    if (!hv.verified) {
      rep.notes.push_back("certificate " + id + " rejected: " + hv.detail);
      continue;
    }
    auto data = extract_coe_data(*cert, {opt.search_bound, opt.max_depth});
    if (!data || !verify_coe_data(*cert, *data)) {
      rep.notes.push_back("certificate " + id + ": orbit-time search inconclusive");
      continue;
    }
    std::map<std::string, std::string> cv{{"certificate", id}};
    if (auto c1 = data->c1().coarsen().constant_value()) cv["c1"] = std::to_string(*c1);
    if (auto c2 = data->c2().coarsen().constant_value()) cv["c2"] = std::to_string(*c2);
    rep.record(Relation::COE, Status::Established, {"verified COE certificate", cv});

    auto sc = scoe_check(*cert, *data, opt.max_depth);
    if (sc.verdict == Verdict::Yes)
      rep.record(Relation::SCOE, Status::Established, {"certificate cocycles cohomologous to 1", cv});
    else
      rep.notes.push_back("certificate " + id + ": cocycles not shown cohomologous to 1 (" + to_string(sc.verdict) + ")");

    auto ev = verify_eventual_conjugacy(*cert, opt.k_bound);
    if (ev.verified) {
      auto ev_values = cv;
      ev_values["K1"] = std::to_string(ev.k1);
      ev_values["K2"] = std::to_string(ev.k2);
      rep.record(Relation::UCOE, Status::Established, {"verified eventual conjugacy certificate", ev_values});
      auto uc = verify_ucoe(*cert, opt.ucoe_depth, opt.k_bound);
      if (!uc.verified)
        throw ContradictoryEvidence("certificate " + id + " is an eventual conjugacy but fails the AF conjugation check");
      rep.record(Relation::UCOE, Status::Established,
                 {"AF generators conjugate to AF generators (generator-level)",
                  {{"certificate", id}, {"depth", std::to_string(opt.ucoe_depth)}, {"generators", std::to_string(uc.tested)}}});
    } else {
      rep.notes.push_back("certificate " + id + ": no eventual conjugacy constant <= " + std::to_string(opt.k_bound));
    }
  }

  detail::propagate(rep);
  return rep;
}

} // namespace orbiteq
