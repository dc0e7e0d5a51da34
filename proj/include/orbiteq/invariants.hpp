#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "checked.hpp"
#include "intmat.hpp"
#include "matrix.hpp"

namespace orbiteq {

inline Int det_id_minus(TransitionMatrix const &a) {
  return determinant(IntMatrix::identity(a.size()) - IntMatrix::from(a));
}

/// Finitely generated abelian group Z/d1 ⊕ ... ⊕ Z/dk ⊕ Z^r (d1 | d2 | ...,
/// all di > 1) with a distinguished element in those coordinates.
struct FiniteAbelianPresentation {
  std::vector<Int> invariant_factors;
  int free_rank = 0;
  /// Torsion coordinates (reduced mod di) followed by free coordinates.
  std::vector<Int> unit_class;

  Int torsion_order() const {
    Int o = 1;
    for (Int d : invariant_factors) o = mul_checked(o, d);
    return o;
  }
  bool same_group(FiniteAbelianPresentation const &o) const {
    return invariant_factors == o.invariant_factors && free_rank == o.free_rank;
  }
  bool unit_is_zero() const {
    for (Int c : unit_class)
      if (c != 0) return false;
    return true;
  }
  friend bool operator==(FiniteAbelianPresentation const &, FiniteAbelianPresentation const &) = default;
};

/// Cokernel of M with the class of `element`, read off a Smith form.
inline FiniteAbelianPresentation cokernel(IntMatrix const &m, std::vector<Int> const &element) {
  SmithForm s = smith_normal_form(m);
  std::vector<Int> image = s.u.apply(element);
  FiniteAbelianPresentation p;
  std::vector<Int> torsion, free;
  auto diag = s.diagonal();
  for (int i = 0; i < m.rows(); ++i) {
    Int d = i < static_cast<int>(diag.size()) ? diag[static_cast<std::size_t>(i)] : 0;
    if (d == 1) continue;
    if (d == 0) {
      ++p.free_rank;
      free.push_back(image[static_cast<std::size_t>(i)]);
    } else {
      p.invariant_factors.push_back(d);
      torsion.push_back(mod_floor(image[static_cast<std::size_t>(i)], d));
    }
  }
  p.unit_class = torsion;
  p.unit_class.insert(p.unit_class.end(), free.begin(), free.end());
  return p;
}

struct KGroups {
  FiniteAbelianPresentation k0;
  int k1_rank = 0;
};

/// K0 = coker(I − Aᵗ) with the class of (1,…,1); K1 = ker(I − Aᵗ).
inline KGroups k_groups(TransitionMatrix const &a) {
  IntMatrix m = IntMatrix::identity(a.size()) - IntMatrix::from(a).transposed();
  KGroups k;
  k.k0 = cokernel(m, std::vector<Int>(static_cast<std::size_t>(a.size()), 1));
  k.k1_rank = k.k0.free_rank;
  return k;
}

/// Bowen–Franks group coker(I − A) (no distinguished element).
inline FiniteAbelianPresentation bowen_franks(TransitionMatrix const &a) {
  auto p = cokernel(IntMatrix::identity(a.size()) - IntMatrix::from(a), std::vector<Int>(static_cast<std::size_t>(a.size()), 0));
  p.unit_class.clear();
  return p;
}

namespace detail {

inline std::vector<Int> prime_factors(Int n) {
  std::vector<Int> out;
  if (n < 0) n = -n;
  for (Int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) out.push_back(n);
  return out;
}

inline int valuation(Int n, Int p) {
  int v = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

/// Height sequence of the p-primary part of x in ⊕ Z/di: heights of
/// x, p·x, p²·x, … until zero (-1 marks the zero element).
inline std::vector<int> height_sequence(std::vector<Int> const &factors, std::vector<Int> const &x, Int p) {
  std::vector<Int> mods, comp;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    int e = valuation(factors[i], p);
    if (e == 0) continue;
    Int pe = 1;
    for (int k = 0; k < e; ++k) pe *= p;
    mods.push_back(pe);
    comp.push_back(mod_floor(x[i], pe));
  }
  std::vector<int> seq;
  while (true) {
    int h = -1;
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (comp[i] != 0) {
        int v = valuation(comp[i], p);
        h = h < 0 ? v : std::min(h, v);
      }
    seq.push_back(h);
    if (h < 0) break;
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = mod_floor(mul_checked(comp[i], p), mods[i]);
  }
  return seq;
}

} // namespace detail

/// Is there a group isomorphism carrying one distinguished element onto the
/// other? Exact for finite groups (elements of a finite abelian p-group are
/// automorphic iff their height sequences agree); nothing when a free part
/// makes the comparison undecided here.
inline std::optional<bool> pointed_isomorphic(FiniteAbelianPresentation const &x, FiniteAbelianPresentation const &y) {
  if (!x.same_group(y)) return false;
  if (x.free_rank > 0) {
    if (x.unit_class == y.unit_class) return true;
    return std::nullopt;
  }
  std::vector<Int> primes;
  for (Int d : x.invariant_factors)
    for (Int p : detail::prime_factors(d))
      if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
  for (Int p : primes)
    if (detail::height_sequence(x.invariant_factors, x.unit_class, p) !=
        detail::height_sequence(y.invariant_factors, y.unit_class, p))
      return false;
  return true;
}

inline Polynomial char_poly(TransitionMatrix const &a) { return characteristic_polynomial(IntMatrix::from(a)); }

/// Characteristic polynomial with all factors of t removed: the nonzero
/// spectrum, a two-sided conjugacy invariant.
inline Polynomial nonzero_spectrum(Polynomial p) {
  std::size_t k = 0;
  while (k + 1 < p.size() && p[k] == 0) ++k;
  return Polynomial(p.begin() + static_cast<std::ptrdiff_t>(k), p.end());
}

enum class DimensionGroupStatus { Ok, RankTooHigh };

/// Stationary inductive limit Z^N →Aᵗ Z^N →Aᵗ ⋯ with order unit [1]. When the
/// eventual rank is 1, the state v@n ↦ ⟨w, v⟩/λⁿ is an order isomorphism onto
/// Z[1/λ] sending [1] to unit_value.
struct StationaryDimensionGroup {
  DimensionGroupStatus status = DimensionGroupStatus::Ok;
  int eventual_rank = 0;
  Int lambda = 0;
  std::vector<Int> weight; // primitive positive right Perron vector
  Int unit_value = 0;
};

inline StationaryDimensionGroup dimension_group(TransitionMatrix const &a) {
  StationaryDimensionGroup g;
  Polynomial cp = char_poly(a);
  int zero_mult = 0;
  while (zero_mult < a.size() && cp[static_cast<std::size_t>(zero_mult)] == 0) ++zero_mult;
  g.eventual_rank = a.size() - zero_mult;
  if (g.eventual_rank != 1) {
    g.status = DimensionGroupStatus::RankTooHigh;
    return g;
  }
  IntMatrix m = IntMatrix::from(a);
  // Single nonzero eigenvalue, so it is the trace.
  for (int i = 0; i < a.size(); ++i) g.lambda += m(i, i);
  IntMatrix p = power(m, a.size());
  std::vector<Int> w(static_cast<std::size_t>(a.size()), 0);
  for (int j = 0; j < a.size(); ++j) {
    bool nonzero = false;
    for (int i = 0; i < a.size(); ++i) nonzero = nonzero || p(i, j) != 0;
    if (!nonzero) continue;
    for (int i = 0; i < a.size(); ++i) w[static_cast<std::size_t>(i)] = p(i, j);
    break;
  }
  Int gcd = 0;
  for (Int v : w) gcd = gcd_abs(gcd, v);
  for (Int &v : w) v /= gcd;
  auto aw = m.apply(w);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (aw[i] != mul_checked(g.lambda, w[i])) throw std::logic_error("dimension_group: Perron vector check failed");
  g.weight = w;
  for (Int v : w) g.unit_value = add_checked(g.unit_value, v);
  return g;
}

/// Rank-one comparison: same ring Z[1/λ] and unit values differing by a unit
/// of that ring. Nothing for unsupported (higher-rank) groups.
inline std::optional<bool> dimension_groups_isomorphic(StationaryDimensionGroup const &x, StationaryDimensionGroup const &y) {
  if (x.status != DimensionGroupStatus::Ok || y.status != DimensionGroupStatus::Ok) return std::nullopt;
  auto px = detail::prime_factors(x.lambda), py = detail::prime_factors(y.lambda);
  if (px != py) return false;
  auto strip = [&](Int v) {
    for (Int p : px)
      while (v % p == 0) v /= p;
    return v;
  };
  return strip(x.unit_value) == strip(y.unit_value);
}

/// One elementary strong shift equivalence step A = RS, B = SR with 0/1
/// matrices. R is N_A × N_B, so the inner dimension of RS is N_B; the search
/// runs only when that is at most inner_dim_max.
inline std::optional<std::pair<IntMatrix, IntMatrix>> elementary_sse_search(TransitionMatrix const &a, TransitionMatrix const &b,
                                                                            int inner_dim_max) {
  int const na = a.size(), nb = b.size();
  if (nb > inner_dim_max || na * nb > 20) return std::nullopt;
  IntMatrix ma = IntMatrix::from(a), mb = IntMatrix::from(b);
  std::uint64_t const r_count = std::uint64_t{1} << (na * nb);
  for (std::uint64_t bits = 0; bits < r_count; ++bits) {
    IntMatrix r(na, nb);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) r(i, j) = (bits >> (i * nb + j)) & 1;
    // columns of S solve R·s = A[:, j]
    std::vector<std::vector<std::vector<Int>>> options(static_cast<std::size_t>(na));
    bool feasible = true;
    for (int j = 0; j < na && feasible; ++j) {
      for (std::uint64_t sb = 0; sb < (std::uint64_t{1} << nb); ++sb) {
        std::vector<Int> s(static_cast<std::size_t>(nb));
        for (int k = 0; k < nb; ++k) s[static_cast<std::size_t>(k)] = (sb >> k) & 1;
        auto rs = r.apply(s);
        bool match = true;
        for (int i = 0; i < na && match; ++i) match = rs[static_cast<std::size_t>(i)] == ma(i, j);
        if (match) options[static_cast<std::size_t>(j)].push_back(s);
      }
      feasible = !options[static_cast<std::size_t>(j)].empty();
    }
    if (!feasible) continue;
    std::vector<std::size_t> pick(static_cast<std::size_t>(na), 0);
    while (true) {
      IntMatrix s(nb, na);
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < nb; ++k) s(k, j) = options[static_cast<std::size_t>(j)][pick[static_cast<std::size_t>(j)]][static_cast<std::size_t>(k)];
      if (s * r == mb && r * s == ma) return std::make_pair(r, s);
      std::size_t j = 0;
      while (j < pick.size() && ++pick[j] == options[j].size()) pick[j++] = 0;
      if (j == pick.size()) break;
    }
  }
  return std::nullopt;
}

} // namespace orbiteq
