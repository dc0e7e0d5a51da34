#pragma once

#include <functional>
#include <string>

#include "generators.hpp"

namespace orbiteq::testing {

struct PropertyRun {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  bool ok(int min_cases) const { return failures == 0 && cases >= min_cases; }
  void fail(std::string const &what) {
    if (failures++ == 0) first_failure = what;
  }
  void check(bool cond, std::string const &what) {
    if (!cond) fail(what);
  }
};

/// Runs `body` on `cases` seeded cases; exceptions count as failures.
inline PropertyRun run_property(std::uint64_t seed, int cases, std::function<void(Rng &, PropertyRun &)> const &body) {
  PropertyRun r;
  Rng rng(seed);
  for (int i = 0; i < cases; ++i) {
    ++r.cases;
    try {
      body(rng, r);
    } catch (std::exception const &e) {
      r.fail(std::string("case ") + std::to_string(i) + " threw: " + e.what());
    }
  }
  return r;
}

struct PropertyContext {
  TableauPool a2{A2()}, f2{F2()};
  CertificateFactory factory;

  TableauPool const &pool(Rng &rng) { return uniform(rng, 0, 1) ? a2 : f2; }
};

inline std::string tab(TableauElement const &t) { return format_tableau(t); }

inline PropertyRun prop_group_laws(PropertyContext &ctx, int cases) {
  return run_property(101, cases, [&](Rng &rng, PropertyRun &r) {
    auto const &p = ctx.pool(rng);
    auto x = p.random(rng, uniform(rng, 1, 2), false), y = p.random(rng, 1, false), z = p.random(rng, 1, false);
    auto id = TableauElement::identity(p.a);
    r.check(equal(compose(compose(x, y), z), compose(x, compose(y, z))), "associativity " + tab(x) + tab(y) + tab(z));
    r.check(equal(compose(x, id), x) && equal(compose(id, x), x), "identity " + tab(x));
    r.check(equal(compose(x, invert(x)), id) && equal(compose(invert(x), x), id), "inverse " + tab(x));
    Point pt = random_point(rng, p.a);
    r.check(apply(compose(x, y), pt) == apply(x, apply(y, pt)), "pointwise composition " + tab(x) + tab(y));
  });
}

inline PropertyRun prop_cocycle_identity(PropertyContext &ctx, int cases) {
  return run_property(102, cases, [&](Rng &rng, PropertyRun &r) {
    auto const &p = ctx.pool(rng);
    auto x = p.random(rng, uniform(rng, 1, 2), false), y = p.random(rng, uniform(rng, 1, 2), false);
    r.check(cocycle_composition_identity_check(x, y), "c(xy) = c(x)∘y + c(y) " + tab(x) + tab(y));
    // pointwise: c(τ)(pt) = l - k with σ^k(τ pt) = σ^l(pt)
    Point pt = random_point(rng, p.a);
    auto const &pair = x.pair_for(pt.prefix(x.max_source_length()));
    r.check(apply(x, pt).shifted(pair.target.size()) == pt.shifted(pair.source.size()), "orbit times " + tab(x));
    r.check(cocycle(x).evaluate(pt) == static_cast<Int>(pair.source.size()) - static_cast<Int>(pair.target.size()),
            "cocycle value " + tab(x));
  });
}

inline PropertyRun prop_af_closure(PropertyContext &ctx, int cases) {
  return run_property(103, cases, [&](Rng &rng, PropertyRun &r) {
    auto const &p = ctx.pool(rng);
    auto x = p.random(rng, uniform(rng, 1, 3), true), y = p.random(rng, uniform(rng, 1, 3), true);
    auto xy = compose(x, y);
    auto rx = is_af(xy);
    r.check(rx.af, "product of AF elements not AF " + tab(x) + tab(y));
    r.check(is_af(invert(x)).af, "inverse of AF element not AF " + tab(x));
    if (rx.af) {
      Point pt = random_point(rng, p.a);
      auto k = static_cast<std::size_t>(rx.k);
      r.check(apply(xy, pt).shifted(k) == pt.shifted(k), "sync time " + tab(xy));
    }
    r.check(is_af(x).k == is_af(invert(x)).k, "inverse sync time " + tab(x));
  });
}

inline PropertyRun prop_cocycle_additivity(int cases) {
  return run_property(104, cases, [&](Rng &rng, PropertyRun &r) {
    auto ms = example_matrices();
    auto const &a = pick(rng, ms).second;
    auto f = LCFunction::tabulate(a, uniform(rng, 0, 3), [&](Word const &) { return static_cast<Int>(uniform(rng, -7, 7)); });
    Point pt = random_point(rng, a);
    int j = uniform(rng, 0, 12), k = uniform(rng, 0, 12);
    r.check(cocycle_sum(f, j + k, pt) == cocycle_sum(f, j, pt) + cocycle_sum(f, k, pt.shifted(static_cast<std::size_t>(j))),
            "f^{j+k} at " + pt.to_string(a.size()));
    // direct summation oracle
    Int direct = 0;
    for (int i = 0; i < j; ++i) direct += f.at(pt.shifted(static_cast<std::size_t>(i)).prefix(static_cast<std::size_t>(f.depth())));
    r.check(direct == cocycle_sum(f, j, pt), "cocycle_sum vs direct sum");
  });
}

inline PropertyRun prop_run_compose(PropertyContext &ctx, int cases) {
  return run_property(105, cases, [&](Rng &rng, PropertyRun &r) {
    auto c1 = ctx.factory.make(rng, false);
    TableauPool local(c1.b(), false);
    auto c2 = tableau_certificate(local.random(rng, 1, true));
    Point pt = random_point(rng, c1.a());
    auto t = compose(c2.forward, c1.forward);
    r.check(run(t, pt) == run(c2.forward, run(c1.forward, pt)), "run∘compose at " + pt.to_string(c1.a().size()));
    r.check(run(c1.backward, run(c1.forward, pt)) == pt, "round trip at " + pt.to_string(c1.a().size()));
  });
}

inline PropertyRun prop_outputs_equal_laws(PropertyContext &ctx, int cases) {
  return run_property(106, cases, [&](Rng &rng, PropertyRun &r) {
    auto c = ctx.factory.make(rng, false);
    TableauPool local(c.b(), false);
    auto t1 = c.forward;
    auto t2 = compose(identity_transducer(c.b()), compose(c.forward, compose(c.backward, c.forward)));
    auto t3 = uniform(rng, 0, 1) ? compose(tableau_certificate(local.random(rng, 1, true)).forward, t1) : t1;
    int d = uniform(rng, 0, 2);
    r.check(outputs_equal(t1, t1, d, d).equal, "reflexivity");
    bool e12 = outputs_equal(t1, t2, d, d).equal, e21 = outputs_equal(t2, t1, d, d).equal;
    r.check(e12 && e21, "equal maps judged different");
    bool e13 = outputs_equal(t1, t3, d, d).equal, e31 = outputs_equal(t3, t1, d, d).equal;
    r.check(e13 == e31, "symmetry");
    bool e23 = outputs_equal(t2, t3, d, d).equal;
    r.check(e23 == e13, "transitivity");
    auto res = outputs_equal(t1, t3, d, d);
    if (!res.equal && res.witness) r.check(differs_at(t1, t3, d, d, *res.witness), "spurious witness");
  });
}

/// Generated certificate with verified homeomorphism and COE data.
struct VerifiedCert {
  HomeoCertificate cert;
  CoeData data;
};

inline std::optional<VerifiedCert> verified_cert(PropertyContext &ctx, Rng &rng, bool eventual_only, PropertyRun &r) {
  auto c = ctx.factory.make(rng, eventual_only);
  if (!verify_homeomorphism(c).verified) {
    r.fail("generated certificate failed verification");
    return std::nullopt;
  }
  auto data = extract_coe_data(c);
  if (!data || !verify_coe_data(c, *data)) {
    r.fail("no COE data for a generated certificate");
    return std::nullopt;
  }
  return VerifiedCert{c, *data};
}

inline PropertyRun prop_lemma_identity(PropertyContext &ctx, int cases) {
  return run_property(107, cases, [&](Rng &rng, PropertyRun &r) {
    auto v = verified_cert(ctx, rng, false, r);
    if (!v) return;
    std::vector<Point> samples;
    for (int i = 0; i < 50; ++i) samples.push_back(random_point(rng, v->cert.b()));
    for (auto const &y : samples) {
      auto [lhs, rhs] = lemma_identity_sides(v->cert, v->data, y);
      if (lhs != rhs) {
        r.fail("identity fails at " + y.to_string(v->cert.b().size()));
        return;
      }
    }
    if (auto c1 = v->data.c1().coarsen().constant_value()) {
      auto c2 = v->data.c2().coarsen().constant_value();
      r.check(*c1 == 1 && c2 && *c2 == 1, "constant c1 but c1 = c2 = 1 fails");
    }
    r.check(check_lemma_useful(v->cert, v->data, samples), "check_lemma_useful disagrees");
  });
}

inline PropertyRun prop_positivity(PropertyContext &ctx, int cases) {
  return run_property(108, cases, [&](Rng &rng, PropertyRun &r) {
    auto v = verified_cert(ctx, rng, false, r);
    if (!v) return;
    auto bad = positivity_violation(v->data.c1(), 6);
    r.check(!bad, "nonpositive orbit sum of c1");
    // the orbit sum is a positive multiple of the image period
    auto orbits = periodic_orbits(v->cert.a(), 4);
    auto const &cyc = pick(rng, orbits);
    Point y = run(v->cert.forward, Point::periodic(cyc));
    r.check(orbit_sum(v->data.c1(), cyc) % static_cast<Int>(y.cycle().size()) == 0, "orbit sum not a multiple of the image period");
  });
}

inline PropertyRun prop_eventual_implies_ucoe(PropertyContext &ctx, int cases) {
  return run_property(109, cases, [&](Rng &rng, PropertyRun &r) {
    auto c = ctx.factory.make(rng, true);
    auto ev = verify_eventual_conjugacy(c);
    r.check(ev.verified, "generated eventual conjugacy not verified");
    if (!ev.verified) return;
    auto uc = verify_ucoe(c, 2);
    r.check(uc.verified && uc.tested > 0, "eventual conjugacy fails the AF conjugation check");
  });
}

inline PropertyRun prop_psi_unit(PropertyContext &ctx, int cases) {
  return run_property(110, cases, [&](Rng &rng, PropertyRun &r) {
    auto v = verified_cert(ctx, rng, false, r);
    if (!v) return;
    auto psi = psi_h(v->cert, v->data, LCFunction::constant(v->cert.b(), 1));
    auto c1 = v->data.c1();
    int d = std::max(psi.depth(), c1.depth());
    r.check(psi.refine(d).table() == c1.refine(d).table(), "psi_h(1) differs from c1");
  });
}

} // namespace orbiteq::testing
