#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace orbiteq;
using namespace orbiteq::testing;

namespace {

Word w(std::string const &s) { return parse_word(s, 9); }

Transducer swap_a2() { return relabel_transducer(A2(), A2(), {2, 1}); }

/// Output prefix of length `len` from feeding a long input expansion.
Word output_prefix(Transducer const &t, Point const &p, std::size_t len) {
  std::size_t in = len;
  while (true) {
    Word out = t.feed(expand(p, in)).second;
    if (out.size() >= len) return Word(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(len));
    in *= 2;
  }
}

} // namespace

TEST(Transducer, RejectsBadMachines) {
  auto a = A2();
  Transducer::Row silent{{1, {0, {}}}, {2, {0, {}}}};
  EXPECT_THROW(Transducer(a, a, 0, {silent}), TransducerError);
  Transducer::Row partial{{1, {0, {1}}}};
  EXPECT_THROW(Transducer(a, a, 0, {partial}), TransducerError);
  auto f = F2();
  Transducer::Row bad_out{{1, {0, {2, 2}}}, {2, {0, {1}}}};
  EXPECT_THROW(Transducer(f, f, 0, {bad_out}), TransducerError);
}

TEST(Transducer, RunExamples) {
  Rng rng(1);
  auto id = identity_transducer(A2());
  for (int i = 0; i < 20; ++i) {
    Point p = random_point(rng, A2());
    EXPECT_EQ(run(id, p), p);
  }
  EXPECT_EQ(run(swap_a2(), Point::periodic(w("1"))), Point::periodic(w("2")));
}

TEST(Transducer, RunMatchesExpansionOracle) {
  Rng rng(2);
  CertificateFactory factory;
  for (int i = 0; i < 200; ++i) {
    auto c = factory.make(rng, false);
    Point p = random_point(rng, c.a());
    Point y = run(c.forward, p);
    EXPECT_TRUE(y.admissible_in(c.b()));
    EXPECT_EQ(expand(y, 200), output_prefix(c.forward, p, 200));
  }
}

TEST(Transducer, ComposeExamples) {
  auto a = A2();
  auto id = identity_transducer(a);
  auto sw = swap_a2();
  EXPECT_TRUE(outputs_equal(compose(sw, id), sw, 0, 0).equal);
  EXPECT_TRUE(outputs_equal(compose(id, sw), sw, 0, 0).equal);
  EXPECT_TRUE(outputs_equal(compose(sw, sw), id, 0, 0).equal);
}

TEST(Transducer, RunCommutesWithCompose) {
  Rng rng(3);
  CertificateFactory factory;
  for (int i = 0; i < 200; ++i) {
    auto c = factory.make(rng, false);
    Point p = random_point(rng, c.a());
    EXPECT_EQ(run(compose(c.backward, c.forward), p), run(c.backward, run(c.forward, p)));
    EXPECT_EQ(run(c.backward, run(c.forward, p)), p);
  }
}

TEST(OutputsEqual, Examples) {
  auto a = A2();
  auto id = identity_transducer(a);
  EXPECT_TRUE(outputs_equal(id, id, 0, 0).equal);
  auto diff = outputs_equal(id, swap_a2(), 0, 0);
  EXPECT_FALSE(diff.equal);
  ASSERT_TRUE(diff.witness.has_value());
  EXPECT_NE(run(id, *diff.witness), run(swap_a2(), *diff.witness));
  auto shifted = shift_precompose(id);
  EXPECT_FALSE(outputs_equal(shifted, id, 1, 0).equal);
  EXPECT_TRUE(outputs_equal(shifted, id, 0, 1).equal);
  EXPECT_TRUE(outputs_equal(id, id, 1, 1).equal);
}

TEST(OutputsEqual, WitnessesAreGenuine) {
  Rng rng(4);
  CertificateFactory factory;
  for (int i = 0; i < 200; ++i) {
    auto c1 = factory.make(rng, false);
    auto t1 = c1.forward;
    // a second machine over the same pair of shifts
    auto t2 = uniform(rng, 0, 1) ? t1 : compose(tableau_certificate(TableauPool(c1.b(), false).random(rng, 1, true)).forward, t1);
    int d1 = uniform(rng, 0, 2), d2 = uniform(rng, 0, 2);
    auto r = outputs_equal(t1, t2, d1, d2);
    if (!r.equal) {
      if (r.witness) { EXPECT_TRUE(differs_at(t1, t2, d1, d2, *r.witness)); }
    } else {
      for (int j = 0; j < 10; ++j) EXPECT_FALSE(differs_at(t1, t2, d1, d2, random_point(rng, c1.a())));
    }
  }
}

TEST(OutputsEqual, EquivalenceLaws) {
  Rng rng(5);
  CertificateFactory factory;
  for (int i = 0; i < 200; ++i) {
    auto c = factory.make(rng, false);
    auto t1 = c.forward;
    auto t2 = compose(c.forward, compose(c.backward, c.forward)); // same map, different machine
    auto t3 = compose(identity_transducer(c.b()), t1);
    int d = uniform(rng, 0, 2);
    EXPECT_TRUE(outputs_equal(t1, t1, d, d).equal);
    bool ab = outputs_equal(t1, t2, d, d).equal, ba = outputs_equal(t2, t1, d, d).equal;
    EXPECT_EQ(ab, ba);
    EXPECT_TRUE(ab);
    bool bc = outputs_equal(t2, t3, d, d).equal;
    if (ab && bc) { EXPECT_TRUE(outputs_equal(t1, t3, d, d).equal); }
    // symmetry also on unequal pairs
    auto other = compose(tableau_certificate(TableauPool(c.b(), false).random(rng, 1, true)).forward, t1);
    EXPECT_EQ(outputs_equal(t1, other, 0, 0).equal, outputs_equal(other, t1, 0, 0).equal);
  }
}

TEST(Certificate, VerifyHomeomorphismExamples) {
  auto a = A2();
  EXPECT_TRUE(verify_homeomorphism(identity_certificate(a)).verified);
  EXPECT_TRUE(verify_homeomorphism({swap_a2(), swap_a2()}).verified);
  auto bad = verify_homeomorphism({identity_transducer(a), swap_a2()});
  EXPECT_FALSE(bad.verified);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_NE(run(swap_a2(), run(identity_transducer(a), *bad.witness)), *bad.witness);
}

TEST(Certificate, GeneratedCertificatesVerify) {
  Rng rng(6);
  CertificateFactory factory;
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(verify_homeomorphism(factory.make(rng, false)).verified);
}

TEST(CoeData, IdentityAndSwap) {
  for (auto c : {identity_certificate(A2()), HomeoCertificate(swap_a2(), swap_a2())}) {
    auto data = extract_coe_data(c);
    ASSERT_TRUE(data.has_value());
    EXPECT_EQ(data->k1.coarsen().constant_value(), std::optional<Int>(0));
    EXPECT_EQ(data->l1.coarsen().constant_value(), std::optional<Int>(1));
    EXPECT_EQ(data->c1().coarsen().constant_value(), std::optional<Int>(1));
    EXPECT_EQ(data->c2().coarsen().constant_value(), std::optional<Int>(1));
  }
}

TEST(CoeData, TableauCertificateCocycle) {
  auto a = A2();
  TableauElement t0(a, {{w("1"), w("12")}, {w("21"), w("2")}, {w("22"), w("11")}});
  auto c = tableau_certificate(t0);
  auto data = extract_coe_data(c);
  ASSERT_TRUE(data.has_value());
  EXPECT_TRUE(verify_coe_data(c, *data));
  EXPECT_FALSE(data->c1().coarsen().constant_value().has_value());
}

TEST(CoeData, ExtractedDataSatisfiesOrbitEquations) {
  Rng rng(7);
  CertificateFactory factory;
  for (int i = 0; i < 40; ++i) {
    auto c = factory.make(rng, false);
    auto data = extract_coe_data(c);
    ASSERT_TRUE(data.has_value());
    EXPECT_TRUE(verify_coe_data(c, *data));
    // sampled pointwise check σ^{k1}(h(σx)) = σ^{l1}(h x)
    for (int j = 0; j < 10; ++j) {
      Point x = random_point(rng, c.a());
      auto k1 = static_cast<std::size_t>(data->k1.evaluate(x)), l1 = static_cast<std::size_t>(data->l1.evaluate(x));
      EXPECT_EQ(run(c.forward, shift(x)).shifted(k1), run(c.forward, x).shifted(l1));
    }
  }
}

TEST(PsiH, Examples) {
  Rng rng(8);
  auto id = identity_certificate(A2());
  auto data = *extract_coe_data(id);
  EXPECT_TRUE(psi_h(id, data, LCFunction::constant(A2(), 1)).same_function(data.c1()));
  auto g = LCFunction::tabulate(A2(), 2, [&](Word const &) { return static_cast<Int>(uniform(rng, -5, 5)); });
  EXPECT_TRUE(psi_h(id, data, g).same_function(g));

  HomeoCertificate sw(swap_a2(), swap_a2());
  auto sd = *extract_coe_data(sw);
  auto ps = psi_h(sw, sd, g);
  for (int i = 0; i < 20; ++i) {
    Point x = random_point(rng, A2());
    EXPECT_EQ(ps.evaluate(x), g.evaluate(run(sw.forward, x)));
  }
}

TEST(PsiH, Additive) {
  Rng rng(9);
  CertificateFactory factory;
  for (int i = 0; i < 30; ++i) {
    auto c = factory.make(rng, false);
    auto data = *extract_coe_data(c);
    auto g1 = LCFunction::tabulate(c.b(), uniform(rng, 0, 2), [&](Word const &) { return static_cast<Int>(uniform(rng, -4, 4)); });
    auto g2 = LCFunction::tabulate(c.b(), uniform(rng, 0, 2), [&](Word const &) { return static_cast<Int>(uniform(rng, -4, 4)); });
    EXPECT_TRUE(psi_h(c, data, g1 + g2).same_function(psi_h(c, data, g1) + psi_h(c, data, g2)));
  }
}

TEST(PsiH, PointwiseDefinition) {
  Rng rng(10);
  CertificateFactory factory;
  for (int i = 0; i < 30; ++i) {
    auto c = factory.make(rng, false);
    auto data = *extract_coe_data(c);
    auto g = LCFunction::tabulate(c.b(), uniform(rng, 0, 2), [&](Word const &) { return static_cast<Int>(uniform(rng, -4, 4)); });
    auto psi = psi_h(c, data, g);
    for (int j = 0; j < 10; ++j) {
      Point x = random_point(rng, c.a());
      Int expected = cocycle_sum(g, static_cast<int>(data.l1.evaluate(x)), run(c.forward, x)) -
                     cocycle_sum(g, static_cast<int>(data.k1.evaluate(x)), run(c.forward, shift(x)));
      EXPECT_EQ(psi.evaluate(x), expected);
    }
  }
}

TEST(Certificate, PreservesEventuallyPeriodic) {
  Rng rng(11);
  EXPECT_TRUE(preserves_eventually_periodic(identity_certificate(A2()), {Point::periodic(w("12"))}));
  EXPECT_TRUE(preserves_eventually_periodic({swap_a2(), swap_a2()}, {Point::periodic(w("1"))}));
  CertificateFactory factory;
  for (int i = 0; i < 10; ++i) {
    auto c = factory.make(rng, false);
    std::vector<Point> sample;
    for (int j = 0; j < 10; ++j) sample.push_back(random_point(rng, c.a()));
    EXPECT_TRUE(preserves_eventually_periodic(c, sample));
  }
}

TEST(TransducerFormat, RoundTripAndStrictParse) {
  auto blk = two_block(A2());
  std::string text = format_transducer(blk.cert.forward, "a.txt", "b.txt");
  auto resolve = [&](std::string const &name) { return name == "a.txt" ? A2() : blk.edges; };
  auto parsed = parse_transducer(text, resolve);
  EXPECT_EQ(format_transducer(parsed, "a.txt", "b.txt"), text);
  EXPECT_TRUE(outputs_equal(parsed, blk.cert.forward, 0, 0).equal);
  // F2 forbids 22: a transition for input 2 out of a state only entered after 2 is dead
  std::string dead = "transducer A=f B=f states=2 initial=0\n0 1 -> 0 1\n0 2 -> 1 2\n1 1 -> 0 1\n1 2 -> 1 2\n";
  EXPECT_THROW(parse_transducer(dead, [](std::string const &) { return F2(); }), TransducerError);
  EXPECT_THROW(parse_transducer("transducer A=f B=f states=1\n", [](std::string const &) { return F2(); }), TransducerError);
}

TEST(TransducerFormat, LoadsShippedCertificates) {
  std::string dir = std::string(ORBITEQ_DATA_DIR) + "/certs/";
  HomeoCertificate c(load_transducer(dir + "A2_2block.fwd"), load_transducer(dir + "A2_2block.bwd"));
  EXPECT_TRUE(verify_homeomorphism(c).verified);
  HomeoCertificate broken(load_transducer(dir + "A2_identity.fwd"), load_transducer(dir + "A2_broken.bwd"));
  EXPECT_FALSE(verify_homeomorphism(broken).verified);
}
