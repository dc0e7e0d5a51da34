#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace orbiteq;
using namespace orbiteq::testing;

namespace {

Word w(std::string const &s) { return parse_word(s, 9); }

TableauElement shrink() { return TableauElement(A2(), {{w("1"), w("12")}, {w("21"), w("2")}, {w("22"), w("11")}}); }
TableauElement swap_first() { return TableauElement(A2(), {{w("1"), w("2")}, {w("2"), w("1")}}); }

constexpr Status E = Status::Established, R = Status::Refuted, U = Status::Unknown;

struct PairExpectation {
  std::string a, b;
  std::array<Status, 5> statuses; // COE, SCOE, UCOE, UOE, two-sided
};

std::vector<PairExpectation> expected_pairs() {
  std::vector<PairExpectation> out;
  auto names = example_matrices();
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j) out.push_back({names[i].first, names[j].first, {R, R, R, U, R}});
  auto set = [&](std::string const &a, std::string const &b, std::array<Status, 5> s) {
    for (auto &p : out)
      if (p.a == a && p.b == b) p.statuses = s;
  };
  set("A2", "F2", {E, R, R, U, R});
  set("A2", "B2", {E, U, R, R, E});
  set("A2", "A4", {R, R, R, E, R});
  set("F2", "B2", {E, R, R, U, R});
  set("B2", "A4", {R, R, R, R, R});
  set("B3", "C3", {R, R, R, U, E});
  return out;
}

TransitionMatrix by_name(std::string const &n) {
  for (auto const &[name, m] : example_matrices())
    if (name == n) return m;
  throw std::invalid_argument(n);
}

void expect_diagram_consistent(RelationReport const &rep) {
  auto st = [&](Relation r) { return rep[r].status; };
  std::pair<Relation, Relation> arrows[] = {{Relation::UCOE, Relation::UOE},
                                            {Relation::UCOE, Relation::SCOE},
                                            {Relation::SCOE, Relation::COE},
                                            {Relation::SCOE, Relation::TwoSided}};
  for (auto [from, to] : arrows) {
    if (st(from) == E) { EXPECT_EQ(st(to), E) << to_string(from) << " => " << to_string(to); }
    if (st(to) == R) { EXPECT_EQ(st(from), R) << to_string(from) << " => " << to_string(to); }
  }
  for (Relation r : all_relations)
    if (st(r) != U) { EXPECT_FALSE(rep[r].evidence.empty()) << to_string(r); }
}

} // namespace

TEST(Classify, ExamplePairs) {
  for (auto const &p : expected_pairs()) {
    auto rep = classify(by_name(p.a), by_name(p.b), {}, {}, p.a, p.b);
    for (std::size_t k = 0; k < 5; ++k)
      EXPECT_EQ(rep.relations[k].status, p.statuses[k]) << p.a << "~" << p.b << " " << to_string(all_relations[k]);
    expect_diagram_consistent(rep);
  }
}

TEST(Classify, SymmetricInArguments) {
  for (auto const &p : expected_pairs()) {
    auto ab = classify(by_name(p.a), by_name(p.b)), ba = classify(by_name(p.b), by_name(p.a));
    for (Relation r : all_relations) {
      // the SSE search only runs in one direction of inner dimension
      if (r == Relation::TwoSided && (ab[r].status == U || ba[r].status == U)) continue;
      EXPECT_EQ(ab[r].status, ba[r].status) << p.a << "~" << p.b << " " << to_string(r);
    }
  }
}

TEST(Classify, SelfPairsWithIdentityCertificate) {
  for (auto const &[name, m] : example_matrices()) {
    auto rep = classify(m, m, {{"id", identity_certificate(m)}});
    for (Relation r : all_relations) EXPECT_EQ(rep[r].status, E) << name << " " << to_string(r);
    expect_diagram_consistent(rep);
  }
}

TEST(Classify, TwoBlockCertificate) {
  auto blk = two_block(A2());
  auto rep = classify(A2(), blk.edges, {{"2block", blk.cert}});
  EXPECT_EQ(rep[Relation::UCOE].status, E);
  EXPECT_EQ(rep[Relation::SCOE].status, E);
  EXPECT_EQ(rep[Relation::TwoSided].status, E);
  expect_diagram_consistent(rep);
  // orientation is normalised
  auto rev = classify(blk.edges, A2(), {{"2block", blk.cert}});
  EXPECT_EQ(rev[Relation::UCOE].status, E);
}

TEST(Classify, RejectedCertificateOnlyAddsNote) {
  HomeoCertificate broken(identity_transducer(A2()), relabel_transducer(A2(), A2(), {2, 1}));
  auto rep = classify(A2(), A2(), {{"broken", broken}});
  bool noted = false;
  for (auto const &n : rep.notes) noted = noted || n.find("broken rejected") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(Classify, NonEventualCertificate) {
  auto rep = classify(A2(), A2(), {{"shrink", tableau_certificate(shrink())}});
  EXPECT_EQ(rep[Relation::COE].status, E);
  expect_diagram_consistent(rep);
}

TEST(Classify, CertificateForOtherMatricesIsInvalid) {
  EXPECT_THROW(classify(A2(), B2(), {{"id", identity_certificate(A2())}}), std::invalid_argument);
}

TEST(Report, RecordConflictThrows) {
  RelationReport rep;
  rep.record(Relation::COE, E, {"x", {}});
  EXPECT_NO_THROW(rep.record(Relation::COE, E, {"y", {}}));
  EXPECT_THROW(rep.record(Relation::COE, R, {"z", {}}), ContradictoryEvidence);
}

TEST(Report, PropagationConflictThrows) {
  RelationReport rep;
  rep.record(Relation::UCOE, E, {"x", {}});
  rep.record(Relation::COE, R, {"y", {}});
  EXPECT_THROW(detail::propagate(rep), ContradictoryEvidence);
}

TEST(Report, PropagationClosesDiagram) {
  RelationReport up;
  up.record(Relation::UCOE, E, {"x", {}});
  detail::propagate(up);
  for (Relation r : all_relations) EXPECT_EQ(up[r].status, E);
  RelationReport down;
  down.record(Relation::COE, R, {"x", {}});
  detail::propagate(down);
  EXPECT_EQ(down[Relation::SCOE].status, R);
  EXPECT_EQ(down[Relation::UCOE].status, R);
  EXPECT_EQ(down[Relation::UOE].status, U);
  EXPECT_EQ(down[Relation::TwoSided].status, U);
}

TEST(Report, NamesRoundTrip) {
  for (Relation r : all_relations) EXPECT_EQ(relation_from_string(to_string(r)), std::optional<Relation>(r));
  for (Status s : {E, R, U}) EXPECT_EQ(status_from_string(to_string(s)), std::optional<Status>(s));
  EXPECT_FALSE(relation_from_string("nope").has_value());
}

TEST(EventualConjugacy, Examples) {
  auto id = verify_eventual_conjugacy(identity_certificate(A2()));
  ASSERT_TRUE(id.verified);
  EXPECT_EQ(id.k1, 0);
  EXPECT_EQ(id.k2, 0);
  auto sw = verify_eventual_conjugacy(tableau_certificate(swap_first()));
  ASSERT_TRUE(sw.verified);
  EXPECT_EQ(sw.k1, 1);
  EXPECT_EQ(sw.k2, 1);
  auto blk = verify_eventual_conjugacy(two_block(A2()).cert);
  ASSERT_TRUE(blk.verified);
  EXPECT_EQ(blk.k1, 0);
  auto no = verify_eventual_conjugacy(tableau_certificate(shrink()), 8);
  EXPECT_FALSE(no.verified);
  EXPECT_EQ(no.failing_side, "A");
}

TEST(EventualConjugacy, ConstantIsMinimalAndPointwiseValid) {
  Rng rng(1);
  CertificateFactory factory;
  for (int i = 0; i < 30; ++i) {
    auto c = factory.make(rng, true);
    auto r = verify_eventual_conjugacy(c);
    ASSERT_TRUE(r.verified);
    auto k1 = static_cast<std::size_t>(r.k1);
    for (int j = 0; j < 10; ++j) {
      Point x = random_point(rng, c.a());
      EXPECT_EQ(run(c.forward, shift(x)).shifted(k1), run(c.forward, x).shifted(k1 + 1));
    }
    if (r.k1 > 0) { EXPECT_FALSE(outputs_equal(shift_precompose(c.forward), c.forward, r.k1 - 1, r.k1).equal); }
  }
}

TEST(Ucoe, Examples) {
  auto id = verify_ucoe(identity_certificate(A2()), 2);
  EXPECT_TRUE(id.verified);
  EXPECT_EQ(id.tested, 2 * static_cast<int>(af_transpositions(A2(), 1).size() + af_transpositions(A2(), 2).size()));
  EXPECT_TRUE(verify_ucoe(two_block(A2()).cert, 2).verified);
}

TEST(Ucoe, CorruptedBackwardFails) {
  HomeoCertificate bad(identity_transducer(A2()), tableau_transducer(shrink()));
  auto r = verify_ucoe(bad, 1, 6);
  EXPECT_FALSE(r.verified);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness_side, "A");
  EXPECT_TRUE(is_af(*r.witness).af);
}

TEST(OrbitTimeIdentity, IdentityHoldsOnExamples) {
  std::vector<Point> samples;
  for (auto const &cyc : periodic_orbits(A2(), 4)) samples.push_back(Point::periodic(cyc));
  samples.push_back(Point(w("12"), w("1")));
  for (auto const &c : {identity_certificate(A2()), tableau_certificate(swap_first()), tableau_certificate(shrink())}) {
    auto data = extract_coe_data(c);
    ASSERT_TRUE(data.has_value());
    for (auto const &y : samples) {
      auto [lhs, rhs] = lemma_identity_sides(c, *data, y);
      EXPECT_EQ(lhs, rhs) << y.to_string(2);
    }
    EXPECT_TRUE(check_lemma_useful(c, *data, samples));
  }
}

TEST(OrbitTimeIdentity, ConstantCocycleMustBeOne) {
  auto c = identity_certificate(A2());
  auto data = *extract_coe_data(c);
  data.l1 = LCFunction::constant(A2(), 2);
  EXPECT_FALSE(check_lemma_useful(c, data, {}));
}

TEST(Scoe, Examples) {
  auto c = identity_certificate(A2());
  auto data = *extract_coe_data(c);
  EXPECT_EQ(scoe_check(c, data).verdict, Verdict::Yes);
  auto sw = tableau_certificate(swap_first());
  EXPECT_EQ(scoe_check(sw, *extract_coe_data(sw)).verdict, Verdict::Yes);
}

TEST(Scoe, SyntheticCocycleTwoIsRefuted) {
  auto c = identity_certificate(A2());
  CoeData data{LCFunction::constant(A2(), 0), LCFunction::constant(A2(), 2), LCFunction::constant(A2(), 0),
               LCFunction::constant(A2(), 1)};
  auto r = scoe_check(c, data);
  EXPECT_EQ(r.verdict, Verdict::No);
  ASSERT_TRUE(r.side_a.orbit.has_value());
  EXPECT_NE(r.side_a.orbit_sum_f, r.side_a.orbit_sum_g);
}

TEST(Positivity, Examples) {
  EXPECT_FALSE(positivity_violation(LCFunction::constant(A2(), 1), 6).has_value());
  EXPECT_EQ(positivity_violation(LCFunction::constant(A2(), 0), 6), std::optional<Word>(w("1")));
  auto f = LCFunction::indicator(A2(), w("1")) + LCFunction::indicator(A2(), w("1")) - LCFunction::constant(A2(), 1);
  EXPECT_EQ(positivity_violation(f, 6), std::optional<Word>(w("2")));
}
