#include <gtest/gtest.h>

#include <random>

#include "../oracles.hpp"
#include "atlas/scenario.hpp"
#include "support.hpp"

using namespace atlas;

namespace {

ScenarioPtr square() { return build_scenario({"a", "b", "c", "d"}, {2, 2, 2, 2}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }

}  // namespace

TEST(Scenario, ContextsAreMaximalCliques) {
  auto s = build_scenario({"x", "y", "z", "w"}, {2, 3, 2, 2}, {{0, 1}, {1, 2}, {0, 2}});
  ASSERT_EQ(s->contexts().size(), 2u);
  EXPECT_EQ(s->contexts()[0].members, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(s->contexts()[1].members, (std::vector<int>{3}));
  EXPECT_EQ(s->table_size(0), 12u);
  EXPECT_EQ(s->coordinate_count(), 14u);
  EXPECT_EQ(s->index_of("z"), 2);
  EXPECT_TRUE(s->contains("w"));
  EXPECT_FALSE(s->contains("q"));
  EXPECT_ERRC(s->index_of("q"), UnknownMeasurement);
}

TEST(Scenario, FlatIndexRoundTrip) {
  auto s = build_scenario({"x", "y", "z"}, {2, 3, 4}, {{0, 1}, {1, 2}, {0, 2}});
  for (std::size_t idx = 0; idx < s->table_size(0); ++idx) EXPECT_EQ(s->flat_index(0, s->decode_index(0, idx)), idx);
}

TEST(Scenario, ConstructionErrors) {
  EXPECT_ERRC(make_scenario({dichotomic("a"), dichotomic("a")}, {}), DuplicateMeasurement);
  EXPECT_ERRC(make_scenario({{"a", {"x"}}}, {}), TooFewOutcomes);
  EXPECT_ERRC(make_scenario({dichotomic("a"), dichotomic("b")}, {{0, 2}}), InvalidEdge);
}

TEST(Behavior, ValidationAcceptsUniformAndDeterministic) {
  auto s = square();
  EXPECT_TRUE(validate_behavior(*s, uniform_behavior<Rational>(s)).valid());
  EXPECT_TRUE(validate_behavior(*s, deterministic_behavior<Rational>(s, {0, 1, 1, 0})).valid());
  EXPECT_TRUE(validate_behavior(*s, uniform_behavior<double>(s), 1e-12).valid());
}

TEST(Behavior, ValidationFlagsDisturbanceAndNormalization) {
  auto s = square();
  auto tables = uniform_behavior<Rational>(s).tables();
  // context {a,b}: shift weight so that P(a=+1) = 3/4, leaving {a,d} at 1/2.
  tables[0] = {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 8)};
  auto report = validate_behavior(*s, ExactBehavior(s, tables));
  EXPECT_TRUE(report.normalization.empty());
  EXPECT_FALSE(report.disturbance.empty());

  tables = uniform_behavior<Rational>(s).tables();
  tables[1][0] = Rational(1, 2);
  report = validate_behavior(*s, ExactBehavior(s, tables));
  ASSERT_EQ(report.normalization.size(), 1u);
  EXPECT_EQ(report.normalization[0].context, 1u);

  tables[1][0] = Rational(-1, 4);
  EXPECT_ERRC(validate_behavior(*s, ExactBehavior(s, tables)), NegativeProbability);
}

TEST(Behavior, FloatToleranceIsRespected) {
  auto s = square();
  auto tables = uniform_behavior<double>(s).tables();
  tables[0][0] += 1e-10;
  tables[0][1] -= 1e-10;
  FloatBehavior b(s, tables);
  EXPECT_TRUE(validate_behavior(*s, b, 1e-9).valid());
  EXPECT_FALSE(validate_behavior(*s, b, 1e-12).valid());
}

TEST(Behavior, TableShapeIsChecked) {
  auto s = square();
  EXPECT_ERRC(ExactBehavior(s, {}), MissingContextTable);
  auto tables = uniform_behavior<Rational>(s).tables();
  tables[2].pop_back();
  EXPECT_ERRC(ExactBehavior(s, tables), MissingContextTable);
}

TEST(Behavior, RandomMixturesAreNonDisturbing) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = square();
    EXPECT_TRUE(validate_behavior(*s, oracle::random_nondisturbing(s, rng)).valid());
  }
}

TEST(Inequality, TermsAreCanonical) {
  auto s = square();
  std::vector<Term> a{{{1, 0}, {1, 0}, 2}, {{0, 1}, {0, 0}, 1}, {{0, 1}, {0, 0}, -1}};
  std::vector<Term> b{{{0, 1}, {0, 1}, 2}};
  EXPECT_EQ(Inequality(s, a, 1, BoundKind::NCHV), Inequality(s, b, 1, BoundKind::NCHV));
  EXPECT_NE(Inequality(s, a, 1, BoundKind::NCHV), Inequality(s, b, 1, BoundKind::LR));
}

TEST(Inequality, TermValidation) {
  auto s = square();
  EXPECT_ERRC(Inequality(s, {{{0, 2}, {0, 0}, 1}}, 0, BoundKind::NCHV), ScenarioMismatch);
  EXPECT_ERRC(Inequality(s, {{{0, 7}, {0, 0}, 1}}, 0, BoundKind::NCHV), UnknownMeasurement);
  EXPECT_ERRC(Inequality(s, {{{0}, {2}, 1}}, 0, BoundKind::NCHV), ParseError);
}

TEST(Inequality, CorrelatorExpansionEvaluatesToProduct) {
  auto s = square();
  std::vector<Term> terms;
  add_correlator(terms, *s, {0, 1}, 1);
  Inequality ineq(s, terms, 1, BoundKind::NCHV);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      std::vector<int> a{x, y, 0, 0};
      EXPECT_EQ(evaluate_assignment(ineq, a), outcome_sign(x) * outcome_sign(y));
      EXPECT_EQ(evaluate(ineq, deterministic_behavior<Rational>(s, a)), outcome_sign(x) * outcome_sign(y));
    }
  EXPECT_EQ(evaluate(ineq, uniform_behavior<Rational>(s)), 0);
}

TEST(Inequality, MarginalsOnSubcontexts) {
  auto s = build_scenario({"x", "y", "z"}, {2, 2, 2}, {{0, 1}, {1, 2}, {0, 2}});
  auto b = deterministic_behavior<Rational>(s, {1, 0, 1});
  EXPECT_EQ(b.marginal({2, 0}, {1, 1}), 1);
  EXPECT_EQ(b.marginal({1}, {1}), 0);
}
