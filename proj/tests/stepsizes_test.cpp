#include "shb/stepsizes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace shb {
namespace {

TEST(SpsMax, QuotientArm) {
  StepSizeState s = make_state(Rule::sps_max, 0.0, 1.0, 10.0);
  StepDecision d = advance(s, 2.0, 4.0);
  EXPECT_DOUBLE_EQ(d.gamma, 0.5);
  EXPECT_FALSE(d.capped);
}

TEST(SpsMax, CapArm) {
  StepSizeState s = make_state(Rule::sps_max, 0.0, 1.0, 0.1);
  StepDecision d = advance(s, 2.0, 4.0);
  EXPECT_DOUBLE_EQ(d.gamma, 0.1);
  EXPECT_TRUE(d.capped);
}

TEST(SpsMax, StationaryBatchIsNoOp) {
  StepSizeState s = make_state(Rule::sps_max, 0.0, 1.0, 10.0);
  StepDecision d = advance(s, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(d.gamma, 0.0);
}

TEST(MomSpsMax, CorrectingFactor) {
  StepSizeState s = make_state(Rule::mom_sps_max, 0.5, 1.0, 10.0);
  EXPECT_DOUBLE_EQ(advance(s, 2.0, 4.0).gamma, 0.25);
}

TEST(MomSpsMax, CappedWithFactor) {
  StepSizeState s = make_state(Rule::mom_sps_max, 0.5, 1.0, 0.1);
  StepDecision d = advance(s, 2.0, 4.0);
  EXPECT_DOUBLE_EQ(d.gamma, 0.05);
  EXPECT_TRUE(d.capped);
}

TEST(DecSps, FirstStep) {
  StepSizeState s = make_state(Rule::decsps, 0.0, 1.0, 10.0);
  EXPECT_DOUBLE_EQ(advance(s, 2.0, 4.0).gamma, 0.5);
}

TEST(DecSps, SecondStepUsesSchedule) {
  StepSizeState s = make_state(Rule::decsps, 0.0, 1.0, 10.0);
  s = advance(s, 2.0, 4.0).next;  // gamma_0 = 0.5
  StepDecision d = advance(s, 1.0, 1.0);
  EXPECT_NEAR(d.gamma, 0.5 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(d.capped);  // chain arm 0.5/sqrt(2) < quotient 1/sqrt(2)
}

TEST(DecSps, CapChainEnvelope) {
  // Huge quotients force the chain arm, giving the gamma_b c0/c_t envelope.
  StepSizeState s = make_state(Rule::decsps, 0.0, 1.0, 10.0);
  for (long t = 0; t < 50; ++t) {
    StepDecision d = advance(s, 1e9, 1.0);
    EXPECT_LE(d.gamma, 10.0 / std::sqrt(static_cast<double>(t) + 1.0) *
                           (1.0 + 1e-12));
    s = d.next;
  }
}

TEST(MomDecSps, FirstStepMatchesMomSpsMax) {
  StepSizeState dec = make_state(Rule::mom_decsps, 0.5, 1.0, 10.0);
  StepSizeState sps = make_state(Rule::mom_sps_max, 0.5, 1.0, 10.0);
  EXPECT_DOUBLE_EQ(advance(dec, 2.0, 4.0).gamma, 0.25);
  EXPECT_DOUBLE_EQ(advance(dec, 2.0, 4.0).gamma,
                   advance(sps, 2.0, 4.0).gamma);
}

TEST(MomDecSps, SecondStep) {
  StepSizeState s = make_state(Rule::mom_decsps, 0.5, 1.0, 10.0);
  s = advance(s, 2.0, 4.0).next;  // gamma_0 = 0.25
  EXPECT_NEAR(advance(s, 1.0, 1.0).gamma, 0.25 / std::sqrt(2.0), 1e-15);
}

TEST(AdaSps, FirstStep) {
  StepSizeState s = make_state(Rule::adasps, 0.0, 1.0, 10.0);
  EXPECT_NEAR(advance(s, 2.0, 4.0).gamma, 2.0 / (4.0 * std::sqrt(2.0)), 1e-16);
}

TEST(AdaSps, PreviousStepCaps) {
  StepSizeState s = make_state(Rule::adasps, 0.0, 1.0, 10.0);
  StepDecision d0 = advance(s, 2.0, 4.0);
  StepDecision d1 = advance(d0.next, 1.0, 1.0);
  EXPECT_EQ(d0.next.gap_sum, 2.0);
  EXPECT_EQ(d1.next.gap_sum, 3.0);
  EXPECT_DOUBLE_EQ(d1.gamma, d0.gamma);  // min{1/sqrt(3), gamma_0} = gamma_0
  EXPECT_TRUE(d1.capped);
}

TEST(AdaSps, AutoCNormalizesFirstStep) {
  StepSizeState s = make_state(Rule::adasps, 0.0, 1.0, 10.0, std::nullopt, true);
  StepDecision d = advance(s, 2.0, 4.0);
  // c = 1/sqrt(gap_0) cancels the sqrt(gap_sum) factor: gamma_0 = gap/g2.
  EXPECT_NEAR(d.gamma, 0.5, 1e-15);
  EXPECT_NEAR(d.next.c, 1.0 / std::sqrt(2.0), 1e-16);
  EXPECT_FALSE(d.next.auto_c);
}

TEST(MomAdaSps, FirstStep) {
  StepSizeState s = make_state(Rule::mom_adasps, 0.5, 1.0, 10.0);
  EXPECT_NEAR(advance(s, 2.0, 4.0).gamma, 1.0 / (4.0 * std::sqrt(2.0)), 1e-16);
}

TEST(MomAdaSps, SecondStep) {
  StepSizeState s = make_state(Rule::mom_adasps, 0.5, 1.0, 10.0);
  StepDecision d0 = advance(s, 2.0, 4.0);
  StepDecision d1 = advance(d0.next, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(d1.gamma, d0.gamma);  // min{0.288..., 0.176...}
}

TEST(AltVariants, FirstStepEqualsMomDecSps) {
  StepSizeState alt = make_state(Rule::alt_mom_decsps, 0.5, 1.0, 10.0);
  EXPECT_DOUBLE_EQ(advance(alt, 2.0, 4.0).gamma, 0.25);
}

TEST(AltVariants, GeometricCollapse) {
  StepSizeState s = make_state(Rule::alt_mom_adasps, 0.9, 1.0, 10.0);
  StepDecision d = advance(s, 1.0, 1.0);
  const double gamma0 = d.gamma;
  for (int t = 1; t <= 50; ++t) d = advance(d.next, 1.0, 1.0);
  EXPECT_LE(d.gamma, std::pow(0.1, 50) * gamma0 * (1.0 + 1e-12));
  EXPECT_LT(d.gamma, 1e-40);
}

// beta = 0 must reproduce the ancestor rule value-for-value on arbitrary
// streams, exact equality.
TEST(Reduction, BetaZeroIsExact) {
  const std::vector<std::pair<Rule, Rule>> pairs{
      {Rule::mom_sps_max, Rule::sps_max},
      {Rule::mom_decsps, Rule::decsps},
      {Rule::mom_adasps, Rule::adasps},
      {Rule::alt_mom_decsps, Rule::decsps},
      {Rule::alt_mom_adasps, Rule::adasps},
  };
  std::mt19937_64 rng(42);
  std::exponential_distribution<double> expo(1.0);
  for (const auto& [mom, base] : pairs) {
    StepSizeState a = make_state(mom, 0.0, 1.0, 5.0);
    StepSizeState b = make_state(base, 0.0, 1.0, 5.0);
    for (int t = 0; t < 500; ++t) {
      const double gap = expo(rng);
      const double g2 = expo(rng) + 1e-3;
      StepDecision da = advance(a, gap, g2);
      StepDecision db = advance(b, gap, g2);
      ASSERT_EQ(da.gamma, db.gamma) << rule_name(mom) << " t=" << t;
      a = da.next;
      b = db.next;
    }
  }
}

TEST(Monotone, DecreasingRulesNeverIncrease) {
  std::mt19937_64 rng(7);
  std::exponential_distribution<double> expo(1.0);
  for (Rule rule : {Rule::mom_decsps, Rule::mom_adasps, Rule::alt_mom_decsps,
                    Rule::alt_mom_adasps, Rule::decsps, Rule::adasps}) {
    for (double beta : {0.0, 0.5, 0.9}) {
      if (!uses_momentum_factor(rule) && beta > 0.0) continue;
      StepSizeState s = make_state(rule, beta, 1.0, 10.0);
      double prev = std::numeric_limits<double>::infinity();
      for (int t = 0; t < 1000; ++t) {
        StepDecision d = advance(s, expo(rng), expo(rng) + 1e-3);
        ASSERT_LE(d.gamma, prev * (1.0 + 1e-15));
        prev = d.gamma;
        s = d.next;
      }
    }
  }
}

TEST(Monotone, MomDecSpsEnvelope) {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> expo(1.0);
  const double gamma_b = 3.0;
  StepSizeState s = make_state(Rule::mom_decsps, 0.5, 1.0, gamma_b);
  for (int t = 0; t < 1000; ++t) {
    StepDecision d = advance(s, expo(rng), expo(rng) + 1e-3);
    ASSERT_LE(d.gamma, gamma_b / std::sqrt(static_cast<double>(t) + 1.0) *
                           (1.0 + 1e-12));
    s = d.next;
  }
}

// gamma_t^2 g2 <= gamma_t gap (1-beta) for the capped momentum rule, c = 1.
TEST(Lemma, MomSpsMaxInequality) {
  std::mt19937_64 rng(13);
  std::exponential_distribution<double> expo(1.0);
  for (double beta : {0.0, 0.3, 0.9}) {
    StepSizeState s = make_state(Rule::mom_sps_max, beta, 1.0, 10.0);
    for (int t = 0; t < 1000; ++t) {
      const double gap = expo(rng);
      const double g2 = expo(rng) + 1e-3;
      StepDecision d = advance(s, gap, g2);
      ASSERT_LE(d.gamma * d.gamma * g2,
                d.gamma * gap * (1.0 - beta) * (1.0 + 1e-12));
      s = d.next;
    }
  }
}

// For any non-negative sequence, sqrt(sum) <= sum a_t/sqrt(prefix) <=
// 2 sqrt(sum).
TEST(Lemma, SummationIdentity) {
  std::mt19937_64 rng(17);
  std::exponential_distribution<double> expo(1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(200);
    for (double& v : a) v = expo(rng);
    double total = 0.0;
    double weighted = 0.0;
    for (double v : a) {
      total += v;
      weighted += v / std::sqrt(total);
    }
    EXPECT_LE(std::sqrt(total), weighted * (1.0 + 1e-12));
    EXPECT_LE(weighted, 2.0 * std::sqrt(total) * (1.0 + 1e-12));
  }
}

TEST(ZeroGradient, GuardFreezesState) {
  StepSizeState s = make_state(Rule::mom_adasps, 0.5, 1.0, 10.0);
  StepDecision d0 = advance(s, 2.0, 4.0);
  StepDecision d1 = advance(d0.next, 3.0, 0.0);  // stationary batch
  EXPECT_DOUBLE_EQ(d1.gamma, 0.0);
  EXPECT_EQ(d1.next.gamma_prev, d0.next.gamma_prev);
  EXPECT_DOUBLE_EQ(d1.next.gap_sum, 5.0);  // gap still accumulates
  EXPECT_EQ(d1.next.t, 2);
}

TEST(ZeroGradient, NegativeGapClamps) {
  StepSizeState s = make_state(Rule::sps_max, 0.0, 1.0, 10.0);
  StepDecision d = advance(s, -1e-18, 4.0);
  EXPECT_DOUBLE_EQ(d.gamma, 0.0);
}

TEST(ConstantLiu, KnownValues) {
  EXPECT_DOUBLE_EQ(constant_liu(0.0, 2.0), 1.0 / 8.0);  // 1/(4L)
  EXPECT_NEAR(constant_liu(0.5, 1.0), 0.25 / 3.75, 1e-15);
  // (1-b)/(2L) exceeds the admissible constant once b > sqrt(5)-2.
  EXPECT_GT((1.0 - 0.5) / 2.0, constant_liu(0.5, 1.0));
}

TEST(PolyakDeterministic, UncappedQuotient) {
  StepSizeState s = make_state(Rule::polyak_deterministic, 0.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(advance(s, 2.0, 4.0).gamma, 0.5);
  EXPECT_DOUBLE_EQ(advance(s, 1.0, 0.0).gamma, 0.0);  // converged
}

TEST(MomPsMax, RecoversPolyakAtBetaZeroUncapped) {
  StepSizeState s = make_state(Rule::mom_ps_max, 0.0, 1.0,
                               std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(advance(s, 2.0, 4.0).gamma, 0.5);
}

TEST(MomPsMax, CappedWithFactor) {
  StepSizeState s = make_state(Rule::mom_ps_max, 0.5, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(advance(s, 2.0, 4.0).gamma, 0.05);
}

TEST(Smoothing, CapRecursion) {
  StepSizeState s = make_state(Rule::mom_sps_max, 0.5, 1.0, 0.5,
                               Smoothing{2.0, 1.0});
  EXPECT_DOUBLE_EQ(smoothed_gamma_b(s), 1.0);  // tau^1 * 0.5
  s.smoothing->batch_ratio = 0.1;
  EXPECT_NEAR(smoothed_gamma_b(s), std::pow(2.0, 0.1) * 0.5, 1e-15);
  s.smoothing->tau = 1.0;
  EXPECT_DOUBLE_EQ(smoothed_gamma_b(s), 0.5);
}

TEST(Smoothing, CapBindsOnEmittedStep) {
  // With the cap live, the recursion must not compound the (1-beta) factor:
  // a binding cap advances gamma by tau^{B/n}, not (1-beta) tau^{B/n}.
  StepSizeState s = make_state(Rule::mom_sps_max, 0.9, 1.0, 0.01,
                               Smoothing{2.0, 0.5});
  double prev = 0.01;
  for (int t = 0; t < 20; ++t) {
    StepDecision d = advance(s, 1e9, 1.0);  // quotient arm never binds
    EXPECT_NEAR(d.gamma, std::pow(2.0, 0.5) * prev, 1e-12 * prev);
    prev = d.gamma;
    s = d.next;
  }
}

TEST(ImaEquivalent, Mapping) {
  ImaEquivalent e = ima_equivalent_eta(0.25, 0.5);
  EXPECT_DOUBLE_EQ(e.eta, 0.5);
  EXPECT_DOUBLE_EQ(e.lambda, 1.0);
  EXPECT_DOUBLE_EQ(ima_equivalent_eta(0.3, 0.0).lambda, 0.0);
  EXPECT_DOUBLE_EQ(ima_equivalent_eta(0.3, 0.0).eta, 0.3);
  EXPECT_NEAR(ima_equivalent_eta(1.0, 0.9).lambda, 9.0, 1e-12);
}

TEST(RuleNames, RoundTrip) {
  for (Rule r : {Rule::constant, Rule::constant_liu, Rule::sps_max,
                 Rule::decsps, Rule::adasps, Rule::mom_sps_max,
                 Rule::mom_decsps, Rule::mom_adasps, Rule::alt_mom_decsps,
                 Rule::alt_mom_adasps, Rule::polyak_deterministic,
                 Rule::mom_ps_max}) {
    ASSERT_EQ(rule_from_name(rule_name(r)), r);
  }
  EXPECT_FALSE(rule_from_name("nope").has_value());
}

TEST(MakeState, Validation) {
  EXPECT_THROW(make_state(Rule::sps_max, 1.0, 1.0, 1.0), config_error);
  EXPECT_THROW(make_state(Rule::sps_max, -0.1, 1.0, 1.0), config_error);
  EXPECT_THROW(make_state(Rule::sps_max, 0.0, 0.0, 1.0), config_error);
  EXPECT_THROW(make_state(Rule::sps_max, 0.0, 1.0, 0.0), config_error);
  EXPECT_THROW(make_state(Rule::decsps, 0.0, 1.0, 1.0, Smoothing{}), config_error);
  EXPECT_THROW(make_state(Rule::sps_max, 0.0, 1.0, 1.0, std::nullopt, true),
               config_error);
}

}  // namespace
}  // namespace shb
