#include "test_util.hpp"

#include "ptres/monotones.hpp"
#include "ptres/theories.hpp"

#include <gtest/gtest.h>

using namespace ptres;
using namespace ptest;

namespace {
using M = MemoryLength;
TheoryId th(CommClass c, CommClass k) { return {c, k}; }
constexpr auto N = CommClass::None;
constexpr auto E = CommClass::EB;
constexpr auto Q = CommClass::Q;
}  // namespace

TEST(Theories, MemorySignaturesMatchTable) {
  struct Row {
    TheoryId t;
    MemorySignature s;
  };
  std::vector<Row> table{
      {th(N, N), {M::Zero, M::Zero}},     {th(N, E), {M::Zero, M::Zero}},     {th(N, Q), {M::Zero, M::Zero}},
      {th(E, N), {M::One, M::Zero}},      {th(E, E), {M::Infinite, M::Zero}}, {th(E, Q), {M::Infinite, M::One}},
      {th(Q, N), {M::One, M::One}},       {th(Q, E), {M::Infinite, M::One}},  {th(Q, Q), {M::Infinite, M::Infinite}},
  };
  for (const auto& r : table) EXPECT_EQ(memory_signature(r.t), r.s) << r.t.name();
  EXPECT_STREQ(memory_length_name(M::Infinite), "inf");
}

TEST(Theories, PrimitiveIsFreeEverywhere) {
  Rng rng(51);
  std::vector<Mat> taus{rng.random_density(2), rng.random_density(2), rng.random_density(2)};
  auto p = primitive_free_process(2, 2, taus);
  EXPECT_TRUE(validate_causality(p).pass);
  for (auto t : all_theories()) EXPECT_EQ(check_membership(t, p).verdict, Verdict::Free) << t.name();
}

TEST(Theories, SamplesAreNeverNotFreeInTheirTheory) {
  for (auto t : all_theories()) {
    for (int k = 0; k < 5; ++k) {
      auto s = sample_free_process(t, 2, 2, 1 + k % 2, 1000 + k);
      ASSERT_TRUE(validate_causality(s, 1e-9).pass);
      auto v = check_membership(t, s, 1e-7);
      EXPECT_NE(v.verdict, Verdict::NotFree) << t.name() << ": " << v.certificate;
    }
  }
}

TEST(Theories, GoldenRuleSecondFreeSuperprocess) {
  Rng rng(52);
  for (auto t : all_theories()) {
    auto s = sample_free_process(t, 2, 2, 1, 2000);
    auto z = random_free_superprocess(t, 2, 2, 1, rng);
    auto v = check_membership(t, left_action(s, z), 1e-7);
    EXPECT_NE(v.verdict, Verdict::NotFree) << t.name() << ": " << v.certificate;
  }
}

TEST(Theories, SamplingIsDeterministic) {
  auto a = sample_free_process(th(Q, N), 2, 2, 2, 7);
  auto b = sample_free_process(th(Q, N), 2, 2, 2, 7);
  EXPECT_EQ(max_abs_diff(a.choi(), b.choi()), 0.0);
}

TEST(Theories, SwapEnvironmentProcessIsResourceful) {
  auto t = swap_process();
  EXPECT_EQ(check_membership(th(Q, N), t).verdict, Verdict::NotFree);
  EXPECT_EQ(check_membership(th(N, N), t).verdict, Verdict::NotFree);
  EXPECT_EQ(check_membership(th(E, N), t).verdict, Verdict::NotFree);
  EXPECT_EQ(check_membership(th(Q, Q), t).verdict, Verdict::Free);
  EXPECT_NEAR(non_markovianity(t).value, 2.0, 1e-9);
}

TEST(Theories, MarkovIsFreeOnlyWithQuantumMemory) {
  // identity channels carry quantum memory of one step
  Mat rho = Mat::Identity(2, 2) / 2.0;
  auto t = markov_process({identity_channel({2}), identity_channel({2})}, qubit_state(rho));
  EXPECT_EQ(check_membership(th(Q, N), t).verdict, Verdict::Free);
  EXPECT_EQ(check_membership(th(E, N), t).verdict, Verdict::NotFree);
  EXPECT_EQ(check_membership(th(N, Q), t).verdict, Verdict::NotFree);
  // dephasing steps are EB Markov
  auto d = markov_process({dephasing_channel(2), dephasing_channel(2)}, qubit_state(rho));
  EXPECT_EQ(check_membership(th(E, N), d).verdict, Verdict::Free);
  EXPECT_EQ(check_membership(th(E, E), d).verdict, Verdict::Free);
}

TEST(Theories, EbComplementIsCertifiedByPartialTranspose) {
  // a process that is not EB-free in any (eb, .) theory: identity memory
  Mat rho = Mat::Identity(2, 2) / 2.0;
  auto t = markov_process({identity_channel({2}), identity_channel({2})}, qubit_state(rho));
  EXPECT_EQ(check_membership(th(E, E), t).verdict, Verdict::NotFree);
  EXPECT_EQ(check_membership(th(E, Q), t).verdict, Verdict::NotFree);
  // but it has no entanglement across past and future blocks
  EXPECT_NE(check_membership(th(Q, E), t).verdict, Verdict::NotFree);
}

TEST(Theories, InvalidInputRaisesDomainError) {
  auto t = swap_process();
  Mat m = t.choi().matrix();
  m(0, 0) += 0.1;
  ProcessTensor bad(t.choi().with_matrix(m), 2);
  EXPECT_THROW(check_membership(th(Q, N), bad), DomainError);
}

TEST(Theories, BlockChannelRecoversMarkovSteps) {
  Rng rng(53);
  auto a = random_channel({2}, {2}, 2, rng), b = random_channel({2}, {2}, 2, rng);
  auto t = markov_process({a, b}, qubit_state(rng.random_density(2)));
  EXPECT_LT(max_abs(block_channel(t, 0).choi().matrix() - a.choi().matrix()), 1e-10);
  EXPECT_LT(max_abs(block_channel(t, 1).choi().matrix() - b.choi().matrix()), 1e-10);
}
