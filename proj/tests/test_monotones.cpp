#include "test_util.hpp"

#include "ptres/monotones.hpp"

#include <gtest/gtest.h>

using namespace ptres;
using namespace ptest;

namespace {

// Normalized Choi state of the two-step SWAP process written out entry by
// entry over (o0, i0, o1, i1, o2): |0><0| (x) Phi/2 on (i0, o2) (x) |0><0| on o1 (x) 1/2.
Mat explicit_swap_state() {
  std::vector<int> dims(5, 2);
  Mat m = Mat::Zero(32, 32);
  for (long r = 0; r < 32; ++r)
    for (long c = 0; c < 32; ++c) {
      auto a = digits(r, dims), b = digits(c, dims);
      if (a[0] || b[0] || a[2] || b[2] || a[3] != b[3]) continue;
      if (a[1] == a[4] && b[1] == b[4]) m(r, c) = 0.25;
    }
  return m;
}

double brute_nonmarkovianity(const Mat& rho) {
  std::vector<int> dims(5, 2);
  auto marg = [&](std::vector<int> keep) {
    std::vector<bool> drop(5, true);
    for (int k : keep) drop[k] = false;
    return brute_entropy_bits(brute_partial_trace(rho, dims, drop));
  };
  return marg({0}) + marg({1, 2}) + marg({3, 4}) - brute_entropy_bits(rho);
}

ProcessTensor bell_comb() { return markov_open_process({identity_channel({2})}); }

double min_pt(const LabeledOperator& op, const std::set<std::string>& cut) {
  return hermitian_eig(partial_transpose(op, cut).matrix()).values.minCoeff();
}

}  // namespace

TEST(Monotones, SwapNonMarkovianityMatchesBruteForce) {
  auto t = swap_process();
  Mat rho = explicit_swap_state();
  EXPECT_LT(max_abs(t.normalized() - rho), 1e-12);
  double oracle = brute_nonmarkovianity(rho);
  EXPECT_NEAR(oracle, 2.0, 1e-12);
  auto rep = non_markovianity(t);
  EXPECT_NEAR(rep.value, oracle, 1e-9);
  EXPECT_TRUE(rep.exact);
  ASSERT_TRUE(rep.witness);
  EXPECT_TRUE(validate_causality(*rep.witness).pass);
}

TEST(Monotones, MarkovProcessesHaveNoMemory) {
  Rng rng(71);
  for (int k = 0; k < 10; ++k) {
    std::vector<QuantumChannel> ch;
    for (int j = 0; j < 1 + k % 3; ++j) ch.push_back(random_channel({2}, {2}, 2, rng));
    auto t = markov_process(ch, qubit_state(rng.random_density(2)));
    EXPECT_LT(non_markovianity(t).value, 1e-9);
  }
}

TEST(Monotones, NonMarkovianityIsLocalUnitaryInvariant) {
  Rng rng(72);
  auto t = random_process_tensor(2, 2, 2, rng);
  Mat u = Mat::Identity(1, 1);
  for (int k = 0; k < 5; ++k) u = Eigen::kroneckerProduct(u, rng.haar_unitary(2)).eval();
  ProcessTensor v(t.choi().with_matrix(u * t.choi().matrix() * u.adjoint()), 2);
  ASSERT_TRUE(validate_causality(v).pass);
  EXPECT_NEAR(non_markovianity(v).value, non_markovianity(t).value, 1e-9);
}

TEST(Monotones, DistanceToFreeSets) {
  auto t = swap_process();
  auto leg = distance_to_free_set(t, {CommClass::None, CommClass::None}, DistanceKind::RelativeEntropy);
  EXPECT_NEAR(leg.value, 2.0, 1e-9);
  EXPECT_TRUE(leg.exact);
  auto mk = distance_to_free_set(t, {CommClass::Q, CommClass::None}, DistanceKind::RelativeEntropy);
  EXPECT_NEAR(mk.value, non_markovianity(t).value, 1e-9);
  EXPECT_TRUE(mk.exact);
  EXPECT_EQ(distance_to_free_set(t, {CommClass::Q, CommClass::Q}, DistanceKind::Trace).value, 0.0);
  auto tr = distance_to_free_set(t, {CommClass::Q, CommClass::None}, DistanceKind::Trace);
  EXPECT_GT(tr.value, 0.0);
  EXPECT_LE(tr.value, 1.0);
}

TEST(Monotones, BellCombRobustness) {
  auto t = bell_comb();
  auto r = global_robustness(t, Relaxation::PptEbSet);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  ASSERT_TRUE(r.dual_bound);
  EXPECT_NEAR(*r.dual_bound, 1.0, 1e-6);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(validate_causality(*r.witness, 1e-7).pass);
  LabeledOperator mix = t.choi().with_matrix(0.5 * (t.choi().matrix() + r.witness->choi().matrix()));
  EXPECT_GE(min_pt(mix, {in_leg(0)}), -1e-7);
  // a mixture with less weight on the witness stays entangled
  LabeledOperator less = t.choi().with_matrix(0.6 * t.choi().matrix() + 0.4 * r.witness->choi().matrix());
  EXPECT_LT(min_pt(less, {in_leg(0)}), -1e-3);
}

TEST(Monotones, DepolarizedCombRobustness) {
  // (1-p) Choi + p 1/d at p = 1/2: fidelity 5/8 with the Bell state, R = 2F - 1
  auto t = markov_open_process({depolarizing_channel(2, 0.5)});
  EXPECT_NEAR(global_robustness(t, Relaxation::PptEbSet).value, 0.25, 1e-6);
  EXPECT_NEAR(dmax_to_free_set(t, Relaxation::PptEbSet).value, std::log2(1.25), 1e-6);
  // past the EB threshold the comb is already in the relaxed set
  auto eb = markov_open_process({depolarizing_channel(2, 0.8)});
  EXPECT_LT(global_robustness(eb, Relaxation::PptEbSet).value, 1e-6);
}

TEST(Monotones, MaxRelativeEntropyEqualsLogRobustness) {
  EXPECT_NEAR(dmax_to_free_set(bell_comb(), Relaxation::PptEbSet).value, 1.0, 1e-6);
  Rng rng(73);
  for (int k = 0; k < 3; ++k) {
    auto t = markov_open_process({random_channel({2}, {2}, 1 + k, rng)});
    auto rep = thm3_check(t, Relaxation::PptEbSet);
    EXPECT_TRUE(rep.pass) << rep.difference;
    EXPECT_LT(rep.difference, 1e-4);
  }
}

TEST(Monotones, NonConvexRelaxationsAreRefused) {
  EXPECT_THROW(global_robustness(bell_comb(), Relaxation::ProductSet), CapabilityError);
  EXPECT_THROW(dmax_to_free_set(bell_comb(), Relaxation::MarkovSet), CapabilityError);
  EXPECT_THROW(parse_relaxation("convex"), std::exception);
}

TEST(Monotones, CutsCoverInputsOutputsAndLegs) {
  auto cuts = ppt_cuts(swap_process());
  // inputs|outputs plus five single legs
  EXPECT_EQ(cuts.size(), 6u);
}

TEST(Monotones, NonMarkovianityAuditHasNoViolations) {
  auto rep = monotonicity_audit({CommClass::Q, CommClass::None}, AuditMonotone::NonMarkovianity, 10, 5);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_EQ(rep.records.size(), 10u);
  auto again = monotonicity_audit({CommClass::Q, CommClass::None}, AuditMonotone::NonMarkovianity, 10, 5);
  EXPECT_EQ(again.records[3].after, rep.records[3].after);
}

TEST(Monotones, RobustnessAuditHasNoViolations) {
  AuditOptions o;
  o.steps = 1;
  auto rep = monotonicity_audit({CommClass::EB, CommClass::EB}, AuditMonotone::Robustness, 3, 9, o);
  EXPECT_TRUE(rep.pass);
}

TEST(Monotones, AuditRefusesUnsupportedPairs) {
  EXPECT_THROW(monotonicity_audit({CommClass::Q, CommClass::Q}, AuditMonotone::NonMarkovianity, 1, 1), CapabilityError);
  EXPECT_THROW(monotonicity_audit({CommClass::Q, CommClass::None}, AuditMonotone::Robustness, 1, 1), CapabilityError);
}

TEST(Monotones, IdentitySuperprocessPreservesValues) {
  Rng rng(74);
  auto t = random_process_tensor(2, 2, 2, rng);
  auto z = identity_superprocess(2, 2);
  EXPECT_NEAR(non_markovianity(left_action(t, z)).value, non_markovianity(t).value, 1e-9);
}
