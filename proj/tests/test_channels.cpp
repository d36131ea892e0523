#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ptres;
using namespace ptest;

TEST(Channels, KrausChoiRoundTrip) {
  Rng rng(21);
  for (int k = 0; k < 10; ++k) {
    auto ch = random_channel({2}, {3}, 2, rng);
    auto back = kraus_to_channel(choi_to_kraus(ch), {2}, {3});
    EXPECT_LT(max_abs(back.choi().matrix() - ch.choi().matrix()), 1e-10);
  }
}

TEST(Channels, UnitaryActionMatchesConjugation) {
  Rng rng(22);
  Mat u = rng.haar_unitary(2);
  Mat rho = rng.random_density(2);
  auto out = apply_channel(unitary_channel(u), qubit_state(rho));
  EXPECT_LT(max_abs(out.matrix() - u * rho * u.adjoint()), 1e-12);
}

TEST(Channels, CompositionOrder) {
  Rng rng(23);
  Mat u = rng.haar_unitary(2), v = rng.haar_unitary(2);
  // compose(a, b) applies a first
  auto c = compose(unitary_channel(u), unitary_channel(v));
  EXPECT_LT(max_abs(c.choi().matrix() - unitary_channel(v * u).choi().matrix()), 1e-12);
}

TEST(Channels, TracePreservationIsChecked) {
  Mat bad = 2.0 * max_entangled({"a", 2, Role::Ancilla, 0}, {"b", 2, Role::Ancilla, 0}).matrix();
  EXPECT_THROW(QuantumChannel(bad, {2}, {2}, true), DomainError);
  Mat nonpsd = -Mat::Identity(4, 4);
  EXPECT_THROW(QuantumChannel(nonpsd, {2}, {2}, false), DomainError);
}

TEST(Channels, EntanglementBreakingOracles) {
  EXPECT_EQ(is_entanglement_breaking(identity_channel({2})).verdict, Tri::No);
  EXPECT_LT(is_entanglement_breaking(identity_channel({2})).min_pt_eigenvalue, 0);
  Mat tau = Mat::Identity(2, 2) / 2.0;
  EXPECT_EQ(is_entanglement_breaking(fixed_output_channel(tau, 2)).verdict, Tri::Yes);
  EXPECT_EQ(is_entanglement_breaking(dephasing_channel(2)).verdict, Tri::Yes);
  // qubit depolarizing (1-p) rho + p 1/2 breaks entanglement iff p >= 2/3
  EXPECT_EQ(is_entanglement_breaking(depolarizing_channel(2, 0.6)).verdict, Tri::No);
  EXPECT_EQ(is_entanglement_breaking(depolarizing_channel(2, 0.7)).verdict, Tri::Yes);
  Rng rng(24);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(is_entanglement_breaking(random_eb_channel({2}, {2}, 3, rng)).verdict, Tri::Yes);
    EXPECT_TRUE(is_fixed_output(random_fixed_output({2}, {2}, rng)));
  }
}

TEST(Channels, ClassChecks) {
  EXPECT_FALSE(check_class(identity_channel({2}), CommClass::EB).ok);
  EXPECT_FALSE(check_class(identity_channel({2}), CommClass::None).ok);
  EXPECT_TRUE(check_class(identity_channel({2}), CommClass::Q).ok);
  Rng rng(25);
  for (auto c : {CommClass::None, CommClass::EB, CommClass::Q}) {
    auto ch = random_class_channel(c, {2, 2}, {2, 2}, rng);
    EXPECT_TRUE(check_class(ch, c).ok) << comm_class_name(c);
  }
}

TEST(Channels, PermuteSubsystemsMatchesSwapConjugation) {
  Rng rng(26);
  auto ch = random_channel({2, 3}, {2, 3}, 2, rng);
  auto p = permute_subsystems(ch, {1, 0});
  // p = swap . ch . swap
  auto sw_in = permutation_channel({3, 2}, {1, 0});
  auto sw_out = permutation_channel({2, 3}, {1, 0});
  auto want = compose(compose(sw_in, ch), sw_out);
  EXPECT_LT(max_abs(p.choi().matrix() - want.choi().matrix()), 1e-12);
}

TEST(Channels, ParallelIsTensorProduct) {
  Rng rng(27);
  auto a = random_channel({2}, {2}, 2, rng), b = random_channel({2}, {2}, 2, rng);
  Mat x = rng.random_density(2), y = rng.random_density(2);
  std::vector<Leg> legs{{"p", 2, Role::Ancilla, 0}, {"q", 2, Role::Ancilla, 0}};
  DensityOperator xy(LabeledOperator(legs, Eigen::kroneckerProduct(x, y).eval()));
  auto out = apply_channel(parallel(a, b), xy);
  Mat want = Eigen::kroneckerProduct(apply_channel(a, qubit_state(x)).matrix(), apply_channel(b, qubit_state(y)).matrix()).eval();
  EXPECT_LT(max_abs(out.matrix() - want), 1e-12);
}
