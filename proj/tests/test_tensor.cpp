#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ptres;
using namespace ptest;

TEST(Tensor, PartialTraceMatchesExplicitSummation) {
  Rng rng(11);
  std::vector<int> dims{2, 3, 2};
  for (int trial = 0; trial < 20; ++trial) {
    Mat m = random_hermitian(12, rng);
    LabeledOperator op(anc_legs(dims), m);
    for (int mask = 1; mask < 7; ++mask) {
      std::vector<bool> drop(3);
      std::set<std::string> names;
      for (int k = 0; k < 3; ++k)
        if (mask >> k & 1) {
          drop[k] = true;
          names.insert("a" + std::to_string(k));
        }
      EXPECT_LT(max_abs(partial_trace(op, names).matrix() - brute_partial_trace(m, dims, drop)), 1e-12);
    }
  }
}

TEST(Tensor, PartialTransposeMatchesIndexSwap) {
  Rng rng(12);
  std::vector<int> dims{2, 2, 3};
  Mat m = random_hermitian(12, rng);
  LabeledOperator op(anc_legs(dims), m);
  Mat pt = partial_transpose(op, {"a0", "a2"}).matrix();
  EXPECT_LT(max_abs(pt - brute_partial_transpose(m, dims, {true, false, true})), 1e-14);
  // involution, and the complement has the same spectrum
  EXPECT_LT(max_abs(partial_transpose(partial_transpose(op, {"a1"}), {"a1"}).matrix() - m), 1e-14);
  RVec s1 = hermitian_eig(partial_transpose(op, {"a1"}).matrix()).values;
  RVec s2 = hermitian_eig(partial_transpose(op, {"a0", "a2"}).matrix()).values;
  EXPECT_LT((s1 - s2).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Tensor, PermuteAndProductCommute) {
  Rng rng(13);
  LabeledOperator a({{"x", 2, Role::Ancilla, 0}}, random_hermitian(2, rng));
  LabeledOperator b({{"y", 3, Role::Ancilla, 0}, {"z", 2, Role::Ancilla, 0}}, random_hermitian(6, rng));
  auto ab = tensor_product(a, b);
  auto ba = tensor_product(b, a);
  EXPECT_LT(max_abs_diff(ab, ba), 1e-14);
  auto p = permute_legs(ab, {"z", "x", "y"});
  EXPECT_EQ(p.names(), (std::vector<std::string>{"z", "x", "y"}));
  EXPECT_LT(max_abs(permute_legs(p, {"x", "y", "z"}).matrix() - ab.matrix()), 1e-14);
  // explicit Kronecker oracle
  Mat kron = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  EXPECT_LT(max_abs(ab.matrix() - kron), 1e-14);
}

TEST(Tensor, LinkWithMaximallyEntangledRelabels) {
  Rng rng(14);
  Leg x{"x", 2, Role::Ancilla, 0}, y{"y", 3, Role::Ancilla, 0}, z{"z", 3, Role::Ancilla, 0};
  LabeledOperator a({x, y}, random_psd(6, rng));
  auto linked = link_product(a, max_entangled(y, z));
  auto expect = rename_legs(a, {{"y", "z"}});
  EXPECT_LT(max_abs_diff(linked, expect), 1e-12);
}

TEST(Tensor, LinkIsAssociativeOnChains) {
  Rng rng(15);
  Leg a{"a", 2, Role::Ancilla, 0}, b{"b", 2, Role::Ancilla, 0}, c{"c", 2, Role::Ancilla, 0}, d{"d", 2, Role::Ancilla, 0};
  LabeledOperator p({a, b}, random_psd(4, rng)), q({b, c}, random_psd(4, rng)), r({c, d}, random_psd(4, rng));
  EXPECT_LT(max_abs_diff(link_product(link_product(p, q), r), link_product(p, link_product(q, r))), 1e-11);
}

TEST(Tensor, EntropyOracles) {
  EXPECT_NEAR(entropy_bits(Mat::Identity(4, 4)), 2.0, 1e-12);
  Mat pure = bell_projector();
  EXPECT_NEAR(entropy_bits(pure), 0.0, 1e-12);
  Rng rng(16);
  for (int k = 0; k < 10; ++k) {
    Mat r = rng.random_density(4);
    EXPECT_NEAR(entropy_bits(r), brute_entropy_bits(r), 1e-10);
  }
}

TEST(Tensor, DistanceOrderingOnRandomQubitPairs) {
  Rng rng(17);
  for (int k = 0; k < 100; ++k) {
    Mat a = rng.random_density(4), b = rng.random_density(4);
    double t = trace_distance(a, b);
    double s = relative_entropy_bits(a, b);
    double dm = dmax_bits(a, b);
    EXPECT_GE(dm + 1e-9, s);
    EXPECT_GE(s + 1e-9, 2 * t * t / std::log(2.0));
    EXPECT_GE(t, 0.0);
  }
  Mat a = rng.random_density(2);
  EXPECT_NEAR(relative_entropy_bits(a, a), 0.0, 1e-9);
  EXPECT_NEAR(dmax_bits(a, a), 0.0, 1e-9);
  // support violation
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  EXPECT_TRUE(std::isinf(relative_entropy_bits(p0, p1)));
  EXPECT_TRUE(std::isinf(dmax_bits(p0, p1)));
}

TEST(Tensor, ConstructionErrors) {
  EXPECT_THROW(LabeledOperator({{"a", 2, Role::Ancilla, 0}, {"a", 2, Role::Ancilla, 0}}, Mat::Identity(4, 4)), LabelingError);
  EXPECT_THROW(LabeledOperator({{"a", 3, Role::Ancilla, 0}}, Mat::Identity(2, 2)), LabelingError);
  Mat neg = Mat::Identity(2, 2);
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityOperator(LabeledOperator({{"a", 2, Role::Ancilla, 0}}, neg)), DomainError);
  EXPECT_THROW(DensityOperator(LabeledOperator({{"a", 2, Role::Ancilla, 0}}, 2.0 * Mat::Identity(2, 2))), DomainError);
  Mat nh = Mat::Zero(2, 2);
  nh(0, 1) = 1;
  EXPECT_THROW(DensityOperator(LabeledOperator({{"a", 2, Role::Ancilla, 0}}, nh)), DomainError);
}

TEST(Tensor, CanonicalOrderSortsByStepInputsFirst) {
  std::vector<Leg> legs{{"o1", 2, Role::CombOutput, 1}, {"i0", 2, Role::CombInput, 1}, {"o0", 2, Role::StateOutput, 0}};
  auto c = canonical_order(legs);
  EXPECT_EQ(c[0].name, "o0");
  EXPECT_EQ(c[1].name, "i0");
  EXPECT_EQ(c[2].name, "o1");
}
