#include "test_util.hpp"

#include "ptres/sdp.hpp"

#include <gtest/gtest.h>

using namespace ptres;
using namespace ptest;

TEST(Sdp, SvecIsAnIsometry) {
  Rng rng(61);
  Mat a = random_hermitian(4, rng), b = random_hermitian(4, rng);
  EXPECT_NEAR(svec(a).dot(svec(b)), (a * b).trace().real(), 1e-12);
  EXPECT_LT(max_abs(smat(svec(a), 4) - a), 1e-14);
}

TEST(Sdp, TraceAboveIdentity) {
  // min tr X  s.t.  X - S = 1, S >= 0  gives 2 for d = 2
  SdpProblem p;
  int x = p.add_block(2), s = p.add_block(2);
  p.set_objective(x, Mat::Identity(2, 2));
  p.add_map_equality({{x, [](const Mat& m) { return m; }}, {s, [](const Mat& m) { return Mat(-m); }}},
                     Mat::Identity(2, 2));
  auto r = solve_sdp(p);
  EXPECT_EQ(r.status, SdpStatus::Optimal);
  EXPECT_NEAR(r.primal_value, 2.0, 1e-7);
  EXPECT_LE(r.gap, 1e-6);
}

TEST(Sdp, LargestEigenvalueByDuality) {
  // max tr(A X) s.t. tr X = 1 is lambda_max(A)
  Rng rng(62);
  for (long d : {2, 5, 9}) {
    Mat a = random_hermitian(d, rng);
    SdpProblem p;
    int x = p.add_block(d);
    p.set_objective(x, -a);
    p.add_constraint({{x, Mat::Identity(d, d)}}, 1.0);
    auto r = solve_sdp(p);
    ASSERT_EQ(r.status, SdpStatus::Optimal);
    EXPECT_NEAR(-r.primal_value, hermitian_eig(a).values.maxCoeff(), 1e-7);
    // weak duality: the dual bound never exceeds the primal value
    EXPECT_LE(r.dual_value, r.primal_value + 1e-8);
  }
}

TEST(Sdp, RedundantRowsAreRemoved) {
  SdpProblem p;
  int x = p.add_block(2);
  p.set_objective(x, Mat::Identity(2, 2));
  p.add_constraint({{x, Mat::Identity(2, 2)}}, 1.0);
  p.add_constraint({{x, 2.0 * Mat::Identity(2, 2)}}, 2.0);
  auto r = solve_sdp(p);
  EXPECT_EQ(r.status, SdpStatus::Optimal);
  EXPECT_NEAR(r.primal_value, 1.0, 1e-8);
}

TEST(Sdp, InconsistentRowsAreRejected) {
  SdpProblem p;
  int x = p.add_block(2);
  p.set_objective(x, Mat::Identity(2, 2));
  p.add_constraint({{x, Mat::Identity(2, 2)}}, 1.0);
  p.add_constraint({{x, Mat::Identity(2, 2)}}, 2.0);
  EXPECT_THROW(solve_sdp(p), SdpProblemError);
}

TEST(Sdp, DeterministicIterates) {
  Rng rng(63);
  Mat a = random_hermitian(4, rng);
  SdpProblem p;
  int x = p.add_block(4);
  p.set_objective(x, a);
  p.add_constraint({{x, Mat::Identity(4, 4)}}, 1.0);
  auto r1 = solve_sdp(p), r2 = solve_sdp(p);
  EXPECT_EQ(r1.iterations, r2.iterations);
  EXPECT_EQ(r1.primal_value, r2.primal_value);
}
