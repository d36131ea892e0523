#pragma once

#include "ptres/tensor.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptres {

struct SdpProblemError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using RMat = Eigen::MatrixXd;

/// Orthonormal real coordinates of a Hermitian matrix: diagonal entries, then
/// sqrt2*Re and sqrt2*Im of each upper entry. <svec a, svec b> = Re tr(a b).
RVec svec(const Mat& h);
Mat smat(const RVec& v, long d);

/// min sum_b Re tr(C_b X_b)  s.t.  sum_b Re tr(A_ib X_b) = b_i,  X_b >= 0.
class SdpProblem {
 public:
  int add_block(long dim);
  void set_objective(int block, const Mat& c);

  /// One scalar row.
  void add_constraint(const std::vector<std::pair<int, Mat>>& terms, double rhs);
  /// sum_t f_t(X_{b_t}) = rhs as a Hermitian identity, one row per real coordinate
  /// of the output. Each f_t must be linear and map Hermitian to Hermitian.
  using LinearMap = std::function<Mat(const Mat&)>;
  void add_map_equality(const std::vector<std::pair<int, LinearMap>>& terms, const Mat& rhs);

  int blocks() const { return static_cast<int>(dims_.size()); }
  long block_dim(int b) const { return dims_.at(b); }
  long rows() const { return static_cast<long>(rhs_.size()); }

  // flattened svec layout
  long offset(int b) const { return offs_.at(b); }
  long total() const { return total_; }
  RMat constraint_matrix() const;
  RVec rhs() const;
  RVec objective() const;

 private:
  std::vector<long> dims_, offs_;
  long total_ = 0;
  std::vector<Mat> c_;
  std::vector<std::vector<std::pair<long, double>>> rows_;  // sparse rows in svec layout
  std::vector<double> rhs_;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter };
const char* sdp_status_name(SdpStatus s);

struct SdpOptions {
  int max_iter = 120;
  double gap_tol = 1e-10;
  double feas_tol = 1e-9;
  double accept_gap = 1e-6;   // reported Optimal only within these
  double accept_feas = 1e-8;
};

struct SdpResult {
  SdpStatus status = SdpStatus::MaxIter;
  double primal_value = 0;
  double dual_value = 0;  // b^T y, the dual bound
  double gap = 0;         // |primal - dual|
  double primal_residual = 0;
  double dual_residual = 0;
  int iterations = 0;
  std::vector<Mat> X, Z;
  RVec y;
};

/// Infeasible-start primal-dual interior point method (HKM direction with a
/// Mehrotra corrector). Linearly dependent equality rows are removed first;
/// inconsistent equalities raise SdpProblemError.
SdpResult solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

}  // namespace ptres
