#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptres {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;

struct LabelingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapabilityError : std::logic_error {
  using std::logic_error::logic_error;
};

enum class Role { StateOutput, CombInput, CombOutput, Ancilla };

const char* role_name(Role r);
Role parse_role(const std::string& s);
inline bool is_input(Role r) { return r == Role::CombInput; }
inline bool is_output(Role r) { return r == Role::StateOutput || r == Role::CombOutput; }

struct Leg {
  std::string name;
  int dim = 1;
  Role role = Role::Ancilla;
  int step = 0;

  bool operator==(const Leg& o) const {
    return name == o.name && dim == o.dim && role == o.role && step == o.step;
  }
};

/// Dense complex matrix over an ordered list of named legs. The row index is
/// the row-major multi-index over the legs (first leg most significant).
class LabeledOperator {
 public:
  LabeledOperator() = default;
  LabeledOperator(std::vector<Leg> legs, Mat m, double tol = kDefaultTol);

  const std::vector<Leg>& legs() const { return legs_; }
  const Mat& matrix() const { return m_; }
  double tol() const { return tol_; }
  bool hermitian() const { return hermitian_; }
  long dim() const { return m_.rows(); }

  bool has_leg(const std::string& name) const;
  int index_of(const std::string& name) const;
  const Leg& leg(const std::string& name) const;
  std::vector<int> dims() const;
  std::vector<std::string> names() const;
  cd trace() const { return m_.trace(); }

  LabeledOperator with_matrix(Mat m) const { return {legs_, std::move(m), tol_}; }
  LabeledOperator with_tol(double tol) const { return {legs_, m_, tol}; }

 private:
  std::vector<Leg> legs_;
  Mat m_;
  double tol_ = kDefaultTol;
  bool hermitian_ = false;
};

long product_of_dims(const std::vector<Leg>& legs);

LabeledOperator identity_op(const std::vector<Leg>& legs);
/// Unnormalized maximally entangled operator sum_ij |ii><jj| on (a, b).
LabeledOperator max_entangled(const Leg& a, const Leg& b);
LabeledOperator ket_bra(const Leg& leg, int k);

LabeledOperator tensor_product(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator partial_trace(const LabeledOperator& a, const std::set<std::string>& drop);
LabeledOperator keep_legs(const LabeledOperator& a, const std::vector<std::string>& keep);
LabeledOperator partial_transpose(const LabeledOperator& a, const std::set<std::string>& flip);
LabeledOperator permute_legs(const LabeledOperator& a, const std::vector<std::string>& order);
LabeledOperator rename_legs(const LabeledOperator& a, const std::map<std::string, std::string>& names);
LabeledOperator relabel_legs(const LabeledOperator& a, const std::map<std::string, Leg>& legs);

/// Sort legs by (step, inputs before outputs, ancillas last); stable otherwise.
LabeledOperator canonicalize(const LabeledOperator& a);
std::vector<Leg> canonical_order(std::vector<Leg> legs);

/// tr_shared{(A^{T_shared} (x) 1)(1 (x) B)}; legs with equal names are shared.
/// Result legs: unshared legs of a, then unshared legs of b.
LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b);

/// Feeds leg `from` into leg `into` of the same operator: <psi| X |psi> over
/// the pair with psi = sum_k |kk>.
LabeledOperator self_link(const LabeledOperator& a, const std::string& from, const std::string& into);

LabeledOperator scaled(const LabeledOperator& a, cd s);
LabeledOperator add(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator subtract(const LabeledOperator& a, const LabeledOperator& b);
/// Reorders b to a's leg order, then returns max |a - b|.
double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b);

// ---- spectral helpers -------------------------------------------------------

struct Eig {
  RVec values;  // ascending
  Mat vectors;
};
Eig hermitian_eig(const Mat& a);
Mat hermitian_part(const Mat& a);
double min_eigenvalue(const Mat& a);
/// f applied to the eigenvalues of a Hermitian matrix.
template <class F>
Mat matrix_function(const Mat& a, F f) {
  Eig e = hermitian_eig(a);
  RVec fv = e.values.unaryExpr(f);
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}
double trace_norm(const Mat& a);
/// von Neumann entropy in bits of a / tr(a).
double entropy_bits(const Mat& a);

// ---- density operators and distances ---------------------------------------

class DensityOperator {
 public:
  explicit DensityOperator(LabeledOperator op);
  const LabeledOperator& op() const { return op_; }
  const Mat& matrix() const { return op_.matrix(); }
  double trace() const { return op_.trace().real(); }
  bool unit_trace() const;

 private:
  LabeledOperator op_;
};

bool is_psd(const Mat& a, double tol);

enum class DistanceKind { Trace, RelativeEntropy, MaxRelativeEntropy };
DistanceKind parse_distance_kind(const std::string& s);

struct DistanceResult {
  double value = 0;
  bool normalized_a = false;
  bool normalized_b = false;
};

/// Distances in bits; inputs are normalized to unit trace (flagged if needed).
DistanceResult distance(const DensityOperator& a, const DensityOperator& b, DistanceKind kind,
                        double tol = kDefaultTol);
double trace_distance(const Mat& a, const Mat& b);
double relative_entropy_bits(const Mat& a, const Mat& b, double tol = kDefaultTol);
double dmax_bits(const Mat& a, const Mat& b, double tol = kDefaultTol);

// ---- index plumbing shared by the other modules ---------------------------

/// For every full row index of `legs`, the index into the sub-tensor formed by
/// the legs at `positions` (in that order).
std::vector<long> sub_indices(const std::vector<int>& dims, const std::vector<int>& positions);

}  // namespace ptres
