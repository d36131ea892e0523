#pragma once

#include "ptres/random.hpp"
#include "ptres/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ptres {

enum class CommClass { None = 0, EB = 1, Q = 2 };
const char* comm_class_name(CommClass c);
CommClass parse_comm_class(const std::string& s);
/// None < EB < Q.
inline bool class_le(CommClass a, CommClass b) { return static_cast<int>(a) <= static_cast<int>(b); }

struct ConstraintError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Povm {
  std::vector<Mat> effects;
  explicit Povm(std::vector<Mat> e, double tol = kDefaultTol);
  int dim() const { return static_cast<int>(effects.front().rows()); }
  size_t size() const { return effects.size(); }
};

/// Measure-and-prepare decomposition sum_k tr(Pi_k rho) nu_k.
struct MeasurePrepare {
  std::vector<Mat> effects;
  std::vector<Mat> preparations;
};

/// CP map in Choi form over input legs in0.. and output legs out0.. (in that
/// order), unnormalized so that tr_out(choi) = 1_in for a trace-preserving map.
class QuantumChannel {
 public:
  QuantumChannel() = default;
  QuantumChannel(Mat choi, std::vector<int> in_dims, std::vector<int> out_dims, bool trace_preserving,
                 double tol = kDefaultTol);

  const LabeledOperator& choi() const { return choi_; }
  const std::vector<int>& in_dims() const { return in_dims_; }
  const std::vector<int>& out_dims() const { return out_dims_; }
  int d_in() const;
  int d_out() const;
  bool trace_preserving() const { return tp_; }
  std::vector<std::string> in_legs() const;
  std::vector<std::string> out_legs() const;

  const std::optional<MeasurePrepare>& measure_prepare() const { return mp_; }
  QuantumChannel with_measure_prepare(MeasurePrepare mp) const;

 private:
  LabeledOperator choi_;
  std::vector<int> in_dims_, out_dims_;
  bool tp_ = true;
  std::optional<MeasurePrepare> mp_;
};

// ---- conversions and application -----------------------------------------

std::vector<Mat> choi_to_kraus(const QuantumChannel& ch, double cutoff = 1e-13);
QuantumChannel kraus_to_channel(const std::vector<Mat>& kraus, std::vector<int> in_dims,
                                std::vector<int> out_dims, double tol = kDefaultTol);
QuantumChannel kraus_to_channel(const std::vector<Mat>& kraus);

/// Applies ch to the legs `targets` of x (matched to in0, in1, ...). Output
/// legs keep the target names, roles and steps.
LabeledOperator apply_on(const LabeledOperator& x, const QuantumChannel& ch,
                         const std::vector<std::string>& targets);
DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho);

/// b after a.
QuantumChannel compose(const QuantumChannel& a, const QuantumChannel& b);
/// a on the first subsystems, b on the following ones.
QuantumChannel parallel(const QuantumChannel& a, const QuantumChannel& b);
/// Relabels subsystems on both sides: new subsystem k is old subsystem perm[k].
QuantumChannel permute_subsystems(const QuantumChannel& ch, const std::vector<int>& perm);
/// ch acting on subsystems `positions` of a register with `dims`, identity elsewhere.
QuantumChannel embed(const QuantumChannel& ch, const std::vector<int>& positions, const std::vector<int>& dims);

// ---- standard channels -----------------------------------------------------

QuantumChannel identity_channel(std::vector<int> dims);
QuantumChannel unitary_channel(const Mat& u, std::vector<int> dims);
QuantumChannel unitary_channel(const Mat& u);
QuantumChannel fixed_output_channel(const Mat& tau, std::vector<int> in_dims, std::vector<int> out_dims);
QuantumChannel fixed_output_channel(const Mat& tau, int d_in);
QuantumChannel depolarizing_channel(int d, double p);
QuantumChannel dephasing_channel(int d);
/// Permutation of subsystems: output k is input perm[k].
QuantumChannel permutation_channel(const std::vector<int>& dims, const std::vector<int>& perm);
QuantumChannel swap_channel(const std::vector<int>& dims, int a, int b);
/// Discards subsystem `pos` and prepares tau there.
QuantumChannel reset_channel(const std::vector<int>& dims, int pos, const Mat& tau);
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

// ---- communication classes --------------------------------------------------

QuantumChannel make_none_channel(const Mat& tau, std::vector<int> in_dims, std::vector<int> out_dims);
QuantumChannel make_eb_channel(const Povm& povm, const std::vector<Mat>& preparations,
                               std::vector<int> in_dims = {}, std::vector<int> out_dims = {});
QuantumChannel make_q_channel(const std::vector<Mat>& kraus, std::vector<int> in_dims = {},
                              std::vector<int> out_dims = {});
QuantumChannel make_q_channel(const QuantumChannel& choi_form);

enum class Tri { Yes, No, Inconclusive };
const char* tri_name(Tri t);

struct EbReport {
  Tri verdict = Tri::Inconclusive;
  std::string certificate;
  double min_pt_eigenvalue = 0;  // of choi / d_in
  Vec witness;                   // eigenvector for a negative PT eigenvalue
};
EbReport is_entanglement_breaking(const QuantumChannel& ch);

bool is_fixed_output(const QuantumChannel& ch, double tol = kDefaultTol);

struct ClassCheck {
  bool ok = false;
  std::string certificate;
};
/// Whether the channel is admissible in a slot of class c.
ClassCheck check_class(const QuantumChannel& ch, CommClass c);

// ---- sampling ---------------------------------------------------------------

QuantumChannel random_channel(int d_in, int d_out, int env_dim, std::uint64_t seed);
QuantumChannel random_channel(std::vector<int> in_dims, std::vector<int> out_dims, int env_dim, Rng& rng);
Povm random_povm(int d, int outcomes, Rng& rng);
QuantumChannel random_eb_channel(std::vector<int> in_dims, std::vector<int> out_dims, int outcomes, Rng& rng);
QuantumChannel random_fixed_output(std::vector<int> in_dims, std::vector<int> out_dims, Rng& rng);
QuantumChannel random_class_channel(CommClass c, std::vector<int> in_dims, std::vector<int> out_dims, Rng& rng);

}  // namespace ptres
