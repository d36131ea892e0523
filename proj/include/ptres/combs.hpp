#pragma once

#include "ptres/channels.hpp"
#include "ptres/random.hpp"
#include "ptres/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ptres {

enum class InitialMode { StateLeg, OpenInput };

std::string out_leg(int j);  // "o<j>"
std::string in_leg(int j);   // "i<j>"

/// System-environment dilation of a process. In state-leg mode rho0 lives on
/// s (x) e; in open-input mode it lives on e alone and s enters through i0.
struct Dilation {
  InitialMode mode = InitialMode::StateLeg;
  int ds = 2;
  int de = 1;
  Mat rho0;
  std::vector<QuantumChannel> maps;  // each on (s, e)
  bool env_input = false;   // open-input only: e enters through leg "e_in" instead of rho0
  bool env_output = false;  // final e kept as leg "e_out" instead of traced
};

/// Per level k of the comb hierarchy: max|tr_{O_k} C_k - 1_{I_k} (x) C_{k-1}|.
struct CausalityReport {
  bool pass = false;
  bool psd = false;
  double min_eigenvalue = 0;
  std::vector<int> levels;
  std::vector<double> deviations;
  double max_deviation = 0;
  double tol = kDefaultTol;
};

/// Hierarchy check for any comb: legs grouped into blocks by step, inputs
/// (comb-input role) before outputs inside a block.
CausalityReport validate_comb(const LabeledOperator& c, double tol = kDefaultTol);

class ProcessTensor {
 public:
  ProcessTensor() = default;
  ProcessTensor(LabeledOperator choi, int steps, InitialMode mode = InitialMode::StateLeg);

  const LabeledOperator& choi() const { return choi_; }
  int steps() const { return steps_; }
  InitialMode mode() const { return mode_; }
  bool has_extra_legs() const { return extra_; }
  /// Dimension of the system leg o_j / i_j.
  int out_dim(int j) const { return choi_.leg(out_leg(j)).dim; }
  int in_dim(int j) const { return choi_.leg(in_leg(j)).dim; }
  /// Product of the input-leg dimensions (the unnormalized trace).
  double input_weight() const;
  Mat normalized() const;

  const std::optional<Dilation>& dilation() const { return dil_; }
  ProcessTensor with_dilation(Dilation d) const;
  ProcessTensor without_dilation() const;

 private:
  LabeledOperator choi_;
  int steps_ = 0;
  InitialMode mode_ = InitialMode::StateLeg;
  bool extra_ = false;
  std::optional<Dilation> dil_;
};

/// Dilated control sequence: ancilla state and one action on (s, a) per step.
struct ControlDilation {
  int ds = 2;
  int da = 1;
  Mat rho0_a;
  std::vector<QuantumChannel> actions;
};

/// Comb consuming o_j and emitting i_j for j < steps. When `final_map` is set
/// it also consumes o_steps and emits the leg "out".
class ControlSequence {
 public:
  ControlSequence() = default;
  ControlSequence(LabeledOperator choi, int steps, bool deterministic, bool final_map = false);

  const LabeledOperator& choi() const { return choi_; }
  int steps() const { return steps_; }
  bool deterministic() const { return deterministic_; }
  bool final_map() const { return final_; }
  const std::optional<ControlDilation>& dilation() const { return dil_; }
  ControlSequence with_dilation(ControlDilation d) const;

 private:
  LabeledOperator choi_;
  int steps_ = 0;
  bool deterministic_ = true;
  bool final_ = false;
  std::optional<ControlDilation> dil_;
};

ProcessTensor build_process_tensor(const DensityOperator& rho0_se, const std::vector<QuantumChannel>& dynamics);
ProcessTensor build_process_tensor(const Dilation& dil);
/// Random unitary system-environment dynamics with a random initial state
/// (pure when `pure`); the dilation is attached.
ProcessTensor random_process_tensor(int steps, int ds, int de, Rng& rng, bool pure = false);
CausalityReport validate_causality(const ProcessTensor& t, double tol = kDefaultTol);

ControlSequence build_control_sequence(const DensityOperator& rho0_a, const std::vector<QuantumChannel>& actions);
ControlSequence build_control_sequence(const ControlDilation& dil);
/// Memoryless sequence of single-system maps with a trivial ancilla.
ControlSequence product_control_sequence(const std::vector<QuantumChannel>& actions);

/// rho_n = tr_shared{(A^T (x) 1) Upsilon}; the result lives on leg "s".
DensityOperator contract(const ProcessTensor& t, const ControlSequence& a);

enum class ComposeMode { Sequential, Link };
struct SharedLeg {
  std::string first;
  std::string second;
};
/// Sequential: T2 (open input) follows T1 after an intervention slot.
/// Link: T1's final output is wired straight into T2's first input, along with
/// any extra declared leg pairs (e.g. environment carry-over).
ProcessTensor compose_processes(const ProcessTensor& t1, const ProcessTensor& t2, ComposeMode mode,
                                const std::vector<SharedLeg>& extra_shared = {});

ProcessTensor markov_process(const std::vector<QuantumChannel>& channels, const DensityOperator& rho0);
/// Open-input Markov comb (no initial state leg).
ProcessTensor markov_open_process(const std::vector<QuantumChannel>& channels);

/// Circuit simulation of the process with a dilated control sequence, tracing
/// environment and ancilla; the reference used to check contract().
DensityOperator simulate_process(const Dilation& dil, const ControlDilation& ctl);

}  // namespace ptres
