#pragma once

#include "ptres/channels.hpp"
#include "ptres/combs.hpp"
#include "ptres/random.hpp"

#include <string>
#include <vector>

namespace ptres {

struct TheoryId {
  CommClass c_class = CommClass::Q;
  CommClass k_class = CommClass::Q;

  bool operator==(const TheoryId& o) const { return c_class == o.c_class && k_class == o.k_class; }
  std::string name() const;  // "q,none"
};
/// Parses "C,K" with C, K in {none, eb, q}.
TheoryId parse_theory(const std::string& s);
std::vector<TheoryId> all_theories();

/// Dilated superprocess on three wires: process side s, memory z, client
/// side sp (same dimension as s). One step alpha runs
///   W_alpha -> (K_alpha on z,s  ||  client on sp) -> V_alpha -> (E on s,e  ||  C_alpha on z,sp) -> W_alpha+1
/// and after W_n the transformed process emits its last output on s.
struct SuperprocessComponents {
  int steps = 1;
  int ds = 2;
  int dz = 1;
  Mat ancilla;                    // on (z, sp)
  std::vector<QuantumChannel> V;  // steps maps on (s, z, sp)
  std::vector<QuantumChannel> W;  // steps + 1 maps on (s, z, sp)
  std::vector<QuantumChannel> C;  // steps maps on (z, sp)
  std::vector<QuantumChannel> K;  // steps maps on (z, s)
};

class Superprocess {
 public:
  Superprocess(TheoryId theory, SuperprocessComponents comp);

  const TheoryId& theory() const { return theory_; }
  const SuperprocessComponents& components() const { return c_; }
  int steps() const { return c_.steps; }
  int ds() const { return c_.ds; }
  int dz() const { return c_.dz; }

 private:
  TheoryId theory_;
  SuperprocessComponents c_;
};

/// Validates dimensions, CPTP-ness and the class of every C and K slot.
Superprocess build_superprocess(TheoryId theory, SuperprocessComponents comp);

/// Leaves any process unchanged; free in every theory.
Superprocess identity_superprocess(int steps, int ds);

/// Every step of the transformed process becomes `targets[alpha]` acting on
/// the client wire and z (target legs ordered (system, z)).
Superprocess transplant_superprocess(TheoryId theory, const std::vector<QuantumChannel>& targets, int beta = 0);
Superprocess transplant_superprocess(TheoryId theory, const QuantumChannel& target, int steps, int beta = 0);

/// Random class-respecting superprocess: Haar-dilated V, W and comm maps
/// sampled from their classes.
Superprocess random_free_superprocess(TheoryId theory, int steps, int ds, int dz, Rng& rng);

/// The superprocess whose left action is Z2 applied after Z1. Its memory wire
/// is z1 (x) sp1 (x) z2.
Superprocess compose_superprocesses(const Superprocess& z1, const Superprocess& z2);

enum class LeftPath { Circuit, Choi, Contraction };
const char* left_path_name(LeftPath p);

/// [T|Z. Circuit needs T's dilation; Choi links T with superprocess_choi(Z);
/// Contraction feeds the wires of Z through T's Choi operator step by step.
ProcessTensor left_action(const ProcessTensor& t, const Superprocess& z, LeftPath path = LeftPath::Contraction);

/// Z|A'] as a control sequence on the process legs, with a final map o_n -> out.
ControlSequence right_action(const Superprocess& z, const ControlSequence& a);

/// [T|Z|A'] on leg "s".
DensityOperator full_action(const ProcessTensor& t, const Superprocess& z, const ControlSequence& a);

/// Choi operator of Z over process legs o_j, i_j and client legs o_j', i_j'.
/// It is itself a comb with blocks {o_a, o_a'} and {i_a', i_a} in that order.
LabeledOperator superprocess_choi(const Superprocess& z);

std::string primed(const std::string& name);

/// Step alpha as seen by the client: the map on (client wire, z) from the
/// input of V_alpha to the output of W_alpha+1, with a process step `e` on s
/// and s entering V_alpha in |0>. For the last step the client wire is
/// read on s, where the transformed process emits its final output.
QuantumChannel intra_step_channel(const Superprocess& z, int alpha, const QuantumChannel& e);

}  // namespace ptres
