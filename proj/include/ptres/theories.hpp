#pragma once

#include "ptres/combs.hpp"
#include "ptres/superprocess.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace ptres {

enum class Verdict { Free, NotFree, Inconclusive };
const char* verdict_name(Verdict v);

struct NamedValue {
  std::string name;
  double value = 0;
};

struct MembershipVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::string certificate;
  std::vector<NamedValue> deviations;
};

enum class MemoryLength { Zero, One, Infinite };
const char* memory_length_name(MemoryLength m);  // "0", "1", "inf"

struct MemorySignature {
  MemoryLength classical = MemoryLength::Zero;
  MemoryLength quantum = MemoryLength::Zero;
  bool operator==(const MemorySignature& o) const { return classical == o.classical && quantum == o.quantum; }
};
MemorySignature memory_signature(TheoryId theory);

/// Uncorrelated fixed-output process: taus[0] on o0, then taus[j+1] emitted at
/// step j+1 regardless of the input.
ProcessTensor primitive_free_process(int n, int s_dim, const std::vector<Mat>& taus);

/// Left action of a random class-respecting superprocess on a primitive with
/// random states.
ProcessTensor sample_free_process(TheoryId theory, int n, int s_dim, int z_dim, std::uint64_t seed);

MembershipVerdict check_membership(TheoryId theory, const ProcessTensor& t, double tol = kDefaultTol);

// ---- structural helpers shared with the monotones --------------------------

/// {o0}, {i0, o1}, ..., {i_{n-1}, o_n} (the first block is absent for open input).
std::vector<std::vector<std::string>> step_blocks(const ProcessTensor& t);
/// One group per leg.
std::vector<std::vector<std::string>> leg_groups(const ProcessTensor& t);

/// Tensor product of the marginals of `op` on each group, in op's leg order.
LabeledOperator product_of_marginals(const LabeledOperator& op, const std::vector<std::vector<std::string>>& groups);

/// sum_g S(marginal_g) - S(op), in bits, for a normalized op.
double marginal_information_bits(const LabeledOperator& op, const std::vector<std::vector<std::string>>& groups);

/// Normalized Choi state with unit trace.
LabeledOperator normalized_choi(const ProcessTensor& t);

struct PtTest {
  std::string cut;
  double min_eigenvalue = 0;
  Vec witness;
};
/// Smallest eigenvalue of the partial transpose of op over `flip`.
PtTest pt_test(const LabeledOperator& op, const std::set<std::string>& flip, const std::string& cut_name);

/// The channel carried by block {i_j, o_{j+1}} of a Markov comb.
QuantumChannel block_channel(const ProcessTensor& t, int j);

}  // namespace ptres
