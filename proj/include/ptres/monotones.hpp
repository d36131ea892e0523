#pragma once

#include "ptres/sdp.hpp"
#include "ptres/theories.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ptres {

struct MonotoneReport {
  double value = 0;   // bits, or the dimensionless robustness r
  bool exact = false;
  std::optional<ProcessTensor> witness;  // closest free process or mixing partner
  std::optional<double> dual_bound;
  std::string method;
  std::string note;
  std::vector<NamedValue> diagnostics;
};

/// Sum of block entropies minus the joint entropy of the normalized Choi state.
MonotoneReport non_markovianity(const ProcessTensor& t, double tol = kDefaultTol);

/// Distance to the free set of `theory`. Exact for relative entropy in (q,none)
/// and (none,*); otherwise the best of the structural free candidates, an
/// upper bound.
MonotoneReport distance_to_free_set(const ProcessTensor& t, TheoryId theory, DistanceKind kind,
                                    double tol = kDefaultTol);

enum class Relaxation { ProductSet, MarkovSet, PptEbSet };
Relaxation parse_relaxation(const std::string& s);  // "product", "markov", "ppt-eb"
const char* relaxation_name(Relaxation r);

/// Bipartitions used by the PPT relaxation: inputs|outputs and every single
/// leg, with complementary duplicates removed.
std::vector<std::set<std::string>> ppt_cuts(const ProcessTensor& t);

/// Homogeneous residuals of the comb hierarchy, one Hermitian map per level;
/// they vanish exactly on positive multiples of valid combs with these legs.
std::vector<SdpProblem::LinearMap> hierarchy_maps(const std::vector<Leg>& legs);
std::vector<long> hierarchy_map_dims(const std::vector<Leg>& legs);

/// Global robustness against the PPT relaxation of the free set. Only the
/// convex relaxation is supported; the others raise CapabilityError.
MonotoneReport global_robustness(const ProcessTensor& t, Relaxation rel, double tol = kDefaultTol,
                                 const SdpOptions& opts = {});

/// min over the same relaxed set of Dmax(Upsilon || Xi), in bits.
MonotoneReport dmax_to_free_set(const ProcessTensor& t, Relaxation rel, double tol = kDefaultTol,
                                const SdpOptions& opts = {});

struct Thm3Report {
  double robustness = 0;
  double log_robustness = 0;  // log2(1 + R)
  double dmax = 0;
  double difference = 0;
  double robustness_gap = 0;
  double dmax_gap = 0;
  bool pass = false;
};
Thm3Report thm3_check(const ProcessTensor& t, Relaxation rel, double tol = 1e-4);

enum class AuditMonotone { NonMarkovianity, Robustness };
AuditMonotone parse_audit_monotone(const std::string& s);  // "nonmarkov", "robustness"
const char* audit_monotone_name(AuditMonotone m);

struct AuditTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  double before = 0;
  double after = 0;
  double delta = 0;  // before - after
};
struct AuditFailure {
  AuditTrial trial;
  ProcessTensor input;
  ProcessTensor output;
};
struct AuditReport {
  TheoryId theory;
  AuditMonotone monotone = AuditMonotone::NonMarkovianity;
  int trials = 0;
  int violations = 0;
  double min_delta = 0;
  bool pass = true;
  std::vector<AuditTrial> records;
  std::vector<AuditFailure> failures;
};

struct AuditOptions {
  int steps = 2;
  int ds = 2;
  int de = 2;
  int dz = 1;
  double threshold = -1e-7;
};

/// Random (T, Z) pairs with Z free in `theory`; every trial must not increase
/// the monotone. Supported pairs: (q,none) with nonmarkov, and theories with
/// EB-or-weaker communication with robustness.
AuditReport monotonicity_audit(TheoryId theory, AuditMonotone m, int trials, std::uint64_t seed,
                               const AuditOptions& opts = {});

}  // namespace ptres
