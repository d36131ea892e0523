// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include "test_util.hpp"

#include "ptres/monotones.hpp"
#include "ptres/superprocess.hpp"
#include "ptres/theories.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace ptres;
using namespace ptest;

namespace {

constexpr double kCausalTol = 1e-9;
constexpr double kActionTol = 1e-9;
constexpr double kNmTol = 1e-6;
constexpr double kMarkovNmTol = 1e-9;
constexpr double kAuditThreshold = -1e-7;
constexpr double kRobustTol = 1e-4;
constexpr double kGapTol = 1e-6;
constexpr double kThm3Tol = 1e-4;
constexpr double kTransplantTol = 1e-9;
constexpr double kNonconvexBits = 0.1;
// verdict tolerance for numerically composed samples
constexpr double kMembershipTol = 1e-7;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok && o.pass) o.detail << "first failure: " << what << "; ";
  o.pass = o.pass && ok;
}

ControlSequence random_controls(int steps, int ds, int da, Rng& rng) {
  ControlDilation c;
  c.ds = ds;
  c.da = da;
  c.rho0_a = rng.random_density(da);
  for (int j = 0; j < steps; ++j) c.actions.push_back(random_channel({ds, da}, {ds, da}, 2, rng));
  return build_control_sequence(c);
}

std::vector<QuantumChannel> random_qubit_channels(int n, Rng& rng) {
  std::vector<QuantumChannel> ch;
  for (int j = 0; j < n; ++j) ch.push_back(random_channel({2}, {2}, 1 + rng.uniform_int(0, 2), rng));
  return ch;
}

Mat white_comb(long dim, int outputs_dim) { return Mat::Identity(dim, dim) / static_cast<double>(outputs_dim); }

// 1 -----------------------------------------------------------------------------
void causality(Outcome& o) {
  Rng rng(101);
  double worst = 0;
  int count = 0;
  auto check = [&](const ProcessTensor& t, const std::string& what) {
    auto rep = validate_causality(t, kCausalTol);
    worst = std::max(worst, rep.max_deviation);
    ++count;
    require(o, rep.pass, what);
  };
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 3, de = 1 + k % 3;
    check(random_process_tensor(n, 2, de, rng, k % 2 == 0), "build_process_tensor");
  }
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 3;
    check(markov_process(random_qubit_channels(n, rng), qubit_state(rng.random_density(2))), "markov_process");
  }
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 3;
    std::vector<Mat> taus;
    for (int j = 0; j <= n; ++j) taus.push_back(rng.random_density(2));
    check(primitive_free_process(n, 2, taus), "primitive_free_process");
  }
  auto theories = all_theories();
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 2;
    auto t = random_process_tensor(n, 2, 2, rng);
    auto z = random_free_superprocess(theories[k % 9], n, 2, 1 + k % 2, rng);
    check(left_action(t, z), "left_action");
  }
  for (int k = 0; k < 100; ++k) {
    auto t1 = random_process_tensor(1 + k % 2, 2, 2, rng);
    auto t2 = markov_open_process(random_qubit_channels(1, rng));
    check(compose_processes(t1, t2, k % 2 ? ComposeMode::Link : ComposeMode::Sequential), "compose_processes");
  }
  o.detail << count << " constructions, worst residual " << worst;
}

// 2 -----------------------------------------------------------------------------
void duality(Outcome& o) {
  Rng rng(102);
  auto theories = all_theories();
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    auto t = random_process_tensor(2, 2, 2, rng);
    auto z = random_free_superprocess(theories[k % 9], 2, 2, 1 + k % 2, rng);
    auto a = random_controls(2, 2, 2, rng);
    Mat lhs = contract(left_action(t, z), a).matrix();
    Mat rhs = contract(t, right_action(z, a)).matrix();
    Mat full = full_action(t, z, a).matrix();
    double e = std::max(max_abs(lhs - rhs), max_abs(lhs - full));
    worst = std::max(worst, e);
    require(o, e <= kActionTol, "instance " + std::to_string(k));
  }
  o.detail << "100 instances, worst " << worst;
}

// 3 -----------------------------------------------------------------------------
void choi_paths(Outcome& o) {
  Rng rng(103);
  auto theories = all_theories();
  double worst = 0, worst_choi = 0;
  for (int k = 0; k < 50; ++k) {
    auto t = random_process_tensor(2, 2, 2, rng);
    auto z = random_free_superprocess(theories[k % 9], 2, 2, 1 + k % 2, rng);
    auto circ = left_action(t, z, LeftPath::Circuit);
    auto cont = left_action(t, z, LeftPath::Contraction);
    double e = max_abs_diff(circ.choi(), cont.choi());
    worst = std::max(worst, e);
    require(o, e <= kActionTol, "circuit vs contraction " + std::to_string(k));
    if (z.dz() == 1) {
      double c = max_abs_diff(left_action(t, z, LeftPath::Choi).choi(), cont.choi());
      worst_choi = std::max(worst_choi, c);
      require(o, c <= kActionTol, "choi link vs contraction " + std::to_string(k));
    }
  }
  o.detail << "50 instances, circuit/contraction worst " << worst << ", superprocess-Choi link worst " << worst_choi;
}

// 4 -----------------------------------------------------------------------------
void nm_oracle(Outcome& o) {
  // Explicit 32x32 state over (o0, i0, o1, i1, o2) from the SWAP circuit:
  // o0 and o1 are |0>, i0 reaches o2 through the environment, i1 is discarded.
  std::vector<int> dims(5, 2);
  Mat rho = Mat::Zero(32, 32);
  for (long r = 0; r < 32; ++r)
    for (long c = 0; c < 32; ++c) {
      auto a = digits(r, dims), b = digits(c, dims);
      if (a[0] || b[0] || a[2] || b[2] || a[3] != b[3]) continue;
      if (a[1] == a[4] && b[1] == b[4]) rho(r, c) = 0.25;
    }
  auto marg = [&](std::vector<int> keep) {
    std::vector<bool> drop(5, true);
    for (int k : keep) drop[k] = false;
    return brute_entropy_bits(brute_partial_trace(rho, dims, drop));
  };
  double oracle = marg({0}) + marg({1, 2}) + marg({3, 4}) - brute_entropy_bits(rho);
  auto t = swap_process();
  double lib = non_markovianity(t).value;
  require(o, max_abs(t.normalized() - rho) < 1e-12, "library Choi state differs from the explicit construction");
  require(o, std::abs(oracle - 2) <= kNmTol, "oracle value");
  require(o, std::abs(lib - 2) <= kNmTol, "library value");
  Rng rng(104);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    auto m = markov_process(random_qubit_channels(1 + k % 3, rng), qubit_state(rng.random_density(2)));
    worst = std::max(worst, non_markovianity(m).value);
  }
  require(o, worst < kMarkovNmTol, "Markov value");
  o.detail << "oracle " << oracle << " bits, library " << lib << " bits, max over 50 Markov " << worst;
}

// 5 -----------------------------------------------------------------------------
void monotonicity(Outcome& o) {
  AuditOptions opts;
  opts.threshold = kAuditThreshold;
  auto rep = monotonicity_audit({CommClass::Q, CommClass::None}, AuditMonotone::NonMarkovianity, 100, 105, opts);
  require(o, rep.trials == 100 && rep.violations == 0, "violations");
  o.detail << rep.trials << " trials, " << rep.violations << " violations, min decrease " << rep.min_delta;
}

// 6 -----------------------------------------------------------------------------
void mixture_closure(Outcome& o) {
  Rng rng(106);
  double worst = 0;
  double max_r = 0;
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 2;
    auto ups = random_process_tensor(n, 2, 2, rng);
    auto other = random_process_tensor(n, 2, 1 + k % 3, rng);
    long D = ups.choi().dim();
    Mat theta = 0.5 * other.choi().matrix() + 0.5 * white_comb(D, 1 << (n + 1));
    // smallest r making (1 + r) Theta - Upsilon PSD, plus a random margin
    Eig e = hermitian_eig(theta);
    Mat isq = e.vectors * e.values.cwiseInverse().cwiseSqrt().asDiagonal() * e.vectors.adjoint();
    double lam = hermitian_eig(isq * ups.choi().matrix() * isq).values.maxCoeff();
    double r = std::max(lam - 1, 0.0) * (1 + 1e-9) + 1e-9 + (k % 4) * 0.3 * rng.uniform();
    max_r = std::max(max_r, r);
    Mat delta = ((1 + r) * theta - ups.choi().matrix()) / r;
    auto rep = validate_causality(ProcessTensor(ups.choi().with_matrix(delta), n), kCausalTol);
    worst = std::max(worst, rep.max_deviation);
    require(o, rep.pass, "instance " + std::to_string(k));
  }
  o.detail << "100 decompositions (r up to " << max_r << "), worst residual " << worst;
}

// 7 -----------------------------------------------------------------------------
void robustness_oracle(Outcome& o) {
  auto t = markov_open_process({identity_channel({2})});
  auto r = global_robustness(t, Relaxation::PptEbSet);
  double gap = r.dual_bound ? std::abs(r.value - *r.dual_bound) : 1.0;
  require(o, std::abs(r.value - 1) <= kRobustTol, "value");
  require(o, gap <= kGapTol, "gap");
  require(o, r.witness.has_value(), "witness missing");
  double min_pt = -1;
  if (r.witness) {
    require(o, validate_causality(*r.witness, kCausalTol).pass, "witness is not a valid comb");
    Mat mix = 0.5 * (t.choi().matrix() + r.witness->choi().matrix());
    min_pt = hermitian_eig(partial_transpose(t.choi().with_matrix(mix), {in_leg(0)}).matrix()).values.minCoeff();
    require(o, min_pt >= -kRobustTol, "mixture not PPT");
  }
  o.detail << "R " << r.value << ", gap " << gap << ", min PT eigenvalue of the mixture " << min_pt;
}

// 8 -----------------------------------------------------------------------------
void thm3(Outcome& o) {
  Rng rng(108);
  double worst = 0;
  int n = 0;
  for (int k = 0; k < 20; ++k) {
    auto t = markov_open_process({random_channel({2}, {2}, 1 + k % 3, rng)});
    auto rep = thm3_check(t, Relaxation::PptEbSet, kThm3Tol);
    worst = std::max(worst, rep.difference);
    n += rep.robustness > 1e-3;
    require(o, rep.pass && rep.difference <= kThm3Tol, "instance " + std::to_string(k));
  }
  o.detail << "20 channel combs (" << n << " outside the relaxed set), worst |log2(1+R) - Dmax| " << worst;
}

// 9 -----------------------------------------------------------------------------
void free_sets(Outcome& o) {
  Rng rng(109);
  int inconclusive = 0, total = 0;
  for (auto th : all_theories()) {
    for (int k = 0; k < 50; ++k) {
      std::uint64_t seed = 9000 + 100 * static_cast<int>(th.c_class) * 3 + 100 * static_cast<int>(th.k_class) + k;
      int dz = 1 + k % 2;
      auto s = sample_free_process(th, 2, 2, dz, seed);
      auto v = check_membership(th, s, kMembershipTol);
      ++total;
      inconclusive += v.verdict == Verdict::Inconclusive;
      require(o, v.verdict != Verdict::NotFree, th.name() + " sample " + std::to_string(k) + ": " + v.certificate);
      if (k % 5 == 0) {
        auto z = random_free_superprocess(th, 2, 2, 1, rng);
        auto g = check_membership(th, left_action(s, z), kMembershipTol);
        ++total;
        inconclusive += g.verdict == Verdict::Inconclusive;
        require(o, g.verdict != Verdict::NotFree, th.name() + " golden rule " + std::to_string(k) + ": " + g.certificate);
      }
    }
  }
  o.detail << total << " verdicts over 9 theories, none NotFree (" << inconclusive << " inconclusive)";
}

// 10 ----------------------------------------------------------------------------
void table(Outcome& o) {
  using M = MemoryLength;
  const CommClass N = CommClass::None, E = CommClass::EB, Q = CommClass::Q;
  struct Row {
    TheoryId t;
    MemorySignature s;
  } rows[] = {
      {{N, N}, {M::Zero, M::Zero}},     {{N, E}, {M::Zero, M::Zero}},     {{N, Q}, {M::Zero, M::Zero}},
      {{E, N}, {M::One, M::Zero}},      {{E, E}, {M::Infinite, M::Zero}}, {{E, Q}, {M::Infinite, M::One}},
      {{Q, N}, {M::One, M::One}},       {{Q, E}, {M::Infinite, M::One}},  {{Q, Q}, {M::Infinite, M::Infinite}},
  };
  for (const auto& r : rows) {
    auto s = memory_signature(r.t);
    require(o, s == r.s, r.t.name());
    o.detail << r.t.name() << "=(" << memory_length_name(s.classical) << "," << memory_length_name(s.quantum) << ") ";
  }
}

// 11 ----------------------------------------------------------------------------
void transplant(Outcome& o) {
  Rng rng(111);
  double worst = 0;
  auto fixed = fixed_output_channel(rng.random_density(2), 2);
  for (int k = 0; k < 20; ++k) {
    auto target = random_channel({2}, {2}, 1 + k % 3, rng);
    auto z = transplant_superprocess({CommClass::Q, CommClass::None}, target, 2);
    for (int a = 0; a < 2; ++a) {
      double e = max_abs(intra_step_channel(z, a, fixed).choi().matrix() - target.choi().matrix());
      worst = std::max(worst, e);
      require(o, e <= kTransplantTol, "target " + std::to_string(k));
    }
  }
  int eb_ok = 0;
  for (int k = 0; k < 20; ++k) {
    auto target = random_eb_channel({2}, {2}, 2 + k % 3, rng);
    auto z = transplant_superprocess({CommClass::EB, CommClass::EB}, target, 2);
    auto step = intra_step_channel(z, k % 2, fixed);
    double e = max_abs(step.choi().matrix() - target.choi().matrix());
    worst = std::max(worst, e);
    bool eb = is_entanglement_breaking(step).verdict == Tri::Yes;
    eb_ok += eb;
    require(o, eb && e <= kTransplantTol, "EB target " + std::to_string(k));
  }
  o.detail << "20 targets, worst Choi error " << worst << "; " << eb_ok << "/20 EB outputs certified";
}

// 12 ----------------------------------------------------------------------------
void nonconvexity(Outcome& o) {
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  auto m0 = markov_process({fixed_output_channel(p0, 2), fixed_output_channel(p0, 2)}, qubit_state(p0));
  auto m1 = markov_process({fixed_output_channel(p1, 2), fixed_output_channel(p1, 2)}, qubit_state(p1));
  ProcessTensor mix(m0.choi().with_matrix(0.5 * (m0.choi().matrix() + m1.choi().matrix())), 2);
  double nm = non_markovianity(mix).value;
  require(o, nm > kNonconvexBits, "mixture of Markov processes is Markov");
  require(o, check_membership({CommClass::Q, CommClass::None}, mix).verdict == Verdict::NotFree,
          "mixture not certified NotFree in q,none");
  TheoryId eb{CommClass::EB, CommClass::EB};
  Rng rng(112);
  int notfree = 0;
  for (int k = 0; k < 20; ++k) {
    auto a = sample_free_process(eb, 2, 2, 1 + k % 2, 12000 + 2 * k);
    auto b = sample_free_process(eb, 2, 2, 1, 12001 + 2 * k);
    double w = rng.uniform();
    ProcessTensor m(a.choi().with_matrix(w * a.choi().matrix() + (1 - w) * b.choi().matrix()), 2);
    notfree += check_membership(eb, m, kMembershipTol).verdict == Verdict::NotFree;
  }
  require(o, notfree == 0, "an (eb,eb) mixture was certified NotFree");
  o.detail << "Markov mixture " << nm << " bits; " << notfree << "/20 (eb,eb) mixtures NotFree";
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"causality validity", causality},
      {"duality of superprocess action", duality},
      {"left-action path agreement", choi_paths},
      {"non-Markovianity oracle", nm_oracle},
      {"monotonicity of non-Markovianity", monotonicity},
      {"mixture complement closure", mixture_closure},
      {"robustness oracle", robustness_oracle},
      {"log robustness equals min Dmax", thm3},
      {"free-set consistency", free_sets},
      {"memory signatures", table},
      {"transplantation", transplant},
      {"nonconvexity witness", nonconvexity},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
