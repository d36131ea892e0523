#include "ptres/theories.hpp"

#include <algorithm>
#include <sstream>

namespace ptres {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Free: return "Free";
    case Verdict::NotFree: return "NotFree";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* memory_length_name(MemoryLength m) {
  switch (m) {
    case MemoryLength::Zero: return "0";
    case MemoryLength::One: return "1";
    case MemoryLength::Infinite: return "inf";
  }
  return "?";
}

MemorySignature memory_signature(TheoryId th) {
  using M = MemoryLength;
  switch (th.c_class) {
    case CommClass::None: return {M::Zero, M::Zero};
    case CommClass::EB:
      switch (th.k_class) {
        case CommClass::None: return {M::One, M::Zero};
        case CommClass::EB: return {M::Infinite, M::Zero};
        case CommClass::Q: return {M::Infinite, M::One};
      }
      break;
    case CommClass::Q:
      switch (th.k_class) {
        case CommClass::None: return {M::One, M::One};
        case CommClass::EB: return {M::Infinite, M::One};
        case CommClass::Q: return {M::Infinite, M::Infinite};
      }
      break;
  }
  throw std::logic_error("memory_signature: unknown theory");
}

// ---- structural helpers ------------------------------------------------------

std::vector<std::vector<std::string>> step_blocks(const ProcessTensor& t) {
  std::vector<std::vector<std::string>> b;
  if (t.mode() == InitialMode::StateLeg) b.push_back({out_leg(0)});
  for (int j = 0; j < t.steps(); ++j) b.push_back({in_leg(j), out_leg(j + 1)});
  return b;
}

std::vector<std::vector<std::string>> leg_groups(const ProcessTensor& t) {
  std::vector<std::vector<std::string>> g;
  for (const auto& l : t.choi().legs()) g.push_back({l.name});
  return g;
}

LabeledOperator product_of_marginals(const LabeledOperator& op, const std::vector<std::vector<std::string>>& groups) {
  LabeledOperator p({}, Mat::Identity(1, 1), op.tol());
  for (const auto& g : groups) p = tensor_product(p, keep_legs(op, g));
  return permute_legs(p, op.names());
}

double marginal_information_bits(const LabeledOperator& op, const std::vector<std::vector<std::string>>& groups) {
  double s = -entropy_bits(op.matrix());
  for (const auto& g : groups) s += entropy_bits(keep_legs(op, g).matrix());
  return std::max(0.0, s);
}

LabeledOperator normalized_choi(const ProcessTensor& t) {
  double tr = t.choi().trace().real();
  if (!(tr > 0)) throw DomainError("process tensor has non-positive trace");
  return scaled(t.choi(), 1.0 / tr);
}

PtTest pt_test(const LabeledOperator& op, const std::set<std::string>& flip, const std::string& cut_name) {
  PtTest r;
  r.cut = cut_name;
  Eig e = hermitian_eig(hermitian_part(partial_transpose(op, flip).matrix()));
  r.min_eigenvalue = e.values(0);
  r.witness = e.vectors.col(0);
  return r;
}

QuantumChannel block_channel(const ProcessTensor& t, int j) {
  auto m = keep_legs(t.choi(), {in_leg(j), out_leg(j + 1)});
  int di = t.in_dim(j), dout = t.out_dim(j + 1);
  Mat c = m.matrix() * (static_cast<double>(di) / m.trace().real());
  return QuantumChannel(hermitian_part(c), {di}, {dout}, true, t.choi().tol() * 10);
}

ProcessTensor primitive_free_process(int n, int s_dim, const std::vector<Mat>& taus) {
  if (n < 0) throw std::invalid_argument("primitive_free_process: negative step count");
  if (static_cast<int>(taus.size()) != n + 1) throw LabelingError("primitive_free_process: need n+1 states");
  for (const auto& t : taus) {
    if (t.rows() != s_dim || t.cols() != s_dim) throw LabelingError("primitive_free_process: state dimension mismatch");
    DensityOperator rho(LabeledOperator({Leg{"s", s_dim, Role::Ancilla, 0}}, t));
    if (!rho.unit_trace()) throw DomainError("primitive_free_process: states must have unit trace");
  }
  std::vector<QuantumChannel> ch;
  for (int j = 0; j < n; ++j) ch.push_back(fixed_output_channel(taus[j + 1], s_dim));
  return markov_process(ch, DensityOperator(LabeledOperator({Leg{"s", s_dim, Role::Ancilla, 0}}, taus[0])));
}

ProcessTensor sample_free_process(TheoryId theory, int n, int s_dim, int z_dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Mat> taus;
  for (int j = 0; j <= n; ++j) taus.push_back(rng.random_density(s_dim));
  auto prim = primitive_free_process(n, s_dim, taus);
  auto z = random_free_superprocess(theory, n, s_dim, z_dim, rng);
  return left_action(prim, z, LeftPath::Contraction);
}

// ---- membership ------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << std::scientific << v;
  return o.str();
}

struct Structure {
  double product_residual = 0;
  double markov_residual = 0;
  double leg_information = 0;
  double markov_information = 0;
};

Structure structure_of(const ProcessTensor& t, const LabeledOperator& u) {
  Structure s;
  auto legs = leg_groups(t);
  auto blocks = step_blocks(t);
  s.product_residual = max_abs_diff(u, product_of_marginals(u, legs));
  s.markov_residual = max_abs_diff(u, product_of_marginals(u, blocks));
  s.leg_information = marginal_information_bits(u, legs);
  s.markov_information = marginal_information_bits(u, blocks);
  return s;
}

// Per-block EB verdicts of a Markov comb; the worst one wins.
Tri blocks_eb(const ProcessTensor& t, std::string& cert, std::vector<NamedValue>& dev) {
  Tri worst = Tri::Yes;
  for (int j = 0; j < t.steps(); ++j) {
    auto r = is_entanglement_breaking(block_channel(t, j));
    dev.push_back({"block_" + std::to_string(j + 1) + "_min_pt_eigenvalue", r.min_pt_eigenvalue});
    if (r.verdict == Tri::No) {
      cert = "block {" + in_leg(j) + "," + out_leg(j + 1) + "} is not entanglement breaking: " + r.certificate;
      return Tri::No;
    }
    if (r.verdict == Tri::Inconclusive) {
      worst = Tri::Inconclusive;
      cert = "block {" + in_leg(j) + "," + out_leg(j + 1) + "}: " + r.certificate;
    }
  }
  return worst;
}

// First cut with a negative partial transpose, if any.
bool failing_cut(const LabeledOperator& u, const std::vector<std::pair<std::string, std::set<std::string>>>& cuts,
                 double tol, std::string& cert, std::vector<NamedValue>& dev) {
  bool bad = false;
  for (const auto& [name, flip] : cuts) {
    auto r = pt_test(u, flip, name);
    dev.push_back({"min_pt_eigenvalue[" + name + "]", r.min_eigenvalue});
    if (!bad && r.min_eigenvalue < -tol) {
      bad = true;
      cert = "negative partial transpose across cut " + name + ": eigenvalue " + fmt(r.min_eigenvalue);
    }
  }
  return bad;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

MembershipVerdict check_membership(TheoryId theory, const ProcessTensor& t, double tol) {
  auto rep = validate_causality(t, tol);
  if (!rep.pass)
    throw DomainError("check_membership: not a valid process tensor (max hierarchy deviation " +
                      fmt(rep.max_deviation) + ", min eigenvalue " + fmt(rep.min_eigenvalue) + ")");
  MembershipVerdict v;
  if (theory.c_class == CommClass::Q && theory.k_class == CommClass::Q) {
    v.verdict = Verdict::Free;
    v.certificate = "every valid comb is free in (q,q); hierarchy residual " + fmt(rep.max_deviation);
    v.deviations.push_back({"causality_residual", rep.max_deviation});
    return v;
  }
  LabeledOperator u = normalized_choi(t);
  Structure s = structure_of(t, u);
  v.deviations.push_back({"product_residual", s.product_residual});
  v.deviations.push_back({"markov_residual", s.markov_residual});
  v.deviations.push_back({"leg_mutual_information_bits", s.leg_information});
  v.deviations.push_back({"markov_mutual_information_bits", s.markov_information});
  bool product = s.product_residual <= tol;
  bool markov = s.markov_residual <= tol;

  if (theory.c_class == CommClass::None) {
    if (product) {
      v.verdict = Verdict::Free;
      v.certificate = "product of leg marginals (fixed-output form), residual " + fmt(s.product_residual);
    } else {
      v.verdict = Verdict::NotFree;
      v.certificate = "not a product of leg marginals: residual " + fmt(s.product_residual) + ", " +
                      fmt(s.leg_information) + " bits of leg mutual information";
    }
    return v;
  }

  std::vector<std::string> inputs, outputs;
  for (const auto& l : t.choi().legs()) (is_input(l.role) ? inputs : outputs).push_back(l.name);

  if (theory.k_class == CommClass::None) {
    if (!markov) {
      v.verdict = Verdict::NotFree;
      v.certificate = "Markov residual: " + fmt(s.markov_information) + " bits of mutual information between steps (max deviation " +
                      fmt(s.markov_residual) + ")";
      return v;
    }
    if (theory.c_class == CommClass::Q) {
      v.verdict = Verdict::Free;
      v.certificate = "product of step-block marginals (Markov), residual " + fmt(s.markov_residual);
      return v;
    }
    std::string cert;
    Tri eb = blocks_eb(t, cert, v.deviations);
    v.verdict = eb == Tri::Yes ? Verdict::Free : (eb == Tri::No ? Verdict::NotFree : Verdict::Inconclusive);
    v.certificate = eb == Tri::Yes ? "Markov with entanglement-breaking blocks" : cert;
    return v;
  }

  // Separability-bounded sets: necessary PT conditions first.
  std::vector<std::pair<std::string, std::set<std::string>>> cuts;
  std::string why_free;
  bool free_form = false;
  if (theory.c_class == CommClass::EB && theory.k_class == CommClass::EB) {
    cuts.push_back({"inputs|outputs", std::set<std::string>(inputs.begin(), inputs.end())});
    for (const auto& l : t.choi().legs()) cuts.push_back({l.name + "|rest", {l.name}});
  } else if (theory.c_class == CommClass::Q) {  // (q,eb): entanglement-free memory
    auto blocks = step_blocks(t);
    std::set<std::string> past;
    for (size_t b = 0; b + 1 < blocks.size(); ++b) {
      for (const auto& n : blocks[b]) past.insert(n);
      cuts.push_back({"steps<=" + join(blocks[b]) + "|later", past});
    }
  } else {  // (eb,q): single-step quantum memory
    int n = t.steps();
    for (int j = 0; j < n; ++j) {
      std::set<std::string> g;
      if (t.choi().has_leg(out_leg(j))) g.insert(out_leg(j));
      g.insert(in_leg(j));
      cuts.push_back({"{" + join(std::vector<std::string>(g.begin(), g.end())) + "}|rest", g});
    }
    cuts.push_back({"{" + out_leg(n) + "}|rest", {out_leg(n)}});
  }
  std::string cert;
  if (failing_cut(u, cuts, tol, cert, v.deviations)) {
    v.verdict = Verdict::NotFree;
    v.certificate = cert;
    return v;
  }
  if (product) {
    free_form = true;
    why_free = "product of leg marginals";
  } else if (markov && theory.c_class == CommClass::Q) {
    free_form = true;
    why_free = "Markov decomposition (free since (q,none) is contained in (q,eb))";
  } else if (markov) {
    std::string c2;
    std::vector<NamedValue> d2;
    if (blocks_eb(t, c2, d2) == Tri::Yes) {
      free_form = true;
      why_free = "Markov decomposition with entanglement-breaking blocks";
    }
  }
  if (free_form) {
    v.verdict = Verdict::Free;
    v.certificate = why_free;
  } else {
    v.verdict = Verdict::Inconclusive;
    v.certificate = "all necessary partial-transpose conditions hold; no explicit decomposition found";
  }
  return v;
}

}  // namespace ptres
