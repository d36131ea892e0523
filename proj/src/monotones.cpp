#include "ptres/monotones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace ptres {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << std::scientific << v;
  return o.str();
}

void require_valid(const ProcessTensor& t, double tol, const char* who) {
  auto rep = validate_causality(t, tol);
  if (!rep.pass)
    throw DomainError(std::string(who) + ": not a valid process tensor (hierarchy deviation " + fmt(rep.max_deviation) +
                      ", min eigenvalue " + fmt(rep.min_eigenvalue) + ")");
}

ProcessTensor like(const ProcessTensor& t, const LabeledOperator& normalized) {
  double w = static_cast<double>(t.input_weight());
  LabeledOperator op = scaled(normalized, w);
  return ProcessTensor(op.with_matrix(hermitian_part(op.matrix())), t.steps(), t.mode());
}

struct Level {
  int step = 0;
  std::set<std::string> ins, outs;
  std::vector<Leg> in_legs;
  long din = 1;
};

// Descending by step.
std::vector<Level> levels_of(const std::vector<Leg>& legs) {
  std::map<int, Level> by;
  for (const auto& l : legs) {
    if (l.role == Role::Ancilla) throw LabelingError("comb has an ancilla leg '" + l.name + "'");
    Level& v = by[l.step];
    v.step = l.step;
    if (is_input(l.role)) {
      v.ins.insert(l.name);
      v.in_legs.push_back(l);
      v.din *= l.dim;
    } else {
      v.outs.insert(l.name);
    }
  }
  std::vector<Level> out;
  for (auto it = by.rbegin(); it != by.rend(); ++it) out.push_back(it->second);
  return out;
}

}  // namespace

// ---- non-Markovianity and distances ---------------------------------------------

MonotoneReport non_markovianity(const ProcessTensor& t, double tol) {
  require_valid(t, tol, "non_markovianity");
  LabeledOperator u = normalized_choi(t);
  auto blocks = step_blocks(t);
  MonotoneReport r;
  r.value = marginal_information_bits(u, blocks);
  r.exact = true;
  r.method = "block-marginal relative entropy";
  r.witness = like(t, product_of_marginals(u, blocks));
  r.note = "closest Markov process is the product of step-block marginals";
  return r;
}

MonotoneReport distance_to_free_set(const ProcessTensor& t, TheoryId theory, DistanceKind kind, double tol) {
  require_valid(t, tol, "distance_to_free_set");
  MonotoneReport r;
  r.method = "structural free candidates";
  auto own = check_membership(theory, t, std::max(tol, 1e-8));
  if (own.verdict == Verdict::Free) {
    r.value = 0;
    r.exact = true;
    r.witness = t;
    r.note = "process is itself free: " + own.certificate;
    return r;
  }
  LabeledOperator u = normalized_choi(t);
  DensityOperator du(u.with_matrix(hermitian_part(u.matrix())));
  struct Cand {
    std::string name;
    LabeledOperator op;
    bool minimizer;  // the relative-entropy minimizer over a superset of the free set
  };
  std::vector<Cand> cands;
  bool re = kind == DistanceKind::RelativeEntropy;
  cands.push_back({"product of leg marginals", product_of_marginals(u, leg_groups(t)), re && theory.c_class == CommClass::None});
  if (theory.c_class != CommClass::None) {
    LabeledOperator mk = product_of_marginals(u, step_blocks(t));
    bool mk_free = theory.c_class == CommClass::Q;
    if (!mk_free) mk_free = check_membership(TheoryId{CommClass::EB, CommClass::None}, like(t, mk), 1e-8).verdict == Verdict::Free;
    bool contained = theory.k_class == CommClass::None;  // free set sits inside the Markov set
    if (mk_free) cands.push_back({"product of step-block marginals", mk, re && contained});
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    double v = distance(du, DensityOperator(c.op.with_matrix(hermitian_part(c.op.matrix()))), kind, tol).value;
    r.diagnostics.push_back({c.name, v});
    if (v < best || (v == best && c.minimizer)) {
      best = v;
      r.exact = c.minimizer;
      r.witness = like(t, c.op);
      r.note = c.name;
    }
  }
  r.value = std::max(0.0, best);
  if (!r.exact) r.note += " (upper bound)";
  return r;
}

// ---- relaxed free set ----------------------------------------------------------------

Relaxation parse_relaxation(const std::string& s) {
  if (s == "product") return Relaxation::ProductSet;
  if (s == "markov") return Relaxation::MarkovSet;
  if (s == "ppt-eb" || s == "ppt") return Relaxation::PptEbSet;
  throw std::invalid_argument("unknown relaxation '" + s + "' (expected product, markov or ppt-eb)");
}

const char* relaxation_name(Relaxation r) {
  switch (r) {
    case Relaxation::ProductSet: return "product";
    case Relaxation::MarkovSet: return "markov";
    case Relaxation::PptEbSet: return "ppt-eb";
  }
  return "?";
}

std::vector<std::set<std::string>> ppt_cuts(const ProcessTensor& t) {
  const auto& legs = t.choi().legs();
  std::set<std::string> all;
  for (const auto& l : legs) all.insert(l.name);
  std::vector<std::set<std::string>> candidates;
  std::set<std::string> ins;
  for (const auto& l : legs)
    if (is_input(l.role)) ins.insert(l.name);
  candidates.push_back(ins);
  for (const auto& l : legs) candidates.push_back({l.name});
  // a cut and its complement give the same spectrum; keep the side without the first leg
  std::set<std::set<std::string>> seen;
  std::vector<std::set<std::string>> out;
  const std::string& first = legs.front().name;
  for (auto c : candidates) {
    if (c.empty() || c.size() == all.size()) continue;
    if (c.count(first)) {
      std::set<std::string> comp;
      for (const auto& n : all)
        if (!c.count(n)) comp.insert(n);
      c = comp;
    }
    if (seen.insert(c).second) out.push_back(c);
  }
  return out;
}

std::vector<SdpProblem::LinearMap> hierarchy_maps(const std::vector<Leg>& legs) {
  auto lv = levels_of(legs);
  std::vector<SdpProblem::LinearMap> maps;
  for (size_t q = 0; q < lv.size(); ++q) {
    if (lv[q].ins.empty()) continue;
    maps.push_back([legs, lv, q](const Mat& x) -> Mat {
      LabeledOperator cur(legs, x);
      for (size_t p = 0;; ++p) {
        LabeledOperator t = partial_trace(cur, lv[p].outs);
        LabeledOperator lower = lv[p].ins.empty() ? t : scaled(partial_trace(t, lv[p].ins), 1.0 / lv[p].din);
        if (p == q) {
          LabeledOperator full = permute_legs(tensor_product(lower, identity_op(lv[p].in_legs)), t.names());
          return t.matrix() - full.matrix();
        }
        cur = lower;
      }
    });
  }
  return maps;
}

std::vector<long> hierarchy_map_dims(const std::vector<Leg>& legs) {
  auto lv = levels_of(legs);
  std::vector<long> dims;
  for (size_t q = 0; q < lv.size(); ++q) {
    long d = 1;
    for (const auto& l : legs)
      if (l.step <= lv[q].step && !lv[q].outs.count(l.name)) d *= l.dim;
    if (!lv[q].ins.empty()) dims.push_back(d);
  }
  return dims;
}

namespace {

void require_convex(Relaxation rel, const char* who) {
  if (rel != Relaxation::PptEbSet)
    throw CapabilityError(std::string(who) + ": the " + relaxation_name(rel) +
                          " free set is not convex; only the ppt-eb relaxation is supported");
}

SdpProblem::LinearMap pt_map(const std::vector<Leg>& legs, const std::set<std::string>& cut, double sign) {
  return [legs, cut, sign](const Mat& x) -> Mat { return sign * partial_transpose(LabeledOperator(legs, x), cut).matrix(); };
}

SdpProblem::LinearMap id_map(double sign) {
  return [sign](const Mat& x) -> Mat { return sign * x; };
}

void add_hierarchy(SdpProblem& p, int block, const std::vector<Leg>& legs) {
  auto maps = hierarchy_maps(legs);
  auto dims = hierarchy_map_dims(legs);
  for (size_t k = 0; k < maps.size(); ++k) p.add_map_equality({{block, maps[k]}}, Mat::Zero(dims[k], dims[k]));
}

std::string cut_name(const std::set<std::string>& c) {
  std::string s = "{";
  for (const auto& n : c) s += (s.size() > 1 ? "," : "") + n;
  return s + "}";
}

void require_solved(const SdpResult& r, const char* who) {
  if (r.status != SdpStatus::Optimal)
    throw NumericalError(std::string(who) + ": SDP " + sdp_status_name(r.status) + " after " +
                         std::to_string(r.iterations) + " iterations (gap " + fmt(r.gap) + ", primal residual " +
                         fmt(r.primal_residual) + ", dual residual " + fmt(r.dual_residual) + ")");
}

bool relaxation_exact(const ProcessTensor& t, const std::vector<std::set<std::string>>& cuts) {
  if (cuts.size() != 1) return false;
  long a = 1, b = 1;
  for (const auto& l : t.choi().legs()) (cuts[0].count(l.name) ? a : b) *= l.dim;
  return a * b <= 6;
}

const char* kRelaxNote =
    "PPT relaxation of the entanglement-breaking free set: a lower bound on the true value, exact for a single 2x2 or 2x3 cut";

}  // namespace

MonotoneReport global_robustness(const ProcessTensor& t, Relaxation rel, double tol, const SdpOptions& opts) {
  require_convex(rel, "global_robustness");
  require_valid(t, tol, "global_robustness");
  const auto& legs = t.choi().legs();
  const long d = t.choi().dim();
  const double w = static_cast<double>(t.input_weight());
  const Mat& ups = t.choi().matrix();
  auto cuts = ppt_cuts(t);

  SdpProblem p;
  int g = p.add_block(d);
  p.set_objective(g, Mat::Identity(d, d) / w);
  add_hierarchy(p, g, legs);
  for (const auto& c : cuts) {
    int s = p.add_block(d);
    p.add_map_equality({{s, id_map(1.0)}, {g, pt_map(legs, c, -1.0)}},
                       partial_transpose(t.choi(), c).matrix());
  }
  SdpResult res = solve_sdp(p, opts);
  require_solved(res, "global_robustness");

  MonotoneReport r;
  r.value = std::max(0.0, res.primal_value);
  r.dual_bound = res.dual_value;
  r.exact = relaxation_exact(t, cuts);
  r.method = "SDP over valid combs with PSD partial transposes";
  r.note = kRelaxNote;
  r.diagnostics.push_back({"sdp_gap", res.gap});
  r.diagnostics.push_back({"sdp_primal_residual", res.primal_residual});
  r.diagnostics.push_back({"sdp_dual_residual", res.dual_residual});
  r.diagnostics.push_back({"sdp_iterations", static_cast<double>(res.iterations)});
  if (r.value > 1e-7) {
    Mat gam = hermitian_part(res.X[g]) / r.value;
    ProcessTensor partner(LabeledOperator(legs, gam, 1e-6), t.steps(), t.mode());
    r.witness = partner;
    Mat mix = (ups + r.value * gam) / (1 + r.value);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : cuts) {
      double e = min_eigenvalue(hermitian_part(partial_transpose(LabeledOperator(legs, mix, 1e-6), c).matrix()));
      r.diagnostics.push_back({"mixture_min_pt_eigenvalue" + cut_name(c), e});
      worst = std::min(worst, e);
    }
    r.diagnostics.push_back({"mixture_min_pt_eigenvalue", worst});
    r.diagnostics.push_back({"witness_causality_residual", validate_causality(partner, 1.0).max_deviation});
  } else {
    r.witness = t;
  }
  return r;
}

MonotoneReport dmax_to_free_set(const ProcessTensor& t, Relaxation rel, double tol, const SdpOptions& opts) {
  require_convex(rel, "dmax_to_free_set");
  require_valid(t, tol, "dmax_to_free_set");
  const auto& legs = t.choi().legs();
  const long d = t.choi().dim();
  const double w = static_cast<double>(t.input_weight());
  const Mat& ups = t.choi().matrix();
  auto cuts = ppt_cuts(t);

  // lambda * Xi as one variable; its slack above Upsilon is a second cone
  SdpProblem p;
  int xi = p.add_block(d);
  int sl = p.add_block(d);
  p.set_objective(xi, Mat::Identity(d, d) / w);
  p.add_map_equality({{sl, id_map(1.0)}, {xi, id_map(-1.0)}}, -ups);
  add_hierarchy(p, xi, legs);
  for (const auto& c : cuts) {
    int q = p.add_block(d);
    p.add_map_equality({{q, id_map(1.0)}, {xi, pt_map(legs, c, -1.0)}}, Mat::Zero(d, d));
  }
  SdpResult res = solve_sdp(p, opts);
  require_solved(res, "dmax_to_free_set");

  double lambda = std::max(1.0, res.primal_value);
  MonotoneReport r;
  r.value = std::log2(lambda);
  if (res.dual_value > 0) r.dual_bound = std::log2(std::max(1.0, res.dual_value));
  r.exact = relaxation_exact(t, cuts);
  r.method = "SDP: min lambda with lambda*Xi - Upsilon PSD, Xi in the relaxed free set";
  r.note = kRelaxNote;
  r.diagnostics.push_back({"lambda", res.primal_value});
  r.diagnostics.push_back({"sdp_gap", res.gap});
  r.diagnostics.push_back({"sdp_primal_residual", res.primal_residual});
  r.diagnostics.push_back({"sdp_dual_residual", res.dual_residual});
  Mat xin = hermitian_part(res.X[xi]) / res.primal_value;
  ProcessTensor closest(LabeledOperator(legs, xin, 1e-6), t.steps(), t.mode());
  r.witness = closest;
  // spectral re-evaluation of Dmax against the returned free point
  r.diagnostics.push_back({"dmax_to_witness_bits", dmax_bits(ups / w, xin / w, 1e-7)});
  return r;
}

Thm3Report thm3_check(const ProcessTensor& t, Relaxation rel, double tol) {
  Thm3Report r;
  auto rob = global_robustness(t, rel);
  auto dm = dmax_to_free_set(t, rel);
  r.robustness = rob.value;
  r.log_robustness = std::log2(1 + rob.value);
  r.dmax = dm.value;
  r.difference = std::abs(r.log_robustness - r.dmax);
  for (const auto& d : rob.diagnostics)
    if (d.name == "sdp_gap") r.robustness_gap = d.value;
  for (const auto& d : dm.diagnostics)
    if (d.name == "sdp_gap") r.dmax_gap = d.value;
  r.pass = r.difference <= tol;
  return r;
}

// ---- audits ----------------------------------------------------------------------

AuditMonotone parse_audit_monotone(const std::string& s) {
  if (s == "nonmarkov") return AuditMonotone::NonMarkovianity;
  if (s == "robustness") return AuditMonotone::Robustness;
  throw std::invalid_argument("unknown audit monotone '" + s + "' (expected nonmarkov or robustness)");
}

const char* audit_monotone_name(AuditMonotone m) {
  return m == AuditMonotone::NonMarkovianity ? "nonmarkov" : "robustness";
}

AuditReport monotonicity_audit(TheoryId theory, AuditMonotone m, int trials, std::uint64_t seed,
                               const AuditOptions& opts) {
  if (m == AuditMonotone::NonMarkovianity && theory.k_class != CommClass::None)
    throw CapabilityError("monotonicity_audit: non-Markovianity is a monotone only when K carries no memory (k = none)");
  if (m == AuditMonotone::Robustness && (theory.c_class == CommClass::Q || theory.k_class == CommClass::Q))
    throw CapabilityError("monotonicity_audit: robustness audits need EB-or-weaker communication maps");
  AuditReport rep;
  rep.theory = theory;
  rep.monotone = m;
  rep.trials = trials;
  rep.min_delta = std::numeric_limits<double>::infinity();
  Rng master(seed);
  auto eval = [&](const ProcessTensor& x) {
    return m == AuditMonotone::NonMarkovianity ? non_markovianity(x, 1e-8).value
                                               : global_robustness(x, Relaxation::PptEbSet, 1e-8).value;
  };
  for (int k = 0; k < trials; ++k) {
    AuditTrial tr;
    tr.trial = k;
    tr.seed = master.next_seed();
    Rng rng(tr.seed);
    ProcessTensor t = random_process_tensor(opts.steps, opts.ds, opts.de, rng);
    Superprocess z = random_free_superprocess(theory, opts.steps, opts.ds, opts.dz, rng);
    ProcessTensor out = left_action(t, z);
    tr.before = eval(t);
    tr.after = eval(out);
    tr.delta = tr.before - tr.after;
    rep.min_delta = std::min(rep.min_delta, tr.delta);
    if (tr.delta < opts.threshold) {
      ++rep.violations;
      rep.failures.push_back({tr, t, out});
    }
    rep.records.push_back(tr);
  }
  if (trials == 0) rep.min_delta = 0;
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace ptres
