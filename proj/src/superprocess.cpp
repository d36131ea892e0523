#include "ptres/superprocess.hpp"

#include <algorithm>
#include <map>

#include <unsupported/Eigen/KroneckerProduct>

namespace ptres {

std::string TheoryId::name() const {
  return std::string(comm_class_name(c_class)) + "," + comm_class_name(k_class);
}

TheoryId parse_theory(const std::string& s) {
  auto p = s.find(',');
  if (p == std::string::npos) throw std::invalid_argument("theory must be written C,K (e.g. q,none)");
  return {parse_comm_class(s.substr(0, p)), parse_comm_class(s.substr(p + 1))};
}

std::vector<TheoryId> all_theories() {
  std::vector<TheoryId> v;
  for (auto c : {CommClass::None, CommClass::EB, CommClass::Q})
    for (auto k : {CommClass::None, CommClass::EB, CommClass::Q}) v.push_back({c, k});
  return v;
}

const char* left_path_name(LeftPath p) {
  switch (p) {
    case LeftPath::Circuit: return "circuit";
    case LeftPath::Choi: return "choi";
    case LeftPath::Contraction: return "contraction";
  }
  return "?";
}

std::string primed(const std::string& name) { return name + "'"; }

namespace {

Leg anc(const std::string& name, int dim) { return {name, dim, Role::Ancilla, 0}; }

LabeledOperator relabel(const LabeledOperator& x, const std::string& from, Leg to) {
  to.dim = x.leg(from).dim;
  return relabel_legs(x, {{from, to}});
}

LabeledOperator apply3(const LabeledOperator& x, const QuantumChannel& ch) { return apply_on(x, ch, {"s", "z", "sp"}); }

Mat ket0(int d) {
  Mat m = Mat::Zero(d, d);
  m(0, 0) = 1;
  return m;
}

Role out_role(int j) { return j == 0 ? Role::StateOutput : Role::CombOutput; }

// Client-facing legs carry primed names while the process legs are alive.
Leg client_out(int j, int d) { return {primed(out_leg(j)), d, out_role(j), j}; }
Leg client_in(int j, int d) { return {primed(in_leg(j)), d, Role::CombInput, j + 1}; }

LabeledOperator emit_to_client(const LabeledOperator& x, int alpha, int d) {
  auto y = relabel(x, "sp", client_out(alpha, d));
  return tensor_product(y, max_entangled(client_in(alpha, d), anc("sp", d)));
}

ProcessTensor finish_client(const LabeledOperator& x, int n) {
  std::map<std::string, Leg> m;
  for (const auto& l : x.legs()) {
    for (int j = 0; j <= n; ++j) {
      if (l.name == primed(out_leg(j))) m[l.name] = Leg{out_leg(j), l.dim, out_role(j), j};
      if (j < n && l.name == primed(in_leg(j))) m[l.name] = Leg{in_leg(j), l.dim, Role::CombInput, j + 1};
    }
  }
  auto y = relabel_legs(x, m);
  return ProcessTensor(canonicalize(y.with_matrix(hermitian_part(y.matrix()))), n, InitialMode::StateLeg);
}

void check_process(const ProcessTensor& t, const Superprocess& z) {
  if (t.mode() != InitialMode::StateLeg) throw LabelingError("superprocess action: process needs an initial state leg");
  if (t.has_extra_legs()) throw LabelingError("superprocess action: process has legs beyond the system wires");
  if (t.steps() != z.steps()) throw LabelingError("superprocess action: step counts differ");
  for (const auto& l : t.choi().legs())
    if (l.dim != z.ds()) throw LabelingError("superprocess action: leg '" + l.name + "' does not match the system dimension");
}

void check_dims(const QuantumChannel& ch, const std::vector<int>& dims, const std::string& what) {
  if (ch.in_dims() != dims || ch.out_dims() != dims) throw LabelingError("superprocess: " + what + " has wrong dimensions");
  if (!ch.trace_preserving()) throw DomainError("superprocess: " + what + " is not trace preserving");
}

CommClass class_max(CommClass a, CommClass b) { return class_le(a, b) ? b : a; }

QuantumChannel flatten(const QuantumChannel& ch, std::vector<int> in_dims, std::vector<int> out_dims) {
  QuantumChannel c(ch.choi().matrix(), std::move(in_dims), std::move(out_dims), ch.trace_preserving(), ch.choi().tol());
  if (ch.measure_prepare()) c = c.with_measure_prepare(*ch.measure_prepare());
  return c;
}

}  // namespace

// ---- construction -------------------------------------------------------------

Superprocess::Superprocess(TheoryId theory, SuperprocessComponents comp) : theory_(theory), c_(std::move(comp)) {
  int n = c_.steps, d = c_.ds, dz = c_.dz;
  if (n < 1 || d < 1 || dz < 1) throw LabelingError("superprocess: steps and dimensions must be positive");
  if (static_cast<int>(c_.V.size()) != n || static_cast<int>(c_.W.size()) != n + 1 ||
      static_cast<int>(c_.C.size()) != n || static_cast<int>(c_.K.size()) != n)
    throw LabelingError("superprocess: need n pre-maps, n+1 post-maps and n maps in each communication slot");
  for (int a = 0; a < n; ++a) check_dims(c_.V[a], {d, dz, d}, "V" + std::to_string(a));
  for (int a = 0; a <= n; ++a) check_dims(c_.W[a], {d, dz, d}, "W" + std::to_string(a));
  for (int a = 0; a < n; ++a) {
    check_dims(c_.C[a], {dz, d}, "C" + std::to_string(a));
    check_dims(c_.K[a], {dz, d}, "K" + std::to_string(a));
  }
  if (c_.ancilla.rows() != static_cast<long>(dz) * d || c_.ancilla.cols() != c_.ancilla.rows())
    throw LabelingError("superprocess: ancilla state must live on z (x) sp");
  DensityOperator rho(LabeledOperator({anc("z", dz), anc("sp", d)}, c_.ancilla));
  if (!rho.unit_trace()) throw DomainError("superprocess: ancilla state must have unit trace");
  for (int a = 0; a < n; ++a) {
    auto cc = check_class(c_.C[a], theory_.c_class);
    if (!cc.ok)
      throw ConstraintError("C" + std::to_string(a) + " violates class " + comm_class_name(theory_.c_class) + ": " +
                            cc.certificate);
    auto kk = check_class(c_.K[a], theory_.k_class);
    if (!kk.ok)
      throw ConstraintError("K" + std::to_string(a) + " violates class " + comm_class_name(theory_.k_class) + ": " +
                            kk.certificate);
  }
}

Superprocess build_superprocess(TheoryId theory, SuperprocessComponents comp) {
  return Superprocess(theory, std::move(comp));
}

Superprocess identity_superprocess(int steps, int ds) {
  SuperprocessComponents c;
  c.steps = steps;
  c.ds = ds;
  c.dz = 1;
  c.ancilla = ket0(ds);
  std::vector<int> dims{ds, 1, ds};
  auto swap = permutation_channel(dims, {2, 1, 0});
  for (int a = 0; a < steps; ++a) {
    c.V.push_back(swap);
    c.W.push_back(swap);
    c.C.push_back(fixed_output_channel(ket0(ds), {1, ds}, {1, ds}));
    c.K.push_back(fixed_output_channel(ket0(ds), {1, ds}, {1, ds}));
  }
  c.W.push_back(identity_channel(dims));
  return Superprocess({CommClass::None, CommClass::None}, std::move(c));
}

Superprocess transplant_superprocess(TheoryId theory, const std::vector<QuantumChannel>& targets, int beta) {
  if (targets.empty()) throw LabelingError("transplant: no targets");
  if (theory.c_class == CommClass::None)
    throw ConstraintError("transplant: the C slot carries the target, so the theory needs c-class eb or q");
  std::vector<QuantumChannel> tg;
  for (const auto& t : targets) {
    if (t.in_dims().size() == 1) tg.push_back(flatten(t, {t.d_in(), 1}, {t.d_out(), 1}));
    else tg.push_back(t);
  }
  int d = tg.front().in_dims()[0], dz = tg.front().in_dims()[1];
  for (size_t a = 0; a < tg.size(); ++a) {
    if (tg[a].in_dims() != std::vector<int>{d, dz} || tg[a].out_dims() != std::vector<int>{d, dz})
      throw LabelingError("transplant: every target must act on (system, z) with equal dimensions");
    if (theory.c_class == CommClass::EB) {
      auto r = is_entanglement_breaking(tg[a]);
      if (r.verdict != Tri::Yes)
        throw ConstraintError("transplant: target " + std::to_string(a) + " is not certified entanglement breaking: " +
                              r.certificate);
    }
  }
  if (beta < 0 || beta >= d) throw std::out_of_range("transplant: beta out of range");
  int n = static_cast<int>(tg.size());
  SuperprocessComponents c;
  c.steps = n;
  c.ds = d;
  c.dz = dz;
  c.ancilla = ket0(dz * d);
  std::vector<int> dims{d, dz, d};
  Mat b = Mat::Zero(d, d);
  b(beta, beta) = 1;
  auto swap = permutation_channel(dims, {2, 1, 0});
  auto reset = reset_channel(dims, 0, b);
  c.W.push_back(swap);
  for (int a = 0; a < n; ++a) {
    c.V.push_back(reset);
    c.C.push_back(permute_subsystems(tg[a], {1, 0}));
    c.K.push_back(theory.k_class == CommClass::Q ? identity_channel({dz, d})
                                                 : fixed_output_channel(ket0(dz * d), {dz, d}, {dz, d}));
    c.W.push_back(a + 1 < n ? reset : swap);
  }
  return Superprocess(theory, std::move(c));
}

Superprocess transplant_superprocess(TheoryId theory, const QuantumChannel& target, int steps, int beta) {
  return transplant_superprocess(theory, std::vector<QuantumChannel>(steps, target), beta);
}

Superprocess random_free_superprocess(TheoryId theory, int steps, int ds, int dz, Rng& rng) {
  SuperprocessComponents c;
  c.steps = steps;
  c.ds = ds;
  c.dz = dz;
  c.ancilla = rng.random_density(static_cast<long>(dz) * ds, 0);
  std::vector<int> dims{ds, dz, ds};
  for (int a = 0; a <= steps; ++a) c.W.push_back(random_channel(dims, dims, 2, rng));
  for (int a = 0; a < steps; ++a) {
    c.V.push_back(random_channel(dims, dims, 2, rng));
    c.C.push_back(random_class_channel(theory.c_class, {dz, ds}, {dz, ds}, rng));
    c.K.push_back(random_class_channel(theory.k_class, {dz, ds}, {dz, ds}, rng));
  }
  return Superprocess(theory, std::move(c));
}

Superprocess compose_superprocesses(const Superprocess& z1, const Superprocess& z2) {
  if (z1.steps() != z2.steps() || z1.ds() != z2.ds())
    throw LabelingError("compose_superprocesses: step counts or system dimensions differ");
  int n = z1.steps(), d = z1.ds(), dz1 = z1.dz(), dz2 = z2.dz();
  int dz = dz1 * d * dz2;
  const auto& a = z1.components();
  const auto& b = z2.components();
  // register (s1, z1, sp1, z2, sp2); z2 sees sp1 as its process wire, except
  // after the last step where z1 leaves the final output on s1
  std::vector<int> reg{d, dz1, d, dz2, d};
  std::vector<int> flat{d, dz, d};
  auto on = [&](const QuantumChannel& ch, std::vector<int> pos) { return embed(ch, pos, reg); };
  SuperprocessComponents c;
  c.steps = n;
  c.ds = d;
  c.dz = dz;
  c.ancilla = Eigen::kroneckerProduct(a.ancilla, b.ancilla).eval();
  for (int k = 0; k <= n; ++k) {
    std::vector<int> p2 = k < n ? std::vector<int>{2, 3, 4} : std::vector<int>{0, 3, 4};
    c.W.push_back(flatten(compose(on(a.W[k], {0, 1, 2}), on(b.W[k], p2)), flat, flat));
  }
  for (int k = 0; k < n; ++k) {
    c.V.push_back(flatten(compose(on(b.V[k], {2, 3, 4}), on(a.V[k], {0, 1, 2})), flat, flat));
    // (z1, sp1) then (z2, sp2) is already the (z, sp) order
    c.C.push_back(flatten(parallel(a.C[k], b.C[k]), {dz, d}, {dz, d}));
    // parallel gives (z1, s1, z2, sp1); the (z, s) register is (z1, sp1, z2, s1)
    c.K.push_back(flatten(permute_subsystems(parallel(a.K[k], b.K[k]), {0, 3, 2, 1}), {dz, d}, {dz, d}));
  }
  TheoryId th{class_max(z1.theory().c_class, z2.theory().c_class), class_max(z1.theory().k_class, z2.theory().k_class)};
  return Superprocess(th, std::move(c));
}

// ---- actions --------------------------------------------------------------------

LabeledOperator superprocess_choi(const Superprocess& z) {
  const auto& c = z.components();
  int n = c.steps, d = c.ds;
  LabeledOperator x = tensor_product(LabeledOperator({anc("z", c.dz), anc("sp", d)}, c.ancilla),
                                     max_entangled(Leg{out_leg(0), d, Role::CombInput, 0}, anc("s", d)));
  x = apply3(x, c.W[0]);
  for (int a = 0; a < n; ++a) {
    x = relabel(x, "sp", Leg{primed(out_leg(a)), d, Role::CombOutput, 2 * a});
    x = tensor_product(x, max_entangled(Leg{primed(in_leg(a)), d, Role::CombInput, 2 * a + 1}, anc("sp", d)));
    x = apply_on(x, c.K[a], {"z", "s"});
    x = apply3(x, c.V[a]);
    x = relabel(x, "s", Leg{in_leg(a), d, Role::CombOutput, 2 * a + 1});
    x = tensor_product(x, max_entangled(Leg{out_leg(a + 1), d, Role::CombInput, 2 * a + 2}, anc("s", d)));
    x = apply_on(x, c.C[a], {"z", "sp"});
    x = apply3(x, c.W[a + 1]);
  }
  x = relabel(x, "s", Leg{primed(out_leg(n)), d, Role::CombOutput, 2 * n});
  x = partial_trace(x, {"z", "sp"});
  return canonicalize(x.with_matrix(hermitian_part(x.matrix())));
}

ProcessTensor left_action(const ProcessTensor& t, const Superprocess& z, LeftPath path) {
  check_process(t, z);
  const auto& c = z.components();
  int n = c.steps, d = c.ds;
  LabeledOperator rho_z({anc("z", c.dz), anc("sp", d)}, c.ancilla);
  switch (path) {
    case LeftPath::Choi: {
      auto r = link_product(t.choi(), superprocess_choi(z));
      return finish_client(r, n);
    }
    case LeftPath::Circuit: {
      if (!t.dilation()) throw CapabilityError("left_action: circuit path needs the process dilation");
      const auto& dil = *t.dilation();
      if (dil.mode != InitialMode::StateLeg || dil.env_output || dil.ds != d)
        throw CapabilityError("left_action: circuit path needs a closed state-leg dilation");
      LabeledOperator x = tensor_product(LabeledOperator({anc("s", d), anc("e", dil.de)}, dil.rho0), rho_z);
      x = apply3(x, c.W[0]);
      for (int a = 0; a < n; ++a) {
        x = emit_to_client(x, a, d);
        x = apply_on(x, c.K[a], {"z", "s"});
        x = apply3(x, c.V[a]);
        x = apply_on(x, dil.maps[a], {"s", "e"});
        x = apply_on(x, c.C[a], {"z", "sp"});
        x = apply3(x, c.W[a + 1]);
      }
      x = relabel(x, "s", client_out(n, d));
      return finish_client(partial_trace(x, {"e", "z", "sp"}), n);
    }
    case LeftPath::Contraction: {
      LabeledOperator x = tensor_product(t.choi(), rho_z);
      x = relabel(x, out_leg(0), anc("s", d));
      x = apply3(x, c.W[0]);
      for (int a = 0; a < n; ++a) {
        x = emit_to_client(x, a, d);
        x = apply_on(x, c.K[a], {"z", "s"});
        x = apply3(x, c.V[a]);
        x = self_link(x, "s", in_leg(a));
        x = relabel(x, out_leg(a + 1), anc("s", d));
        x = apply_on(x, c.C[a], {"z", "sp"});
        x = apply3(x, c.W[a + 1]);
      }
      x = relabel(x, "s", client_out(n, d));
      return finish_client(partial_trace(x, {"z", "sp"}), n);
    }
  }
  throw std::logic_error("left_action: unknown path");
}

ControlSequence right_action(const Superprocess& z, const ControlSequence& a) {
  const auto& c = z.components();
  int n = c.steps, d = c.ds;
  if (a.steps() != n) throw LabelingError("right_action: step counts differ");
  for (const auto& l : a.choi().legs())
    if (l.dim != d) throw LabelingError("right_action: client leg '" + l.name + "' does not match the system dimension");
  bool det = a.deterministic();
  for (const auto& ch : c.V) det = det && ch.trace_preserving();
  LabeledOperator x = tensor_product(LabeledOperator({anc("z", c.dz), anc("sp", d)}, c.ancilla),
                                     max_entangled(Leg{out_leg(0), d, Role::CombInput, 0}, anc("s", d)));
  bool circuit = a.dilation().has_value() && !a.final_map();
  std::map<std::string, std::string> pre;
  if (circuit) {
    const auto& ad = *a.dilation();
    x = tensor_product(x, LabeledOperator({anc("a", ad.da)}, ad.rho0_a));
  } else {
    for (const auto& l : a.choi().legs()) pre[l.name] = "c." + l.name;
    x = tensor_product(x, rename_legs(a.choi(), pre));
  }
  x = apply3(x, c.W[0]);
  for (int k = 0; k < n; ++k) {
    if (circuit) {
      x = apply_on(x, a.dilation()->actions[k], {"sp", "a"});
    } else {
      x = self_link(x, "sp", "c." + out_leg(k));
      x = relabel(x, "c." + in_leg(k), anc("sp", d));
    }
    // client action above on sp runs in parallel with K on (z, s)
    x = apply_on(x, c.K[k], {"z", "s"});
    x = apply3(x, c.V[k]);
    x = relabel(x, "s", Leg{in_leg(k), d, Role::CombOutput, k});
    x = tensor_product(x, max_entangled(Leg{out_leg(k + 1), d, Role::CombInput, k + 1}, anc("s", d)));
    x = apply_on(x, c.C[k], {"z", "sp"});
    x = apply3(x, c.W[k + 1]);
  }
  if (!circuit && a.final_map()) {
    x = self_link(x, "s", "c." + out_leg(n));
    x = relabel(x, "c.out", Leg{"out", 0, Role::CombOutput, n});
  } else {
    x = relabel(x, "s", Leg{"out", d, Role::CombOutput, n});
  }
  std::set<std::string> drop{"z", "sp"};
  if (circuit) drop.insert("a");
  x = partial_trace(x, drop);
  return ControlSequence(x.with_matrix(hermitian_part(x.matrix())), n, det, true);
}

DensityOperator full_action(const ProcessTensor& t, const Superprocess& z, const ControlSequence& a) {
  check_process(t, z);
  const auto& c = z.components();
  int n = c.steps, d = c.ds;
  bool circuit = t.dilation() && a.dilation() && !a.final_map() && t.dilation()->mode == InitialMode::StateLeg &&
                 !t.dilation()->env_output;
  if (!circuit) return contract(left_action(t, z), a);
  if (a.steps() != n) throw LabelingError("full_action: step counts differ");
  const auto& dil = *t.dilation();
  const auto& ad = *a.dilation();
  if (ad.ds != d) throw LabelingError("full_action: client dimension differs");
  LabeledOperator x = tensor_product(LabeledOperator({anc("s", d), anc("e", dil.de)}, dil.rho0),
                                     LabeledOperator({anc("z", c.dz), anc("sp", d)}, c.ancilla));
  x = tensor_product(x, LabeledOperator({anc("a", ad.da)}, ad.rho0_a));
  x = apply3(x, c.W[0]);
  for (int k = 0; k < n; ++k) {
    x = apply_on(x, ad.actions[k], {"sp", "a"});
    x = apply_on(x, c.K[k], {"z", "s"});
    x = apply3(x, c.V[k]);
    x = apply_on(x, dil.maps[k], {"s", "e"});
    x = apply_on(x, c.C[k], {"z", "sp"});
    x = apply3(x, c.W[k + 1]);
  }
  x = partial_trace(x, {"e", "z", "sp", "a"});
  return DensityOperator(x.with_matrix(hermitian_part(x.matrix())));
}

QuantumChannel intra_step_channel(const Superprocess& z, int alpha, const QuantumChannel& e) {
  const auto& c = z.components();
  int n = c.steps, d = c.ds, dz = c.dz;
  if (alpha < 0 || alpha >= n) throw std::out_of_range("intra_step_channel: step out of range");
  if (e.d_in() != d || e.d_out() != d) throw LabelingError("intra_step_channel: step map must act on s");
  QuantumChannel es = flatten(e, {d}, {d});
  LabeledOperator x = tensor_product(max_entangled(anc("in_sp", d), anc("sp", d)), max_entangled(anc("in_z", dz), anc("z", dz)));
  x = tensor_product(x, ket_bra(anc("s", d), 0));
  x = apply3(x, c.V[alpha]);
  x = apply_on(x, es, {"s"});
  x = apply_on(x, c.C[alpha], {"z", "sp"});
  x = apply3(x, c.W[alpha + 1]);
  bool last = alpha + 1 == n;
  x = partial_trace(x, {last ? "sp" : "s"});
  x = permute_legs(x, {"in_sp", "in_z", last ? "s" : "sp", "z"});
  bool tp = e.trace_preserving() && c.V[alpha].trace_preserving() && c.C[alpha].trace_preserving() &&
            c.W[alpha + 1].trace_preserving();
  return QuantumChannel(hermitian_part(x.matrix()), {d, dz}, {d, dz}, tp);
}

}  // namespace ptres
