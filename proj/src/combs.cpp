#include "ptres/combs.hpp"

#include <algorithm>
#include <map>

namespace ptres {

std::string out_leg(int j) { return "o" + std::to_string(j); }
std::string in_leg(int j) { return "i" + std::to_string(j); }

namespace {

Leg anc(const std::string& name, int dim) { return {name, dim, Role::Ancilla, 0}; }

LabeledOperator relabel(const LabeledOperator& x, const std::string& from, const std::string& to, Role role,
                        int step) {
  Leg l = x.leg(from);
  l.name = to;
  l.role = role;
  l.step = step;
  return relabel_legs(x, {{from, l}});
}

// Flattens a channel onto two legs, Choi ordered (input, output).
LabeledOperator flat_choi(const QuantumChannel& ch, Leg in, Leg out) {
  in.dim = ch.d_in();
  out.dim = ch.d_out();
  return {{in, out}, ch.choi().matrix(), ch.choi().tol()};
}

void check_dilation_maps(const std::vector<QuantumChannel>& maps, int ds, int de, const char* what) {
  for (size_t j = 0; j < maps.size(); ++j) {
    const auto& m = maps[j];
    std::vector<int> want{ds, de};
    if (m.in_dims() != want || m.out_dims() != want)
      throw LabelingError(std::string(what) + ": map " + std::to_string(j) + " must act on (" +
                          std::to_string(ds) + ", " + std::to_string(de) + ")");
  }
}

}  // namespace

CausalityReport validate_comb(const LabeledOperator& c, double tol) {
  CausalityReport rep;
  rep.tol = tol;
  if (!c.hermitian()) {
    rep.min_eigenvalue = min_eigenvalue(hermitian_part(c.matrix()));
    rep.psd = false;
  } else {
    rep.min_eigenvalue = min_eigenvalue(c.matrix());
    rep.psd = rep.min_eigenvalue >= -tol;
  }
  std::map<int, std::pair<std::vector<Leg>, std::vector<Leg>>> blocks;
  for (const auto& l : c.legs()) {
    if (l.role == Role::Ancilla) throw LabelingError("comb has an ancilla leg '" + l.name + "'");
    auto& b = blocks[l.step];
    (is_input(l.role) ? b.first : b.second).push_back(l);
  }
  LabeledOperator cur = c.with_matrix(hermitian_part(c.matrix()));
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    const auto& [ins, outs] = it->second;
    std::set<std::string> so, si;
    for (const auto& l : outs) so.insert(l.name);
    for (const auto& l : ins) si.insert(l.name);
    LabeledOperator t = partial_trace(cur, so);
    bool lowest = std::next(it) == blocks.rend();
    LabeledOperator lower;
    double dev;
    if (lowest) {
      dev = max_abs_diff(t, identity_op(ins));
      lower = LabeledOperator({}, Mat::Identity(1, 1));
    } else {
      double din = static_cast<double>(product_of_dims(ins));
      lower = scaled(partial_trace(t, si), 1.0 / din);
      dev = max_abs_diff(t, tensor_product(lower, identity_op(ins)));
    }
    rep.levels.push_back(it->first);
    rep.deviations.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
    cur = lower;
  }
  std::reverse(rep.levels.begin(), rep.levels.end());
  std::reverse(rep.deviations.begin(), rep.deviations.end());
  rep.pass = rep.psd && rep.max_deviation <= tol;
  return rep;
}

// ---- ProcessTensor ----------------------------------------------------------

ProcessTensor::ProcessTensor(LabeledOperator choi, int steps, InitialMode mode) : steps_(steps), mode_(mode) {
  if (steps < 0 || (mode == InitialMode::OpenInput && steps < 1))
    throw LabelingError("process tensor: invalid number of steps");
  std::map<std::string, Leg> want;
  if (mode == InitialMode::StateLeg) want[out_leg(0)] = Leg{out_leg(0), 0, Role::StateOutput, 0};
  for (int j = 0; j < steps; ++j) {
    want[in_leg(j)] = Leg{in_leg(j), 0, Role::CombInput, j + 1};
    want[out_leg(j + 1)] = Leg{out_leg(j + 1), 0, Role::CombOutput, j + 1};
  }
  size_t found = 0;
  for (const auto& l : choi.legs()) {
    auto it = want.find(l.name);
    if (it != want.end()) {
      if (l.role != it->second.role || l.step != it->second.step)
        throw LabelingError("process tensor: leg '" + l.name + "' has role " + role_name(l.role) + " step " +
                            std::to_string(l.step) + ", expected " + role_name(it->second.role) + " step " +
                            std::to_string(it->second.step));
      ++found;
    } else {
      if (l.role == Role::StateOutput || l.role == Role::Ancilla || l.step < 1 || l.step > steps)
        throw LabelingError("process tensor: unexpected leg '" + l.name + "'");
      extra_ = true;
    }
  }
  if (found != want.size()) throw LabelingError("process tensor: missing system legs");
  choi_ = canonicalize(choi);
}

double ProcessTensor::input_weight() const {
  double w = 1;
  for (const auto& l : choi_.legs())
    if (is_input(l.role)) w *= l.dim;
  return w;
}

Mat ProcessTensor::normalized() const { return choi_.matrix() / input_weight(); }

ProcessTensor ProcessTensor::with_dilation(Dilation d) const {
  ProcessTensor t = *this;
  t.dil_ = std::move(d);
  return t;
}

ProcessTensor ProcessTensor::without_dilation() const {
  ProcessTensor t = *this;
  t.dil_.reset();
  return t;
}

CausalityReport validate_causality(const ProcessTensor& t, double tol) { return validate_comb(t.choi(), tol); }

// ---- ControlSequence --------------------------------------------------------

ControlSequence::ControlSequence(LabeledOperator choi, int steps, bool deterministic, bool final_map)
    : steps_(steps), deterministic_(deterministic), final_(final_map) {
  std::map<std::string, Leg> want;
  for (int j = 0; j < steps; ++j) {
    want[out_leg(j)] = Leg{out_leg(j), 0, Role::CombInput, j};
    want[in_leg(j)] = Leg{in_leg(j), 0, Role::CombOutput, j};
  }
  if (final_map) {
    want[out_leg(steps)] = Leg{out_leg(steps), 0, Role::CombInput, steps};
    want["out"] = Leg{"out", 0, Role::CombOutput, steps};
  }
  if (choi.legs().size() != want.size()) throw LabelingError("control sequence: wrong number of legs");
  for (const auto& l : choi.legs()) {
    auto it = want.find(l.name);
    if (it == want.end()) throw LabelingError("control sequence: unexpected leg '" + l.name + "'");
    if (l.role != it->second.role || l.step != it->second.step)
      throw LabelingError("control sequence: leg '" + l.name + "' has the wrong role or step");
  }
  choi_ = canonicalize(choi);
}

ControlSequence ControlSequence::with_dilation(ControlDilation d) const {
  ControlSequence c = *this;
  c.dil_ = std::move(d);
  return c;
}

// ---- builders -----------------------------------------------------------------

ProcessTensor build_process_tensor(const Dilation& dil) {
  int n = static_cast<int>(dil.maps.size());
  check_dilation_maps(dil.maps, dil.ds, dil.de, "build_process_tensor");
  bool open = dil.mode == InitialMode::OpenInput;
  if (open && n < 1) throw LabelingError("build_process_tensor: open-input process needs at least one map");
  if (!open && dil.env_input) throw LabelingError("build_process_tensor: environment input needs open-input mode");
  LabeledOperator x;
  if (open) {
    if (dil.env_input) {
      x = max_entangled(Leg{"e_in", dil.de, Role::CombInput, 1}, anc("e", dil.de));
    } else {
      if (dil.rho0.rows() != dil.de) throw LabelingError("build_process_tensor: rho0 must live on e");
      x = LabeledOperator({anc("e", dil.de)}, dil.rho0);
    }
  } else {
    if (dil.rho0.rows() != static_cast<long>(dil.ds) * dil.de)
      throw LabelingError("build_process_tensor: rho0 must live on s (x) e");
    x = LabeledOperator({anc("s", dil.ds), anc("e", dil.de)}, dil.rho0);
  }
  for (int j = 0; j < n; ++j) {
    if (!(open && j == 0)) x = relabel(x, "s", out_leg(j), j == 0 ? Role::StateOutput : Role::CombOutput, j);
    x = tensor_product(x, max_entangled(Leg{in_leg(j), dil.ds, Role::CombInput, j + 1}, anc("s", dil.ds)));
    x = apply_on(x, dil.maps[j], {"s", "e"});
  }
  if (n == 0) x = relabel(x, "s", out_leg(0), Role::StateOutput, 0);
  else x = relabel(x, "s", out_leg(n), Role::CombOutput, n);
  if (dil.env_output) x = relabel(x, "e", "e_out", Role::CombOutput, std::max(n, 1));
  else x = partial_trace(x, {"e"});
  if (n == 0 && dil.env_output) throw LabelingError("build_process_tensor: environment output needs a step");
  return ProcessTensor(canonicalize(x), n, dil.mode).with_dilation(dil);
}

ProcessTensor random_process_tensor(int steps, int ds, int de, Rng& rng, bool pure) {
  Dilation d;
  d.ds = ds;
  d.de = de;
  long dim = static_cast<long>(ds) * de;
  d.rho0 = rng.random_density(dim, pure ? 1 : -1);
  for (int j = 0; j < steps; ++j) d.maps.push_back(unitary_channel(rng.haar_unitary(dim), {ds, de}));
  return build_process_tensor(d);
}

ProcessTensor build_process_tensor(const DensityOperator& rho0_se, const std::vector<QuantumChannel>& dynamics) {
  const auto& legs = rho0_se.op().legs();
  Dilation d;
  if (legs.size() == 1) {
    d.ds = legs[0].dim;
    d.de = 1;
  } else if (legs.size() == 2) {
    d.ds = legs[0].dim;
    d.de = legs[1].dim;
  } else {
    throw LabelingError("build_process_tensor: initial state must have legs (s) or (s, e)");
  }
  d.rho0 = rho0_se.matrix();
  d.maps = dynamics;
  // single-system maps on a trivial environment are accepted as is
  if (d.de == 1)
    for (auto& m : d.maps)
      if (m.in_dims().size() == 1 && m.out_dims().size() == 1)
        m = QuantumChannel(m.choi().matrix(), {m.d_in(), 1}, {m.d_out(), 1}, m.trace_preserving(), m.choi().tol());
  return build_process_tensor(d);
}

ControlSequence build_control_sequence(const ControlDilation& dil) {
  int n = static_cast<int>(dil.actions.size());
  check_dilation_maps(dil.actions, dil.ds, dil.da, "build_control_sequence");
  if (dil.rho0_a.rows() != dil.da) throw LabelingError("build_control_sequence: ancilla state dimension mismatch");
  LabeledOperator x({anc("a", dil.da)}, dil.rho0_a);
  bool det = true;
  for (int j = 0; j < n; ++j) {
    x = tensor_product(x, max_entangled(Leg{out_leg(j), dil.ds, Role::CombInput, j}, anc("s", dil.ds)));
    x = apply_on(x, dil.actions[j], {"s", "a"});
    x = relabel(x, "s", in_leg(j), Role::CombOutput, j);
    det = det && dil.actions[j].trace_preserving();
  }
  x = partial_trace(x, {"a"});
  return ControlSequence(x, n, det).with_dilation(dil);
}

ControlSequence build_control_sequence(const DensityOperator& rho0_a, const std::vector<QuantumChannel>& actions) {
  ControlDilation d;
  d.da = static_cast<int>(rho0_a.matrix().rows());
  if (actions.empty()) throw LabelingError("build_control_sequence: no actions");
  const auto& id = actions.front().in_dims();
  if (id.size() != 2) throw LabelingError("build_control_sequence: actions must act on (s, a)");
  d.ds = id[0];
  d.rho0_a = rho0_a.matrix();
  d.actions = actions;
  return build_control_sequence(d);
}

ControlSequence product_control_sequence(const std::vector<QuantumChannel>& actions) {
  LabeledOperator x({}, Mat::Identity(1, 1));
  bool det = true, square = true;
  int n = static_cast<int>(actions.size());
  for (int j = 0; j < n; ++j) {
    const auto& a = actions[j];
    x = tensor_product(x, flat_choi(a, Leg{out_leg(j), 0, Role::CombInput, j}, Leg{in_leg(j), 0, Role::CombOutput, j}));
    det = det && a.trace_preserving();
    square = square && a.d_in() == a.d_out() && a.d_in() == actions.front().d_in();
  }
  ControlSequence c(x, n, det);
  if (square && n > 0) {
    ControlDilation d;
    d.ds = actions.front().d_in();
    d.da = 1;
    d.rho0_a = Mat::Identity(1, 1);
    for (const auto& a : actions)
      d.actions.push_back(
          QuantumChannel(a.choi().matrix(), {a.d_in(), 1}, {a.d_out(), 1}, a.trace_preserving(), a.choi().tol()));
    c = c.with_dilation(d);
  }
  return c;
}

DensityOperator contract(const ProcessTensor& t, const ControlSequence& a) {
  if (t.mode() != InitialMode::StateLeg)
    throw LabelingError("contract: open-input process has no initial state; compose it with a state first");
  if (t.has_extra_legs()) throw LabelingError("contract: process has legs beyond the system wires");
  if (a.steps() != t.steps()) throw LabelingError("contract: control sequence length does not match the process");
  for (const auto& l : a.choi().legs()) {
    if (l.name == "out") continue;
    const Leg& pl = t.choi().leg(l.name);
    if (pl.dim != l.dim) throw LabelingError("contract: dimension mismatch on '" + l.name + "'");
  }
  auto r = link_product(t.choi(), a.choi());
  if (r.legs().size() != 1) throw LabelingError("contract: unexpected open legs");
  r = relabel(r, r.legs()[0].name, "s", Role::Ancilla, 0);
  return DensityOperator(r.with_matrix(hermitian_part(r.matrix())));
}

ProcessTensor compose_processes(const ProcessTensor& t1, const ProcessTensor& t2, ComposeMode mode,
                                const std::vector<SharedLeg>& extra_shared) {
  if (t2.mode() != InitialMode::OpenInput) throw LabelingError("compose_processes: second process must be open-input");
  int n1 = t1.steps(), n2 = t2.steps();
  std::map<std::string, Leg> ren;
  bool link = mode == ComposeMode::Link;
  if (link && n1 < 1 && t1.mode() == InitialMode::OpenInput) throw LabelingError("compose_processes: empty process");
  int shift = link ? n1 - 1 : n1;
  for (const auto& l : t2.choi().legs()) {
    Leg m = l;
    for (int j = 0; j < n2; ++j) {
      if (l.name == in_leg(j)) {
        m.name = in_leg(j + shift);
      } else if (l.name == out_leg(j + 1)) {
        m.name = out_leg(j + 1 + shift);
      }
    }
    m.step = l.step + shift;
    ren[l.name] = m;
  }
  LabeledOperator a = t1.choi();
  if (link) {
    const Leg& lo = t1.choi().leg(out_leg(n1));
    const Leg& li = t2.choi().leg(in_leg(0));
    if (lo.dim != li.dim) throw LabelingError("compose_processes: linked wire dimensions differ");
    a = rename_legs(a, {{out_leg(n1), "#link"}});
    ren[in_leg(0)] = Leg{"#link", li.dim, Role::Ancilla, 0};
    for (size_t k = 0; k < extra_shared.size(); ++k) {
      const auto& sh = extra_shared[k];
      const Leg& f = t1.choi().leg(sh.first);
      const Leg& s = t2.choi().leg(sh.second);
      if (!is_output(f.role) || !is_input(s.role))
        throw LabelingError("compose_processes: shared legs must join an output of the first to an input of the second");
      if (f.dim != s.dim) throw LabelingError("compose_processes: shared leg dimensions differ");
      std::string tmp = "#link" + std::to_string(k + 1);
      a = rename_legs(a, {{sh.first, tmp}});
      ren[sh.second] = Leg{tmp, s.dim, Role::Ancilla, 0};
    }
  } else if (!extra_shared.empty()) {
    throw LabelingError("compose_processes: extra shared legs need link mode");
  }
  LabeledOperator b = relabel_legs(t2.choi(), ren);
  LabeledOperator r = link ? link_product(a, b) : tensor_product(a, b);
  return ProcessTensor(r, link ? n1 + n2 - 1 : n1 + n2, t1.mode());
}

ProcessTensor markov_process(const std::vector<QuantumChannel>& channels, const DensityOperator& rho0) {
  int d0 = static_cast<int>(rho0.matrix().rows());
  LabeledOperator x({Leg{out_leg(0), d0, Role::StateOutput, 0}}, rho0.matrix(), rho0.op().tol());
  int prev = d0;
  bool square = true;
  for (size_t j = 0; j < channels.size(); ++j) {
    const auto& c = channels[j];
    if (c.d_in() != prev) throw LabelingError("markov_process: channel " + std::to_string(j) + " is not chainable");
    int jj = static_cast<int>(j);
    x = tensor_product(x, flat_choi(c, Leg{in_leg(jj), 0, Role::CombInput, jj + 1},
                                    Leg{out_leg(jj + 1), 0, Role::CombOutput, jj + 1}));
    prev = c.d_out();
    square = square && c.d_in() == d0 && c.d_out() == d0;
  }
  ProcessTensor t(x, static_cast<int>(channels.size()), InitialMode::StateLeg);
  if (square) {
    Dilation d;
    d.ds = d0;
    d.de = 1;
    d.rho0 = rho0.matrix();
    for (const auto& c : channels)
      d.maps.push_back(QuantumChannel(c.choi().matrix(), {d0, 1}, {d0, 1}, c.trace_preserving(), c.choi().tol()));
    t = t.with_dilation(d);
  }
  return t;
}

ProcessTensor markov_open_process(const std::vector<QuantumChannel>& channels) {
  if (channels.empty()) throw LabelingError("markov_open_process: no channels");
  LabeledOperator x({}, Mat::Identity(1, 1));
  int prev = channels.front().d_in();
  bool square = true;
  for (size_t j = 0; j < channels.size(); ++j) {
    const auto& c = channels[j];
    if (c.d_in() != prev) throw LabelingError("markov_open_process: channel " + std::to_string(j) + " is not chainable");
    int jj = static_cast<int>(j);
    x = tensor_product(x, flat_choi(c, Leg{in_leg(jj), 0, Role::CombInput, jj + 1},
                                    Leg{out_leg(jj + 1), 0, Role::CombOutput, jj + 1}));
    prev = c.d_out();
    square = square && c.d_in() == c.d_out() && c.d_in() == channels.front().d_in();
  }
  ProcessTensor t(x, static_cast<int>(channels.size()), InitialMode::OpenInput);
  if (square) {
    Dilation d;
    d.mode = InitialMode::OpenInput;
    d.ds = channels.front().d_in();
    d.de = 1;
    d.rho0 = Mat::Identity(1, 1);
    for (const auto& c : channels)
      d.maps.push_back(QuantumChannel(c.choi().matrix(), {d.ds, 1}, {d.ds, 1}, c.trace_preserving(), c.choi().tol()));
    t = t.with_dilation(d);
  }
  return t;
}

DensityOperator simulate_process(const Dilation& dil, const ControlDilation& ctl) {
  if (dil.mode != InitialMode::StateLeg || dil.env_output)
    throw LabelingError("simulate_process: needs a closed state-leg dilation");
  if (dil.maps.size() != ctl.actions.size()) throw LabelingError("simulate_process: step counts differ");
  if (dil.ds != ctl.ds) throw LabelingError("simulate_process: system dimensions differ");
  check_dilation_maps(dil.maps, dil.ds, dil.de, "simulate_process");
  check_dilation_maps(ctl.actions, ctl.ds, ctl.da, "simulate_process");
  LabeledOperator x = tensor_product(LabeledOperator({anc("s", dil.ds), anc("e", dil.de)}, dil.rho0),
                                     LabeledOperator({anc("a", ctl.da)}, ctl.rho0_a));
  for (size_t j = 0; j < dil.maps.size(); ++j) {
    x = apply_on(x, ctl.actions[j], {"s", "a"});
    x = apply_on(x, dil.maps[j], {"s", "e"});
  }
  x = partial_trace(x, {"e", "a"});
  return DensityOperator(x.with_matrix(hermitian_part(x.matrix())));
}

}  // namespace ptres
