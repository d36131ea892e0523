#include "ptres/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace ptres {

namespace {

int prod_dims(const std::vector<int>& d) { return std::accumulate(d.begin(), d.end(), 1, std::multiplies<>()); }

std::vector<Leg> channel_legs(const std::vector<int>& in_dims, const std::vector<int>& out_dims) {
  std::vector<Leg> legs;
  for (size_t k = 0; k < in_dims.size(); ++k)
    legs.push_back({"in" + std::to_string(k), in_dims[k], Role::CombInput, 1});
  for (size_t k = 0; k < out_dims.size(); ++k)
    legs.push_back({"out" + std::to_string(k), out_dims[k], Role::CombOutput, 1});
  return legs;
}

// Choi with arbitrary leg names -> channel with standard names.
QuantumChannel from_labeled(const LabeledOperator& choi, const std::vector<std::string>& ins,
                            const std::vector<std::string>& outs, bool tp) {
  std::vector<std::string> order = ins;
  order.insert(order.end(), outs.begin(), outs.end());
  auto p = permute_legs(choi, order);
  std::vector<int> in_dims, out_dims;
  for (const auto& n : ins) in_dims.push_back(choi.leg(n).dim);
  for (const auto& n : outs) out_dims.push_back(choi.leg(n).dim);
  return QuantumChannel(p.matrix(), in_dims, out_dims, tp, choi.tol());
}

LabeledOperator prefixed_choi(const QuantumChannel& ch, const std::string& pre) {
  std::map<std::string, std::string> m;
  for (const auto& n : ch.in_legs()) m[n] = pre + n;
  for (const auto& n : ch.out_legs()) m[n] = pre + n;
  return rename_legs(ch.choi(), m);
}

std::vector<std::string> prefixed(const std::vector<std::string>& v, const std::string& pre) {
  std::vector<std::string> out;
  for (const auto& n : v) out.push_back(pre + n);
  return out;
}

Mat choi_from_mp(const MeasurePrepare& mp) {
  long din = mp.effects.front().rows(), dout = mp.preparations.front().rows();
  Mat c = Mat::Zero(din * dout, din * dout);
  for (size_t k = 0; k < mp.effects.size(); ++k) {
    Mat pt = mp.effects[k].transpose();
    for (long i = 0; i < din; ++i)
      for (long j = 0; j < din; ++j) c.block(i * dout, j * dout, dout, dout) += pt(i, j) * mp.preparations[k];
  }
  return c;
}

}  // namespace

const char* comm_class_name(CommClass c) {
  switch (c) {
    case CommClass::None: return "none";
    case CommClass::EB: return "eb";
    case CommClass::Q: return "q";
  }
  return "none";
}

CommClass parse_comm_class(const std::string& s) {
  if (s == "none" || s == "0" || s == "empty") return CommClass::None;
  if (s == "eb") return CommClass::EB;
  if (s == "q") return CommClass::Q;
  throw std::invalid_argument("unknown communication class '" + s + "' (expected none, eb or q)");
}

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Povm::Povm(std::vector<Mat> e, double tol) : effects(std::move(e)) {
  if (effects.empty()) throw std::invalid_argument("Povm: no effects");
  long d = effects.front().rows();
  Mat sum = Mat::Zero(d, d);
  for (const auto& m : effects) {
    if (m.rows() != d || m.cols() != d) throw LabelingError("Povm: effect dimension mismatch");
    if (!is_psd(m, tol)) throw DomainError("Povm: effect is not PSD");
    sum += m;
  }
  if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol) throw DomainError("Povm: effects do not sum to identity");
}

QuantumChannel::QuantumChannel(Mat choi, std::vector<int> in_dims, std::vector<int> out_dims, bool trace_preserving,
                               double tol)
    : choi_(channel_legs(in_dims, out_dims), std::move(choi), tol),
      in_dims_(std::move(in_dims)),
      out_dims_(std::move(out_dims)),
      tp_(trace_preserving) {
  if (!choi_.hermitian()) throw DomainError("channel Choi matrix is not Hermitian");
  if (min_eigenvalue(choi_.matrix()) < -tol) throw DomainError("channel Choi matrix is not PSD (map not CP)");
  std::set<std::string> outs;
  for (const auto& n : out_legs()) outs.insert(n);
  Mat marg = partial_trace(choi_, outs).matrix();
  long din = marg.rows();
  Mat id = Mat::Identity(din, din);
  if (tp_) {
    if ((marg - id).cwiseAbs().maxCoeff() > tol) throw DomainError("channel is not trace preserving");
  } else if (min_eigenvalue(id - marg) < -tol) {
    throw DomainError("channel is not trace non-increasing");
  }
}

int QuantumChannel::d_in() const { return prod_dims(in_dims_); }
int QuantumChannel::d_out() const { return prod_dims(out_dims_); }

std::vector<std::string> QuantumChannel::in_legs() const {
  std::vector<std::string> v;
  for (size_t k = 0; k < in_dims_.size(); ++k) v.push_back("in" + std::to_string(k));
  return v;
}

std::vector<std::string> QuantumChannel::out_legs() const {
  std::vector<std::string> v;
  for (size_t k = 0; k < out_dims_.size(); ++k) v.push_back("out" + std::to_string(k));
  return v;
}

QuantumChannel QuantumChannel::with_measure_prepare(MeasurePrepare mp) const {
  QuantumChannel c = *this;
  c.mp_ = std::move(mp);
  return c;
}

std::vector<Mat> choi_to_kraus(const QuantumChannel& ch, double cutoff) {
  Eig e = hermitian_eig(ch.choi().matrix());
  int din = ch.d_in(), dout = ch.d_out();
  double lmax = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  std::vector<Mat> ks;
  for (long k = e.values.size() - 1; k >= 0; --k) {
    double l = e.values(k);
    if (l <= cutoff * lmax) continue;
    Mat K(dout, din);
    for (int i = 0; i < din; ++i)
      for (int o = 0; o < dout; ++o) K(o, i) = std::sqrt(l) * e.vectors(i * dout + o, k);
    ks.push_back(K);
  }
  return ks;
}

QuantumChannel kraus_to_channel(const std::vector<Mat>& kraus, std::vector<int> in_dims, std::vector<int> out_dims,
                                double tol) {
  if (kraus.empty()) throw std::invalid_argument("kraus_to_channel: empty Kraus set");
  int din = prod_dims(in_dims), dout = prod_dims(out_dims);
  Mat c = Mat::Zero(din * dout, din * dout);
  Mat sum = Mat::Zero(din, din);
  for (const auto& K : kraus) {
    if (K.rows() != dout || K.cols() != din) throw LabelingError("kraus_to_channel: Kraus operator has wrong shape");
    Vec v(din * dout);
    for (int i = 0; i < din; ++i)
      for (int o = 0; o < dout; ++o) v(i * dout + o) = K(o, i);
    c += v * v.adjoint();
    sum += K.adjoint() * K;
  }
  bool tp = (sum - Mat::Identity(din, din)).cwiseAbs().maxCoeff() <= tol;
  return QuantumChannel(c, std::move(in_dims), std::move(out_dims), tp, tol);
}

QuantumChannel kraus_to_channel(const std::vector<Mat>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("kraus_to_channel: empty Kraus set");
  return kraus_to_channel(kraus, {static_cast<int>(kraus[0].cols())}, {static_cast<int>(kraus[0].rows())});
}

LabeledOperator apply_on(const LabeledOperator& x, const QuantumChannel& ch, const std::vector<std::string>& targets) {
  if (targets.size() != ch.in_dims().size()) throw LabelingError("apply_on: target count does not match channel inputs");
  if (ch.in_dims().size() != ch.out_dims().size())
    throw LabelingError("apply_on: channel must map each subsystem to one subsystem");
  std::map<std::string, std::string> ren;
  auto ins = ch.in_legs(), outs = ch.out_legs();
  for (size_t k = 0; k < targets.size(); ++k) {
    const Leg& l = x.leg(targets[k]);
    if (l.dim != ch.in_dims()[k]) throw LabelingError("apply_on: dimension mismatch on '" + targets[k] + "'");
    ren[ins[k]] = targets[k];
    ren[outs[k]] = "#out" + std::to_string(k);
  }
  auto r = link_product(x, rename_legs(ch.choi(), ren));
  std::map<std::string, Leg> rel;
  for (size_t k = 0; k < targets.size(); ++k) {
    Leg l = x.leg(targets[k]);
    l.dim = ch.out_dims()[k];
    rel["#out" + std::to_string(k)] = l;
  }
  std::vector<Leg> legs = r.legs();
  for (auto& l : legs) {
    auto it = rel.find(l.name);
    if (it != rel.end()) l = it->second;
  }
  LabeledOperator rr(legs, r.matrix(), x.tol());
  return permute_legs(rr, x.names());
}

DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho) {
  return DensityOperator(apply_on(rho.op(), ch, rho.op().names()));
}

QuantumChannel compose(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.out_dims() != b.in_dims()) throw LabelingError("compose: output dims of first do not match inputs of second");
  std::map<std::string, std::string> ma, mb;
  auto aouts = a.out_legs(), bins = b.in_legs();
  for (size_t k = 0; k < aouts.size(); ++k) {
    ma[aouts[k]] = "#m" + std::to_string(k);
    mb[bins[k]] = "#m" + std::to_string(k);
  }
  for (const auto& n : a.in_legs()) ma[n] = "a." + n;
  for (const auto& n : b.out_legs()) mb[n] = "b." + n;
  auto r = link_product(rename_legs(a.choi(), ma), rename_legs(b.choi(), mb));
  return from_labeled(r, prefixed(a.in_legs(), "a."), prefixed(b.out_legs(), "b."),
                      a.trace_preserving() && b.trace_preserving());
}

QuantumChannel parallel(const QuantumChannel& a, const QuantumChannel& b) {
  auto r = tensor_product(prefixed_choi(a, "a."), prefixed_choi(b, "b."));
  auto ins = prefixed(a.in_legs(), "a.");
  auto bi = prefixed(b.in_legs(), "b.");
  ins.insert(ins.end(), bi.begin(), bi.end());
  auto outs = prefixed(a.out_legs(), "a.");
  auto bo = prefixed(b.out_legs(), "b.");
  outs.insert(outs.end(), bo.begin(), bo.end());
  auto c = from_labeled(r, ins, outs, a.trace_preserving() && b.trace_preserving());
  if (a.measure_prepare() && b.measure_prepare()) {
    MeasurePrepare mp;
    for (size_t k = 0; k < a.measure_prepare()->effects.size(); ++k)
      for (size_t l = 0; l < b.measure_prepare()->effects.size(); ++l) {
        mp.effects.push_back(Eigen::kroneckerProduct(a.measure_prepare()->effects[k], b.measure_prepare()->effects[l]).eval());
        mp.preparations.push_back(
            Eigen::kroneckerProduct(a.measure_prepare()->preparations[k], b.measure_prepare()->preparations[l]).eval());
      }
    c = c.with_measure_prepare(std::move(mp));
  }
  return c;
}

namespace {
Mat permute_factors(const Mat& m, const std::vector<int>& dims, const std::vector<int>& perm) {
  std::vector<Leg> legs;
  std::vector<std::string> order;
  for (size_t k = 0; k < dims.size(); ++k) legs.push_back({"f" + std::to_string(k), dims[k], Role::Ancilla, 0});
  for (int p : perm) order.push_back("f" + std::to_string(p));
  return permute_legs(LabeledOperator(legs, m), order).matrix();
}
}  // namespace

QuantumChannel permute_subsystems(const QuantumChannel& ch, const std::vector<int>& perm) {
  size_t n = ch.in_dims().size();
  if (perm.size() != n || ch.out_dims().size() != n) throw LabelingError("permute_subsystems: arity mismatch");
  std::vector<int> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= static_cast<int>(n) || seen[p]++) throw LabelingError("permute_subsystems: not a permutation");
  }
  std::vector<std::string> ins, outs;
  for (int p : perm) {
    ins.push_back("in" + std::to_string(p));
    outs.push_back("out" + std::to_string(p));
  }
  auto c = from_labeled(ch.choi(), ins, outs, ch.trace_preserving());
  if (const auto& mp = ch.measure_prepare()) {
    MeasurePrepare q;
    for (const auto& e : mp->effects) q.effects.push_back(permute_factors(e, ch.in_dims(), perm));
    for (const auto& v : mp->preparations) q.preparations.push_back(permute_factors(v, ch.out_dims(), perm));
    c = c.with_measure_prepare(std::move(q));
  }
  return c;
}

QuantumChannel embed(const QuantumChannel& ch, const std::vector<int>& positions, const std::vector<int>& dims) {
  if (positions.size() != ch.in_dims().size() || ch.in_dims().size() != ch.out_dims().size())
    throw LabelingError("embed: channel arity does not match positions");
  std::vector<int> others;
  std::vector<int> other_dims;
  for (int p = 0; p < static_cast<int>(dims.size()); ++p)
    if (std::find(positions.begin(), positions.end(), p) == positions.end()) {
      others.push_back(p);
      other_dims.push_back(dims[p]);
    }
  for (size_t k = 0; k < positions.size(); ++k)
    if (dims[positions[k]] != ch.in_dims()[k]) throw LabelingError("embed: dimension mismatch");
  LabeledOperator full = prefixed_choi(ch, "c.");
  std::vector<std::string> ins(dims.size()), outs(dims.size());
  for (size_t k = 0; k < positions.size(); ++k) {
    ins[positions[k]] = "c.in" + std::to_string(k);
    outs[positions[k]] = "c.out" + std::to_string(k);
  }
  if (!others.empty()) {
    QuantumChannel id = identity_channel(other_dims);
    full = tensor_product(full, prefixed_choi(id, "i."));
    for (size_t k = 0; k < others.size(); ++k) {
      ins[others[k]] = "i.in" + std::to_string(k);
      outs[others[k]] = "i.out" + std::to_string(k);
    }
  }
  return from_labeled(full, ins, outs, ch.trace_preserving());
}

QuantumChannel identity_channel(std::vector<int> dims) {
  int d = prod_dims(dims);
  return unitary_channel(Mat::Identity(d, d), std::move(dims));
}

QuantumChannel unitary_channel(const Mat& u, std::vector<int> dims) { return kraus_to_channel({u}, dims, dims); }
QuantumChannel unitary_channel(const Mat& u) { return unitary_channel(u, {static_cast<int>(u.rows())}); }

QuantumChannel fixed_output_channel(const Mat& tau, std::vector<int> in_dims, std::vector<int> out_dims) {
  int din = prod_dims(in_dims);
  if (tau.rows() != prod_dims(out_dims)) throw LabelingError("fixed_output_channel: state dimension mismatch");
  Mat c = Eigen::kroneckerProduct(Mat::Identity(din, din), tau.eval());
  return QuantumChannel(c, std::move(in_dims), std::move(out_dims), true);
}

QuantumChannel fixed_output_channel(const Mat& tau, int d_in) {
  return fixed_output_channel(tau, {d_in}, {static_cast<int>(tau.rows())});
}

QuantumChannel depolarizing_channel(int d, double p) {
  if (p < 0 || p > 1) throw DomainError("depolarizing_channel: p out of range");
  Mat psi = max_entangled({"a", d, Role::Ancilla, 0}, {"b", d, Role::Ancilla, 0}).matrix();
  Mat c = (1 - p) * psi + (p / d) * Mat::Identity(d * d, d * d);
  return QuantumChannel(c, {d}, {d}, true);
}

QuantumChannel dephasing_channel(int d) {
  std::vector<Mat> ks;
  for (int k = 0; k < d; ++k) {
    Mat p = Mat::Zero(d, d);
    p(k, k) = 1;
    ks.push_back(p);
  }
  return kraus_to_channel(ks);
}

QuantumChannel permutation_channel(const std::vector<int>& dims, const std::vector<int>& perm) {
  int m = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != m) throw LabelingError("permutation_channel: bad permutation");
  std::vector<int> out_dims(m);
  for (int k = 0; k < m; ++k) out_dims[k] = dims[perm[k]];
  int D = prod_dims(dims);
  auto idx = sub_indices(dims, perm);
  Mat P = Mat::Zero(D, D);
  for (int r = 0; r < D; ++r) P(idx[r], r) = 1.0;
  return kraus_to_channel({P}, dims, out_dims);
}

QuantumChannel swap_channel(const std::vector<int>& dims, int a, int b) {
  std::vector<int> perm(dims.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[a], perm[b]);
  return permutation_channel(dims, perm);
}

QuantumChannel reset_channel(const std::vector<int>& dims, int pos, const Mat& tau) {
  return embed(fixed_output_channel(tau, dims[pos]), {pos}, dims);
}

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Mat pauli_y() {
  Mat m(2, 2);
  m << 0, cd(0, -1), cd(0, 1), 0;
  return m;
}
Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

QuantumChannel make_none_channel(const Mat& tau, std::vector<int> in_dims, std::vector<int> out_dims) {
  if (!is_psd(tau, kDefaultTol) || std::abs(tau.trace().real() - 1) > kDefaultTol)
    throw DomainError("make_none_channel: tau must be a unit-trace state");
  return fixed_output_channel(tau, std::move(in_dims), std::move(out_dims));
}

QuantumChannel make_eb_channel(const Povm& povm, const std::vector<Mat>& preparations, std::vector<int> in_dims,
                               std::vector<int> out_dims) {
  if (povm.size() != preparations.size())
    throw ConstraintError("make_eb_channel: POVM has " + std::to_string(povm.size()) + " effects but " +
                          std::to_string(preparations.size()) + " preparations were given");
  long dout = preparations.front().rows();
  for (const auto& nu : preparations) {
    if (nu.rows() != dout) throw LabelingError("make_eb_channel: preparation dimension mismatch");
    if (!is_psd(nu, kDefaultTol) || std::abs(nu.trace().real() - 1) > kDefaultTol)
      throw DomainError("make_eb_channel: preparations must be unit-trace states");
  }
  if (in_dims.empty()) in_dims = {povm.dim()};
  if (out_dims.empty()) out_dims = {static_cast<int>(dout)};
  MeasurePrepare mp{povm.effects, preparations};
  QuantumChannel ch(choi_from_mp(mp), in_dims, out_dims, true);
  return ch.with_measure_prepare(std::move(mp));
}

QuantumChannel make_q_channel(const std::vector<Mat>& kraus, std::vector<int> in_dims, std::vector<int> out_dims) {
  if (kraus.empty()) throw std::invalid_argument("make_q_channel: empty Kraus set");
  if (in_dims.empty()) in_dims = {static_cast<int>(kraus[0].cols())};
  if (out_dims.empty()) out_dims = {static_cast<int>(kraus[0].rows())};
  auto ch = kraus_to_channel(kraus, in_dims, out_dims);
  if (!ch.trace_preserving()) throw ConstraintError("make_q_channel: Kraus set is not trace preserving");
  return ch;
}

QuantumChannel make_q_channel(const QuantumChannel& c) {
  if (!c.trace_preserving()) throw ConstraintError("make_q_channel: channel is not trace preserving");
  return c;
}

bool is_fixed_output(const QuantumChannel& ch, double tol) {
  std::set<std::string> ins;
  for (const auto& n : ch.in_legs()) ins.insert(n);
  Mat tau = partial_trace(ch.choi(), ins).matrix() / static_cast<double>(ch.d_in());
  Mat prod = Eigen::kroneckerProduct(Mat::Identity(ch.d_in(), ch.d_in()), tau).eval();
  return (prod - ch.choi().matrix()).cwiseAbs().maxCoeff() <= tol;
}

EbReport is_entanglement_breaking(const QuantumChannel& ch) {
  EbReport r;
  double tol = ch.choi().tol();
  if (const auto& mp = ch.measure_prepare()) {
    bool ok = mp->effects.size() == mp->preparations.size() && !mp->effects.empty();
    if (ok) {
      for (const auto& e : mp->effects) ok = ok && is_psd(e, tol);
      for (const auto& p : mp->preparations) ok = ok && is_psd(p, tol);
      ok = ok && (choi_from_mp(*mp) - ch.choi().matrix()).cwiseAbs().maxCoeff() <= tol;
    }
    if (ok) {
      r.verdict = Tri::Yes;
      r.certificate = "measure-prepare decomposition with " + std::to_string(mp->effects.size()) + " outcomes";
      return r;
    }
  }
  std::set<std::string> outs;
  for (const auto& n : ch.out_legs()) outs.insert(n);
  Mat pt = partial_transpose(ch.choi(), outs).matrix() / static_cast<double>(ch.d_in());
  Eig e = hermitian_eig(pt);
  r.min_pt_eigenvalue = e.values(0);
  if (e.values(0) < -tol) {
    r.verdict = Tri::No;
    r.witness = e.vectors.col(0);
    r.certificate = "partial transpose of the Choi state has eigenvalue " + std::to_string(e.values(0));
    return r;
  }
  if (is_fixed_output(ch, tol)) {
    r.verdict = Tri::Yes;
    r.certificate = "product Choi state (fixed output channel)";
    return r;
  }
  if (static_cast<long>(ch.d_in()) * ch.d_out() <= 6) {
    r.verdict = Tri::Yes;
    r.certificate = "PPT Choi state in dimension " + std::to_string(ch.d_in()) + "x" + std::to_string(ch.d_out()) +
                    " where PPT implies separable; min PT eigenvalue " + std::to_string(e.values(0));
    return r;
  }
  r.verdict = Tri::Inconclusive;
  r.certificate = "PPT Choi state beyond 2x2/2x3; separability undecided";
  return r;
}

ClassCheck check_class(const QuantumChannel& ch, CommClass c) {
  ClassCheck cc;
  if (!ch.trace_preserving()) {
    cc.certificate = "communication map is not trace preserving";
    return cc;
  }
  switch (c) {
    case CommClass::None:
      cc.ok = is_fixed_output(ch, ch.choi().tol());
      cc.certificate = cc.ok ? "product Choi state" : "Choi state is not of the form 1 (x) tau";
      break;
    case CommClass::EB: {
      auto r = is_entanglement_breaking(ch);
      cc.ok = r.verdict == Tri::Yes;
      cc.certificate = r.certificate;
      break;
    }
    case CommClass::Q:
      cc.ok = true;
      cc.certificate = "CPTP";
      break;
  }
  return cc;
}

QuantumChannel random_channel(std::vector<int> in_dims, std::vector<int> out_dims, int env_dim, Rng& rng) {
  int din = prod_dims(in_dims), dout = prod_dims(out_dims);
  if (env_dim < 1) throw std::invalid_argument("random_channel: env_dim must be >= 1");
  // An isometry needs dout * env >= din.
  while (dout * env_dim < din) ++env_dim;
  Mat V = rng.haar_isometry(static_cast<long>(dout) * env_dim, din);
  std::vector<Mat> ks;
  for (int k = 0; k < env_dim; ++k) {
    Mat K(dout, din);
    for (int o = 0; o < dout; ++o) K.row(o) = V.row(o * env_dim + k);
    ks.push_back(K);
  }
  return kraus_to_channel(ks, in_dims, out_dims);
}

QuantumChannel random_channel(int d_in, int d_out, int env_dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_channel(std::vector<int>{d_in}, std::vector<int>{d_out}, env_dim, rng);
}

Povm random_povm(int d, int outcomes, Rng& rng) {
  std::vector<Mat> g;
  Mat sum = Mat::Zero(d, d);
  for (int k = 0; k < outcomes; ++k) {
    Mat a = rng.ginibre(d, d);
    g.push_back(a * a.adjoint());
    sum += g.back();
  }
  Mat isq = matrix_function(sum, [](double x) { return 1.0 / std::sqrt(x); });
  std::vector<Mat> e;
  Mat acc = Mat::Zero(d, d);
  for (int k = 0; k < outcomes; ++k) {
    e.push_back(hermitian_part(isq * g[k] * isq));
    acc += e.back();
  }
  // absorb rounding so the effects sum to the identity exactly
  e.back() += Mat::Identity(d, d) - acc;
  e.back() = hermitian_part(e.back());
  return Povm(e);
}

QuantumChannel random_eb_channel(std::vector<int> in_dims, std::vector<int> out_dims, int outcomes, Rng& rng) {
  int din = prod_dims(in_dims), dout = prod_dims(out_dims);
  Povm p = random_povm(din, outcomes, rng);
  std::vector<Mat> preps;
  for (int k = 0; k < outcomes; ++k) preps.push_back(rng.random_density(dout));
  return make_eb_channel(p, preps, in_dims, out_dims);
}

QuantumChannel random_fixed_output(std::vector<int> in_dims, std::vector<int> out_dims, Rng& rng) {
  return make_none_channel(rng.random_density(prod_dims(out_dims)), in_dims, out_dims);
}

QuantumChannel random_class_channel(CommClass c, std::vector<int> in_dims, std::vector<int> out_dims, Rng& rng) {
  switch (c) {
    case CommClass::None: return random_fixed_output(in_dims, out_dims, rng);
    case CommClass::EB: return random_eb_channel(in_dims, out_dims, std::max(2, prod_dims(in_dims)), rng);
    case CommClass::Q: return random_channel(in_dims, out_dims, 2, rng);
  }
  return random_channel(in_dims, out_dims, 2, rng);
}

}  // namespace ptres
