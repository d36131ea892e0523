#include "ptres/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ptres {

namespace {

// Eigenvalues below this (for unit-trace operators) are treated as outside the support.
constexpr double kSupportEps = 1e-13;

std::vector<long> strides_of(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

long prod(const std::vector<int>& dims, const std::vector<int>& pos) {
  long p = 1;
  for (int i : pos) p *= dims[i];
  return p;
}

std::vector<int> positions_of(const LabeledOperator& a, const std::vector<std::string>& names) {
  std::vector<int> pos;
  pos.reserve(names.size());
  for (const auto& n : names) pos.push_back(a.index_of(n));
  return pos;
}

std::vector<int> complement(int n, const std::vector<int>& pos) {
  std::vector<char> used(n, 0);
  for (int p : pos) used[p] = 1;
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!used[i]) out.push_back(i);
  return out;
}

// full[k * Dt + t] = row index whose K-part is k and T-part is t.
std::vector<long> joint_index(const std::vector<int>& dims, const std::vector<int>& kpos,
                              const std::vector<int>& tpos) {
  long D = prod(dims, complement(static_cast<int>(dims.size()), {}));
  long Dt = prod(dims, tpos);
  auto ik = sub_indices(dims, kpos);
  auto it = sub_indices(dims, tpos);
  std::vector<long> full(D);
  for (long r = 0; r < D; ++r) full[ik[r] * Dt + it[r]] = r;
  return full;
}

// Tiled so both the block and its mirror stay in cache.
bool is_hermitian_within(const Mat& m, double tol) {
  const long D = m.rows(), B = 32;
  for (long c0 = 0; c0 < D; c0 += B)
    for (long r0 = 0; r0 <= c0; r0 += B) {
      long nc = std::min(B, D - c0), nr = std::min(B, D - r0);
      if ((m.block(r0, c0, nr, nc) - m.block(c0, r0, nc, nr).adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    }
  return true;
}

void check_unique(const std::vector<Leg>& legs) {
  std::set<std::string> seen;
  for (const auto& l : legs) {
    if (l.dim < 1) throw LabelingError("leg '" + l.name + "': dim must be >= 1");
    if (!seen.insert(l.name).second) throw LabelingError("duplicate leg name '" + l.name + "'");
  }
}

}  // namespace

const char* role_name(Role r) {
  switch (r) {
    case Role::StateOutput: return "state-output";
    case Role::CombInput: return "comb-input";
    case Role::CombOutput: return "comb-output";
    case Role::Ancilla: return "ancilla";
  }
  return "ancilla";
}

Role parse_role(const std::string& s) {
  if (s == "state-output") return Role::StateOutput;
  if (s == "comb-input") return Role::CombInput;
  if (s == "comb-output") return Role::CombOutput;
  if (s == "ancilla") return Role::Ancilla;
  throw LabelingError("unknown leg role '" + s + "'");
}

std::vector<long> sub_indices(const std::vector<int>& dims, const std::vector<int>& positions) {
  long D = 1;
  for (int d : dims) D *= d;
  auto st = strides_of(dims);
  std::vector<long> sub_st(positions.size(), 1);
  for (int m = static_cast<int>(positions.size()) - 2; m >= 0; --m)
    sub_st[m] = sub_st[m + 1] * dims[positions[m + 1]];
  std::vector<long> out(D, 0);
  for (long r = 0; r < D; ++r) {
    long s = 0;
    for (size_t m = 0; m < positions.size(); ++m) {
      int p = positions[m];
      s += ((r / st[p]) % dims[p]) * sub_st[m];
    }
    out[r] = s;
  }
  return out;
}

long product_of_dims(const std::vector<Leg>& legs) {
  long p = 1;
  for (const auto& l : legs) p *= l.dim;
  return p;
}

LabeledOperator::LabeledOperator(std::vector<Leg> legs, Mat m, double tol)
    : legs_(std::move(legs)), m_(std::move(m)), tol_(tol) {
  check_unique(legs_);
  long D = product_of_dims(legs_);
  if (m_.rows() != D || m_.cols() != D)
    throw LabelingError("matrix dimension " + std::to_string(m_.rows()) + "x" +
                        std::to_string(m_.cols()) + " does not match leg product " +
                        std::to_string(D));
  hermitian_ = is_hermitian_within(m_, tol_);
}

bool LabeledOperator::has_leg(const std::string& name) const {
  return std::any_of(legs_.begin(), legs_.end(), [&](const Leg& l) { return l.name == name; });
}

int LabeledOperator::index_of(const std::string& name) const {
  for (size_t i = 0; i < legs_.size(); ++i)
    if (legs_[i].name == name) return static_cast<int>(i);
  throw LabelingError("unknown leg '" + name + "'");
}

const Leg& LabeledOperator::leg(const std::string& name) const { return legs_[index_of(name)]; }

std::vector<int> LabeledOperator::dims() const {
  std::vector<int> d;
  for (const auto& l : legs_) d.push_back(l.dim);
  return d;
}

std::vector<std::string> LabeledOperator::names() const {
  std::vector<std::string> n;
  for (const auto& l : legs_) n.push_back(l.name);
  return n;
}

LabeledOperator identity_op(const std::vector<Leg>& legs) {
  long D = product_of_dims(legs);
  return {legs, Mat::Identity(D, D)};
}

LabeledOperator max_entangled(const Leg& a, const Leg& b) {
  if (a.dim != b.dim) throw LabelingError("max_entangled: leg dims differ");
  int d = a.dim;
  Vec v = Vec::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return {{a, b}, v * v.adjoint()};
}

LabeledOperator ket_bra(const Leg& leg, int k) {
  if (k < 0 || k >= leg.dim) throw std::out_of_range("ket_bra: basis index out of range");
  Mat m = Mat::Zero(leg.dim, leg.dim);
  m(k, k) = 1.0;
  return {{leg}, m};
}

LabeledOperator tensor_product(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<Leg> legs = a.legs();
  legs.insert(legs.end(), b.legs().begin(), b.legs().end());
  check_unique(legs);
  const Mat& A = a.matrix();
  const Mat& B = b.matrix();
  Mat R(A.rows() * B.rows(), A.cols() * B.cols());
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j)
      R.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return {legs, std::move(R), std::min(a.tol(), b.tol())};
}

LabeledOperator partial_trace(const LabeledOperator& a, const std::set<std::string>& drop) {
  std::vector<int> tpos;
  for (const auto& n : drop) tpos.push_back(a.index_of(n));
  std::sort(tpos.begin(), tpos.end());
  auto dims = a.dims();
  auto kpos = complement(static_cast<int>(dims.size()), tpos);
  long Dk = prod(dims, kpos), Dt = prod(dims, tpos);
  auto full = joint_index(dims, kpos, tpos);
  const Mat& A = a.matrix();
  Mat R = Mat::Zero(Dk, Dk);
  for (long k2 = 0; k2 < Dk; ++k2)
    for (long k1 = 0; k1 < Dk; ++k1) {
      cd s = 0;
      for (long t = 0; t < Dt; ++t) s += A(full[k1 * Dt + t], full[k2 * Dt + t]);
      R(k1, k2) = s;
    }
  std::vector<Leg> legs;
  for (int p : kpos) legs.push_back(a.legs()[p]);
  return {legs, std::move(R), a.tol()};
}

LabeledOperator keep_legs(const LabeledOperator& a, const std::vector<std::string>& keep) {
  std::set<std::string> k(keep.begin(), keep.end());
  std::set<std::string> drop;
  for (const auto& l : a.legs())
    if (!k.count(l.name)) drop.insert(l.name);
  for (const auto& n : keep) a.index_of(n);
  auto r = partial_trace(a, drop);
  return permute_legs(r, keep);
}

LabeledOperator partial_transpose(const LabeledOperator& a, const std::set<std::string>& flip) {
  if (flip.empty()) return a;
  std::vector<int> fpos;
  for (const auto& n : flip) fpos.push_back(a.index_of(n));
  std::sort(fpos.begin(), fpos.end());
  auto dims = a.dims();
  auto kpos = complement(static_cast<int>(dims.size()), fpos);
  long Df = prod(dims, fpos);
  auto ik = sub_indices(dims, kpos);
  auto iF = sub_indices(dims, fpos);
  auto full = joint_index(dims, kpos, fpos);
  const Mat& A = a.matrix();
  long D = A.rows();
  Mat R(D, D);
  for (long c = 0; c < D; ++c)
    for (long r = 0; r < D; ++r)
      R(full[ik[r] * Df + iF[c]], full[ik[c] * Df + iF[r]]) = A(r, c);
  return {a.legs(), std::move(R), a.tol()};
}

LabeledOperator permute_legs(const LabeledOperator& a, const std::vector<std::string>& order) {
  if (order.size() != a.legs().size()) throw LabelingError("permute_legs: leg count mismatch");
  auto pos = positions_of(a, order);
  bool same = true;
  for (size_t i = 0; i < pos.size(); ++i) same = same && pos[i] == static_cast<int>(i);
  if (same) return a;
  auto idx = sub_indices(a.dims(), pos);
  const Mat& A = a.matrix();
  long D = A.rows();
  Mat R(D, D);
  for (long c = 0; c < D; ++c)
    for (long r = 0; r < D; ++r) R(idx[r], idx[c]) = A(r, c);
  std::vector<Leg> legs;
  for (int p : pos) legs.push_back(a.legs()[p]);
  return {legs, std::move(R), a.tol()};
}

LabeledOperator rename_legs(const LabeledOperator& a, const std::map<std::string, std::string>& names) {
  std::vector<Leg> legs = a.legs();
  for (const auto& [from, to] : names) {
    int i = a.index_of(from);
    legs[i].name = to;
  }
  return {legs, a.matrix(), a.tol()};
}

LabeledOperator relabel_legs(const LabeledOperator& a, const std::map<std::string, Leg>& repl) {
  std::vector<Leg> legs = a.legs();
  for (const auto& [from, to] : repl) {
    int i = a.index_of(from);
    if (to.dim != legs[i].dim) throw LabelingError("relabel_legs: dimension change on '" + from + "'");
    legs[i] = to;
  }
  return {legs, a.matrix(), a.tol()};
}

std::vector<Leg> canonical_order(std::vector<Leg> legs) {
  auto cls = [](Role r) { return r == Role::CombInput ? 0 : (r == Role::Ancilla ? 2 : 1); };
  std::stable_sort(legs.begin(), legs.end(), [&](const Leg& x, const Leg& y) {
    if (x.step != y.step) return x.step < y.step;
    return cls(x.role) < cls(y.role);
  });
  return legs;
}

LabeledOperator canonicalize(const LabeledOperator& a) {
  std::vector<std::string> order;
  for (const auto& l : canonical_order(a.legs())) order.push_back(l.name);
  return permute_legs(a, order);
}

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<int> a_sh, a_rest, b_sh, b_rest;
  for (size_t i = 0; i < a.legs().size(); ++i) {
    const Leg& l = a.legs()[i];
    if (b.has_leg(l.name)) {
      const Leg& lb = b.leg(l.name);
      if (lb.dim != l.dim) throw LabelingError("link_product: dimension mismatch on '" + l.name + "'");
      a_sh.push_back(static_cast<int>(i));
      b_sh.push_back(b.index_of(l.name));
    } else {
      a_rest.push_back(static_cast<int>(i));
    }
  }
  for (size_t i = 0; i < b.legs().size(); ++i)
    if (!a.has_leg(b.legs()[i].name)) b_rest.push_back(static_cast<int>(i));

  auto ad = a.dims(), bd = b.dims();
  long Da = prod(ad, a_rest), Ds = prod(ad, a_sh), Db = prod(bd, b_rest);
  auto ai = sub_indices(ad, a_rest), as = sub_indices(ad, a_sh);
  auto bi = sub_indices(bd, b_rest), bs = sub_indices(bd, b_sh);

  const Mat& A = a.matrix();
  const Mat& B = b.matrix();
  Mat A2(Da * Da, Ds * Ds), B2(Ds * Ds, Db * Db);
  for (long c = 0; c < A.cols(); ++c)
    for (long r = 0; r < A.rows(); ++r) A2(ai[r] * Da + ai[c], as[r] * Ds + as[c]) = A(r, c);
  for (long c = 0; c < B.cols(); ++c)
    for (long r = 0; r < B.rows(); ++r) B2(bs[r] * Ds + bs[c], bi[r] * Db + bi[c]) = B(r, c);
  Mat R2 = A2 * B2;
  Mat R(Da * Db, Da * Db);
  for (long y = 0; y < Db; ++y)
    for (long yp = 0; yp < Db; ++yp)
      for (long x = 0; x < Da; ++x)
        for (long xp = 0; xp < Da; ++xp) R(x * Db + y, xp * Db + yp) = R2(x * Da + xp, y * Db + yp);

  std::vector<Leg> legs;
  for (int p : a_rest) legs.push_back(a.legs()[p]);
  for (int p : b_rest) legs.push_back(b.legs()[p]);
  return {legs, std::move(R), std::min(a.tol(), b.tol())};
}

LabeledOperator self_link(const LabeledOperator& a, const std::string& from, const std::string& into) {
  int pf = a.index_of(from), pi = a.index_of(into);
  auto dims = a.dims();
  if (dims[pf] != dims[pi]) throw LabelingError("self_link: dimension mismatch");
  auto st = strides_of(dims);
  auto rest = complement(static_cast<int>(dims.size()), {pf, pi});
  long Dr = prod(dims, rest);
  // base index for each rest multi-index (pair digits zero)
  std::vector<long> base(Dr, 0);
  {
    auto ir = sub_indices(dims, rest);
    auto ipair = sub_indices(dims, {pf, pi});
    for (long r = 0; r < a.dim(); ++r)
      if (ipair[r] == 0) base[ir[r]] = r;
  }
  long step = st[pf] + st[pi];
  int d = dims[pf];
  const Mat& A = a.matrix();
  Mat R = Mat::Zero(Dr, Dr);
  for (long k1 = 0; k1 < Dr; ++k1)
    for (long k2 = 0; k2 < Dr; ++k2) {
      cd s = 0;
      for (int y = 0; y < d; ++y)
        for (int z = 0; z < d; ++z) s += A(base[k1] + y * step, base[k2] + z * step);
      R(k1, k2) = s;
    }
  std::vector<Leg> legs;
  for (int p : rest) legs.push_back(a.legs()[p]);
  return {legs, std::move(R), a.tol()};
}

LabeledOperator scaled(const LabeledOperator& a, cd s) { return a.with_matrix(a.matrix() * s); }

LabeledOperator add(const LabeledOperator& a, const LabeledOperator& b) {
  auto bb = permute_legs(b, a.names());
  for (size_t i = 0; i < a.legs().size(); ++i)
    if (a.legs()[i].dim != bb.legs()[i].dim) throw LabelingError("add: dimension mismatch");
  return a.with_matrix(a.matrix() + bb.matrix());
}

LabeledOperator subtract(const LabeledOperator& a, const LabeledOperator& b) {
  return add(a, scaled(b, -1.0));
}

double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b) {
  if (a.legs().size() != b.legs().size()) throw LabelingError("max_abs_diff: leg sets differ");
  auto bb = permute_legs(b, a.names());
  for (size_t i = 0; i < a.legs().size(); ++i)
    if (a.legs()[i].dim != bb.legs()[i].dim) throw LabelingError("max_abs_diff: dimension mismatch");
  if (a.dim() == 0) return 0.0;
  return (a.matrix() - bb.matrix()).cwiseAbs().maxCoeff();
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Eig hermitian_eig(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const Mat& a, double tol) {
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  return min_eigenvalue(a) >= -tol;
}

double trace_norm(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double entropy_bits(const Mat& a) {
  double t = a.trace().real();
  if (t <= 0) throw DomainError("entropy_bits: non-positive trace");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a) / t, Eigen::EigenvaluesOnly);
  double s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double l = es.eigenvalues()(i);
    if (l > 0) s -= l * std::log2(l);
  }
  return s;
}

DensityOperator::DensityOperator(LabeledOperator op) : op_(std::move(op)) {
  double tol = op_.tol();
  if (!op_.hermitian()) throw DomainError("density operator is not Hermitian");
  if (min_eigenvalue(op_.matrix()) < -tol) throw DomainError("density operator is not PSD");
  if (trace() > 1 + tol) throw DomainError("density operator trace exceeds 1");
}

bool DensityOperator::unit_trace() const { return std::abs(trace() - 1) <= op_.tol(); }

DistanceKind parse_distance_kind(const std::string& s) {
  if (s == "trace") return DistanceKind::Trace;
  if (s == "relative-entropy") return DistanceKind::RelativeEntropy;
  if (s == "max-relative-entropy") return DistanceKind::MaxRelativeEntropy;
  throw std::invalid_argument("unknown distance kind '" + s + "'");
}

double trace_distance(const Mat& a, const Mat& b) {
  return 0.5 * trace_norm(a / a.trace().real() - b / b.trace().real());
}

namespace {

struct Support {
  Mat proj;      // projector onto the support
  Eig eig;
  double norm;
};

Support support_of(const Mat& b) {
  Support s;
  s.norm = b.trace().real();
  s.eig = hermitian_eig(b / s.norm);
  long D = b.rows();
  s.proj = Mat::Zero(D, D);
  for (long i = 0; i < D; ++i)
    if (s.eig.values(i) > kSupportEps) s.proj += s.eig.vectors.col(i) * s.eig.vectors.col(i).adjoint();
  return s;
}

double weight_outside(const Mat& rho, const Support& s) {
  long D = rho.rows();
  Mat out = Mat::Identity(D, D) - s.proj;
  return (out * rho).trace().real();
}

}  // namespace

double relative_entropy_bits(const Mat& a, const Mat& b, double tol) {
  Mat rho = hermitian_part(a) / a.trace().real();
  Support s = support_of(b);
  if (weight_outside(rho, s) > tol) return std::numeric_limits<double>::infinity();
  // -tr(rho log sigma) restricted to the support
  double cross = 0;
  for (long i = 0; i < s.eig.values.size(); ++i) {
    double l = s.eig.values(i);
    if (l <= kSupportEps) continue;
    double w = (s.eig.vectors.col(i).adjoint() * rho * s.eig.vectors.col(i))(0, 0).real();
    cross -= w * std::log2(l);
  }
  double v = cross - entropy_bits(rho);
  return std::max(v, 0.0);
}

double dmax_bits(const Mat& a, const Mat& b, double tol) {
  Mat rho = hermitian_part(a) / a.trace().real();
  Support s = support_of(b);
  if (weight_outside(rho, s) > tol) return std::numeric_limits<double>::infinity();
  long D = b.rows();
  Mat isqrt = Mat::Zero(D, D);
  for (long i = 0; i < D; ++i) {
    double l = s.eig.values(i);
    if (l > kSupportEps)
      isqrt += (1.0 / std::sqrt(l)) * s.eig.vectors.col(i) * s.eig.vectors.col(i).adjoint();
  }
  Mat m = isqrt * rho * isqrt;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  double lam = es.eigenvalues()(D - 1);
  return std::max(std::log2(lam), 0.0);
}

DistanceResult distance(const DensityOperator& a, const DensityOperator& b, DistanceKind kind, double tol) {
  if (a.op().legs().size() != b.op().legs().size()) throw LabelingError("distance: leg sets differ");
  auto bb = permute_legs(b.op(), a.op().names());
  for (size_t i = 0; i < a.op().legs().size(); ++i)
    if (a.op().legs()[i].dim != bb.legs()[i].dim) throw LabelingError("distance: dimension mismatch");
  if (a.trace() <= 0 || b.trace() <= 0) throw DomainError("distance: zero-trace argument");
  DistanceResult r;
  r.normalized_a = !a.unit_trace();
  r.normalized_b = !b.unit_trace();
  switch (kind) {
    case DistanceKind::Trace: r.value = trace_distance(a.matrix(), bb.matrix()); break;
    case DistanceKind::RelativeEntropy: r.value = relative_entropy_bits(a.matrix(), bb.matrix(), tol); break;
    case DistanceKind::MaxRelativeEntropy: r.value = dmax_bits(a.matrix(), bb.matrix(), tol); break;
  }
  return r;
}

}  // namespace ptres
