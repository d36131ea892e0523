#include "ptres/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace ptres {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

RVec svec(const Mat& h) {
  long d = h.rows();
  RVec v(d * d);
  long k = 0;
  for (long i = 0; i < d; ++i) v(k++) = h(i, i).real();
  for (long i = 0; i < d; ++i)
    for (long j = i + 1; j < d; ++j) {
      cd z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      v(k++) = kSqrt2 * z.real();
      v(k++) = kSqrt2 * z.imag();
    }
  return v;
}

Mat smat(const RVec& v, long d) {
  Mat h = Mat::Zero(d, d);
  long k = 0;
  for (long i = 0; i < d; ++i) h(i, i) = v(k++);
  for (long i = 0; i < d; ++i)
    for (long j = i + 1; j < d; ++j) {
      cd z(v(k) / kSqrt2, v(k + 1) / kSqrt2);
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

const char* sdp_status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

// ---- problem assembly ------------------------------------------------------------

int SdpProblem::add_block(long dim) {
  if (dim < 1) throw SdpProblemError("sdp: block dimension must be positive");
  dims_.push_back(dim);
  offs_.push_back(total_);
  total_ += dim * dim;
  c_.push_back(Mat::Zero(dim, dim));
  return static_cast<int>(dims_.size()) - 1;
}

void SdpProblem::set_objective(int block, const Mat& c) {
  if (c.rows() != block_dim(block) || c.cols() != block_dim(block)) throw SdpProblemError("sdp: objective shape");
  c_[block] = hermitian_part(c);
}

void SdpProblem::add_constraint(const std::vector<std::pair<int, Mat>>& terms, double rhs) {
  std::vector<std::pair<long, double>> row;
  for (const auto& [b, a] : terms) {
    if (a.rows() != block_dim(b) || a.cols() != block_dim(b)) throw SdpProblemError("sdp: constraint shape");
    RVec v = svec(hermitian_part(a));
    for (long k = 0; k < v.size(); ++k)
      if (v(k) != 0.0) row.emplace_back(offs_[b] + k, v(k));
  }
  rows_.push_back(std::move(row));
  rhs_.push_back(rhs);
}

void SdpProblem::add_map_equality(const std::vector<std::pair<int, LinearMap>>& terms, const Mat& rhs) {
  long dout = rhs.rows();
  long nout = dout * dout;
  std::vector<std::vector<std::pair<long, double>>> rows(nout);
  for (const auto& [b, f] : terms) {
    long d = block_dim(b);
    for (long j = 0; j < d * d; ++j) {
      RVec e = RVec::Zero(d * d);
      e(j) = 1.0;
      Mat img = f(smat(e, d));
      if (img.rows() != dout || img.cols() != dout) throw SdpProblemError("sdp: map output shape");
      RVec col = svec(img);
      for (long k = 0; k < nout; ++k)
        if (std::abs(col(k)) > 1e-15) rows[k].emplace_back(offs_[b] + j, col(k));
    }
  }
  RVec r = svec(hermitian_part(rhs));
  for (long k = 0; k < nout; ++k) {
    if (rows[k].empty()) {
      if (std::abs(r(k)) > 1e-12) throw SdpProblemError("sdp: equality with no variables and nonzero right-hand side");
      continue;
    }
    rows_.push_back(std::move(rows[k]));
    rhs_.push_back(r(k));
  }
}

RMat SdpProblem::constraint_matrix() const {
  RMat a = RMat::Zero(rows(), total_);
  for (size_t i = 0; i < rows_.size(); ++i)
    for (const auto& [k, v] : rows_[i]) a(static_cast<long>(i), k) += v;
  return a;
}

RVec SdpProblem::rhs() const { return Eigen::Map<const RVec>(rhs_.data(), static_cast<long>(rhs_.size())); }

RVec SdpProblem::objective() const {
  RVec c(total_);
  for (int b = 0; b < blocks(); ++b) c.segment(offs_[b], dims_[b] * dims_[b]) = svec(c_[b]);
  return c;
}

// ---- solver -----------------------------------------------------------------------

namespace {

struct Layout {
  std::vector<long> dims, offs;
  long n = 0;  // sum of block dims (barrier parameter)
};

std::vector<Mat> unpack(const RVec& v, const Layout& L) {
  std::vector<Mat> out;
  for (size_t b = 0; b < L.dims.size(); ++b) out.push_back(smat(v.segment(L.offs[b], L.dims[b] * L.dims[b]), L.dims[b]));
  return out;
}

RVec pack(const std::vector<Mat>& m, const Layout& L, long total) {
  RVec v(total);
  for (size_t b = 0; b < m.size(); ++b) v.segment(L.offs[b], L.dims[b] * L.dims[b]) = svec(m[b]);
  return v;
}

// Largest step keeping x + a*dx PSD (infinity when dx keeps it PSD).
double max_step(const Mat& x, const Mat& dx) {
  Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  Mat linv = llt.matrixL().solve(Mat::Identity(x.rows(), x.cols()));
  Mat w = linv * dx * linv.adjoint();
  double lmin = hermitian_eig(hermitian_part(w)).values(0);
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

// Columns svec(herm(X E_j Zinv)) over the orthonormal basis E_j.
RMat hkm_operator(const Mat& x, const Mat& zinv) {
  long d = x.rows();
  RMat k(d * d, d * d);
  long j = 0;
  auto put = [&](const Mat& g) { k.col(j++) = svec(0.5 * (g + g.adjoint())); };
  for (long a = 0; a < d; ++a) put(x.col(a) * zinv.row(a));
  const cd I(0.0, 1.0);
  for (long a = 0; a < d; ++a)
    for (long b = a + 1; b < d; ++b) {
      Mat p = x.col(a) * zinv.row(b);
      Mat q = x.col(b) * zinv.row(a);
      put((p + q) / kSqrt2);
      put((I * p - I * q) / kSqrt2);
    }
  return k;
}

Mat inverse_pd(const Mat& z) {
  Eigen::LLT<Mat> llt(z);
  if (llt.info() != Eigen::Success) throw NumericalError("sdp: lost positive definiteness");
  return llt.solve(Mat::Identity(z.rows(), z.cols()));
}

}  // namespace

SdpResult solve_sdp(const SdpProblem& p, const SdpOptions& opts) {
  if (p.blocks() == 0) throw SdpProblemError("sdp: no variables");
  Layout L;
  for (int b = 0; b < p.blocks(); ++b) {
    L.dims.push_back(p.block_dim(b));
    L.offs.push_back(p.offset(b));
    L.n += p.block_dim(b);
  }
  const long N = p.total();
  RMat A_full = p.constraint_matrix();
  RVec b_full = p.rhs();
  RVec c = p.objective();

  // drop dependent rows, reject inconsistent ones
  std::vector<long> keep;
  if (A_full.rows() > 0) {
    Eigen::ColPivHouseholderQR<RMat> qr(A_full.transpose());
    qr.setThreshold(1e-10);
    long r = qr.rank();
    auto perm = qr.colsPermutation().indices();
    for (long i = 0; i < r; ++i) keep.push_back(perm(i));
    std::sort(keep.begin(), keep.end());
  }
  const long m = static_cast<long>(keep.size());
  RMat A(m, N);
  RVec b(m);
  for (long i = 0; i < m; ++i) {
    A.row(i) = A_full.row(keep[i]);
    b(i) = b_full(keep[i]);
  }
  if (m > 0 && m < A_full.rows()) {
    RVec x_ls = A.transpose() * (A * A.transpose()).ldlt().solve(b);
    double res = (A_full * x_ls - b_full).norm();
    if (res > 1e-8 * (1 + b_full.norm())) throw SdpProblemError("sdp: inconsistent equality constraints");
  }

  // standard starting point
  std::vector<Mat> X, Z;
  for (size_t k = 0; k < L.dims.size(); ++k) {
    long d = L.dims[k];
    double zeta = std::max(10.0, std::sqrt(static_cast<double>(d)));
    double eta = zeta;
    double cn = c.segment(L.offs[k], d * d).norm();
    for (long i = 0; i < m; ++i) {
      double an = A.row(i).segment(L.offs[k], d * d).norm();
      if (an > 0) zeta = std::max(zeta, d * (1 + std::abs(b(i))) / (1 + an));
      eta = std::max(eta, an);
    }
    eta = std::max(eta, cn);
    X.push_back(zeta * Mat::Identity(d, d));
    Z.push_back(eta * Mat::Identity(d, d));
  }
  RVec y = RVec::Zero(m);
  const double bn = 1 + b.norm(), cnorm = 1 + c.norm();

  SdpResult res;
  bool converged = false;
  // the best iterate so far, by its worst relative residual
  double best_merit = std::numeric_limits<double>::infinity();
  std::vector<Mat> bX = X, bZ = Z;
  RVec by = y;
  int stall = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it;
    RVec x = pack(X, L, N), z = pack(Z, L, N);
    RVec rp = b - A * x;
    RVec rd = c - z - A.transpose() * y;
    double mu = x.dot(z) / static_cast<double>(L.n);
    double pobj = c.dot(x), dobj = b.dot(y);
    double relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    double pinf = rp.norm() / bn, dinf = rd.norm() / cnorm;
    if (std::getenv("PTRES_SDP_TRACE"))
      std::fprintf(stderr, "it %d pobj %.10e dobj %.10e gap %.2e pinf %.2e dinf %.2e mu %.2e\n", it, pobj, dobj, relgap, pinf, dinf, mu);
    double merit = std::max({relgap, pinf, dinf});
    if (merit < 0.5 * best_merit) stall = 0;
    else ++stall;
    if (merit < best_merit) {
      best_merit = merit;
      bX = X;
      bZ = Z;
      by = y;
    }
    if (relgap < opts.gap_tol && pinf < opts.feas_tol && dinf < opts.feas_tol) {
      converged = true;
      break;
    }
    if (y.norm() > 1e12 || x.norm() > 1e12 || stall > 8) break;

    std::vector<Mat> Zinv;
    RMat M = RMat::Zero(m, m);
    bool lost = false;
    for (size_t k = 0; k < X.size() && !lost; ++k) {
      try {
        Zinv.push_back(inverse_pd(Z[k]));
      } catch (const NumericalError&) {
        lost = true;
        break;
      }
      long d2 = L.dims[k] * L.dims[k];
      RMat K = hkm_operator(X[k], Zinv[k]);
      RMat Ab = A.middleCols(L.offs[k], d2);
      M.noalias() += Ab * (K * Ab.transpose());
    }
    if (lost) break;
    M = 0.5 * (M + M.transpose());
    Eigen::LLT<RMat> chol(M);
    Eigen::LDLT<RMat> ldlt;
    bool use_llt = chol.info() == Eigen::Success;
    if (!use_llt) ldlt.compute(M);
    auto solveM = [&](const RVec& r) -> RVec { return use_llt ? RVec(chol.solve(r)) : RVec(ldlt.solve(r)); };
    std::vector<Mat> Rd = unpack(rd, L);

    // T_k is the complementarity target (times Zinv); returns (dX, dy, dZ)
    auto direction = [&](const std::vector<Mat>& T) {
      std::vector<Mat> H;
      for (size_t k = 0; k < X.size(); ++k) H.push_back(X[k] + hermitian_part(X[k] * Rd[k] * Zinv[k]) - hermitian_part(T[k]));
      RVec dy = solveM(rp + A * pack(H, L, N));
      std::vector<Mat> dZ = unpack(rd - A.transpose() * dy, L), dX;
      for (size_t k = 0; k < X.size(); ++k) dX.push_back(hermitian_part(T[k] - X[k] - X[k] * dZ[k] * Zinv[k]));
      return std::make_tuple(dX, dy, dZ);
    };
    auto steps = [&](const std::vector<Mat>& dX, const std::vector<Mat>& dZ) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (size_t k = 0; k < X.size(); ++k) {
        ap = std::min(ap, max_step(X[k], dX[k]));
        ad = std::min(ad, max_step(Z[k], dZ[k]));
      }
      return std::make_pair(ap, ad);
    };

    std::vector<Mat> T0;
    for (size_t k = 0; k < X.size(); ++k) T0.push_back(Mat::Zero(L.dims[k], L.dims[k]));
    auto [dXp, dyp, dZp] = direction(T0);
    auto [app, adp] = steps(dXp, dZp);
    app = std::min(1.0, app);
    adp = std::min(1.0, adp);
    double mu_aff = 0;
    for (size_t k = 0; k < X.size(); ++k)
      mu_aff += ((X[k] + app * dXp[k]) * (Z[k] + adp * dZp[k])).trace().real();
    mu_aff /= static_cast<double>(L.n);
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    std::vector<Mat> T;
    for (size_t k = 0; k < X.size(); ++k)
      T.push_back((sigma * mu * Mat::Identity(L.dims[k], L.dims[k]) - dXp[k] * dZp[k]) * Zinv[k]);
    auto [dX, dy, dZ] = direction(T);
    auto [ap, ad] = steps(dX, dZ);
    double gamma = 0.9 + 0.09 * std::min(app, adp);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (ap < 1e-12 && ad < 1e-12) break;
    for (size_t k = 0; k < X.size(); ++k) {
      X[k] = hermitian_part(X[k] + ap * dX[k]);
      Z[k] = hermitian_part(Z[k] + ad * dZ[k]);
    }
    y += ad * dy;
    res.iterations = it + 1;
  }

  bool diverged = y.norm() > 1e12 || pack(X, L, N).norm() > 1e12;
  X = bX;
  Z = bZ;
  y = by;
  RVec x = pack(X, L, N), z = pack(Z, L, N);
  RVec y_full = RVec::Zero(A_full.rows());
  for (long i = 0; i < m; ++i) y_full(keep[i]) = y(i);
  res.X = X;
  res.Z = Z;
  res.y = y_full;
  res.primal_value = c.dot(x);
  res.dual_value = b_full.dot(y_full);
  res.gap = std::abs(res.primal_value - res.dual_value);
  res.primal_residual = A_full.rows() ? (A_full * x - b_full).cwiseAbs().maxCoeff() : 0.0;
  res.dual_residual = (c - z - A_full.transpose() * y_full).cwiseAbs().maxCoeff();
  bool acceptable = res.gap <= opts.accept_gap * (1 + std::abs(res.primal_value)) &&
                    res.primal_residual <= opts.accept_feas && res.dual_residual <= opts.accept_feas;
  if (converged || acceptable)
    res.status = SdpStatus::Optimal;
  else if (diverged)
    res.status = SdpStatus::Infeasible;
  else
    res.status = SdpStatus::MaxIter;
  return res;
}

}  // namespace ptres
