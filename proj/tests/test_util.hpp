#pragma once
// Generators and brute-force oracles shared by the test suites. The oracles
// deliberately avoid the library's index plumbing.

#include "ptres/channels.hpp"
#include "ptres/combs.hpp"
#include "ptres/random.hpp"
#include "ptres/tensor.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <vector>

namespace ptest {

using namespace ptres;

inline Mat random_hermitian(long d, Rng& rng) {
  Mat g = rng.ginibre(d, d);
  return 0.5 * (g + g.adjoint());
}

inline Mat random_psd(long d, Rng& rng) {
  Mat g = rng.ginibre(d, d);
  return g * g.adjoint();
}

inline std::vector<Leg> anc_legs(const std::vector<int>& dims) {
  std::vector<Leg> legs;
  for (size_t k = 0; k < dims.size(); ++k) legs.push_back({"a" + std::to_string(k), dims[k], Role::Ancilla, 0});
  return legs;
}

// Digits of a row-major multi-index.
inline std::vector<int> digits(long idx, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    d[k] = static_cast<int>(idx % dims[k]);
    idx /= dims[k];
  }
  return d;
}

inline long flat(const std::vector<int>& dig, const std::vector<int>& dims) {
  long i = 0;
  for (size_t k = 0; k < dims.size(); ++k) i = i * dims[k] + dig[k];
  return i;
}

// Partial trace over the subsystems flagged in `drop`, by explicit summation.
inline Mat brute_partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<bool>& drop) {
  std::vector<int> kd;
  for (size_t k = 0; k < dims.size(); ++k)
    if (!drop[k]) kd.push_back(dims[k]);
  long K = 1;
  for (int d : kd) K *= d;
  Mat out = Mat::Zero(K, K);
  long D = m.rows();
  for (long r = 0; r < D; ++r)
    for (long c = 0; c < D; ++c) {
      auto dr = digits(r, dims), dc = digits(c, dims);
      bool diag = true;
      std::vector<int> kr, kc;
      for (size_t k = 0; k < dims.size(); ++k) {
        if (drop[k]) diag = diag && dr[k] == dc[k];
        else {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
        }
      }
      if (diag) out(flat(kr, kd), flat(kc, kd)) += m(r, c);
    }
  return out;
}

inline Mat brute_partial_transpose(const Mat& m, const std::vector<int>& dims, const std::vector<bool>& flip) {
  long D = m.rows();
  Mat out(D, D);
  for (long r = 0; r < D; ++r)
    for (long c = 0; c < D; ++c) {
      auto dr = digits(r, dims), dc = digits(c, dims);
      for (size_t k = 0; k < dims.size(); ++k)
        if (flip[k]) std::swap(dr[k], dc[k]);
      out(flat(dr, dims), flat(dc, dims)) = m(r, c);
    }
  return out;
}

// Von Neumann entropy in bits from an independent self-adjoint solver.
inline double brute_entropy_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho / rho.trace().real());
  double s = 0;
  for (long k = 0; k < es.eigenvalues().size(); ++k) {
    double p = es.eigenvalues()(k);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

inline double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

// Normalized Bell projector |phi+><phi+| on two qubits.
inline Mat bell_projector() {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1 / std::sqrt(2.0);
  return v * v.adjoint();
}

inline Mat swap_unitary() {
  Mat sw = Mat::Zero(4, 4);
  sw(0, 0) = sw(1, 2) = sw(2, 1) = sw(3, 3) = 1;
  return sw;
}

// Two-step process where the system is swapped with a qubit environment at
// every step, starting from |00>.
inline ProcessTensor swap_process(int steps = 2) {
  Dilation d;
  d.ds = 2;
  d.de = 2;
  d.rho0 = Mat::Zero(4, 4);
  d.rho0(0, 0) = 1;
  for (int j = 0; j < steps; ++j) d.maps.push_back(unitary_channel(swap_unitary(), {2, 2}));
  return build_process_tensor(d);
}

inline DensityOperator qubit_state(const Mat& m, const std::string& name = "s") {
  return DensityOperator(LabeledOperator({Leg{name, static_cast<int>(m.rows()), Role::Ancilla, 0}}, m));
}

}  // namespace ptest
