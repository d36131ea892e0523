#include "ptres/random.hpp"

namespace ptres {

Mat Rng::ginibre(long rows, long cols) {
  Mat g(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) g(i, j) = cd(normal(), normal()) / std::sqrt(2.0);
  return g;
}

Mat Rng::haar_unitary(long d) {
  Mat g = ginibre(d, d);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long i = 0; i < d; ++i) {
    cd x = r(i, i);
    double a = std::abs(x);
    q.col(i) *= (a > 0 ? x / a : cd(1.0));
  }
  return q;
}

Mat Rng::haar_isometry(long rows, long cols) {
  if (cols > rows) throw std::invalid_argument("haar_isometry: cols must be <= rows");
  return haar_unitary(rows).leftCols(cols);
}

Mat Rng::random_density(long d, long rank) {
  if (rank <= 0) rank = d;
  Mat g = ginibre(d, rank);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace ptres
