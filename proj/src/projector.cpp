#include "optdesign/projector.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <vector>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

// Keep an independent subset of columns by pivoted QR; returned indices are
// ascending original column positions.
std::vector<Index> independent_columns(const Eigen::MatrixXd& P) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
  const Eigen::VectorXd rdiag =
      qr.matrixR().diagonal().head(std::min(P.rows(), P.cols())).cwiseAbs();
  const double thr =
      static_cast<double>(P.rows()) * rdiag.maxCoeff() * kUnitRoundoff;
  Index rank = 0;
  for (Index i = 0; i < rdiag.size(); ++i)
    if (rdiag[i] > thr) ++rank;

  const auto& perm = qr.colsPermutation().indices();
  std::vector<Index> keep(perm.data(), perm.data() + rank);
  std::sort(keep.begin(), keep.end());
  return keep;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& P,
                               const std::vector<Index>& idx) {
  Eigen::MatrixXd out(P.rows(), static_cast<Index>(idx.size()));
  for (Index j = 0; j < out.cols(); ++j) out.col(j) = P.col(idx[j]);
  return out;
}

}  // namespace

Phi2Space build_phi2(const VandermondeMatrix& V) {
  Eigen::MatrixXd P;
  if (V.basis.kind() == BasisKind::kChebyshevTotalDegree) {
    // Products of total-degree-d polynomials span the total-degree-2d space.
    BasisSpec b2 = BasisSpec::chebyshev_total_degree(2 * V.basis.degree(),
                                                     V.basis.dim());
    b2.set_box(V.basis.box_lo(), V.basis.box_hi());
    P = b2.evaluate(V.points);
  } else {
    const Index N = V.cols();
    P.resize(V.rows(), N * (N + 1) / 2);
    Index col = 0;
    for (Index i = 0; i < N; ++i)
      for (Index j = i; j < N; ++j)
        P.col(col++) = V.values.col(i).cwiseProduct(V.values.col(j));
  }

  Phi2Space p2;
  const std::vector<Index> keep = independent_columns(P);
  p2.V2 = select_columns(P, keep);
  p2.N2 = p2.V2.cols();
  return p2;
}

KernelProjector kernel_projector(const Phi2Space& p2) {
  const Index M = p2.V2.rows();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(p2.V2);
  Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(M, p2.N2);
  return KernelProjector(std::move(Q), M);
}

Eigen::MatrixXd KernelProjector::kernel_basis(Index dense_cap) const {
  const Index M = size();
  if (M > dense_cap) throw DenseCapExceeded(M, dense_cap);
  if (kernel_dim_ == 0) return Eigen::MatrixXd(M, 0);
  // Complete Q to a full orthonormal basis: the trailing columns of the full
  // Q factor of [range_basis | I] restricted, or simply a full QR of Q.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q_);
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(M, M);
  return full.rightCols(kernel_dim_);
}

}  // namespace optdesign
