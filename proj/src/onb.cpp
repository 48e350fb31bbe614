#include "optdesign/onb.hpp"

#include <Eigen/QR>
#include <cmath>

namespace optdesign {

namespace {

// One pivoted-QR orthogonalization pass: given the current basis evaluations
// Vt, factor diag(a) Vt and return Vt P R^{-1}. Fills absolute R-diagonal.
Eigen::MatrixXd onb_pass(const Eigen::VectorXd& a, const Eigen::MatrixXd& Vt,
                         Eigen::VectorXd& rdiag) {
  const Index N = Vt.cols();
  const Eigen::MatrixXd A = a.asDiagonal() * Vt;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd R =
      qr.matrixR().topLeftCorner(N, N).triangularView<Eigen::Upper>();
  rdiag = R.diagonal().cwiseAbs();

  const double scale =
      static_cast<double>(A.rows()) * A.norm() * kUnitRoundoff;
  if (!(rdiag.minCoeff() > scale)) throw SupportRankDeficient();

  Eigen::MatrixXd Vp = Vt * qr.colsPermutation();
  return R.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(Vp);
}

}  // namespace

WeightedONB weighted_onb(const VandermondeMatrix& V, const SqrtDesign& z) {
  if (z.size() != V.rows())
    throw InvalidConfig("sqrt-design length does not match candidate count");

  // |z| keeps the weighted inner product identical to the z^2 product while
  // avoiding sign artifacts.
  const Eigen::VectorXd a = z.z.cwiseAbs();

  WeightedONB onb;
  Eigen::VectorXd rdiag1, rdiag2;
  Eigen::MatrixXd V1 = onb_pass(a, V.values, rdiag1);
  onb.Vtilde = onb_pass(a, V1, rdiag2);

  // Column pivoting sorts the R diagonal, so this ratio estimates cond(A).
  onb.condition_estimate = rdiag1.maxCoeff() / rdiag1.minCoeff();

  // G(z^2) = (diag|z| V)^t (diag|z| V) = P R1^t R1 P^t up to the second-pass
  // correction, so log det G = 2 sum log |R1_ii| + 2 sum log |R2_ii|.
  onb.logdet_G = 2.0 * (rdiag1.array().log().sum() + rdiag2.array().log().sum());
  return onb;
}

Eigen::VectorXd bergman(const WeightedONB& onb) {
  return onb.Vtilde.rowwise().squaredNorm();
}

}  // namespace optdesign
