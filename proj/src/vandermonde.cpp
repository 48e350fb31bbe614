#include "optdesign/vandermonde.hpp"

#include <Eigen/SVD>

namespace optdesign {

VandermondeMatrix build_vandermonde(const CandidateSet& X, const BasisSpec& basis) {
  BasisSpec b = basis;
  if (b.kind() == BasisKind::kChebyshevTotalDegree && !b.has_box()) {
    auto [lo, hi] = X.bounding_box();
    b.set_box(lo, hi);
  }

  VandermondeMatrix V;
  V.basis = b;
  V.points = X.points();
  V.values = b.evaluate(X.points());

  const Index M = V.rows(), N = V.cols();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(V.values);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = static_cast<double>(M) * sv[0] * kUnitRoundoff;
  V.rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > thr) ++V.rank;
  if (V.rank < N) throw RankDeficient(N, V.rank);
  return V;
}

}  // namespace optdesign
