#include "optdesign/calculus.hpp"

#include <cmath>

#include "optdesign/errors.hpp"

namespace optdesign {

Eigen::VectorXd grad_E(const WeightedONB& onb) {
  const double N = static_cast<double>(onb.Vtilde.cols());
  return (1.0 - bergman(onb).array() / N).matrix();
}

Eigen::MatrixXd hess_E(const WeightedONB& onb, Index dense_cap) {
  const Index M = onb.Vtilde.rows();
  if (M > dense_cap) throw DenseCapExceeded(M, dense_cap);
  const double N = static_cast<double>(onb.Vtilde.cols());
  Eigen::MatrixXd K = onb.Vtilde * onb.Vtilde.transpose();
  return K.cwiseProduct(K) / N;
}

Eigen::VectorXd grad_F(const SqrtDesign& z, const WeightedONB& onb) {
  const double N = static_cast<double>(onb.Vtilde.cols());
  return (2.0 * z.z.array() * (1.0 - bergman(onb).array() / N)).matrix();
}

Eigen::MatrixXd hess_F(const SqrtDesign& z, const WeightedONB& onb,
                       Index dense_cap) {
  const double N = static_cast<double>(onb.Vtilde.cols());
  Eigen::MatrixXd H = hess_E(onb, dense_cap);
  H = 4.0 * (z.z * z.z.transpose()).cwiseProduct(H);
  H.diagonal() += (2.0 * (1.0 - bergman(onb).array() / N)).matrix();
  return H;
}

KernelHessianOperator::KernelHessianOperator(const SqrtDesign& z,
                                             const WeightedONB& onb)
    : z_(z.z), B_(optdesign::bergman(onb)), N_(onb.Vtilde.cols()) {
  const Index M = onb.Vtilde.rows();
  const Index p = N_ * (N_ + 1) / 2;
  W_.resize(M, p);
  const double sq2 = std::sqrt(2.0);
  Index col = 0;
  for (Index a = 0; a < N_; ++a) {
    W_.col(col++) = onb.Vtilde.col(a).cwiseAbs2();
    for (Index b = a + 1; b < N_; ++b)
      W_.col(col++) = sq2 * onb.Vtilde.col(a).cwiseProduct(onb.Vtilde.col(b));
  }
}

Eigen::VectorXd KernelHessianOperator::apply_hess_E(const Eigen::VectorXd& u) const {
  return W_ * (W_.transpose() * u) / static_cast<double>(N_);
}

double KernelHessianOperator::quad_hess_E(const Eigen::VectorXd& u) const {
  return (W_.transpose() * u).squaredNorm() / static_cast<double>(N_);
}

Eigen::VectorXd KernelHessianOperator::apply_hess_F(const Eigen::VectorXd& u) const {
  const double N = static_cast<double>(N_);
  Eigen::VectorXd t = z_.cwiseProduct(u);
  Eigen::VectorXd r = W_ * (W_.transpose() * t) / N;
  return 4.0 * z_.cwiseProduct(r) +
         (2.0 * (1.0 - B_.array() / N) * u.array()).matrix();
}

Eigen::VectorXd KernelHessianOperator::diag_hess_F() const {
  const double N = static_cast<double>(N_);
  // diag(Hess E)_i = B_i^2 / N = ||W_i||^2 / N.
  return (4.0 * z_.array().square() * W_.rowwise().squaredNorm().array() / N +
          2.0 * (1.0 - B_.array() / N))
      .matrix();
}

}  // namespace optdesign
