// Exact gradients and Hessians of E and F from the weighted ONB.
#pragma once

#include <Eigen/Core>

#include "optdesign/onb.hpp"

namespace optdesign {

inline constexpr Index kDefaultDenseCap = 4000;

// grad E(w)_i = 1 - B_i / N.
Eigen::VectorXd grad_E(const WeightedONB& onb);

// Hess E(w) = (K .* K) / N with K = Vtilde Vtilde^t.
// Throws DenseCapExceeded when M exceeds the cap.
Eigen::MatrixXd hess_E(const WeightedONB& onb, Index dense_cap = kDefaultDenseCap);

// grad F(z)_i = 2 z_i (1 - B_i / N).
Eigen::VectorXd grad_F(const SqrtDesign& z, const WeightedONB& onb);

// Hess F(z) = 4 diag(z) Hess E diag(z) + 2 diag(1 - B/N).
Eigen::MatrixXd hess_F(const SqrtDesign& z, const WeightedONB& onb,
                       Index dense_cap = kDefaultDenseCap);

// Matrix-free form of the kernel Hessians. K .* K = W W^t where W has rows
// w_i = (c_ab Vtilde_ia Vtilde_ib)_{a<=b}, c_ab = sqrt(2) off the diagonal,
// so products cost O(M N^2) without forming an M x M matrix.
class KernelHessianOperator {
 public:
  KernelHessianOperator(const SqrtDesign& z, const WeightedONB& onb);

  Index size() const { return z_.size(); }
  const Eigen::VectorXd& bergman() const { return B_; }

  // (Hess E) u = (W W^t u) / N.
  Eigen::VectorXd apply_hess_E(const Eigen::VectorXd& u) const;
  // u^t (Hess E) u = ||W^t u||^2 / N, exact nonnegative form (no
  // cancellation, unlike the dense quadratic form).
  double quad_hess_E(const Eigen::VectorXd& u) const;
  // (Hess F) u.
  Eigen::VectorXd apply_hess_F(const Eigen::VectorXd& u) const;
  // diag(Hess F).
  Eigen::VectorXd diag_hess_F() const;

 private:
  Eigen::VectorXd z_;
  Eigen::VectorXd B_;
  Eigen::MatrixXd W_;  // M x N(N+1)/2
  Index N_ = 0;
};

}  // namespace optdesign
