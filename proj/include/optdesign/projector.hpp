// The product model space Phi^2 on X and the projector onto Ker V(Phi^2)^t.
#pragma once

#include <Eigen/Core>

#include "optdesign/vandermonde.hpp"

namespace optdesign {

struct Phi2Space {
  Eigen::MatrixXd V2;  // M x N2, independent columns spanning Phi^2 on X
  Index N2 = 0;
};

// Basis of Phi^2 = span{phi_i phi_j} evaluated on X. For a Chebyshev
// total-degree basis this uses the degree-2d basis directly; the general
// path forms elementwise products for i <= j. Either way the columns are
// rank-reduced to an independent subset by pivoted QR.
Phi2Space build_phi2(const VandermondeMatrix& V);

// Orthogonal projector onto K = Ker V2^t, held through an orthonormal basis
// Q of range(V2): pi_K(v) = v - Q (Q^t v). The explicit kernel basis Z
// (M x d) is only materialized on demand.
class KernelProjector {
 public:
  KernelProjector() = default;
  KernelProjector(Eigen::MatrixXd Q, Index M)
      : Q_(std::move(Q)), kernel_dim_(M - Q_.cols()) {}

  Index size() const { return Q_.rows(); }
  Index kernel_dim() const { return kernel_dim_; }
  const Eigen::MatrixXd& range_basis() const { return Q_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    if (kernel_dim_ == 0) return Eigen::VectorXd::Zero(v.size());
    return v - Q_ * (Q_.transpose() * v);
  }

  // diag(pi_K)_i = 1 - ||Q_{i,:}||^2.
  Eigen::VectorXd diagonal() const {
    if (kernel_dim_ == 0) return Eigen::VectorXd::Zero(Q_.rows());
    return (1.0 - Q_.rowwise().squaredNorm().array()).matrix();
  }

  // Orthonormal basis Z of the kernel, M x d. O(M^2) memory; guarded.
  Eigen::MatrixXd kernel_basis(Index dense_cap = 4000) const;

 private:
  Eigen::MatrixXd Q_;
  Index kernel_dim_ = 0;
};

KernelProjector kernel_projector(const Phi2Space& p2);

}  // namespace optdesign
