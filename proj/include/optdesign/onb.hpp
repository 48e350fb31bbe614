// Weighted orthonormal bases via two QR passes, and the Bergman function.
#pragma once

#include <Eigen/Core>

#include "optdesign/design.hpp"
#include "optdesign/vandermonde.hpp"

namespace optdesign {

// Evaluations of the w-orthonormal basis of Phi at all candidate points,
// for w = z^2: Vtilde^t diag(z^2) Vtilde = I.
struct WeightedONB {
  Eigen::MatrixXd Vtilde;          // M x N
  double condition_estimate = 1;   // of diag(|z|) V, from the pivoted R diagonal
  double logdet_G = 0;             // log det G(z^2), from the first-pass R diagonal
};

// Orthogonalizes diag(|z|) V by two column-pivoted QR factorizations.
// Throws SupportRankDeficient when a pivot falls below M * ||A||_F * u.
WeightedONB weighted_onb(const VandermondeMatrix& V, const SqrtDesign& z);

// Bergman values B_i = K(x_i, x_i; w) = sum_j Vtilde[i][j]^2.
Eigen::VectorXd bergman(const WeightedONB& onb);

}  // namespace optdesign
