// Vandermonde matrices V[i][j] = phi_j(x_i) with numerical rank control.
#pragma once

#include <Eigen/Core>

#include "optdesign/basis.hpp"
#include "optdesign/candidate_set.hpp"

namespace optdesign {

struct VandermondeMatrix {
  Eigen::MatrixXd values;  // M x N
  Eigen::MatrixXd points;  // M x n, the candidate points V was built on
  BasisSpec basis;         // box frozen for Chebyshev bases
  Index rank = 0;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

// Evaluates the basis on X; numerical rank uses threshold M * ||V||_2 * u.
// Throws RankDeficient when rank < N.
VandermondeMatrix build_vandermonde(const CandidateSet& X, const BasisSpec& basis);

}  // namespace optdesign
