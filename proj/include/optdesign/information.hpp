// Information (Gram) matrices and the design energies E and F.
#pragma once

#include <Eigen/Core>
#include <limits>

#include "optdesign/design.hpp"
#include "optdesign/vandermonde.hpp"

namespace optdesign {

struct InformationMatrix {
  Eigen::MatrixXd G;  // N x N symmetric PSD
  double logdet = -std::numeric_limits<double>::infinity();
  bool singular = true;
};

// G = V^t diag(w) V computed as A^t A with A = diag(sqrt(w)) V. A singular G
// is a valid result (flagged, logdet = -inf).
InformationMatrix gram_matrix(const VandermondeMatrix& V, const Design& w);

// Design energy E(w) = -(1/N) log det G(w) + ||w||_1. Returns +inf when G is
// singular. Throws NegativeWeight when any w_i < 0.
double energy_E(const VandermondeMatrix& V, const Design& w);

// F(z) = E(s(z)); sign-invariant, defined for all z.
double energy_F(const VandermondeMatrix& V, const SqrtDesign& z);

}  // namespace optdesign
